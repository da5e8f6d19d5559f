"""Command-line entry points: ``pairfilter jsa|rates|optimize|entangle|sweep``.

Every command emits a long-format table (CSV by default). Output goes to
``--out``, else to ``$PAIRFILTER_OUT_DIR/<command>.<format>`` when that is set,
else to stdout. Validity flags and numeric warnings are echoed to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import detection, entanglement, gaussian, reference, scenario, spectral, units
from .errors import PairFilterError


def _table(axes, rows, **prov):
    provenance = {"toolkit": f"pairfilter {scenario.VERSION}"}
    provenance.update(prov)
    provenance["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return scenario.SweepResult(list(axes), rows, provenance)


def _rows(prefix, values, flags=()):
    fl = ";".join(flags)
    out = []
    for q, v in values.items():
        v = float(v)
        f = fl
        if math.isnan(v):
            f = f"{fl};undefined" if fl else "undefined"
        elif math.isinf(v):
            f = f"{fl};infinite" if fl else "infinite"
        out.append(tuple(prefix) + (q, v, f))
    return out


# shared argument groups


def _add_output(p):
    p.add_argument("--out", type=Path, help="output file (default: $PAIRFILTER_OUT_DIR/<command>.<format> or stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_source(p):
    g = p.add_argument_group("pair source")
    g.add_argument("--pump-fwhm-ps", type=float, default=reference.REFERENCE_PUMP_FWHM_PS)
    g.add_argument("--pm-sigma", type=float, default=reference.REFERENCE_PM_SIGMA, help="phase-matching width (rad/s)")
    g.add_argument("--pm-angle", type=float, default=reference.REFERENCE_PM_ANGLE, help="phase-matching angle (rad)")
    g.add_argument("--center-nm", type=float, default=spectral.DEFAULT_CENTER_NM)
    g.add_argument("--phase-matching", choices=("sinc", "gaussian"), default="sinc")
    g.add_argument("--points", type=int, default=512, help="JSA grid points per axis")


def _add_filters(p):
    g = p.add_argument_group("filters")
    g.add_argument("--filter-shape", choices=("gaussian", "flat_top", "all_pass"), default="gaussian")
    g.add_argument("--fwhm-pm", type=float, default=50.0)
    g.add_argument("--order", type=int, default=4, help="flat-top order")
    g.add_argument("--filter-csv", type=Path, help="tabulated filter (pm detuning, transmission) for both photons")


def _add_channels(p):
    g = p.add_argument_group("channels")
    g.add_argument("--eta-s", type=float, default=0.1)
    g.add_argument("--eta-i", type=float, default=0.1)
    g.add_argument("--noise-rate-s", type=float, default=0.0, help="gated noise counts/s at the signal detector")
    g.add_argument("--noise-rate-i", type=float, default=0.0, help="gated noise counts/s at the idler detector")
    g.add_argument("--dark-rate", type=float, default=0.0, help="dark counts/s per detector")
    g.add_argument("--delta-t-ps", type=float, default=300.0, help="coincidence window")
    g.add_argument("--rep-rate-hz", type=float, default=reference.REP_RATE_HZ)


def _source(args):
    omega0 = float(units.wavelength_nm_to_omega(args.center_nm))
    return spectral.SourceSpec(
        pm_sigma=args.pm_sigma,
        pm_angle=args.pm_angle,
        pump_fwhm_ps=args.pump_fwhm_ps,
        center_s=omega0,
        center_i=omega0,
    )


def _filters(args, source):
    if args.filter_csv is not None:
        f = spectral.load_filter_csv(args.filter_csv, args.center_nm)
        return f, f
    if args.filter_shape == "all_pass":
        return spectral.FilterSpec.all_pass(source.center_s), spectral.FilterSpec.all_pass(source.center_i)
    return spectral.symmetric_filters(args.filter_shape, args.fwhm_pm, source, args.center_nm, args.order)


def _channels(args, fwhm_pm):
    dt = args.delta_t_ps * 1e-12
    out = []
    for eta, rate in ((args.eta_s, args.noise_rate_s), (args.eta_i, args.noise_rate_i)):
        density = 0.0
        if rate > 0.0:
            density = detection.effective_density_from_gated(rate, args.rep_rate_hz, fwhm_pm * 1e-3, dt)
        out.append(
            detection.ChannelSpec(
                eta_r=eta,
                noise_density=density,
                delta_lambda_nm=fwhm_pm * 1e-3,
                delta_t=dt,
                dark_rate=args.dark_rate,
                noise_reference="detector",
            )
        )
    return tuple(out)


def _mu_from_args(args):
    if args.mu is not None:
        return spectral.MuTriple(*args.mu)
    source = _source(args)
    f_s, f_i = _filters(args, source)
    jsa = spectral.build_jsa(source, spectral.GridConfig(points=args.points), args.phase_matching)
    return spectral.filtered_means(jsa, f_s, f_i)


# commands


def cmd_jsa(args):
    source = _source(args)
    f_s, f_i = _filters(args, source)
    jsa = spectral.build_jsa(source, spectral.GridConfig(points=args.points), args.phase_matching)
    if args.export_grid is not None:
        spectral.export_jsa_csv(jsa, args.export_grid, args.center_nm)
    mu = spectral.filtered_means(jsa, f_s, f_i)
    purity = spectral.schmidt_purity(jsa, f_s, f_i)
    rows = _rows(
        ["quadrature"],
        dict(
            mu_s=mu.mu_s,
            mu_i=mu.mu_i,
            mu_both=mu.mu_both,
            delta_s=_num(mu.delta_s),
            delta_i=_num(mu.delta_i),
            delta_ps=_num(mu.delta_ps),
            purity=purity,
        ),
        mu.flags,
    )
    if all(f.shape == "gaussian" for f in (f_s, f_i)):
        rep = gaussian.report_for_filters(source, f_s, f_i)
        rows += _rows(
            ["closed_form"],
            dict(
                mu_s=rep.gamma_s,
                mu_i=rep.gamma_i,
                mu_both=rep.gamma_both,
                delta_s=rep.delta_s,
                delta_i=rep.delta_i,
                delta_ps=rep.delta_ps,
                purity=rep.purity,
            ),
            rep.flags,
        )
    else:
        _note("closed form skipped: it supports gaussian filters only")
    return _table(["method"], rows, grid_points=args.points, phase_matching=args.phase_matching)


def _num(x):
    return math.nan if x is None else x


def cmd_rates(args):
    mu = _mu_from_args(args)
    fwhm_pm = args.fwhm_pm if args.filter_csv is None else spectral.filter_noise_bandwidth_pm(_filters(args, None)[0])
    ch_s, ch_i = _channels(args, fwhm_pm)
    targets = [mu.mu_s] if args.mu_s is None else _grid(args.mu_s)
    rows = []
    for report in detection.car_curve(targets, mu, ch_s, ch_i):
        m = report.mu
        rows += _rows(
            [m.mu_s],
            dict(
                mu_i=m.mu_i,
                mu_both=m.mu_both,
                S_s=report.S_s,
                S_i=report.S_i,
                C=report.C,
                A=report.A,
                CAR=report.CAR,
                SNR_s=report.SNR_s,
                SNR_i=report.SNR_i,
            ),
            report.flags,
        )
    return _table(["mu_s"], rows)


def _grid(spec):
    """``[lo, hi, n]`` on a log scale, or an explicit list of values."""
    if len(spec) == 3 and spec[2] == int(spec[2]) and spec[2] > 2 and spec[0] < spec[1]:
        return list(np.logspace(math.log10(spec[0]), math.log10(spec[1]), int(spec[2])))
    return list(spec)


def cmd_optimize(args):
    d_s = args.delta_s if args.delta_s is not None else args.delta_ps
    d_i = args.delta_i if args.delta_i is not None else args.delta_ps
    rows = []
    if d_s is not None and d_i is not None:
        opt = detection.mu_opt_and_car_max(d_s, d_i, args.eta_s, args.eta_i, args.D_s, args.D_i)
        rows += _rows(["car"], dict(mu_both_opt=opt.mu_both_opt, CAR_max=opt.car_max, delta_ps=opt.delta_ps), opt.flags)
    if args.threshold is not None:
        thr = entanglement.THRESHOLDS.get(args.threshold)
        thr = float(args.threshold) if thr is None else thr
        if args.idealized:
            receiver, src, ch_s, ch_i = reference.idealized_timebin(v_int=args.v_int)
        else:
            receiver, src, ch_s, ch_i = reference.timebin_experiment(v_int=args.v_int)
        lo, hi = args.power_range
        for basis in ("x", "z"):
            p = entanglement.threshold_crossing(basis, receiver, src, ch_s, ch_i, thr, lo, hi, args.optimize_mu)
            flags = () if p is not None else ("not_bracketed",)
            rows += _rows([f"power_{basis}"], {"max_power_dbm": _num(p)}, flags)
    if not rows:
        raise PairFilterError("nothing to optimize: give --delta-ps (or --delta-s/--delta-i) and/or --threshold")
    return _table(["target"], rows)


def cmd_entangle(args):
    if args.idealized:
        receiver, src, ch_s, ch_i = reference.idealized_timebin(v_int=args.v_int)
    else:
        receiver, src, ch_s, ch_i = reference.timebin_experiment(v_int=args.v_int)
    if args.mu is not None:
        src = entanglement.EntangledSource(spectral.MuTriple(*args.mu), args.v_int)
    receiver = entanglement.Receiver(args.receiver, not args.no_polarization_filtering)
    if args.power_dbm is None:
        powers = [-math.inf]
    elif len(args.power_dbm) == 3:
        lo, hi, n = args.power_dbm
        powers = list(np.linspace(lo, hi, int(n)))
    else:
        powers = list(args.power_dbm)
    rows = []
    for p in powers:
        vals, flags = {}, []
        for b in ("x", "y", "z"):
            v, m, fl = entanglement.visibility_at_power(p, b, receiver, src, ch_s, ch_i, args.optimize_mu)
            vals[f"V_{b}"] = v
            vals[f"mu_both_{b}"] = m
            flags += [f"{b}:{f}" for f in fl]
        rows += _rows([p], vals, flags)
    return _table(["power_dbm"], rows, receiver=receiver.variant, v_int=src.v_int)


def cmd_sweep(args):
    return scenario.run_scenario(args.scenario, workers=args.workers)


def build_parser():
    parser = argparse.ArgumentParser(prog="pairfilter", description="Filtered photon-pair rate and visibility models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jsa", help="pass fractions, heralding efficiencies and purity")
    _add_source(p)
    _add_filters(p)
    p.add_argument("--export-grid", type=Path, help="also write the sampled joint spectral intensity here")
    _add_output(p)
    p.set_defaults(func=cmd_jsa)

    p = sub.add_parser("rates", help="singles, coincidences, accidentals, CAR and SNR")
    _add_source(p)
    _add_filters(p)
    _add_channels(p)
    p.add_argument("--mu", type=float, nargs=3, metavar=("MU_S", "MU_I", "MU_BOTH"), help="skip the JSA and use these photon numbers")
    p.add_argument("--mu-s", type=float, nargs="+", metavar="V", help="rescale the pump to these mu_s values; LO HI N gives a log grid")
    _add_output(p)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("optimize", help="CAR-optimal pump and the highest tolerable classical power")
    p.add_argument("--delta-ps", type=float)
    p.add_argument("--delta-s", type=float)
    p.add_argument("--delta-i", type=float)
    p.add_argument("--eta-s", type=float, default=0.1)
    p.add_argument("--eta-i", type=float, default=0.1)
    p.add_argument("--D-s", type=float, default=1e-4, help="noise probability per gate")
    p.add_argument("--D-i", type=float, default=1e-4)
    p.add_argument("--threshold", help="visibility threshold: qkd, nonlocality or a number (time-bin reference link)")
    p.add_argument("--power-range", type=float, nargs=2, default=(-30.0, 20.0), metavar=("LO_DBM", "HI_DBM"))
    p.add_argument("--optimize-mu", action="store_true")
    p.add_argument("--idealized", action="store_true", help="perfect heralding and no source loss")
    p.add_argument("--v-int", type=float, default=entanglement.DEFAULT_V_INT)
    _add_output(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("entangle", help="visibilities of the time-bin reference link")
    p.add_argument("--receiver", choices=entanglement.RECEIVERS, default=entanglement.INTERFEROMETER)
    p.add_argument("--no-polarization-filtering", action="store_true")
    p.add_argument("--v-int", type=float, default=entanglement.DEFAULT_V_INT)
    p.add_argument("--mu", type=float, nargs=3, metavar=("MU_S", "MU_I", "MU_BOTH"))
    p.add_argument("--power-dbm", type=float, nargs="+", help="launch powers; LO HI N gives a linear grid")
    p.add_argument("--optimize-mu", action="store_true")
    p.add_argument("--idealized", action="store_true", help="perfect heralding and no source loss")
    _add_output(p)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("sweep", help="run a scenario file")
    p.add_argument("scenario", type=Path)
    p.add_argument("--workers", type=int)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def _note(msg):
    print(f"pairfilter: note: {msg}", file=sys.stderr)


def _report_flags(result):
    seen = {}
    for r in result.rows:
        for f in filter(None, r[-1].split(";")):
            seen[f] = seen.get(f, 0) + 1
    for f, n in seen.items():
        _note(f"{n} row(s) flagged {f}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result = args.func(args)
        except PairFilterError as exc:
            print(f"pairfilter: error: {exc}", file=sys.stderr)
            return 1
        except OSError as exc:
            print(f"pairfilter: error: {exc}", file=sys.stderr)
            return 1
    for w in caught:
        _note(str(w.message))
    _report_flags(result)
    out = args.out or scenario.default_output_path(args.command, args.format)
    if out is None:
        sys.stdout.write(scenario.to_text(result, args.format))
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        result.write(out, args.format)
        _note(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
