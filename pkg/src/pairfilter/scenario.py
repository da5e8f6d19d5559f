"""Scenario files, parameter sweeps and long-format result tables.

A scenario is a JSON document describing a pair source, its filters, the two
channels and optionally an entanglement receiver, plus sweep axes. Every
combination of axis values is evaluated independently; results are emitted
one row per (grid point, quantity).
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path

import jsonschema
import numpy as np

from . import detection, entanglement, gaussian, spectral, units
from .errors import PairFilterError, ScenarioError

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("artifact")
except Exception:  # pragma: no cover - running from a source tree
    VERSION = "0.1.0"

OUT_DIR_ENV = "PAIRFILTER_OUT_DIR"

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_UNIT = {"type": "number", "minimum": 0, "maximum": 1}

_FILTER = {
    "type": "object",
    "additionalProperties": False,
    "required": ["shape"],
    "properties": {
        "shape": {"enum": ["gaussian", "flat_top", "tabulated", "all_pass"]},
        "fwhm_pm": _POS,
        "order": {"type": "integer", "minimum": 1},
        "table_csv": {"type": "string"},
        "offset_pm": _NUM,
    },
}

_CHANNEL = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "eta_c": _UNIT,
        "eta_ch": _UNIT,
        "eta_r": _UNIT,
        "source_loss_db": _NONNEG,
        "span_loss_db": _NONNEG,
        "receiver_loss_db": _NONNEG,
        "theta_pol": _NUM,
        "alpha_pol": _UNIT,
        "noise_density": _NONNEG,
        "gated_noise_rate": _NONNEG,
        "noise_reference": {"enum": ["fiber", "detector"]},
        "noise_per_mw": _NONNEG,
        "dark_rate": _NONNEG,
        "delta_lambda_nm": _NONNEG,
    },
}

_AXIS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "path": {"type": "string", "minLength": 1},
        "paths": {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 1},
        "values": {"type": "array", "minItems": 1},
        "logspace": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
        "linspace": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
    },
    "oneOf": [{"required": ["path"]}, {"required": ["paths"]}],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["source", "filters"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "source": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pump_fwhm_ps": _POS,
                "pump_sigma": _POS,
                "pm_sigma": _POS,
                "pm_angle": _NUM,
                "mu_total": _NONNEG,
                "center_nm": _POS,
                "mu": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["mu_s", "mu_i", "mu_both"],
                    "properties": {"mu_s": _NONNEG, "mu_i": _NONNEG, "mu_both": _NONNEG},
                },
            },
        },
        "pin": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {"mu_s": _POS, "mu_i": _POS, "mu_both": _POS},
        },
        "filters": {
            "type": "object",
            "additionalProperties": False,
            "required": ["signal", "idler"],
            "properties": {"signal": _FILTER, "idler": _FILTER, "delta_t_ps": _NONNEG},
        },
        "channels": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "signal": _CHANNEL,
                "idler": _CHANNEL,
                "launch_power_dbm": _NUM,
                "rep_rate_hz": _POS,
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "jsa": {"enum": ["auto", "closed_form", "quadrature"]},
                "phase_matching": {"enum": ["sinc", "gaussian"]},
                "grid_points": {"type": "integer", "minimum": 8},
                "purity": {"type": "boolean"},
            },
        },
        "entanglement": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "receiver": {"enum": list(entanglement.RECEIVERS)},
                "polarization_filtering": {"type": "boolean"},
                "v_int": _UNIT,
                "optimize_mu": {"type": "boolean"},
                "crossing_search_dbm": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            },
        },
        "sweep": {"type": "array", "items": _AXIS},
        "outputs": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    },
}

SPECTRAL_QUANTITIES = ("mu_s", "mu_i", "mu_both", "delta_s", "delta_i", "delta_ps", "purity")
RATE_QUANTITIES = ("S_s", "S_i", "C", "A", "CAR", "SNR_s", "SNR_i", "mu_both_opt", "CAR_max")
ENTANGLEMENT_QUANTITIES = ("V_x", "V_y", "V_z", "mu_both_x", "mu_both_z")
CROSSING_QUANTITIES = tuple(
    f"P_{b}_{t}_dbm" for b in ("x", "z") for t in entanglement.THRESHOLDS
)
ALL_QUANTITIES = SPECTRAL_QUANTITIES + RATE_QUANTITIES + ENTANGLEMENT_QUANTITIES + CROSSING_QUANTITIES


def _format_error(err):
    where = "/".join(str(p) for p in err.absolute_path) or "<root>"
    return f"{where}: {err.message}"


def validate(doc):
    """Schema and consistency checks; raises :class:`ScenarioError` listing every problem."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path])
    msgs = [_format_error(e) for e in errors]
    try:
        msgs.extend(m for m in _semantic_errors(doc) if m not in msgs)
    except (KeyError, TypeError, AttributeError, ValueError):
        # structure already reported by the schema
        pass
    if msgs:
        raise ScenarioError(msgs)


def _semantic_errors(doc):
    msgs = []
    src = doc["source"]
    if "mu" in src:
        extra = sorted(set(src) - {"mu", "center_nm"})
        if extra:
            msgs.append(f"source: a fixed 'mu' triple excludes {extra}")
    else:
        if ("pump_fwhm_ps" in src) == ("pump_sigma" in src):
            msgs.append("source: give exactly one of pump_fwhm_ps or pump_sigma")
        for k in ("pm_sigma", "pm_angle"):
            if k not in src:
                msgs.append(f"source: '{k}' is required unless a fixed 'mu' triple is given")
    for side in ("signal", "idler"):
        f = doc["filters"][side]
        if f["shape"] in ("gaussian", "flat_top") and "fwhm_pm" not in f:
            msgs.append(f"filters/{side}: '{f['shape']}' needs fwhm_pm")
        if f["shape"] == "tabulated" and "table_csv" not in f:
            msgs.append(f"filters/{side}: 'tabulated' needs table_csv")
        ch = doc.get("channels", {}).get(side, {})
        for lin, db in (("eta_c", "source_loss_db"), ("eta_ch", "span_loss_db"), ("eta_r", "receiver_loss_db")):
            if lin in ch and db in ch:
                msgs.append(f"channels/{side}: give {lin} or {db}, not both")
        if "noise_density" in ch and "gated_noise_rate" in ch:
            msgs.append(f"channels/{side}: give noise_density or gated_noise_rate, not both")
    if doc.get("model", {}).get("jsa") == "closed_form":
        for side in ("signal", "idler"):
            if doc["filters"][side]["shape"] not in ("gaussian", "all_pass"):
                msgs.append(f"filters/{side}: closed-form model supports gaussian filters only")
    unknown = sorted(set(doc.get("outputs", ())) - set(ALL_QUANTITIES))
    if unknown:
        msgs.append(f"outputs: unknown quantities {unknown}")
    for k, axis in enumerate(doc.get("sweep", ())):
        paths = axis.get("paths") or [axis.get("path")]
        for p in paths:
            if not _path_exists(doc, p):
                msgs.append(f"sweep/{k}: parameter path '{p}' does not exist in the scenario")
        n_sources = sum(key in axis for key in ("values", "logspace", "linspace"))
        if n_sources != 1:
            msgs.append(f"sweep/{k}: give exactly one of values, logspace, linspace")
        else:
            vals = axis_values(axis)
            if len(vals) == 0:
                msgs.append(f"sweep/{k}: axis has no values")
            elif any(isinstance(v, float) and not math.isfinite(v) for v in _flat(vals)):
                msgs.append(f"sweep/{k}: axis values must be finite")
            if "paths" in axis and any(isinstance(v, list) for v in vals):
                if not all(isinstance(v, list) and len(v) == len(paths) for v in vals):
                    msgs.append(f"sweep/{k}: zipped values need one entry per path ({len(paths)})")
    return msgs


def _flat(values):
    for v in values:
        if isinstance(v, list):
            yield from v
        else:
            yield v


def _path_exists(doc, path):
    node = doc
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return False
        node = node[part]
    return True


def _set_path(doc, path, value):
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        node = node[part]
    node[parts[-1]] = value


def axis_values(axis):
    if "values" in axis:
        return list(axis["values"])
    if "logspace" in axis:
        a, b, n = axis["logspace"]
        return [float(v) for v in np.logspace(a, b, int(n))]
    a, b, n = axis["linspace"]
    return [float(v) for v in np.linspace(a, b, int(n))]


def axis_names(doc):
    return [axis.get("name") or (axis.get("paths") or [axis.get("path")])[0] for axis in doc.get("sweep", ())]


def grid_points(doc):
    """Concrete scenario documents for every sweep combination, in grid order.

    An axis with several ``paths`` sets all of them to each value, or, when
    the values are lists, sets them pairwise (a zipped axis). The axis label
    of a zipped value is its first entry.
    """
    axes = doc.get("sweep", [])
    values = [axis_values(a) for a in axes]
    for combo in itertools.product(*values):
        point = copy.deepcopy(doc)
        point.pop("sweep", None)
        for axis, v in zip(axes, combo):
            paths = axis.get("paths") or [axis["path"]]
            parts = v if isinstance(v, list) else [v] * len(paths)
            for p, part in zip(paths, parts):
                _set_path(point, p, part)
        yield tuple(v[0] if isinstance(v, list) else v for v in combo), point


# building model objects


def _center_nm(doc):
    return float(doc["source"].get("center_nm", spectral.DEFAULT_CENTER_NM))


def build_source(doc, base_dir=None):
    src = doc["source"]
    center = _center_nm(doc)
    omega0 = float(units.wavelength_nm_to_omega(center))
    if "mu" in src:
        return None
    return spectral.SourceSpec(
        pm_sigma=float(src["pm_sigma"]),
        pm_angle=float(src["pm_angle"]),
        pump_sigma=src.get("pump_sigma"),
        pump_fwhm_ps=src.get("pump_fwhm_ps"),
        mu_total=float(src.get("mu_total", 1.0)),
        center_s=omega0,
        center_i=omega0,
    )


def build_filter(fdoc, center_nm, base_dir=None):
    shape = fdoc["shape"]
    offset = float(fdoc.get("offset_pm", 0.0))
    if shape == "all_pass":
        return spectral.FilterSpec.all_pass(float(units.wavelength_nm_to_omega(center_nm)))
    if shape == "tabulated":
        path = Path(fdoc["table_csv"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return spectral.load_filter_csv(path, center_nm, offset)
    return spectral.FilterSpec.from_pm(shape, float(fdoc["fwhm_pm"]), center_nm, fdoc.get("order"), offset)


def build_channel(cdoc, filt, center_nm, delta_t, rep_rate_hz, launch_power_mw):
    def eta(lin, db):
        if lin in cdoc:
            return float(cdoc[lin])
        if db in cdoc:
            return float(units.db_to_linear(cdoc[db]))
        return 1.0

    if "delta_lambda_nm" in cdoc:
        dl = float(cdoc["delta_lambda_nm"])
    else:
        dl = 0.0 if filt.is_all_pass else filt.fwhm_pm(center_nm) * 1e-3
    reference = cdoc.get("noise_reference", "fiber")
    density = float(cdoc.get("noise_density", 0.0))
    if "gated_noise_rate" in cdoc:
        if dl <= 0.0 or delta_t <= 0.0:
            raise ScenarioError(["channels: gated_noise_rate needs a finite filter bandwidth and a window"])
        density = detection.effective_density_from_gated(float(cdoc["gated_noise_rate"]), rep_rate_hz, dl, delta_t)
        reference = "detector"
    return detection.ChannelSpec(
        eta_c=eta("eta_c", "source_loss_db"),
        eta_ch=eta("eta_ch", "span_loss_db"),
        eta_r=eta("eta_r", "receiver_loss_db"),
        theta_pol=float(cdoc.get("theta_pol", 0.0)),
        alpha_pol=float(cdoc.get("alpha_pol", 0.5)),
        noise_density=density,
        delta_lambda_nm=dl,
        delta_t=delta_t,
        dark_rate=float(cdoc.get("dark_rate", 0.0)),
        noise_reference=reference,
        noise_per_mw=float(cdoc.get("noise_per_mw", 0.0)),
        launch_power_mw=launch_power_mw,
    )


@dataclass(frozen=True)
class SpectralResult:
    mu: spectral.MuTriple
    purity: float | None
    flags: tuple


def _spectral(source, f_s, f_i, *args):
    # tables are excluded from FilterSpec equality, so they cannot key the cache
    if "tabulated" in (f_s.shape, f_i.shape):
        return _spectral_uncached(source, f_s, f_i, *args)
    return _spectral_cached(source, f_s, f_i, *args)


def _spectral_uncached(source, f_s, f_i, method, phase_matching, grid_points, want_purity):
    flags = []
    gaussian_ok = all(f.shape == "gaussian" for f in (f_s, f_i))
    if method == "auto":
        method = "closed_form" if gaussian_ok and phase_matching == "gaussian" else "quadrature"
    if method == "closed_form":
        rep = gaussian.report_for_filters(source, f_s, f_i)
        flags.extend(rep.flags)
        mu = spectral.MuTriple(
            source.mu_total * rep.gamma_s,
            source.mu_total * rep.gamma_i,
            source.mu_total * rep.gamma_both,
            rep.delta_s,
            rep.delta_i,
        )
        return SpectralResult(mu, rep.purity if want_purity else None, tuple(flags))
    jsa = spectral.build_jsa(source, spectral.GridConfig(points=grid_points), phase_matching)
    mu = spectral.filtered_means(jsa, f_s, f_i)
    flags.extend(mu.flags)
    purity = spectral.schmidt_purity(jsa, f_s, f_i) if want_purity else None
    return SpectralResult(mu, purity, tuple(flags))


_spectral_cached = lru_cache(maxsize=256)(_spectral_uncached)


def _pin(mu, pin):
    if not pin:
        return mu
    (key, target), = pin.items()
    current = getattr(mu, key)
    if current <= 0.0:
        raise PairFilterError(f"cannot pin {key}: the filters pass no photons")
    return mu.scaled(float(target) / current)


@dataclass
class PointResult:
    values: dict
    flags: list = field(default_factory=list)
    # flags that concern a single quantity
    qflags: dict = field(default_factory=dict)

    def note(self, quantity, flag):
        self.qflags.setdefault(quantity, []).append(flag)


def evaluate(doc, base_dir=None) -> PointResult:
    """All quantities for one concrete (sweep-free) scenario document."""
    res = PointResult({})
    center = _center_nm(doc)
    model = doc.get("model", {})
    f_s = build_filter(doc["filters"]["signal"], center, base_dir)
    f_i = build_filter(doc["filters"]["idler"], center, base_dir)
    source = build_source(doc, base_dir)
    if source is None:
        m = doc["source"]["mu"]
        mu = spectral.MuTriple(float(m["mu_s"]), float(m["mu_i"]), float(m["mu_both"]))
        purity = None
    else:
        sr = _spectral(
            source,
            f_s,
            f_i,
            model.get("jsa", "auto"),
            model.get("phase_matching", "sinc"),
            int(model.get("grid_points", 512)),
            bool(model.get("purity", True)),
        )
        mu, purity = sr.mu, sr.purity
        res.flags.extend(sr.flags)
    mu = _pin(mu, doc.get("pin"))
    v = res.values
    v.update(mu_s=mu.mu_s, mu_i=mu.mu_i, mu_both=mu.mu_both)
    v["delta_s"] = math.nan if mu.delta_s is None else mu.delta_s
    v["delta_i"] = math.nan if mu.delta_i is None else mu.delta_i
    v["delta_ps"] = math.nan if mu.delta_ps is None else mu.delta_ps
    if purity is not None:
        v["purity"] = purity
    for f in mu.flags:
        if f not in res.flags:
            res.flags.append(f)

    chans = doc.get("channels")
    if chans is None:
        return res
    delta_t = float(doc["filters"].get("delta_t_ps", 0.0)) * 1e-12
    rep = float(chans.get("rep_rate_hz", 200e6))
    p_dbm = chans.get("launch_power_dbm")
    p_mw = 0.0 if p_dbm is None else float(units.dbm_to_mw(p_dbm))
    ch_s = build_channel(chans.get("signal", {}), f_s, center, delta_t, rep, p_mw)
    ch_i = build_channel(chans.get("idler", {}), f_i, center, delta_t, rep, p_mw)
    rr = detection.coincidences(mu, ch_s, ch_i)
    v.update(S_s=rr.S_s, S_i=rr.S_i, C=rr.C, A=rr.A, CAR=rr.CAR, SNR_s=rr.SNR_s, SNR_i=rr.SNR_i)
    res.flags.extend(f for f in rr.flags if f not in res.flags)
    if mu.mu_both > 0 and mu.delta_s and mu.delta_i and ch_s.eta > 0 and ch_i.eta > 0:
        opt = detection.optimum_for_mu_triple(mu, ch_s, ch_i)
        v.update(mu_both_opt=opt.mu_both_opt, CAR_max=opt.car_max)
        for x in opt.flags:
            res.note("mu_both_opt", x)
            res.note("CAR_max", x)

    ent = doc.get("entanglement")
    if ent is None:
        return res
    receiver = entanglement.Receiver(
        ent.get("receiver", entanglement.INTERFEROMETER), bool(ent.get("polarization_filtering", False))
    )
    esrc = entanglement.EntangledSource(mu, float(ent.get("v_int", entanglement.DEFAULT_V_INT)))
    optimize = bool(ent.get("optimize_mu", False))
    p_point = -math.inf if p_dbm is None else float(p_dbm)
    for b in ("x", "y", "z"):
        vis, mu_used, fl = entanglement.visibility_at_power(p_point, b, receiver, esrc, ch_s, ch_i, optimize)
        v[f"V_{b}"] = vis
        if b != "y":
            v[f"mu_both_{b}"] = mu_used
        for x in fl:
            res.note(f"V_{b}", x)
            if b != "y":
                res.note(f"mu_both_{b}", x)
    if "crossing_search_dbm" in ent:
        lo, hi = (float(x) for x in ent["crossing_search_dbm"])
        for b in ("x", "z"):
            for name, thr in entanglement.THRESHOLDS.items():
                cross = entanglement.threshold_crossing(b, receiver, esrc, ch_s, ch_i, thr, lo, hi, optimize)
                key = f"P_{b}_{name}_dbm"
                if cross is None:
                    v[key] = math.nan
                    res.note(key, "not_bracketed")
                else:
                    v[key] = cross
    return res


# results


@dataclass
class SweepResult:
    """Long-format rows plus provenance.

    ``rows`` are ``(axis values..., quantity, value, flags)`` tuples.
    """

    axes: list
    rows: list
    provenance: dict

    @property
    def columns(self):
        return list(self.axes) + ["quantity", "value", "flags"]

    def values(self, quantity):
        return [r[-2] for r in self.rows if r[-3] == quantity]

    def to_csv(self, fh, timestamp=True):
        for k, val in self.provenance.items():
            if k == "generated" and not timestamp:
                continue
            fh.write(f"# {k}: {val}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([format_value(x) for x in r])

    def to_json(self, fh):
        json.dump(
            {
                "provenance": self.provenance,
                "columns": self.columns,
                "rows": [[format_value(x) if isinstance(x, float) else x for x in r] for r in self.rows],
            },
            fh,
            indent=1,
        )
        fh.write("\n")

    def write(self, path, fmt="csv"):
        with open(path, "w", newline="") as fh:
            (self.to_json if fmt == "json" else self.to_csv)(fh)


def format_value(x):
    """17 significant digits, enough to round-trip any double."""
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def parse_csv(text):
    """Parse long-format CSV text back into ``(columns, rows)`` with floats restored."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    columns = next(reader)
    rows = []
    for r in reader:
        out = []
        for k, cell in enumerate(r):
            if columns[k] in ("quantity", "flags"):
                out.append(cell)
            else:
                try:
                    out.append(float(cell))
                except ValueError:
                    out.append(cell)
        rows.append(tuple(out))
    return columns, rows


def scenario_hash(doc):
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def load(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}: not valid JSON ({exc})"]) from exc
    validate(doc)
    return doc


def _precheck(doc, base_dir):
    """Build every grid point's model objects so physical errors surface before running."""
    msgs = []
    for combo, point in grid_points(doc):
        try:
            center = _center_nm(point)
            build_source(point, base_dir)
            for side in ("signal", "idler"):
                build_filter(point["filters"][side], center, base_dir)
            if "mu" in point["source"]:
                m = point["source"]["mu"]
                spectral.MuTriple(m["mu_s"], m["mu_i"], m["mu_both"])
        except (PairFilterError, OSError) as exc:
            msgs.append(f"grid point {dict(zip(axis_names(doc), combo))}: {exc}")
    if msgs:
        raise ScenarioError(msgs)


def run(doc, base_dir=None, workers=None) -> SweepResult:
    """Evaluate a validated scenario document over its sweep grid."""
    validate(doc)
    _precheck(doc, base_dir)
    names = axis_names(doc)
    points = list(grid_points(doc))
    wanted = doc.get("outputs")

    def job(item):
        combo, point = item
        try:
            return combo, evaluate(point, base_dir)
        except PairFilterError as exc:
            return combo, PointResult({}, [f"error: {exc}".replace("\n", " ")])

    with ThreadPoolExecutor(max_workers=workers or min(8, os.cpu_count() or 1)) as pool:
        results = list(pool.map(job, points))

    rows = []
    for combo, pr in results:
        quantities = wanted or [q for q in ALL_QUANTITIES if q in pr.values]
        if not pr.values and pr.flags:
            rows.append(tuple(combo) + ("error", math.nan, ";".join(pr.flags)))
            continue
        for q in quantities:
            val = float(pr.values.get(q, math.nan))
            fl = list(pr.flags) + pr.qflags.get(q, [])
            if math.isnan(val) and not pr.qflags.get(q):
                fl.append("undefined")
            elif math.isinf(val):
                fl.append("infinite")
            rows.append(tuple(combo) + (q, val, ";".join(fl)))
    model = doc.get("model", {})
    provenance = {
        "toolkit": f"pairfilter {VERSION}",
        "scenario": doc.get("name", ""),
        "scenario_sha256": scenario_hash(doc),
        "grid_points": model.get("grid_points", 512),
        "phase_matching": model.get("phase_matching", "sinc"),
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return SweepResult(names, rows, provenance)


def run_scenario(path, workers=None) -> SweepResult:
    """Load, validate and evaluate the scenario file at ``path``."""
    path = Path(path)
    doc = load(path)
    return run(doc, base_dir=path.parent, workers=workers)


def default_output_path(name, suffix):
    """Output location under ``$PAIRFILTER_OUT_DIR``, or ``None`` if unset."""
    out_dir = os.environ.get(OUT_DIR_ENV)
    if not out_dir:
        return None
    return Path(out_dir) / f"{name}.{suffix}"


def to_text(result: SweepResult, fmt="csv", timestamp=True):
    buf = io.StringIO()
    if fmt == "json":
        result.to_json(buf)
    else:
        result.to_csv(buf, timestamp=timestamp)
    return buf.getvalue()
