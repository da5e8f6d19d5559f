"""Entanglement visibility for time-bin and polarization receivers.

Each receiver turns the filtered photon numbers of one time bin (or one
polarization mode) into maximum and minimum coincidence probabilities; the
visibility is ``(C_max - C_min) / (C_max + C_min)``.

Noise is taken from :class:`~pairfilter.detection.ChannelSpec` referred to the
fiber output, so receiver elements can be applied to it: a 1-bit-delay
interferometer passes half of the incident noise to each time slot, and a
polarizer passes ``alpha_pol`` of unpolarized noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from . import units
from .detection import ChannelSpec
from .errors import DomainError
from .spectral import MuTriple

# visibility above which entanglement-based QKD remains possible
QKD_VISIBILITY = 0.78
# visibility above which a CHSH violation certifies nonlocality, 1/sqrt(2)
NONLOCALITY_VISIBILITY = 1.0 / math.sqrt(2.0)

THRESHOLDS = {"qkd": QKD_VISIBILITY, "nonlocality": NONLOCALITY_VISIBILITY}

INTERFEROMETER = "timebin_interferometer_all_bases"
SWITCH = "timebin_switch_z"
POLARIZATION = "polarization_analyzer"
RECEIVERS = (INTERFEROMETER, SWITCH, POLARIZATION)

DEFAULT_V_INT = 0.98

# search interval for the joint photon number when maximizing visibility
MU_BOTH_BOUNDS = (1e-7, 1e-1)


@dataclass(frozen=True)
class EntangledSource:
    """Photon numbers per time bin (or per polarization mode).

    Early and late bins are taken to carry equal photon numbers, the condition
    for a maximally entangled state, so one triple describes both.
    """

    mu: MuTriple
    v_int: float = DEFAULT_V_INT

    def __post_init__(self):
        if not 0.0 <= self.v_int <= 1.0:
            raise DomainError(f"interferometer visibility must lie in [0, 1], got {self.v_int!r}")

    def scaled(self, factor):
        return EntangledSource(self.mu.scaled(factor), self.v_int)


@dataclass(frozen=True)
class Receiver:
    variant: str = INTERFEROMETER
    polarization_filtering: bool = False

    def __post_init__(self):
        if self.variant not in RECEIVERS:
            raise DomainError(f"unknown receiver {self.variant!r}; expected one of {RECEIVERS}")


@dataclass(frozen=True)
class BasisCounts:
    C_max: float
    C_min: float
    S_s: float
    S_i: float

    @property
    def visibility(self):
        total = self.C_max + self.C_min
        return (self.C_max - self.C_min) / total if total > 0.0 else 0.0


def _alpha(ch: ChannelSpec, polarization_filtering):
    return ch.alpha_pol if polarization_filtering else 1.0


def _noise(ch, splitting, polarization_filtering):
    return ch.raman_probability(splitting, _alpha(ch, polarization_filtering)) + ch.dark_probability()


def timebin_singles_xy(mu_j, ch: ChannelSpec, polarization_filtering=False):
    """Middle-slot singles behind the interferometer: ``mu eta / 2`` plus half the noise."""
    return 0.5 * mu_j * ch.eta + _noise(ch, 0.5, polarization_filtering)


@dataclass(frozen=True)
class Fringe:
    C: float
    S_s: float
    S_i: float


def timebin_xy(phi, source: EntangledSource, ch_s: ChannelSpec, ch_i: ChannelSpec, polarization_filtering=False):
    """Coincidence probability in the middle slots at total phase ``phi``."""
    mu = source.mu
    S_s = timebin_singles_xy(mu.mu_s, ch_s, polarization_filtering)
    S_i = timebin_singles_xy(mu.mu_i, ch_i, polarization_filtering)
    pair = 0.25 * mu.mu_both * ch_s.eta * ch_i.eta
    C = pair * (0.5 + 0.5 * source.v_int * np.cos(phi)) + S_s * S_i
    return Fringe(C, S_s, S_i)


def timebin_xy_counts(source, ch_s, ch_i, polarization_filtering=False) -> BasisCounts:
    hi = timebin_xy(0.0, source, ch_s, ch_i, polarization_filtering)
    lo = timebin_xy(math.pi, source, ch_s, ch_i, polarization_filtering)
    return BasisCounts(float(hi.C), float(lo.C), hi.S_s, hi.S_i)


def _correlated_counts(mu, ch_s, ch_i, alpha_s, alpha_i):
    S_s = mu.mu_s * ch_s.eta + ch_s.raman_probability(1.0, alpha_s) + ch_s.dark_probability()
    S_i = mu.mu_i * ch_i.eta + ch_i.raman_probability(1.0, alpha_i) + ch_i.dark_probability()
    return BasisCounts(mu.mu_both * ch_s.eta * ch_i.eta + S_s * S_i, S_s * S_i, S_s, S_i)


def timebin_z(variant, source: EntangledSource, ch_s, ch_i, polarization_filtering=False) -> BasisCounts:
    """Z-basis extremes for the interferometer side slots or a bypass switch.

    Side slots carry a quarter of each photon stream but half of the noise,
    so pairs arrive at 1/16 of the correlated-source rate. A switch or splitter
    ahead of the interferometer measures Z like a correlated-pair source.
    """
    mu = source.mu
    if variant == INTERFEROMETER:
        S_s = 0.25 * mu.mu_s * ch_s.eta + _noise(ch_s, 0.5, polarization_filtering)
        S_i = 0.25 * mu.mu_i * ch_i.eta + _noise(ch_i, 0.5, polarization_filtering)
        return BasisCounts(mu.mu_both * ch_s.eta * ch_i.eta / 16.0 + S_s * S_i, S_s * S_i, S_s, S_i)
    if variant == SWITCH:
        return _correlated_counts(
            mu, ch_s, ch_i, _alpha(ch_s, polarization_filtering), _alpha(ch_i, polarization_filtering)
        )
    raise DomainError(f"{variant!r} has no time-bin Z measurement")


def polarization_counts(source: EntangledSource, ch_s, ch_i) -> BasisCounts:
    """Polarization analyzer: correlated-pair rates, the analyzer's polarizer filters noise."""
    return _correlated_counts(source.mu, ch_s, ch_i, ch_s.alpha_pol, ch_i.alpha_pol)


@dataclass(frozen=True)
class VisibilityReport:
    V_x: float
    V_y: float
    V_z: float
    counts: dict = field(repr=False)
    above_qkd: tuple = ()
    above_nonlocality: tuple = ()

    def basis(self, name):
        return {"x": self.V_x, "y": self.V_y, "z": self.V_z}[name]


def _report(counts):
    vis = {b: c.visibility for b, c in counts.items()}
    return VisibilityReport(
        V_x=vis["x"],
        V_y=vis["y"],
        V_z=vis["z"],
        counts=counts,
        above_qkd=tuple(b for b in ("x", "y", "z") if vis[b] > QKD_VISIBILITY),
        above_nonlocality=tuple(b for b in ("x", "y", "z") if vis[b] > NONLOCALITY_VISIBILITY),
    )


def basis_counts(basis, receiver: Receiver, source: EntangledSource, ch_s, ch_i) -> BasisCounts:
    if basis not in ("x", "y", "z"):
        raise DomainError(f"unknown basis {basis!r}")
    if receiver.variant == POLARIZATION:
        return polarization_counts(source, ch_s, ch_i)
    if basis == "z":
        return timebin_z(receiver.variant, source, ch_s, ch_i, receiver.polarization_filtering)
    # Y differs from X only by a phase offset
    return timebin_xy_counts(source, ch_s, ch_i, receiver.polarization_filtering)


def visibility(receiver: Receiver, source: EntangledSource, ch_s, ch_i) -> VisibilityReport:
    return _report({b: basis_counts(b, receiver, source, ch_s, ch_i) for b in ("x", "y", "z")})


def polarization_visibility(source: EntangledSource, ch_s, ch_i) -> VisibilityReport:
    return visibility(Receiver(POLARIZATION), source, ch_s, ch_i)


def visibility_from_car(car):
    """Two-photon interference visibility implied by a CAR, ``(CAR - 1) / (CAR + 1)``."""
    if math.isinf(car):
        return 1.0
    if car < 1.0:
        raise DomainError("CAR below 1 is unphysical")
    return (car - 1.0) / (car + 1.0)


def car_from_visibility(v):
    if not 0.0 <= v < 1.0:
        raise DomainError("visibility must lie in [0, 1)")
    return (1.0 + v) / (1.0 - v)


# pump optimization


def _linear_coeffs(basis, receiver, source, ch_s, ch_i):
    """Write counts as ``C_max = p m + S_s S_i``, ``C_min = q m + S_s S_i``, ``S_j = u_j m + n_j``.

    ``m`` is ``mu_both``; returns ``(p, q, u_s, u_i, n_s, n_i)``. Every receiver is
    linear in the pump, which makes the visibility optimum analytic.
    """
    mu = source.mu
    if mu.mu_both <= 0.0:
        raise DomainError("visibility optimum needs a source with mu_both > 0")
    unit = EntangledSource(mu.scaled(1.0 / mu.mu_both), source.v_int)
    zero = EntangledSource(mu.scaled(0.0), source.v_int)
    one = basis_counts(basis, receiver, unit, ch_s, ch_i)
    none = basis_counts(basis, receiver, zero, ch_s, ch_i)
    n_s, n_i = none.S_s, none.S_i
    u_s, u_i = one.S_s - n_s, one.S_i - n_i
    p = one.C_max - one.S_s * one.S_i
    q = one.C_min - one.S_s * one.S_i
    return p, q, u_s, u_i, n_s, n_i


def optimal_mu_both(basis, receiver: Receiver, source: EntangledSource, ch_s, ch_i):
    """Joint photon number maximizing visibility, ``sqrt(n_s n_i / (u_s u_i))``.

    ``1/V`` is affine in ``u_s u_i m + n_s n_i / m``, so the maximum is unique.
    Zero noise gives ``0`` (visibility improves without bound as the pump drops).
    """
    _, _, u_s, u_i, n_s, n_i = _linear_coeffs(basis, receiver, source, ch_s, ch_i)
    return math.sqrt(n_s * n_i / (u_s * u_i))


@dataclass(frozen=True)
class MuOptimum:
    mu_both: float
    visibility: float
    converged: bool
    flags: tuple = ()


def maximize_visibility(basis, receiver: Receiver, source: EntangledSource, ch_s, ch_i, bounds=MU_BOTH_BOUNDS, rtol=1e-4) -> MuOptimum:
    """Bounded scalar search over ``log10(mu_both)`` for the highest visibility.

    The source's heralding efficiencies are kept; only the pump scales.
    """
    if source.mu.mu_both <= 0.0:
        raise DomainError("visibility optimum needs a source with mu_both > 0")
    lo, hi = math.log10(bounds[0]), math.log10(bounds[1])

    def neg_v(log_mu):
        s = source.scaled(10.0**log_mu / source.mu.mu_both)
        return -basis_counts(basis, receiver, s, ch_s, ch_i).visibility

    res = optimize.minimize_scalar(neg_v, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    flags = []
    x = float(res.x)
    v = -float(res.fun)
    # visibility at the edges decides whether the optimum is interior
    v_lo, v_hi = -neg_v(lo), -neg_v(hi)
    if v_lo >= v:
        x, v = lo, v_lo
    if v_hi >= v:
        x, v = hi, v_hi
    if x in (lo, hi):
        flags.append("mu_at_bound")
    converged = bool(res.success)
    if converged:
        # golden-section step halved: visibility must be stationary to rtol
        step = 1e-3
        neighbours = [-neg_v(min(max(x + d, lo), hi)) for d in (-step, step)]
        if any(n > v * (1.0 + rtol) for n in neighbours):
            converged = False
    if not converged:
        flags.append("optimizer_not_converged")
    return MuOptimum(10.0**x, v, converged, tuple(flags))


@dataclass(frozen=True)
class PowerCurve:
    """Visibility per basis on a grid of launched classical powers."""

    power_dbm: np.ndarray
    visibility: dict
    mu_both: dict
    flags: list
    crossings: dict

    def crossing(self, basis, threshold="nonlocality"):
        return self.crossings[(basis, threshold)]


def _channels_at(ch_s, ch_i, p_mw):
    return ch_s.with_power(p_mw), ch_i.with_power(p_mw)


def visibility_at_power(p_dbm, basis, receiver, source, ch_s, ch_i, optimize_mu=False):
    """Visibility and the joint photon number used, at launched power ``p_dbm``.

    ``p_dbm = -inf`` means the classical light is off.
    """
    p_mw = 0.0 if math.isinf(p_dbm) and p_dbm < 0 else float(units.dbm_to_mw(p_dbm))
    cs, ci = _channels_at(ch_s, ch_i, p_mw)
    if optimize_mu:
        opt = maximize_visibility(basis, receiver, source, cs, ci)
        return opt.visibility, opt.mu_both, opt.flags
    return basis_counts(basis, receiver, source, cs, ci).visibility, source.mu.mu_both, ()


def threshold_crossing(basis, receiver, source, ch_s, ch_i, threshold, p_lo_dbm, p_hi_dbm, optimize_mu=False):
    """Launched power (dBm) at which the visibility falls to ``threshold``.

    Returns ``None`` unless the visibility is above the threshold at ``p_lo_dbm``
    and below it at ``p_hi_dbm``.
    """

    def f(p):
        return visibility_at_power(p, basis, receiver, source, ch_s, ch_i, optimize_mu)[0] - threshold

    f_lo, f_hi = f(p_lo_dbm), f(p_hi_dbm)
    if not (f_lo > 0.0 and f_hi < 0.0):
        return None
    return optimize.brentq(f, p_lo_dbm, p_hi_dbm, xtol=1e-9)


def visibility_vs_power(
    power_dbm: Sequence[float],
    receiver: Receiver,
    source: EntangledSource,
    ch_s: ChannelSpec,
    ch_i: ChannelSpec,
    optimize_mu=False,
    bases=("x", "z"),
    thresholds: Optional[dict] = None,
) -> PowerCurve:
    """Visibility per basis over a launched-power grid, with threshold crossings.

    Noise scales linearly with the launched power through each channel's
    ``noise_per_mw``. Crossings are located to 1e-9 dB between the grid points
    that bracket them; a basis that never crosses inside the grid maps to ``None``.
    """
    p = np.asarray(power_dbm, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("power grid must be a non-empty 1-D sequence")
    if np.any(np.diff(p) <= 0):
        raise DomainError("power grid must be strictly increasing")
    thresholds = THRESHOLDS if thresholds is None else thresholds
    vis, mus = {}, {}
    flags = [[] for _ in p]
    for b in bases:
        vb, mb = [], []
        for k, pk in enumerate(p):
            v, m, fl = visibility_at_power(pk, b, receiver, source, ch_s, ch_i, optimize_mu)
            vb.append(v)
            mb.append(m)
            flags[k].extend(f"{b}:{x}" for x in fl)
        vis[b] = np.array(vb)
        mus[b] = np.array(mb)
    crossings = {}
    for b in bases:
        for name, thr in thresholds.items():
            below = np.nonzero(vis[b] < thr)[0]
            crossing = None
            if below.size and below[0] > 0:
                k = below[0]
                crossing = threshold_crossing(b, receiver, source, ch_s, ch_i, thr, p[k - 1], p[k], optimize_mu)
            crossings[(b, name)] = crossing
    return PowerCurve(p, vis, mus, [tuple(f) for f in flags], crossings)
