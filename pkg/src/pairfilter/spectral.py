"""Joint spectral amplitudes, spectral filters and filtered photon numbers.

Frequencies are angular detunings in rad/s measured from each photon's
nominal center. The joint spectral amplitude (JSA) is

    f(x, y) = N exp(-(x + y)^2 / (2 sp^2)) * PM(x sin(theta) + y cos(theta))

with ``x``/``y`` the signal/idler detunings and ``sp`` the pump field-amplitude
spectral width. The phase-matching factor ``PM`` is either a sinc or its
equal-FWHM Gaussian substitute, both written so that the Gaussian form
reproduces the closed-form coefficients in :mod:`pairfilter.gaussian`:

    sinc:     sinc(sqrt(ALPHA) u / (2 s_pm))
    gaussian: exp(-ALPHA^2 u^2 / (4 s_pm^2))

A parametric filter's transmission function ``g(w)`` (Gaussian or
super-Gaussian, 0.5 at +-FWHM/2) multiplies the amplitude, so the filtered
intensity carries ``g^2``. Tabulated filters hold measured intensity
transmission and act on the amplitude through its square root.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import units
from .errors import CoverageError, DegenerateInputError, DomainError, ResolutionError

# sinc(x) ~ exp(-ALPHA x^2) with equal FWHM
ALPHA = 0.193

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

DEFAULT_CENTER_NM = 1536.5

_SHAPES = ("gaussian", "flat_top", "tabulated")
_PM_FORMS = ("sinc", "gaussian")
# transmission below which a filter is treated as opaque when sizing windows
_OPAQUE = 1e-16


def pump_sigma_from_fwhm(tau_p):
    """Pump spectral width (rad/s) of a transform-limited Gaussian pulse.

    ``tau_p`` is the intensity FWHM duration in seconds. The returned ``sigma``
    is the standard deviation of the field amplitude spectrum
    ``E(w) ~ exp(-w^2 / (2 sigma^2))``, i.e. ``sigma = 2 sqrt(ln 2) / tau_p``.
    The corresponding intensity time-bandwidth product is ``2 ln 2 / pi``.
    """
    tau_p = float(tau_p)
    if not tau_p > 0.0:
        raise DomainError(f"pump duration must be positive, got {tau_p!r}")
    return 2.0 * math.sqrt(math.log(2.0)) / tau_p


def pump_fwhm_from_sigma(sigma):
    """Inverse of :func:`pump_sigma_from_fwhm`."""
    if not sigma > 0.0:
        raise DomainError(f"pump bandwidth must be positive, got {sigma!r}")
    return 2.0 * math.sqrt(math.log(2.0)) / sigma


@dataclass(frozen=True)
class SourceSpec:
    """Photon-pair source.

    Give exactly one of ``pump_sigma`` (rad/s) or ``pump_fwhm_ps``.
    ``pm_angle`` is the phase-matching angle in radians, ``mu_total`` the mean
    pair number per pulse over the unfiltered JSA, and ``center_s``/``center_i``
    the absolute angular frequencies that detunings are measured from.
    """

    pm_sigma: float
    pm_angle: float
    pump_sigma: Optional[float] = None
    pump_fwhm_ps: Optional[float] = None
    mu_total: float = 1.0
    center_s: float = float(units.wavelength_nm_to_omega(DEFAULT_CENTER_NM))
    center_i: float = float(units.wavelength_nm_to_omega(DEFAULT_CENTER_NM))

    def __post_init__(self):
        if (self.pump_sigma is None) == (self.pump_fwhm_ps is None):
            raise DomainError("give exactly one of pump_sigma or pump_fwhm_ps")
        if self.pump_sigma is None:
            object.__setattr__(self, "pump_sigma", pump_sigma_from_fwhm(self.pump_fwhm_ps * 1e-12))
        else:
            if not self.pump_sigma > 0.0:
                raise DomainError(f"pump_sigma must be positive, got {self.pump_sigma!r}")
            object.__setattr__(self, "pump_fwhm_ps", pump_fwhm_from_sigma(self.pump_sigma) * 1e12)
        if not self.pm_sigma > 0.0:
            raise DomainError(f"pm_sigma must be positive, got {self.pm_sigma!r}")
        if not 0.0 <= self.pm_angle < math.pi:
            raise DomainError(f"pm_angle must lie in [0, pi), got {self.pm_angle!r}")
        if not self.mu_total >= 0.0:
            raise DomainError(f"mu_total must be non-negative, got {self.mu_total!r}")

    def with_mu_total(self, mu_total):
        return SourceSpec(
            pm_sigma=self.pm_sigma,
            pm_angle=self.pm_angle,
            pump_sigma=self.pump_sigma,
            mu_total=mu_total,
            center_s=self.center_s,
            center_i=self.center_i,
        )

    def unfiltered_precision(self):
        """Matrix ``Q0`` with ``|f|^2 ~ exp(-v.Q0.v / 2)`` for the Gaussian form."""
        s, c = math.sin(self.pm_angle), math.cos(self.pm_angle)
        pm = ALPHA**2 / self.pm_sigma**2
        pump = 2.0 / self.pump_sigma**2
        return np.array([[pm * s * s + pump, pm * s * c + pump], [pm * s * c + pump, pm * c * c + pump]])

    def is_bounded(self, rtol=1e-10):
        """False when pump and phase matching confine the same direction only."""
        q = self.unfiltered_precision()
        return np.linalg.det(q) > rtol * q[0, 0] * q[1, 1]

    def amplitude(self, x, y, phase_matching="sinc"):
        """Un-normalized JSA at detunings ``x`` (signal) and ``y`` (idler)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        pump = np.exp(-((x + y) ** 2) / (2.0 * self.pump_sigma**2))
        u = x * math.sin(self.pm_angle) + y * math.cos(self.pm_angle)
        if phase_matching == "sinc":
            v = math.sqrt(ALPHA) * u / (2.0 * self.pm_sigma)
            pm = np.sinc(v / math.pi)
        elif phase_matching == "gaussian":
            pm = np.exp(-(ALPHA**2) * u**2 / (4.0 * self.pm_sigma**2))
        else:
            raise DomainError(f"unknown phase-matching form {phase_matching!r}")
        return pump * pm

    def analytic_norm(self, phase_matching="sinc"):
        """Integral of the un-normalized ``|f|^2`` over the whole plane."""
        s, c = math.sin(self.pm_angle), math.cos(self.pm_angle)
        jac = abs(c - s)
        if jac < 1e-12:
            return math.inf
        pump = self.pump_sigma * math.sqrt(math.pi)
        if phase_matching == "sinc":
            k = math.sqrt(ALPHA) / (2.0 * self.pm_sigma)
            return pump * (math.pi / k) / jac
        q = self.unfiltered_precision()
        return 2.0 * math.pi / math.sqrt(np.linalg.det(q))


@dataclass(frozen=True)
class FilterSpec:
    """Spectral filter acting on one photon.

    ``fwhm`` and ``center`` are angular frequencies (rad/s). ``fwhm=inf``
    makes a parametric filter all-pass. Tabulated filters carry
    ``table = (detuning, transmission)`` arrays with detuning in rad/s from
    ``center`` and intensity transmission in [0, 1].
    """

    shape: str
    fwhm: float
    center: float
    order: int = 1
    table: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise DomainError(f"unknown filter shape {self.shape!r}")
        if self.shape == "tabulated":
            if self.table is None:
                raise DomainError("tabulated filter needs a table")
            det = np.asarray(self.table[0], dtype=float)
            tr = np.asarray(self.table[1], dtype=float)
            if det.ndim != 1 or det.shape != tr.shape or det.size < 2:
                raise DomainError("filter table needs two equal-length columns with >= 2 rows")
            if np.any(np.diff(det) <= 0):
                raise DomainError("filter table detunings must be strictly increasing")
            if np.any(tr < 0.0) or np.any(tr > 1.0) or not np.all(np.isfinite(tr)):
                raise DomainError("filter transmission must lie in [0, 1]")
            object.__setattr__(self, "table", (det, tr))
            object.__setattr__(self, "fwhm", _table_fwhm(det, tr))
        elif self.shape == "flat_top":
            if int(self.order) != self.order or self.order < 1:
                raise DomainError(f"flat-top order must be an integer >= 1, got {self.order!r}")
        if not self.fwhm > 0.0:
            raise DomainError(f"filter fwhm must be positive, got {self.fwhm!r}")

    # constructors

    @classmethod
    def gaussian(cls, fwhm, center=0.0):
        return cls("gaussian", float(fwhm), float(center), 1)

    @classmethod
    def flat_top(cls, fwhm, center=0.0, order=4):
        return cls("flat_top", float(fwhm), float(center), int(order))

    @classmethod
    def all_pass(cls, center=0.0):
        return cls("gaussian", math.inf, float(center), 1)

    @classmethod
    def tabulated(cls, detuning, transmission, center=0.0):
        return cls("tabulated", 1.0, float(center), 1, (detuning, transmission))

    @classmethod
    def from_pm(cls, shape, fwhm_pm, center_nm=DEFAULT_CENTER_NM, order=None, offset_pm=0.0):
        """Parametric filter specified by its wavelength FWHM in pm."""
        fwhm = math.inf if math.isinf(fwhm_pm) else float(units.pm_to_rad_s(fwhm_pm, center_nm))
        center = float(units.wavelength_nm_to_omega(center_nm + offset_pm * 1e-3))
        if shape == "gaussian":
            return cls.gaussian(fwhm, center)
        if shape == "flat_top":
            return cls.flat_top(fwhm, center, 4 if order is None else order)
        raise DomainError(f"from_pm builds gaussian or flat_top filters, not {shape!r}")

    # derived widths

    @property
    def is_all_pass(self):
        return self.shape != "tabulated" and math.isinf(self.fwhm)

    @property
    def sigma(self):
        """Width parameter of the parametric shape.

        Gaussian: intensity standard deviation ``fwhm / (2 sqrt(2 ln 2))``.
        Flat-top of order n: ``s_n`` in ``exp(-((w - w0)/s_n)^(2n) / 2)``,
        calibrated so the FWHM is exact.
        """
        if self.shape == "tabulated":
            raise DomainError("tabulated filters have no width parameter")
        n = self.order if self.shape == "flat_top" else 1
        return 0.5 * self.fwhm / (2.0 * math.log(2.0)) ** (1.0 / (2.0 * n))

    def fwhm_pm(self, center_nm=DEFAULT_CENTER_NM):
        return float(units.rad_s_to_pm(self.fwhm, center_nm))

    def support(self):
        """Half-width (rad/s) outside which the transmitted intensity is negligible."""
        if self.is_all_pass:
            return math.inf
        if self.shape == "tabulated":
            det, tr = self.table
            nz = np.nonzero(tr > 0.0)[0]
            if nz.size == 0:
                return 0.0
            lo = det[max(nz[0] - 1, 0)]
            hi = det[min(nz[-1] + 1, det.size - 1)]
            return max(abs(lo), abs(hi))
        n = self.order if self.shape == "flat_top" else 1
        return self.sigma * math.log(1.0 / _OPAQUE) ** (1.0 / (2.0 * n))

    def resolution_scale(self):
        """Length over which the transmission changes appreciably."""
        if self.is_all_pass:
            return math.inf
        if self.shape == "tabulated":
            det = self.table[0]
            return max(float(np.min(np.diff(det))), self.fwhm / 50.0)
        n = self.order if self.shape == "flat_top" else 1
        return self.sigma / n

    def transmission(self, omega):
        return filter_transmission(self, omega)


def _table_fwhm(det, tr):
    peak = tr.max()
    if peak <= 0.0:
        raise DomainError("filter table transmits nothing")
    above = np.nonzero(tr >= 0.5 * peak)[0]
    i, j = above[0], above[-1]

    def cross(k0, k1):
        t0, t1 = tr[k0], tr[k1]
        if t1 == t0:
            return det[k1]
        return det[k0] + (0.5 * peak - t0) * (det[k1] - det[k0]) / (t1 - t0)

    left = det[0] if i == 0 else cross(i - 1, i)
    right = det[-1] if j == det.size - 1 else cross(j, j + 1)
    return float(right - left)


def filter_transmission(filt: FilterSpec, omega):
    """Transmission function of ``filt`` at absolute angular frequency ``omega``.

    For parametric shapes this is the amplitude factor ``g``; for tabulated
    filters it is the interpolated intensity transmission.
    """
    omega = np.asarray(omega, dtype=float)
    return _transmission_detuned(filt, omega - filt.center)


def _intensity_factor(filt, d):
    """Factor multiplying ``|f|^2``."""
    t = _transmission_detuned(filt, d)
    return t if filt.shape == "tabulated" else t * t


def _amplitude_factor(filt, d):
    """Factor multiplying ``f``."""
    t = _transmission_detuned(filt, d)
    return np.sqrt(t) if filt.shape == "tabulated" else t


def _transmission_detuned(filt, d):
    d = np.asarray(d, dtype=float)
    if filt.is_all_pass:
        return np.ones_like(d)
    if filt.shape == "tabulated":
        det, tr = filt.table
        return np.interp(d, det, tr, left=0.0, right=0.0)
    n = filt.order if filt.shape == "flat_top" else 1
    return np.exp(-0.5 * np.abs(d / filt.sigma) ** (2 * n))


def load_filter_csv(path, center_nm=DEFAULT_CENTER_NM, offset_pm=0.0):
    """Read a measured filter shape.

    Two columns: wavelength detuning from the filter center (pm) and intensity
    transmission. Lines starting with ``#`` and a non-numeric header line are
    skipped. Rows may be in either wavelength order.
    """
    det_pm, trans = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(line for line in fh if not line.lstrip().startswith("#")):
            if not row or not "".join(row).strip():
                continue
            try:
                a, b = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if det_pm:
                    raise DomainError(f"unparseable filter row {row!r} in {path}")
                continue
            det_pm.append(a)
            trans.append(b)
    if len(det_pm) < 2:
        raise DomainError(f"{path}: need at least two data rows")
    det = units.detuning_pm_to_rad_s(np.array(det_pm), center_nm)
    order = np.argsort(det)
    center = float(units.wavelength_nm_to_omega(center_nm + offset_pm * 1e-3))
    return FilterSpec.tabulated(det[order], np.array(trans)[order], center)


@dataclass(frozen=True)
class GridConfig:
    """Discretization of the (signal, idler) detuning plane.

    ``half_width_s``/``half_width_i`` override the automatic extent, which is
    ``truncation`` times the marginal width of the Gaussian-equivalent JSA.
    The grid is rejected when the narrowest principal width of the JSA spans
    fewer than ``min_points_per_sigma`` cells.
    """

    points: int = 512
    truncation: float = 5.0
    min_points_per_sigma: float = 1.0
    half_width_s: Optional[float] = None
    half_width_i: Optional[float] = None
    max_points: int = 2048
    rtol: float = 1e-4


def _midpoints(half_width, n, center=0.0):
    h = 2.0 * half_width / n
    return center - half_width + h * (np.arange(n) + 0.5), h


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Discretized, normalized JSA.

    ``amplitude[k, l]`` is ``f(grid_s[k], grid_i[l])``. ``norm_check`` is the
    fraction of the analytic ``∬|f|^2`` captured by the grid before numeric
    renormalization (1 when the grid covers the JSA, 0 if the JSA is unbounded).
    """

    grid_s: np.ndarray
    grid_i: np.ndarray
    amplitude: np.ndarray
    cell_area: float
    norm_check: float
    source: SourceSpec
    phase_matching: str
    scale: float
    config: GridConfig

    @property
    def step_s(self):
        return self.grid_s[1] - self.grid_s[0]

    @property
    def step_i(self):
        return self.grid_i[1] - self.grid_i[0]

    @property
    def half_width_s(self):
        return 0.5 * self.step_s * self.grid_s.size

    @property
    def half_width_i(self):
        return 0.5 * self.step_i * self.grid_i.size

    def evaluate(self, x, y):
        """Normalized amplitude at arbitrary detunings (same normalization as the grid)."""
        return self.scale * self.source.amplitude(x, y, self.phase_matching)

    def integral(self):
        return float(np.sum(self.amplitude**2) * self.cell_area)

    def marginal_s(self):
        """Signal spectral density ``∫|f|^2 dy`` sampled on ``grid_s``."""
        return np.sum(self.amplitude**2, axis=1) * self.step_i

    def marginal_i(self):
        return np.sum(self.amplitude**2, axis=0) * self.step_s


def _narrowest_width(source):
    q = source.unfiltered_precision()
    return 1.0 / math.sqrt(np.linalg.eigvalsh(q).max())


def build_jsa(source: SourceSpec, grid: Optional[GridConfig] = None, phase_matching: str = "sinc") -> JointSpectrum:
    """Sample and normalize the JSA of ``source`` on a uniform midpoint grid."""
    grid = grid or GridConfig()
    if phase_matching not in _PM_FORMS:
        raise DomainError(f"unknown phase-matching form {phase_matching!r}")
    if grid.points < 8:
        raise ResolutionError(f"grid needs at least 8 points per axis, got {grid.points}")
    q0 = source.unfiltered_precision()
    bounded = source.is_bounded()
    hw_s, hw_i = grid.half_width_s, grid.half_width_i
    if hw_s is None or hw_i is None:
        if not bounded:
            raise ResolutionError(
                "pump and phase matching confine the same direction; the JSA is unbounded, "
                "so give explicit half_width_s / half_width_i"
            )
        cov = np.linalg.inv(q0)
        hw_s = hw_s if hw_s is not None else grid.truncation * math.sqrt(cov[0, 0])
        hw_i = hw_i if hw_i is not None else grid.truncation * math.sqrt(cov[1, 1])
    xs, hs = _midpoints(hw_s, grid.points)
    ys, hi = _midpoints(hw_i, grid.points)
    narrow = _narrowest_width(source)
    if narrow < grid.min_points_per_sigma * max(hs, hi):
        raise ResolutionError(
            f"grid step {max(hs, hi):.3e} rad/s too coarse for JSA width {narrow:.3e} rad/s "
            f"({grid.points} points); increase points or narrow the window"
        )
    raw = source.amplitude(xs[:, None], ys[None, :], phase_matching)
    if not np.all(np.isfinite(raw)):
        raise DomainError("JSA amplitude is not finite on the grid")
    cell = hs * hi
    raw_integral = float(np.sum(raw**2) * cell)
    if raw_integral <= 0.0:
        raise DegenerateInputError("JSA vanishes on the grid")
    analytic = source.analytic_norm(phase_matching) if bounded else math.inf
    norm_check = raw_integral / analytic if math.isfinite(analytic) else 0.0
    scale = 1.0 / math.sqrt(raw_integral)
    return JointSpectrum(
        grid_s=xs,
        grid_i=ys,
        amplitude=raw * scale,
        cell_area=cell,
        norm_check=norm_check,
        source=source,
        phase_matching=phase_matching,
        scale=scale,
        config=grid,
    )


@dataclass(frozen=True)
class MuTriple:
    """Mean photon numbers inside the signal, idler and joint passbands.

    ``delta_s = mu_both / mu_i`` and ``delta_i = mu_both / mu_s``; a delta is
    ``None`` (and listed in ``flags``) when its denominator vanishes.
    """

    mu_s: float
    mu_i: float
    mu_both: float
    delta_s: Optional[float] = None
    delta_i: Optional[float] = None
    flags: tuple = ()
    converged: bool = True

    def __post_init__(self):
        for name in ("mu_s", "mu_i", "mu_both"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and non-negative, got {v!r}")
        flags = list(self.flags)
        if self.delta_s is None:
            if self.mu_i > 0.0:
                object.__setattr__(self, "delta_s", min(self.mu_both / self.mu_i, 1.0))
            elif "delta_s_undefined" not in flags:
                flags.append("delta_s_undefined")
        if self.delta_i is None:
            if self.mu_s > 0.0:
                object.__setattr__(self, "delta_i", min(self.mu_both / self.mu_s, 1.0))
            elif "delta_i_undefined" not in flags:
                flags.append("delta_i_undefined")
        object.__setattr__(self, "flags", tuple(flags))

    @classmethod
    def from_deltas(cls, mu_both, delta_s, delta_i):
        """Triple with given joint number and heralding efficiencies."""
        if not (0.0 < delta_s <= 1.0 and 0.0 < delta_i <= 1.0):
            raise DomainError("heralding efficiencies must lie in (0, 1]")
        return cls(mu_both / delta_i, mu_both / delta_s, mu_both, delta_s, delta_i)

    @property
    def delta_ps(self):
        if self.delta_s is None or self.delta_i is None:
            return None
        return math.sqrt(self.delta_s * self.delta_i)

    def scaled(self, factor):
        """Same filtering, ``factor`` times the pump intensity."""
        return MuTriple(
            self.mu_s * factor,
            self.mu_i * factor,
            self.mu_both * factor,
            self.delta_s,
            self.delta_i,
            self.flags,
            self.converged,
        )


def _window(filt, jsa_center, jsa_hw):
    """Integration interval on one axis: JSA extent clipped to the passband."""
    lo, hi = jsa_center - jsa_hw, jsa_center + jsa_hw
    if filt is None or filt.is_all_pass:
        return lo, hi
    sup = filt.support()
    flo, fhi = -sup, sup
    if filt.shape == "tabulated":
        det, tr = filt.table
        nz = np.nonzero(tr > 0.0)[0]
        if nz.size == 0:
            raise CoverageError("filter transmits nothing")
        flo = det[max(nz[0] - 1, 0)]
        fhi = det[min(nz[-1] + 1, det.size - 1)]
    return max(lo, flo), min(hi, fhi)


def _axis(lo, hi, step_cap, grid, scale=None):
    """Midpoint grid on [lo, hi] fine enough for ``step_cap`` and a filter scale."""
    length = hi - lo
    step = step_cap
    if scale is not None and math.isfinite(scale):
        step = min(step, scale / 3.0)
    n = int(math.ceil(length / step))
    n = max(grid.points // 4, min(n, grid.max_points))
    n += n % 2
    h = length / n
    return lo + h * (np.arange(n) + 0.5), h


def _filter_offset(filt, source_center):
    return 0.0 if filt is None else filt.center - source_center


def _filtered_integral(jsa, f_s, f_i, coarse=False):
    """∬|f|^2 T_s T_i over the passband window; either filter may be None."""
    src = jsa.source
    off_s = _filter_offset(f_s, src.center_s)
    off_i = _filter_offset(f_i, src.center_i)
    lo_s, hi_s = _window(f_s, -off_s, jsa.half_width_s)
    lo_i, hi_i = _window(f_i, -off_i, jsa.half_width_i)
    if hi_s <= lo_s or hi_i <= lo_i:
        raise CoverageError("filter passband lies entirely outside the JSA grid")
    lo_s, hi_s, lo_i, hi_i = lo_s + off_s, hi_s + off_s, lo_i + off_i, hi_i + off_i
    step = _narrowest_width(src) / 3.0
    step = min(step, jsa.step_s, jsa.step_i)
    xs, hs = _axis(lo_s, hi_s, step, jsa.config, None if f_s is None else f_s.resolution_scale())
    ys, hi = _axis(lo_i, hi_i, step, jsa.config, None if f_i is None else f_i.resolution_scale())
    if coarse:
        xs, hs = 0.5 * (xs[0::2] + xs[1::2]), 2.0 * hs
        ys, hi = 0.5 * (ys[0::2] + ys[1::2]), 2.0 * hi
    w = jsa.evaluate(xs[:, None], ys[None, :]) ** 2
    if f_s is not None:
        w = w * _intensity_factor(f_s, xs - off_s)[:, None]
    if f_i is not None:
        w = w * _intensity_factor(f_i, ys - off_i)[None, :]
    return float(np.sum(w) * hs * hi)


def filtered_means(jsa: JointSpectrum, f_s: FilterSpec, f_i: FilterSpec, mu_total=None) -> MuTriple:
    """Photon numbers passing the signal filter, the idler filter, and both.

    Midpoint quadrature on a window covering each passband, refined to resolve
    the filter edges; a half-resolution pass provides the convergence flag.
    """
    mu_total = jsa.source.mu_total if mu_total is None else mu_total
    if mu_total < 0:
        raise DomainError("mu_total must be non-negative")
    fine = [
        _filtered_integral(jsa, f_s, None),
        _filtered_integral(jsa, None, f_i),
        _filtered_integral(jsa, f_s, f_i),
    ]
    coarse = [
        _filtered_integral(jsa, f_s, None, True),
        _filtered_integral(jsa, None, f_i, True),
        _filtered_integral(jsa, f_s, f_i, True),
    ]
    tol = jsa.config.rtol
    converged = all(abs(a - b) <= tol * max(abs(a), 1e-300) for a, b in zip(fine, coarse))
    g_s, g_i, g_both = fine
    g_both = min(g_both, g_s, g_i)
    flags = () if converged else ("quadrature_not_converged",)
    return MuTriple(mu_total * g_s, mu_total * g_i, mu_total * g_both, flags=flags, converged=converged)


def filtered_amplitude(jsa: JointSpectrum, f_s: FilterSpec, f_i: FilterSpec, points=None):
    """Sample the filtered amplitude on a uniform grid covering both passbands.

    Returns ``(xs, ys, amplitude)`` with detunings relative to the source centers.
    """
    src = jsa.source
    off_s = f_s.center - src.center_s
    off_i = f_i.center - src.center_i
    lo_s, hi_s = _window(f_s, -off_s, jsa.half_width_s)
    lo_i, hi_i = _window(f_i, -off_i, jsa.half_width_i)
    if hi_s <= lo_s or hi_i <= lo_i:
        raise CoverageError("filter passband lies entirely outside the JSA grid")
    n = points or jsa.config.points
    xs, _ = _midpoints(0.5 * (hi_s - lo_s), n, 0.5 * (hi_s + lo_s) + off_s)
    ys, _ = _midpoints(0.5 * (hi_i - lo_i), n, 0.5 * (hi_i + lo_i) + off_i)
    amp = jsa.evaluate(xs[:, None], ys[None, :])
    amp = amp * _amplitude_factor(f_s, xs - off_s)[:, None]
    amp = amp * _amplitude_factor(f_i, ys - off_i)[None, :]
    return xs, ys, amp


def schmidt_purity(jsa: JointSpectrum, f_s: FilterSpec, f_i: FilterSpec, points=None) -> float:
    """Heralded single-photon purity from the singular values of the filtered JSA.

    With Schmidt weights ``lam_k = s_k^2``, purity is ``sum lam^2 / (sum lam)^2``.
    """
    _, _, amp = filtered_amplitude(jsa, f_s, f_i, points)
    sv = scipy.linalg.svdvals(amp)
    lam = sv**2
    total = lam.sum()
    if not total > 0.0:
        raise DegenerateInputError("filtered amplitude is identically zero")
    return float(np.sum(lam**2) / total**2)


def _fwhm_1d(t, y):
    k = int(np.argmax(y))
    half = 0.5 * y[k]
    left = np.nonzero(y[:k] < half)[0]
    right = np.nonzero(y[k:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise ResolutionError("time window too short to contain the pulse half-maximum")
    i = left[-1]
    j = k + right[0]
    tl = t[i] + (half - y[i]) * (t[i + 1] - t[i]) / (y[i + 1] - y[i])
    tr = t[j - 1] + (half - y[j - 1]) * (t[j] - t[j - 1]) / (y[j] - y[j - 1])
    return tr - tl


def photon_temporal_intensity(source: SourceSpec, filt: FilterSpec, phase_matching="sinc", points=512):
    """Arrival-time distribution of the filtered signal photon.

    ``I(t) = ∫ dy |∫ dx f(x, y) g(x) e^{-ixt}|^2``; the idler is
    unfiltered and traced out. Returns ``(t, I)`` with ``t`` in seconds.
    """
    off = filt.center - source.center_s
    narrow = _narrowest_width(source)
    sp = source.pump_sigma
    bounded = source.is_bounded()
    if bounded:
        cov = np.linalg.inv(source.unfiltered_precision())
        jsa_hw_s = 6.0 * math.sqrt(cov[0, 0])
        jsa_hw_i = 6.0 * math.sqrt(cov[1, 1])
    else:
        jsa_hw_s = jsa_hw_i = math.inf
    lo, hi = -jsa_hw_s, jsa_hw_s
    if not filt.is_all_pass:
        sup = filt.support()
        lo, hi = max(lo, off - sup), min(hi, off + sup)
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise CoverageError("cannot bound the filtered signal spectrum")
    scale = min(narrow, sp, filt.resolution_scale())
    n_x = int(min(max(points, math.ceil((hi - lo) / (scale / 4.0))), 8192))
    xs, hx = _midpoints(0.5 * (hi - lo), n_x, 0.5 * (hi + lo))
    # idler detunings that pair with the passband through the pump envelope
    ylo, yhi = -hi - 6.0 * sp, -lo + 6.0 * sp
    ylo, yhi = max(ylo, -jsa_hw_i), min(yhi, jsa_hw_i)
    n_y = int(min(max(points // 2, math.ceil((yhi - ylo) / (narrow / 2.0))), 4096))
    ys, _ = _midpoints(0.5 * (yhi - ylo), n_y, 0.5 * (yhi + ylo))
    g = _amplitude_factor(filt, xs - off)
    n_fft = 1 << int(math.ceil(math.log2(8 * n_x)))
    acc = np.zeros(n_fft)
    for chunk in np.array_split(ys, max(1, n_y // 256)):
        a = source.amplitude(xs[None, :], chunk[:, None], phase_matching) * g[None, :]
        spec = np.fft.fft(a, n=n_fft, axis=1)
        acc += np.sum(np.abs(spec) ** 2, axis=0)
    t = np.fft.fftfreq(n_fft, d=hx) * 2.0 * math.pi
    order = np.argsort(t)
    return t[order], acc[order]


def photon_pump_width_ratio(source: SourceSpec, filt: FilterSpec, phase_matching="sinc") -> float:
    """Temporal FWHM of the filtered signal photon relative to the pump pulse."""
    t, inten = photon_temporal_intensity(source, filt, phase_matching)
    return _fwhm_1d(t, inten) / (source.pump_fwhm_ps * 1e-12)


def export_jsa_csv(jsa: JointSpectrum, path, center_nm=DEFAULT_CENTER_NM, quantity="intensity"):
    """Write the JSA as a CSV matrix with wavelength (nm) axis headers.

    Row 0 holds idler wavelengths, column 0 signal wavelengths.
    """
    lam_s = units.omega_to_wavelength_nm(jsa.source.center_s + jsa.grid_s)
    lam_i = units.omega_to_wavelength_nm(jsa.source.center_i + jsa.grid_i)
    data = jsa.amplitude**2 if quantity == "intensity" else jsa.amplitude
    with open(path, "w", newline="") as fh:
        fh.write(f"# joint spectral {quantity}; rows: signal wavelength (nm), columns: idler wavelength (nm)\n")
        w = csv.writer(fh)
        w.writerow(["lambda_s_nm\\lambda_i_nm"] + [f"{v:.6f}" for v in lam_i])
        for k, row in enumerate(data):
            w.writerow([f"{lam_s[k]:.6f}"] + [f"{v:.17g}" for v in row])


def filter_noise_bandwidth_pm(filt: FilterSpec, center_nm=DEFAULT_CENTER_NM) -> float:
    """FWHM in pm, the bandwidth the noise model multiplies the noise density by."""
    return filt.fwhm_pm(center_nm)


def mu_triple_from_fractions(mu_total, gamma_s, gamma_i, gamma_both) -> MuTriple:
    return MuTriple(mu_total * gamma_s, mu_total * gamma_i, mu_total * min(gamma_both, gamma_s, gamma_i))


def symmetric_filters(shape: str, fwhm_pm: float, source: SourceSpec, center_nm=DEFAULT_CENTER_NM, order=None) -> Sequence[FilterSpec]:
    """Equal signal and idler filters centered on the source's photon frequencies."""
    fwhm = math.inf if math.isinf(fwhm_pm) else float(units.pm_to_rad_s(fwhm_pm, center_nm))
    if shape == "gaussian":
        return FilterSpec.gaussian(fwhm, source.center_s), FilterSpec.gaussian(fwhm, source.center_i)
    if shape == "flat_top":
        n = 4 if order is None else order
        return FilterSpec.flat_top(fwhm, source.center_s, n), FilterSpec.flat_top(fwhm, source.center_i, n)
    raise DomainError(f"symmetric_filters builds gaussian or flat_top filters, not {shape!r}")
