"""Closed-form pass fractions, heralding efficiencies and purity.

With the phase matching replaced by its equal-FWHM Gaussian and Gaussian
filters, the filtered joint spectral intensity is a bivariate Gaussian

    |f g_s g_i|^2 ~ exp(-(a x^2 + 2 c x y + b y^2) / 2)

and every filtered integral is a ratio of determinants. Each term is the
inverse square of the standard deviation of the corresponding intensity
factor: ``sigma_p / sqrt(2)`` for the pump, ``sigma_pm / ALPHA`` for the phase
matching and ``sigma_j / sqrt(2)`` for a filter whose amplitude factor is
``exp(-w^2 / (2 sigma_j^2))``. ``a0``/``b0`` are ``a``/``b`` without the filter
term, i.e. with that photon unfiltered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from . import units
from .errors import DomainError, InvalidGaussianError
from .spectral import ALPHA, DEFAULT_CENTER_NM, FWHM_PER_SIGMA, SourceSpec

# relative size of a0*b0 - c^2 below which the unfiltered JSA is unbounded
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class GaussianCoeffs:
    """Quadratic-form coefficients, in (rad/s)^-2."""

    a: float
    b: float
    c: float
    a0: float
    b0: float

    @property
    def det(self):
        return self.a * self.b - self.c**2

    @property
    def det0(self):
        return self.a0 * self.b0 - self.c**2

    @property
    def source_bounded(self):
        return self.det0 > _DEGENERATE_RTOL * self.a0 * self.b0


def _inv_sq(sigma, name):
    if math.isinf(sigma):
        return 0.0
    if not sigma > 0.0:
        raise DomainError(f"{name} must be positive (inf for no filter), got {sigma!r}")
    return 2.0 / sigma**2


def coeffs(source: SourceSpec, sigma_s=math.inf, sigma_i=math.inf) -> GaussianCoeffs:
    """Coefficients for Gaussian filters of width ``sigma_s``/``sigma_i`` (rad/s).

    ``sigma_j`` is the width of the filter's transmission function,
    ``fwhm / (2 sqrt(2 ln 2))``.

    An infinite width means no filter on that photon; its term is dropped
    rather than computed as ``1/inf**2``.
    """
    fs = _inv_sq(sigma_s, "sigma_s")
    fi = _inv_sq(sigma_i, "sigma_i")
    s, c = math.sin(source.pm_angle), math.cos(source.pm_angle)
    pm = ALPHA**2 / source.pm_sigma**2
    pump = 2.0 / source.pump_sigma**2
    a0 = pm * s * s + pump
    b0 = pm * c * c + pump
    return GaussianCoeffs(a=a0 + fs, b=b0 + fi, c=pm * s * c + pump, a0=a0, b0=b0)


def coeffs_from_fwhm(source: SourceSpec, fwhm_s=math.inf, fwhm_i=math.inf) -> GaussianCoeffs:
    """As :func:`coeffs`, taking Gaussian filter FWHMs in rad/s."""
    return coeffs(source, fwhm_s / FWHM_PER_SIGMA, fwhm_i / FWHM_PER_SIGMA)


@dataclass(frozen=True)
class ClosedFormReport:
    gamma_both: float
    gamma_s: float
    gamma_i: float
    delta_s: float
    delta_i: float
    delta_ps: float
    purity: float
    purity_unfiltered: float
    flags: tuple = ()


def closed_form_report(k: GaussianCoeffs) -> ClosedFormReport:
    """Pass fractions, heralding efficiencies and heralded purity.

    ``gamma_*`` are fractions of the unfiltered pair flux passing the
    corresponding filter(s). If pump and phase matching leave a direction of the
    JSA unconfined, the pass fractions are zero and flagged; the efficiencies and
    purity remain well defined.
    """
    if not (k.a > 0 and k.b > 0 and k.a0 > 0 and k.b0 > 0):
        raise InvalidGaussianError("diagonal coefficients must be positive")
    det = k.det
    if not det > _DEGENERATE_RTOL * k.a * k.b:
        raise InvalidGaussianError(f"a*b - c^2 = {det:.3e} is not positive; filtered JSA is not normalizable")
    det_s = k.a * k.b0 - k.c**2  # signal filter only
    det_i = k.a0 * k.b - k.c**2  # idler filter only
    flags = []
    if k.source_bounded:
        det0 = k.det0
        gamma_both = math.sqrt(det0 / det)
        gamma_s = math.sqrt(det0 / det_s)
        gamma_i = math.sqrt(det0 / det_i)
        purity_unfiltered = math.sqrt(det0 / (k.a0 * k.b0))
    else:
        gamma_both = gamma_s = gamma_i = 0.0
        purity_unfiltered = 0.0
        flags.append("unbounded_source")
    delta_s = min(math.sqrt(det_i / det), 1.0)
    delta_i = min(math.sqrt(det_s / det), 1.0)
    return ClosedFormReport(
        gamma_both=gamma_both,
        gamma_s=gamma_s,
        gamma_i=gamma_i,
        delta_s=delta_s,
        delta_i=delta_i,
        delta_ps=math.sqrt(delta_s * delta_i),
        purity=math.sqrt(det / (k.a * k.b)),
        purity_unfiltered=purity_unfiltered,
        flags=tuple(flags),
    )


class FhePoint(NamedTuple):
    fwhm_pm: float
    delta_s: float
    delta_i: float
    purity: float

    @property
    def delta_ps(self):
        return math.sqrt(self.delta_s * self.delta_i)


def fhe_vs_bandwidth_curve(
    source: SourceSpec, fwhm_pm: Sequence[float], shape="gaussian", center_nm=DEFAULT_CENTER_NM
) -> list:
    """Heralding efficiencies and purity for equal Gaussian filters of each FWHM (pm)."""
    if shape != "gaussian":
        raise DomainError(f"no closed form for {shape!r} filters; use spectral.filtered_means")
    fwhm_pm = list(fwhm_pm)
    if not fwhm_pm:
        raise DomainError("fwhm list is empty")
    out = []
    for w in fwhm_pm:
        fwhm = math.inf if math.isinf(w) else float(units.pm_to_rad_s(w, center_nm))
        rep = closed_form_report(coeffs_from_fwhm(source, fwhm, fwhm))
        out.append(FhePoint(float(w), rep.delta_s, rep.delta_i, rep.purity))
    return out


def reject_nongaussian(*filters):
    """Raise for any filter the closed form cannot represent."""
    for f in filters:
        if f.shape != "gaussian":
            raise DomainError(f"closed form supports gaussian filters only, got {f.shape!r}")


def report_for_filters(source: SourceSpec, f_s, f_i) -> ClosedFormReport:
    """Closed-form report for a pair of :class:`~pairfilter.spectral.FilterSpec`."""
    reject_nongaussian(f_s, f_i)
    if f_s.center != source.center_s or f_i.center != source.center_i:
        raise DomainError("closed form assumes filters centered on the photon frequencies")
    return closed_form_report(coeffs_from_fwhm(source, f_s.fwhm, f_i.fwhm))
