"""Low-gain count statistics for filtered photon pairs in noisy channels.

All rates are probabilities per detection gate. The model keeps only
first-order multipair terms, so results are meaningful while every
probability is well below one; larger values are flagged.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .errors import DegenerateInputError, DomainError
from .spectral import MuTriple

LOW_GAIN_LIMIT = 0.1

NOISE_REFERENCES = ("fiber", "detector")


class LowGainWarning(RuntimeWarning):
    """A count probability is too large for the low-gain model."""


@dataclass(frozen=True)
class ChannelSpec:
    """Transmission and background for one photon's path.

    Noise enters as a spectral density ``noise_density`` (counts/(nm s)) times
    the filter bandwidth ``delta_lambda_nm``, plus optionally a term linear in
    a co-propagating classical power, ``noise_per_mw * launch_power_mw``
    (counts/s). With ``noise_reference="fiber"`` both are quoted at the fiber
    output and pass the receiver (``eta_r``) and polarization filter
    (``alpha_pol``); with ``"detector"`` they are effective rates at the
    detector and are used as given. ``dark_rate`` is in counts/s and
    ``delta_t`` (the coincidence window) in seconds.
    """

    eta_c: float = 1.0
    eta_ch: float = 1.0
    eta_r: float = 1.0
    theta_pol: float = 0.0
    alpha_pol: float = 0.5
    noise_density: float = 0.0
    delta_lambda_nm: float = 0.0
    delta_t: float = 0.0
    dark_rate: float = 0.0
    noise_reference: str = "fiber"
    noise_per_mw: float = 0.0
    launch_power_mw: float = 0.0

    def __post_init__(self):
        for name in ("eta_c", "eta_ch", "eta_r", "alpha_pol"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        for name in ("noise_density", "delta_lambda_nm", "delta_t", "dark_rate", "noise_per_mw", "launch_power_mw"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and non-negative, got {v!r}")
        if self.noise_reference not in NOISE_REFERENCES:
            raise DomainError(f"noise_reference must be one of {NOISE_REFERENCES}, got {self.noise_reference!r}")

    @property
    def eta(self):
        """End-to-end photon efficiency ``eta_c eta_ch eta_r cos^2(theta_pol)``."""
        return self.eta_c * self.eta_ch * self.eta_r * math.cos(self.theta_pol) ** 2

    @property
    def background_rate(self):
        """Noise photons per second before receiver factors."""
        return self.noise_density * self.delta_lambda_nm + self.noise_per_mw * self.launch_power_mw

    def fiber_background_rate(self):
        """Background rate referred to the fiber output.

        Detector-referenced rates are unfolded through ``eta_r * alpha_pol``.
        """
        if self.noise_reference == "fiber":
            return self.background_rate
        k = self.eta_r * self.alpha_pol
        if self.background_rate == 0.0:
            return 0.0
        if k == 0.0:
            raise DomainError("cannot refer detector noise to the fiber with eta_r * alpha_pol = 0")
        return self.background_rate / k

    def raman_probability(self, splitting=1.0, alpha_pol=None):
        """Background (non-dark) count probability per gate.

        ``splitting`` scales fiber-referenced noise for receiver elements
        (e.g. 1/2 for an interferometer output port); ``alpha_pol`` overrides
        the polarization pass fraction.
        """
        if self.noise_reference == "detector" and splitting == 1.0 and alpha_pol is None:
            return self.background_rate * self.delta_t
        a = self.alpha_pol if alpha_pol is None else alpha_pol
        return self.eta_r * a * splitting * self.fiber_background_rate() * self.delta_t

    def dark_probability(self):
        return self.dark_rate * self.delta_t

    def noise_probability(self, splitting=1.0, alpha_pol=None):
        """``D = (eta_r alpha_pol R dlambda + d) dT``."""
        return self.raman_probability(splitting, alpha_pol) + self.dark_probability()

    def with_power(self, launch_power_mw):
        return replace(self, launch_power_mw=float(launch_power_mw))


@dataclass(frozen=True)
class NoiseBudget:
    D_s: float
    D_i: float


def noise_budget(ch_s: ChannelSpec, ch_i: ChannelSpec) -> NoiseBudget:
    return NoiseBudget(ch_s.noise_probability(), ch_i.noise_probability())


def singles(mu_j, channel: ChannelSpec):
    """Single-detector count probability ``mu_j eta_j + D_j``."""
    if mu_j < 0:
        raise DomainError("mean photon number must be non-negative")
    return mu_j * channel.eta + channel.noise_probability()


@dataclass(frozen=True)
class RateReport:
    S_s: float
    S_i: float
    C: float
    A: float
    CAR: float
    SNR_s: float
    SNR_i: float
    mu: MuTriple
    flags: tuple = ()


def _check_low_gain(values, flags):
    if any(v > LOW_GAIN_LIMIT for v in values):
        flags.append("low_gain_out_of_range")
        warnings.warn("count probability above 0.1; the low-gain model is out of range", LowGainWarning, stacklevel=3)


def _snr(signal, noise, flags, tag):
    if noise > 0.0:
        return signal / noise
    flags.append(f"snr_{tag}_noise_free")
    return math.inf


def coincidences(mu: MuTriple, ch_s: ChannelSpec, ch_i: ChannelSpec, snr_includes_dark=True) -> RateReport:
    """Singles, coincidences, accidentals, CAR and single-detector SNR."""
    flags = list(mu.flags)
    S_s = singles(mu.mu_s, ch_s)
    S_i = singles(mu.mu_i, ch_i)
    A = S_s * S_i
    C = mu.mu_both * ch_s.eta * ch_i.eta + A
    if A > 0.0:
        car = C / A
    else:
        car = math.inf
        flags.append("car_infinite")
    n_s = ch_s.noise_probability() if snr_includes_dark else ch_s.raman_probability()
    n_i = ch_i.noise_probability() if snr_includes_dark else ch_i.raman_probability()
    snr_s = _snr(mu.mu_s * ch_s.eta, n_s, flags, "s")
    snr_i = _snr(mu.mu_i * ch_i.eta, n_i, flags, "i")
    _check_low_gain((S_s, S_i, C), flags)
    return RateReport(S_s, S_i, C, A, car, snr_s, snr_i, mu, tuple(flags))


def _check_deltas(delta_s, delta_i):
    for name, d in (("delta_s", delta_s), ("delta_i", delta_i)):
        if not 0.0 < d <= 1.0:
            raise DomainError(f"{name} must lie in (0, 1], got {d!r}")


def car_noisy(mu_both, delta_s, delta_i, eta_s, eta_i, D_s, D_i):
    """CAR as a function of the joint photon number ``mu_both``.

    Uses ``mu_s = mu_both / delta_i`` and ``mu_i = mu_both / delta_s``. Accepts
    arrays for ``mu_both``. Returns ``inf`` where no accidentals occur.
    """
    _check_deltas(delta_s, delta_i)
    mu_both = np.asarray(mu_both, dtype=float)
    acc = (mu_both / delta_i * eta_s + D_s) * (mu_both / delta_s * eta_i + D_i)
    true = mu_both * eta_s * eta_i
    with np.errstate(divide="ignore", invalid="ignore"):
        car = np.where(acc > 0.0, true / np.where(acc > 0.0, acc, 1.0) + 1.0, np.where(true > 0.0, np.inf, 1.0))
    return float(car) if car.ndim == 0 else car


@dataclass(frozen=True)
class OptimumReport:
    """CAR-maximizing operating point.

    ``mu_si_opt`` is the optimal per-photon number when both heralding
    efficiencies equal ``delta_ps``; it does not depend on ``delta_ps``.
    """

    mu_both_opt: float
    car_max: float
    mu_si_opt: float
    delta_ps: float
    flags: tuple = ()


def mu_opt_and_car_max(delta_s, delta_i, eta_s, eta_i, D_s, D_i) -> OptimumReport:
    """Closed-form optimum of :func:`car_noisy` over ``mu_both``."""
    _check_deltas(delta_s, delta_i)
    if not (eta_s > 0.0 and eta_i > 0.0):
        raise DomainError("channel efficiencies must be positive")
    if D_s < 0 or D_i < 0:
        raise DomainError("noise probabilities must be non-negative")
    d_ps = math.sqrt(delta_s * delta_i)
    if D_s == 0.0 or D_i == 0.0:
        return OptimumReport(math.inf, math.inf, math.inf, d_ps, ("unbounded_optimum",))
    dd = D_s * D_i
    ee = eta_s * eta_i
    mu_si = math.sqrt(dd / ee)
    mu_opt = d_ps * mu_si
    car_max = d_ps * math.sqrt(ee * dd) / (2.0 * dd + d_ps * mu_si * (eta_s * D_i / delta_i + eta_i * D_s / delta_s)) + 1.0
    return OptimumReport(mu_opt, car_max, mu_si, d_ps)


def car_max_equal_fhe(delta_ps, eta_s, eta_i, D_s, D_i):
    """Maximum CAR when ``delta_s = delta_i = delta_ps``."""
    return mu_opt_and_car_max(delta_ps, delta_ps, eta_s, eta_i, D_s, D_i).car_max


def mu_from_car_dark(car_dark, delta_s, delta_i):
    """Invert the noise-free CAR.

    Returns ``(mu_both, mu_si)``: the joint photon number implied by
    ``CAR_dark = delta_s delta_i / mu_both + 1`` and the per-photon number in
    the equal-efficiency approximation, ``delta_ps / (CAR_dark - 1)``.
    """
    _check_deltas(delta_s, delta_i)
    if not car_dark > 1.0:
        raise DomainError(f"noise-free CAR must exceed 1, got {car_dark!r}")
    excess = car_dark - 1.0
    return delta_s * delta_i / excess, math.sqrt(delta_s * delta_i) / excess


def thermal_pn(mu, m):
    """Probability of ``m`` pairs in one thermal mode with mean ``mu``."""
    if mu < 0:
        raise DomainError("mu must be non-negative")
    if int(m) != m or m < 0:
        raise DomainError("m must be a non-negative integer")
    if mu == 0.0:
        return 1.0 if m == 0 else 0.0
    return math.exp(m * math.log(mu) - (m + 1) * math.log1p(mu))


def poisson_pn(mu, m):
    """Poisson probability of ``m`` pairs, the many-mode limit of :func:`thermal_pn`."""
    return float(stats.poisson.pmf(m, mu))


def optimum_for_mu_triple(mu: MuTriple, ch_s: ChannelSpec, ch_i: ChannelSpec) -> OptimumReport:
    """CAR optimum for the filtering encoded in ``mu`` (its scale is ignored)."""
    if mu.delta_s is None or mu.delta_i is None or mu.mu_both == 0.0:
        raise DegenerateInputError("heralding efficiencies are undefined for this filter pair")
    return mu_opt_and_car_max(
        mu.delta_s, mu.delta_i, ch_s.eta, ch_i.eta, ch_s.noise_probability(), ch_i.noise_probability()
    )


def car_curve(mu_s_values, mu: MuTriple, ch_s: ChannelSpec, ch_i: ChannelSpec, snr_includes_dark=True):
    """Rate reports with the pump rescaled so that ``mu_s`` takes each value."""
    if mu.mu_s <= 0:
        raise DegenerateInputError("signal filter passes no photons")
    out = []
    for target in np.atleast_1d(mu_s_values):
        out.append(coincidences(mu.scaled(float(target) / mu.mu_s), ch_s, ch_i, snr_includes_dark))
    return out


def effective_density_from_gated(counts_per_s, rep_rate_hz, delta_lambda_nm, delta_t):
    """Detector-referenced noise density (counts/(nm s)) from gated noise counts.

    ``counts_per_s`` noise counts registered in a ``delta_t`` window once per
    pulse at ``rep_rate_hz`` correspond to a per-gate probability
    ``counts_per_s / rep_rate_hz``.
    """
    if rep_rate_hz <= 0 or delta_lambda_nm <= 0 or delta_t <= 0:
        raise DomainError("rate, bandwidth and window must be positive")
    return counts_per_s / (rep_rate_hz * delta_lambda_nm * delta_t)
