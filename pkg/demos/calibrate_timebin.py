"""Fit the single efficiency scale of the time-bin link model.

The measured heralding efficiencies fix the ratio between the two channel
efficiencies but not their absolute size once filter heralding is divided
out. One multiplicative scale is fitted so that the modelled threshold
crossings match six reported launch powers: the four measured X/Z crossings,
the X nonlocality crossing with an optimized pump, and the X nonlocality
crossing with perfect heralding at the measured pump.

Run:  python demos/calibrate_timebin.py
"""

import math

import numpy as np
from scipy import optimize

from pairfilter import entanglement as ent
from pairfilter import reference as ref

SEARCH_DBM = (-30.0, 30.0)


def modelled_crossings(scale):
    rx, src, ch_s, ch_i = ref.timebin_experiment(scale)
    model, reported, labels = [], [], []
    for (basis, name), p in ref.REPORTED_CROSSINGS.items():
        model.append(ent.threshold_crossing(basis, rx, src, ch_s, ch_i, ent.THRESHOLDS[name], *SEARCH_DBM))
        reported.append(p)
        labels.append(f"{basis.upper()} {name}")
    nl = ent.NONLOCALITY_VISIBILITY
    model.append(ent.threshold_crossing("x", rx, src, ch_s, ch_i, nl, *SEARCH_DBM, optimize_mu=True))
    reported.append(ref.REPORTED_OPTIMIZED_MU_X_NONLOCALITY)
    labels.append("X nonlocality, optimized pump")
    perfect = ent.EntangledSource(ref.perfect_fhe_mu(), src.v_int)
    model.append(ent.threshold_crossing("x", rx, perfect, ch_s, ch_i, nl, *SEARCH_DBM))
    reported.append(ref.REPORTED_PERFECT_FHE_X_NONLOCALITY)
    labels.append("X nonlocality, perfect heralding")
    return np.array(model), np.array(reported), labels


def residuals(log_scale):
    model, reported, _ = modelled_crossings(math.exp(log_scale[0]))
    return model - reported


def main():
    fit = optimize.least_squares(residuals, x0=[0.0])
    scale = math.exp(fit.x[0])
    model, reported, labels = modelled_crossings(scale)
    print(f"fitted efficiency scale: {scale:.3f}  (library constant {ref.EFFICIENCY_SCALE})")
    print(f"rms residual: {math.sqrt(np.mean((model - reported) ** 2)):.2f} dB")
    for label, m, r in zip(labels, model, reported):
        print(f"  {label:<34} model {m:6.2f} dBm   reported {r:6.2f} dBm")


if __name__ == "__main__":
    main()
