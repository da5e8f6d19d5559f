"""How the pump duration limits heralding through narrow filters.

Runs ``scenarios/pump_width.json`` (2, 20 and 200 ps pumps against 32, 100
and 500 pm filters, with the signal rate swept). A short pump spreads the
idler over a wide band, so filtering the signal leaves many partners
outside the idler filter: PSHE drops, and with it the achievable CAR.

Run:  python demos/pump_width.py [out.csv]
"""

import sys
from collections import defaultdict
from pathlib import Path

from pairfilter import scenario

HERE = Path(__file__).resolve().parent


def main(out=None):
    res = scenario.run_scenario(HERE / "scenarios" / "pump_width.json")
    best = defaultdict(dict)
    for tau, fwhm, mu_s, q, value, _ in res.rows:
        if q in ("delta_ps", "purity", "CAR_max"):
            best[(tau, fwhm)][q] = value
        elif q == "CAR":
            cur = best[(tau, fwhm)].get("CAR_peak", (0.0, None))
            if value > cur[0]:
                best[(tau, fwhm)]["CAR_peak"] = (value, mu_s)
    print(f"{'pump ps':>7} {'FWHM pm':>8} {'PSHE':>6} {'purity':>7} {'CAR max':>8} {'at mu_s':>8}")
    for (tau, fwhm), v in sorted(best.items()):
        car, mu_s = v["CAR_peak"]
        print(f"{tau:7.0f} {fwhm:8.0f} {v['delta_ps']:6.3f} {v['purity']:7.3f} {car:8.1f} {mu_s:8.1e}")
    if out:
        res.write(out)
        print(f"wrote {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
