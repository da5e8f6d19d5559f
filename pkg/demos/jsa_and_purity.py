"""Joint spectrum of the illustrative 50 ps source and what filtering does to it.

Prints marginal pass fractions, heralding efficiencies and heralded purity for
a few symmetric Gaussian filters, first on the sinc joint spectrum by
quadrature and then on its Gaussian stand-in in closed form. Pass a path to
also write the sampled joint spectral intensity as CSV.

Run:  python demos/jsa_and_purity.py [jsi.csv]
"""

import sys

from pairfilter import gaussian, reference, spectral


def main(export=None):
    src = reference.reference_source()
    jsa = spectral.build_jsa(src)
    print(f"pump sigma {src.pump_sigma:.3e} rad/s, grid {jsa.amplitude.shape}, captured norm {jsa.norm_check:.3f}")
    open_s, open_i = spectral.FilterSpec.all_pass(src.center_s), spectral.FilterSpec.all_pass(src.center_i)
    print(f"unfiltered purity (sinc): {spectral.schmidt_purity(jsa, open_s, open_i):.3f}")
    print(f"{'FWHM pm':>8} {'delta_s':>8} {'delta_i':>8} {'PSHE':>7} {'purity':>7} | {'PSHE gauss':>10} {'purity gauss':>12}")
    for fwhm in (20, 50, 100, 300, 1000):
        f_s, f_i = spectral.symmetric_filters("gaussian", fwhm, src)
        mu = spectral.filtered_means(jsa, f_s, f_i)
        purity = spectral.schmidt_purity(jsa, f_s, f_i)
        cf = gaussian.report_for_filters(src, f_s, f_i)
        print(f"{fwhm:>8} {mu.delta_s:8.3f} {mu.delta_i:8.3f} {mu.delta_ps:7.3f} {purity:7.3f} | {cf.delta_ps:10.3f} {cf.purity:12.3f}")
    if export:
        spectral.export_jsa_csv(jsa, export)
        print(f"wrote {export}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
