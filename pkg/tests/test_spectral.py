import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import OMEGA0, factorable_source, make_source
from pairfilter import gaussian, reference, spectral, units
from pairfilter.errors import CoverageError, DegenerateInputError, DomainError, ResolutionError
from pairfilter.spectral import FilterSpec, GridConfig, MuTriple, SourceSpec


def gauss_filters(fwhm, center=OMEGA0):
    return FilterSpec.gaussian(fwhm, center), FilterSpec.gaussian(fwhm, center)


# pump width conversion


def test_pump_sigma_at_50ps():
    assert spectral.pump_sigma_from_fwhm(50e-12) == pytest.approx(2 * math.sqrt(math.log(2)) / 50e-12, rel=1e-15)
    assert spectral.pump_sigma_from_fwhm(50e-12) == pytest.approx(3.330e10, rel=1e-3)


def test_pump_sigma_scales_inversely():
    assert spectral.pump_sigma_from_fwhm(25e-12) == pytest.approx(2 * spectral.pump_sigma_from_fwhm(50e-12))
    assert spectral.pump_sigma_from_fwhm(1e6) < 1e-5


def test_pump_sigma_matches_fourier_transform_of_pulse():
    # field e^{-2 ln2 t^2 / tau^2} has intensity FWHM tau
    tau = 50e-12
    t = np.linspace(-40 * tau, 40 * tau, 1 << 16)
    field = np.exp(-2 * math.log(2) * t**2 / tau**2)
    spec = np.abs(np.fft.fftshift(np.fft.fft(field)))
    w = np.fft.fftshift(np.fft.fftfreq(t.size, t[1] - t[0])) * 2 * math.pi
    sigma_fft = math.sqrt(np.sum(w**2 * spec) / np.sum(spec))
    assert sigma_fft == pytest.approx(spectral.pump_sigma_from_fwhm(tau), rel=1e-6)


def test_time_bandwidth_product():
    tau = 7e-12
    sigma = spectral.pump_sigma_from_fwhm(tau)
    # intensity spectrum std sigma/sqrt(2); FWHM in Hz
    fwhm_hz = sigma / math.sqrt(2) * spectral.FWHM_PER_SIGMA / (2 * math.pi)
    assert fwhm_hz * tau == pytest.approx(2 * math.log(2) / math.pi, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1e-12, math.nan])
def test_pump_sigma_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        spectral.pump_sigma_from_fwhm(bad)


def test_pm_conversion_50pm():
    assert units.pm_to_hz(50, 1536.5) == pytest.approx(6.35e9, rel=2e-3)


# source validation


def test_source_requires_exactly_one_pump_width():
    with pytest.raises(DomainError):
        SourceSpec(pm_sigma=1e10, pm_angle=1.0)
    with pytest.raises(DomainError):
        SourceSpec(pm_sigma=1e10, pm_angle=1.0, pump_sigma=1e10, pump_fwhm_ps=50)


@pytest.mark.parametrize(
    "kw", [dict(pm_sigma=-1.0), dict(pm_angle=math.pi), dict(pm_angle=-0.1), dict(mu_total=-1.0)]
)
def test_source_invariants(kw):
    base = dict(pm_sigma=1e10, pm_angle=1.0, pump_sigma=1e10)
    base.update(kw)
    with pytest.raises(DomainError):
        SourceSpec(**base)


# filter transmission


@pytest.mark.parametrize("shape", ["gaussian", "flat_top"])
def test_filter_peak_and_half_max(shape):
    f = FilterSpec.from_pm(shape, 50.0)
    fwhm = f.fwhm
    assert spectral.filter_transmission(f, f.center) == pytest.approx(1.0, abs=1e-15)
    assert spectral.filter_transmission(f, f.center + fwhm / 2) == pytest.approx(0.5, abs=1e-12)
    assert spectral.filter_transmission(f, f.center - fwhm / 2) == pytest.approx(0.5, abs=1e-12)


def test_flat_top_flatter_than_gaussian():
    g = FilterSpec.gaussian(1e10, 0.0)
    ft = FilterSpec.flat_top(1e10, 0.0, 4)
    w = 1e10 / 4
    assert spectral.filter_transmission(ft, w) > spectral.filter_transmission(g, w)


def test_gaussian_transmission_formula():
    f = FilterSpec.gaussian(1e10, 5.0)
    sigma = 1e10 / spectral.FWHM_PER_SIGMA
    w = 5.0 + 0.7e10
    assert spectral.filter_transmission(f, w) == pytest.approx(math.exp(-(0.7e10**2) / (2 * sigma**2)), rel=1e-14)


def test_tabulated_interpolates_and_vanishes_outside():
    f = FilterSpec.tabulated([-2.0, 0.0, 2.0], [0.0, 1.0, 0.0], center=10.0)
    assert spectral.filter_transmission(f, 11.0) == pytest.approx(0.5)
    assert spectral.filter_transmission(f, 13.0) == 0.0
    assert f.fwhm == pytest.approx(2.0)


@pytest.mark.parametrize(
    "det, tr",
    [([0.0, 0.0, 1.0], [0.1, 0.2, 0.3]), ([0.0, 1.0], [0.5, 1.5]), ([0.0, 1.0], [-0.1, 0.5]), ([0.0], [1.0])],
)
def test_tabulated_invariants(det, tr):
    with pytest.raises(DomainError):
        FilterSpec.tabulated(det, tr)


def test_filter_rejects_bad_fwhm_and_order():
    with pytest.raises(DomainError):
        FilterSpec.gaussian(0.0)
    with pytest.raises(DomainError):
        FilterSpec.flat_top(1e10, 0.0, 0)


def test_load_filter_csv(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("# measured\ndetuning_pm,transmission\n25,0.0\n0,1.0\n-25,0.0\n")
    f = spectral.load_filter_csv(p, 1536.5)
    assert f.shape == "tabulated"
    assert f.fwhm_pm(1536.5) == pytest.approx(25.0, rel=1e-9)
    # redder wavelength is lower frequency
    det, _ = f.table
    assert np.all(np.diff(det) > 0)


def test_load_filter_csv_rejects_garbage(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("0,1\nfoo,bar\n")
    with pytest.raises(DomainError):
        spectral.load_filter_csv(p)


# JSA construction


def test_jsa_normalized(source):
    jsa = spectral.build_jsa(source)
    assert jsa.integral() == pytest.approx(1.0, abs=1e-9)
    # sinc side lobes beyond the +-5 sigma window hold a few percent of the pairs
    assert 0.9 < jsa.norm_check < 1.0


def test_jsa_gaussian_form_captures_full_norm(source):
    jsa = spectral.build_jsa(source, phase_matching="gaussian")
    assert jsa.norm_check == pytest.approx(1.0, abs=1e-6)


def test_coarse_grid_raises(source):
    with pytest.raises(ResolutionError):
        spectral.build_jsa(source, GridConfig(points=16, min_points_per_sigma=2.0))


def test_unbounded_source_needs_explicit_window():
    src = make_source(pm_angle=math.pi / 4)
    with pytest.raises(ResolutionError):
        spectral.build_jsa(src)
    jsa = spectral.build_jsa(src, GridConfig(half_width_s=2e11, half_width_i=2e11))
    assert jsa.norm_check == 0.0


def test_reference_marginals_match_closed_form():
    src = reference.reference_source()
    jsa = spectral.build_jsa(src, GridConfig(points=1024), phase_matching="gaussian")
    cov = np.linalg.inv(src.unfiltered_precision())
    for grid, marg, var in ((jsa.grid_s, jsa.marginal_s(), cov[0, 0]), (jsa.grid_i, jsa.marginal_i(), cov[1, 1])):
        std = math.sqrt(np.sum(grid**2 * marg) / np.sum(marg))
        assert std == pytest.approx(math.sqrt(var), rel=5e-3)


def test_reference_ridge_is_anti_diagonal():
    jsa = spectral.build_jsa(reference.reference_source())
    w = jsa.amplitude**2
    x, y = np.meshgrid(jsa.grid_s, jsa.grid_i, indexing="ij")
    assert np.sum(w * x * y) < 0


# filtered means


def test_all_pass_filters_pass_everything(source):
    jsa = spectral.build_jsa(source)
    ap = FilterSpec.all_pass(OMEGA0)
    mu = spectral.filtered_means(jsa, ap, ap, mu_total=0.3)
    assert mu.mu_s == pytest.approx(0.3, rel=1e-5)
    assert mu.mu_both == pytest.approx(0.3, rel=1e-5)
    assert mu.delta_s == pytest.approx(1.0)
    assert mu.delta_i == pytest.approx(1.0)


def test_filter_off_grid_raises(source):
    jsa = spectral.build_jsa(source)
    far = FilterSpec.gaussian(1e9, OMEGA0 + 1e13)
    with pytest.raises(CoverageError):
        spectral.filtered_means(jsa, far, far)


def test_quadrature_matches_closed_form(source):
    jsa = spectral.build_jsa(source, phase_matching="gaussian")
    f_s, f_i = gauss_filters(2e10)
    mu = spectral.filtered_means(jsa, f_s, f_i)
    rep = gaussian.report_for_filters(source, f_s, f_i)
    assert mu.mu_both == pytest.approx(rep.gamma_both, rel=1e-5)
    assert mu.delta_s == pytest.approx(rep.delta_s, rel=1e-5)
    assert mu.delta_i == pytest.approx(rep.delta_i, rel=1e-5)
    assert mu.converged


def test_doubling_resolution_changes_little(source):
    f_s, f_i = (FilterSpec.flat_top(2e10, OMEGA0, 4),) * 2
    a = spectral.filtered_means(spectral.build_jsa(source, GridConfig(points=256)), f_s, f_i)
    b = spectral.filtered_means(spectral.build_jsa(source, GridConfig(points=512)), f_s, f_i)
    for q in ("mu_s", "mu_i", "mu_both"):
        assert getattr(a, q) == pytest.approx(getattr(b, q), rel=1e-3)


def test_widening_filters_never_decreases_means(source):
    jsa = spectral.build_jsa(source)
    prev = None
    for fwhm in (5e9, 1e10, 2e10, 4e10, 8e10):
        mu = spectral.filtered_means(jsa, *gauss_filters(fwhm))
        if prev is not None:
            assert mu.mu_s >= prev.mu_s and mu.mu_i >= prev.mu_i and mu.mu_both >= prev.mu_both
        prev = mu


def test_narrowing_signal_never_increases_delta_s(source):
    jsa = spectral.build_jsa(source)
    f_i = FilterSpec.gaussian(2e10, OMEGA0)
    deltas = [spectral.filtered_means(jsa, FilterSpec.gaussian(w, OMEGA0), f_i).delta_s for w in (4e10, 2e10, 1e10, 5e9)]
    assert all(b <= a + 1e-12 for a, b in zip(deltas, deltas[1:]))


def test_wide_filters_give_unit_fhe(source):
    jsa = spectral.build_jsa(source)
    # this source's ridge extends to ~1.7e12 rad/s
    mu = spectral.filtered_means(jsa, *gauss_filters(1e16))
    assert mu.delta_s == pytest.approx(1.0, abs=1e-6)
    assert mu.delta_i == pytest.approx(1.0, abs=1e-6)


def test_flat_top_fhe_not_below_gaussian():
    src = reference.reference_source()
    jsa = spectral.build_jsa(src, phase_matching="gaussian")
    for pm in (20, 50, 100, 300, 1000):
        g = spectral.filtered_means(jsa, *spectral.symmetric_filters("gaussian", pm, src))
        ft = spectral.filtered_means(jsa, *spectral.symmetric_filters("flat_top", pm, src))
        assert ft.delta_ps >= g.delta_ps


def test_tabulated_gaussian_reproduces_parametric(source):
    fwhm = 2e10
    g = FilterSpec.gaussian(fwhm, OMEGA0)
    det = np.linspace(-4 * fwhm, 4 * fwhm, 4001)
    # table stores intensity transmission g^2
    tab = FilterSpec.tabulated(det, spectral.filter_transmission(g, OMEGA0 + det) ** 2, OMEGA0)
    jsa = spectral.build_jsa(source)
    a = spectral.filtered_means(jsa, g, g)
    b = spectral.filtered_means(jsa, tab, tab)
    assert b.mu_both == pytest.approx(a.mu_both, rel=1e-4)


def test_offset_filter_passes_fewer_pairs(source):
    jsa = spectral.build_jsa(source)
    centered = spectral.filtered_means(jsa, *gauss_filters(1e10))
    shifted = spectral.filtered_means(jsa, FilterSpec.gaussian(1e10, OMEGA0 + 2e10), FilterSpec.gaussian(1e10, OMEGA0))
    assert shifted.mu_both < centered.mu_both


@settings(max_examples=25, deadline=None)
@given(
    fs=st.floats(3e9, 1e11),
    fi=st.floats(3e9, 1e11),
    shape=st.sampled_from(["gaussian", "flat_top"]),
)
def test_ordering_invariant(fs, fi, shape):
    src = make_source()
    jsa = spectral.build_jsa(src)
    make = FilterSpec.gaussian if shape == "gaussian" else FilterSpec.flat_top
    mu = spectral.filtered_means(jsa, make(fs, OMEGA0), make(fi, OMEGA0))
    assert 0.0 <= mu.mu_both <= min(mu.mu_s, mu.mu_i) <= src.mu_total * (1 + 1e-9)
    assert 0.0 <= mu.delta_s <= 1.0 and 0.0 <= mu.delta_i <= 1.0
    assert mu.delta_ps == pytest.approx(math.sqrt(mu.delta_s * mu.delta_i))


# MuTriple


def test_mutriple_measured_operating_point():
    mu = reference.timebin_mu()
    assert mu.delta_s == pytest.approx(0.227, abs=1e-3)
    assert mu.delta_i == pytest.approx(0.25)
    assert mu.delta_s == pytest.approx(reference.DELTA_S, rel=0.16)
    assert mu.delta_i == pytest.approx(reference.DELTA_I, rel=0.2)


def test_mutriple_undefined_delta_is_flagged():
    mu = MuTriple(0.0, 0.0, 0.0)
    assert mu.delta_s is None and mu.delta_i is None
    assert set(mu.flags) == {"delta_s_undefined", "delta_i_undefined"}
    assert mu.delta_ps is None


def test_mutriple_rejects_negative():
    with pytest.raises(DomainError):
        MuTriple(-1.0, 0.1, 0.1)


def test_scaled_keeps_deltas():
    mu = reference.timebin_mu().scaled(3.0)
    assert mu.mu_both == pytest.approx(7.5e-4)
    assert mu.delta_s == pytest.approx(2.5e-4 / 1.1e-3)


# purity


def test_factorable_purity_is_one():
    src = factorable_source()
    jsa = spectral.build_jsa(src, phase_matching="gaussian")
    ap = FilterSpec.all_pass(OMEGA0)
    assert spectral.schmidt_purity(jsa, ap, ap) == pytest.approx(1.0, abs=1e-6)


def test_purity_drops_with_narrow_pump():
    values = []
    for sp in (6e10, 3e10, 1.5e10):
        src = make_source(pump_sigma=sp, pm_sigma=3e10, pm_angle=1.4)
        jsa = spectral.build_jsa(src, phase_matching="gaussian")
        ap = FilterSpec.all_pass(OMEGA0)
        values.append(spectral.schmidt_purity(jsa, ap, ap))
    assert values[0] > values[1] > values[2]
    assert values[-1] < 0.5


def test_svd_purity_matches_closed_form(source):
    jsa = spectral.build_jsa(source, phase_matching="gaussian")
    f_s, f_i = gauss_filters(2e10)
    rep = gaussian.report_for_filters(source, f_s, f_i)
    assert spectral.schmidt_purity(jsa, f_s, f_i) == pytest.approx(rep.purity, rel=1e-3)


def test_opaque_table_rejected():
    with pytest.raises(DomainError):
        FilterSpec.tabulated([-1.0, 1.0], [0.0, 0.0], OMEGA0)


# temporal width


def test_width_ratio_tends_to_one_for_wide_filter():
    # broad phase matching: the unfiltered photon inherits the pump duration
    src = SourceSpec(pm_sigma=1e11, pm_angle=1.0, pump_fwhm_ps=50, center_s=OMEGA0, center_i=OMEGA0)
    r = spectral.photon_pump_width_ratio(src, FilterSpec.all_pass(src.center_s))
    assert r == pytest.approx(1.0, abs=5e-3)


def test_width_ratio_non_increasing_in_bandwidth():
    src = reference.reference_source()
    ratios = [
        spectral.photon_pump_width_ratio(src, spectral.symmetric_filters("gaussian", pm, src)[0])
        for pm in (25, 50, 100, 200, 400, 1000)
    ]
    assert all(b <= a + 1e-3 for a, b in zip(ratios, ratios[1:]))


def test_width_ratio_anchor_at_50pm():
    src = reference.reference_source()
    r = spectral.photon_pump_width_ratio(src, spectral.symmetric_filters("gaussian", 50, src)[0])
    assert r == pytest.approx(1.5, abs=0.3)


# export


def test_export_jsa_csv(tmp_path, source):
    jsa = spectral.build_jsa(source, GridConfig(points=32, min_points_per_sigma=0.1))
    path = tmp_path / "jsa.csv"
    spectral.export_jsa_csv(jsa, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    header = lines[1].split(",")
    assert len(header) == 33
    assert float(header[1]) == pytest.approx(float(units.omega_to_wavelength_nm(OMEGA0 + jsa.grid_i[0])), abs=1e-6)
    first = [float(v) for v in lines[2].split(",")[1:]]
    assert first == pytest.approx(list(jsa.amplitude[0] ** 2), rel=1e-15)
