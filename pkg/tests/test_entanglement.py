import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairfilter import entanglement as ent
from pairfilter import reference
from pairfilter.detection import ChannelSpec
from pairfilter.entanglement import INTERFEROMETER, POLARIZATION, SWITCH, EntangledSource, Receiver
from pairfilter.errors import DomainError
from pairfilter.spectral import MuTriple

MU = reference.timebin_mu()


def channel(noise_per_mw=1e5, eta=0.05, dark=0.0):
    return ChannelSpec(
        eta_c=0.6,
        eta_ch=0.3,
        eta_r=eta,
        alpha_pol=0.5,
        delta_lambda_nm=0.05,
        delta_t=200e-12,
        dark_rate=dark,
        noise_per_mw=noise_per_mw,
    )


def vis(basis, variant, pf, source, p_dbm, ch=None):
    ch = ch or channel()
    return ent.visibility_at_power(p_dbm, basis, Receiver(variant, pf), source, ch, ch)[0]


def noise_free_v():
    return MU.mu_both / (MU.mu_both + 2 * MU.mu_s * MU.mu_i)


def test_noise_free_xy_and_z():
    src = EntangledSource(MU, v_int=1.0)
    ch = channel(0.0)
    rep = ent.visibility(Receiver(INTERFEROMETER), src, ch, ch)
    assert rep.V_z == pytest.approx(noise_free_v(), rel=1e-12)
    assert rep.V_x == pytest.approx(noise_free_v(), rel=1e-12)
    assert rep.V_z == pytest.approx(0.9913, abs=5e-5)


def test_noise_free_xy_scales_with_interferometer():
    src = EntangledSource(MU, v_int=0.98)
    ch = channel(0.0)
    rep = ent.visibility(Receiver(INTERFEROMETER), src, ch, ch)
    assert rep.V_x == pytest.approx(0.98 * noise_free_v(), rel=1e-12)
    assert rep.V_y == rep.V_x
    assert rep.V_x == pytest.approx(0.9716, abs=5e-4)


def test_ideal_bell_state_limit():
    src = EntangledSource(MU.scaled(1e-6), v_int=1.0)
    ch = channel(0.0)
    assert ent.visibility(Receiver(INTERFEROMETER), src, ch, ch).V_x == pytest.approx(1.0, abs=1e-5)


def test_fringe_extrema_and_contrast():
    src = EntangledSource(MU, v_int=0.93)
    ch = channel().with_power(0.5)
    phis = np.linspace(0, 2 * math.pi, 721)
    c = np.array([ent.timebin_xy(p, src, ch, ch).C for p in phis])
    assert int(np.argmax(c)) in (0, 720)
    assert phis[int(np.argmin(c))] == pytest.approx(math.pi)
    hi, lo = ent.timebin_xy(0.0, src, ch, ch).C, ent.timebin_xy(math.pi, src, ch, ch).C
    assert hi - lo == pytest.approx(0.25 * MU.mu_both * ch.eta**2 * 0.93, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(phi=st.floats(0, 2 * math.pi), p=st.floats(0, 10))
def test_fringe_sum_independent_of_phase(phi, p):
    src = EntangledSource(MU)
    ch = channel().with_power(p)
    s = ent.timebin_xy(phi, src, ch, ch).C + ent.timebin_xy(phi + math.pi, src, ch, ch).C
    s0 = ent.timebin_xy(0.0, src, ch, ch).C + ent.timebin_xy(math.pi, src, ch, ch).C
    assert s == pytest.approx(s0, rel=1e-12)


def test_xy_singles_halve_noise():
    ch = channel().with_power(1.0)
    s = ent.timebin_singles_xy(1e-3, ch, polarization_filtering=True)
    assert s == pytest.approx(0.5e-3 * ch.eta + 0.5 * ch.eta_r * 0.5 * ch.background_rate * ch.delta_t)


def test_zero_source_z_visibility_zero():
    src = EntangledSource(MuTriple(0.0, 0.0, 0.0))
    ch = channel().with_power(1.0)
    assert ent.timebin_z(INTERFEROMETER, src, ch, ch).visibility == 0.0


def test_z_switch_rejects_polarization_variant():
    with pytest.raises(DomainError):
        ent.timebin_z(POLARIZATION, EntangledSource(MU), channel(), channel())


def test_receiver_variant_validated():
    with pytest.raises(DomainError):
        Receiver("franson")
    with pytest.raises(DomainError):
        EntangledSource(MU, v_int=1.5)


@pytest.mark.parametrize("p_dbm", [-20.0, -10.0, -5.0, 0.0, 5.0])
def test_basis_ordering_with_noise(p_dbm):
    src = EntangledSource(MU, v_int=1.0)
    v_z_int = vis("z", INTERFEROMETER, False, src, p_dbm)
    v_xy = vis("x", INTERFEROMETER, False, src, p_dbm)
    v_z_sw = vis("z", SWITCH, False, src, p_dbm)
    assert v_z_int < v_xy
    # a perfect interferometer without dark counts makes X/Y and switch Z coincide
    assert v_xy == pytest.approx(v_z_sw, rel=1e-12)
    lossy = EntangledSource(MU, v_int=0.98)
    assert vis("x", INTERFEROMETER, False, lossy, p_dbm) < v_z_sw
    dark = channel(dark=1e4)
    assert vis("x", INTERFEROMETER, False, src, p_dbm, dark) < vis("z", SWITCH, False, src, p_dbm, dark)


@pytest.mark.parametrize("p_dbm", [-math.inf, -20.0, -3.0, 0.0, 4.0, 10.0])
def test_polarizers_equalize_receivers(p_dbm):
    src = EntangledSource(MU, v_int=1.0)
    v_xy = vis("x", INTERFEROMETER, True, src, p_dbm)
    v_sw = vis("z", SWITCH, True, src, p_dbm)
    v_pol = vis("x", POLARIZATION, False, src, p_dbm)
    assert v_xy == pytest.approx(v_pol, abs=1e-9)
    assert v_sw == pytest.approx(v_pol, abs=1e-9)


def test_polarization_pair_term_four_times_timebin():
    src = EntangledSource(MU, v_int=1.0)
    ch = channel(0.0)
    pol = ent.polarization_counts(src, ch, ch)
    xy = ent.timebin_xy_counts(src, ch, ch)
    assert pol.C_max - pol.S_s * pol.S_i == pytest.approx(4 * (xy.C_max - xy.S_s * xy.S_i), rel=1e-12)


@pytest.mark.parametrize("p_dbm", [-20.0, -5.0, 0.0, 5.0])
def test_polarization_beats_unfiltered_timebin(p_dbm):
    src = EntangledSource(MU, v_int=1.0)
    assert vis("x", POLARIZATION, False, src, p_dbm) > vis("x", INTERFEROMETER, False, src, p_dbm)


@pytest.mark.parametrize("variant, basis", [(INTERFEROMETER, "x"), (INTERFEROMETER, "z"), (SWITCH, "z")])
def test_polarization_filtering_never_hurts(variant, basis):
    src = EntangledSource(MU)
    for p in (-20.0, -5.0, 0.0, 5.0):
        assert vis(basis, variant, True, src, p) >= vis(basis, variant, False, src, p)


def test_visibility_non_increasing_in_power():
    src = EntangledSource(MU)
    curve = ent.visibility_vs_power(np.linspace(-30, 10, 41), Receiver(INTERFEROMETER), src, channel(), channel())
    for b in ("x", "z"):
        v = curve.visibility[b]
        assert np.all(np.diff(v) <= 1e-15)
        assert np.all((v >= 0) & (v <= 1))


def test_curve_crossings_match_root_search():
    src = EntangledSource(MU)
    ch = channel()
    rx = Receiver(INTERFEROMETER)
    curve = ent.visibility_vs_power(np.linspace(-30, 30, 13), rx, src, ch, ch)
    p = curve.crossing("x", "qkd")
    assert p is not None
    assert ent.visibility_at_power(p, "x", rx, src, ch, ch)[0] == pytest.approx(ent.QKD_VISIBILITY, abs=1e-9)


def test_zero_power_is_noise_free():
    src = EntangledSource(MU, v_int=1.0)
    v = ent.visibility_at_power(-math.inf, "z", Receiver(INTERFEROMETER), src, channel(), channel())[0]
    assert v == pytest.approx(noise_free_v(), rel=1e-12)


def test_power_grid_validation():
    with pytest.raises(DomainError):
        ent.visibility_vs_power([0.0, -1.0], Receiver(INTERFEROMETER), EntangledSource(MU), channel(), channel())


# pump optimization


@pytest.mark.parametrize("basis, variant", [("x", INTERFEROMETER), ("z", INTERFEROMETER), ("z", SWITCH), ("x", POLARIZATION)])
def test_search_finds_analytic_optimum(basis, variant):
    rx = Receiver(variant, polarization_filtering=True)
    ch = channel().with_power(1.0)
    src = EntangledSource(MU)
    opt = ent.maximize_visibility(basis, rx, src, ch, ch)
    assert opt.converged and not opt.flags
    assert opt.mu_both == pytest.approx(ent.optimal_mu_both(basis, rx, src, ch, ch), rel=1e-3)


def test_optimum_at_bound_is_flagged():
    ch = channel(0.0)
    opt = ent.maximize_visibility("x", Receiver(INTERFEROMETER), EntangledSource(MU), ch, ch)
    assert "mu_at_bound" in opt.flags
    assert opt.mu_both == pytest.approx(ent.MU_BOTH_BOUNDS[0])


def test_optimizing_never_lowers_visibility():
    rx = Receiver(INTERFEROMETER, True)
    src = EntangledSource(MU)
    for p in (-10.0, 0.0, 3.0):
        fixed = ent.visibility_at_power(p, "x", rx, src, channel(), channel())[0]
        best = ent.visibility_at_power(p, "x", rx, src, channel(), channel(), optimize_mu=True)[0]
        assert best >= fixed - 1e-12


def test_crossing_none_when_not_bracketed():
    rx = Receiver(INTERFEROMETER)
    src = EntangledSource(MU)
    assert ent.threshold_crossing("x", rx, src, channel(0.0), channel(0.0), 0.78, -30, 10) is None


# visibility and CAR


def test_visibility_car_round_trip():
    for v in (0.0, 0.5, 0.96):
        assert ent.visibility_from_car(ent.car_from_visibility(v)) == pytest.approx(v, abs=1e-14)
    assert ent.visibility_from_car(math.inf) == 1.0
    with pytest.raises(DomainError):
        ent.visibility_from_car(0.5)


def test_fhe_scaled_visibility():
    # 96% at unit PSHE; the CAR excess then scales with PSHE
    car = ent.car_from_visibility(0.96)
    v = ent.visibility_from_car(0.2 * (car - 1) + 1)
    assert v == pytest.approx(0.8276, abs=1e-4)


def test_threshold_constants():
    assert ent.THRESHOLDS["qkd"] == 0.78
    assert ent.THRESHOLDS["nonlocality"] == pytest.approx(1 / math.sqrt(2))
