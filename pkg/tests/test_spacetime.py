import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HALF_PI, TWO_PI, cos_spacetime, flat_spacetime
from imcf.errors import ContractViolation, DomainError
from imcf.spacetime import (
    future_volume_decay,
    EnergySampleSpec,
    ScaleFactor,
    TimelikeVector,
    WarpedSpacetime,
    energy_condition_margin,
    lorentz_norm,
    make_scale_factor,
    metric_at,
    ricci_quadratic_form,
    sample_timelike,
    slice_mean_curvature,
)
from oracles import fd_ricci, warped_metric


def unit_timelike(s, x0, phi, direction):
    a = float(s.a(x0))
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    return TimelikeVector(np.concatenate([[np.cosh(phi)], np.sinh(phi) * e / a]), x0)


def cos_exp_spacetime(n=2, mu=0.05):
    return WarpedSpacetime(-1.49, HALF_PI, n, ScaleFactor.cos_exp(mu), (TWO_PI,) * n)


def spline_spacetime():
    xs = np.linspace(-1.2, 1.2, 10)
    return WarpedSpacetime(-1.2, 1.2, 1, ScaleFactor.spline(np.c_[xs, np.cos(xs)]), (TWO_PI,))


class TestMetric:
    def test_flat_metric_is_identity(self):
        g00, gij = metric_at(flat_spacetime(2), 0.7)
        assert g00 == -1.0
        np.testing.assert_array_equal(gij, np.eye(2))

    def test_cos_metric_at_origin(self):
        _, gij = metric_at(cos_spacetime(1), 0.0)
        np.testing.assert_allclose(gij, np.eye(1))

    def test_cos_metric_at_third_pi(self):
        _, gij = metric_at(cos_spacetime(2), np.pi / 3)
        np.testing.assert_allclose(gij, 0.25 * np.eye(2), rtol=1e-14)

    @pytest.mark.parametrize("x0", [-HALF_PI, HALF_PI, 2.0])
    def test_outside_interval_is_domain_error(self, x0):
        with pytest.raises(DomainError):
            metric_at(cos_spacetime(1), x0)

    def test_slice_volume(self):
        s = cos_spacetime(2)
        assert s.slice_volume(0.5) == pytest.approx(np.cos(0.5) ** 2 * TWO_PI**2, rel=1e-14)


class TestRicci:
    def test_flat_static_is_zero(self):
        s = flat_spacetime(1)
        assert ricci_quadratic_form(s, TimelikeVector(np.array([1.0, 0.0]), 0.2)) == 0.0

    def test_cos_n1_unit_time_direction(self):
        s = cos_spacetime(1)
        assert ricci_quadratic_form(s, TimelikeVector(np.array([1.0, 0.0]), 0.3)) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("x0", [-1.0, 0.0, 0.4, 1.3])
    def test_cos_n2_unit_time_direction(self, x0):
        s = cos_spacetime(2)
        value = ricci_quadratic_form(s, TimelikeVector(np.array([1.0, 0.0, 0.0]), x0))
        assert value == pytest.approx(2.0, rel=1e-14)

    @pytest.mark.parametrize(
        "make",
        [lambda: cos_spacetime(1), lambda: cos_spacetime(2), cos_exp_spacetime, spline_spacetime],
        ids=["cos_n1", "cos_n2", "cos_exp", "spline"],
    )
    @pytest.mark.parametrize("x0", [-0.9, -0.2, 0.35, 0.8])
    @pytest.mark.parametrize("phi", [0.0, 0.6, 1.8])
    def test_agrees_with_finite_difference_curvature(self, make, x0, phi):
        s = make()
        v = unit_timelike(s, x0, phi, [0.6, 0.8][: s.n])
        x = np.concatenate([[x0], np.zeros(s.n)])
        ric = fd_ricci(warped_metric(s.a), x, h=1e-4)
        expected = v.components @ ric @ v.components
        got = ricci_quadratic_form(s, v)
        assert abs(got - expected) <= 1e-6 * max(1.0, abs(expected))

    def test_non_unit_vector_rejected(self):
        with pytest.raises(ContractViolation):
            ricci_quadratic_form(cos_spacetime(1), TimelikeVector(np.array([2.0, 0.0]), 0.1))

    def test_spacelike_vector_rejected(self):
        with pytest.raises(ContractViolation):
            ricci_quadratic_form(cos_spacetime(1), TimelikeVector(np.array([0.0, 1.0]), 0.0))

    def test_wrong_dimension_rejected(self):
        with pytest.raises(ContractViolation):
            ricci_quadratic_form(cos_spacetime(2), TimelikeVector(np.array([1.0, 0.0]), 0.0))


class TestSliceMeanCurvature:
    def test_static_slices_are_totally_geodesic(self):
        assert slice_mean_curvature(flat_spacetime(1), 0.3) == 0.0

    def test_cos_n1(self):
        assert slice_mean_curvature(cos_spacetime(1), 0.5) == pytest.approx(0.546302, abs=1e-6)

    def test_cos_n2(self):
        assert slice_mean_curvature(cos_spacetime(2), 0.5) == pytest.approx(2 * np.tan(0.5), rel=1e-14)

    @given(st.floats(-1.5, 1.5))
    def test_sign_follows_collapse(self, x0):
        s = cos_spacetime(1)
        H = slice_mean_curvature(s, x0)
        da = float(s.da(x0))
        assert np.sign(H) == -np.sign(da) or (da == 0 and H == 0)


class TestEnergyCondition:
    def test_flat_margin_equals_lambda(self):
        for lam in (0.0, 0.25, 1.5):
            report = energy_condition_margin(flat_spacetime(2), lam)
            assert report.min_margin == lam
            assert report.holds

    def test_cos_n2_satisfies_timelike_convergence(self):
        report = energy_condition_margin(cos_spacetime(2), 0.0)
        assert report.min_margin >= 0.0

    def test_cos_exp_needs_lambda(self):
        s = cos_exp_spacetime()
        assert not energy_condition_margin(s, 0.0).holds
        report = energy_condition_margin(s, 0.5)
        assert report.min_margin >= 0.0
        assert report.rapidity_cap == 3.0

    def test_witness_attains_minimum(self):
        s = cos_exp_spacetime()
        report = energy_condition_margin(s, 0.5)
        assert ricci_quadratic_form(s, report.witness) + 0.5 == report.min_margin

    def test_sample_count(self):
        spec = EnergySampleSpec(x0_count=5, rapidity_count=4, directions=3)
        assert energy_condition_margin(cos_spacetime(2), 0.0, spec).samples == 5 * 4 * 3
        assert energy_condition_margin(cos_spacetime(1), 0.0, spec).samples == 5 * 4 * 2

    @pytest.mark.parametrize("n", [1, 2])
    def test_sampler_is_unit_normalized(self, n):
        s = cos_exp_spacetime(n)
        worst = max(abs(lorentz_norm(s, v) + 1.0) / v.components[0] ** 2 for v in sample_timelike(s, EnergySampleSpec()))
        assert worst <= 1e-12

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            energy_condition_margin(cos_spacetime(1), -0.1)


class TestScaleFactors:
    def test_spline_reproduces_knots_and_is_smooth(self):
        s = spline_spacetime()
        xs = np.linspace(-1.2, 1.2, 10)
        np.testing.assert_allclose(s.a(xs), np.cos(xs), atol=1e-14)
        mid = np.linspace(-1.0, 1.0, 21)
        np.testing.assert_allclose(s.a(mid), np.cos(mid), atol=2e-3)

    @pytest.mark.parametrize("kind,params", [("constant", {"value": 2.0}), ("cos", {}), ("cos_exp", {"mu": 0.1})])
    def test_derivatives_match_finite_differences(self, kind, params):
        sf = make_scale_factor(kind, params)
        x = np.linspace(-1.0, 1.0, 7)
        h = 1e-5
        np.testing.assert_allclose(sf.da(x), (sf.a(x + h) - sf.a(x - h)) / (2 * h), atol=1e-9)
        np.testing.assert_allclose(sf.dda(x), (sf.da(x + h) - sf.da(x - h)) / (2 * h), atol=1e-9)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_scale_factor("de_sitter")

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            ScaleFactor.constant(0.0)
        with pytest.raises(ValueError):
            ScaleFactor.spline([[0, 1], [1, 1]])
        with pytest.raises(ValueError):
            WarpedSpacetime(1.0, 0.0, 1, ScaleFactor.cos(), (TWO_PI,))
        with pytest.raises(ValueError):
            WarpedSpacetime(-1.0, 1.0, 3, ScaleFactor.cos(), (TWO_PI,) * 3)


@settings(max_examples=50, deadline=None)
@given(x0=st.floats(-1.4, 1.4), phi=st.floats(0.0, 3.0), angle=st.floats(0.0, 2 * np.pi))
def test_cos_n2_convergence_condition_under_boosts(x0, phi, angle):
    s = cos_spacetime(2)
    v = unit_timelike(s, x0, phi, [np.cos(angle), np.sin(angle)])
    assert ricci_quadratic_form(s, v) >= -1e-9 * np.cosh(phi) ** 2


class TestVolumeDecay:
    def test_cos_slab_decays(self):
        report = future_volume_decay(cos_spacetime(2))
        assert report.decays
        np.testing.assert_allclose(report.volumes, TWO_PI**2 * np.cos(report.x0) ** 2, rtol=1e-12)
        # a = cos vanishes linearly at pi/2, so halving the gap quarters the volume for n = 2
        np.testing.assert_allclose(report.volumes[10:20] / report.volumes[11:21], 4.0, rtol=1e-5)

    def test_flat_slab_does_not_decay(self):
        assert not future_volume_decay(flat_spacetime(1)).decays

    def test_cos_exp_decays(self):
        assert future_volume_decay(cos_exp_spacetime()).decays
