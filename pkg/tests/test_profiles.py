"""Mass profiles: U, Y, V0, and their invariants."""

import dataclasses
import math

import numpy as np
import pytest

from gsip import (
    DomainError,
    NumericsError,
    constant_profile,
    custom_profile,
    eval_V0,
    eval_Y,
    eval_mass,
    inverse_linear_profile,
    linear_profile,
    profile_by_name,
    sech_profile,
)
from gsip.profiles import invert_Y, y_interval


def builtin_profiles():
    return [
        constant_profile(1.0 / math.sqrt(2.0)),
        inverse_linear_profile(0.5),
        sech_profile(),
        linear_profile(-0.5),
    ]


def sample_window(profile, m=100):
    lo, hi = profile.domain
    lo = max(lo, -4.0) + 0.05
    hi = min(hi, 4.0) - 0.05
    return np.linspace(lo, hi, m)


class TestEvalMass:
    def test_inverse_linear_at_one(self):
        # U = 1/(2x) gives m(x) = 2 x^2
        assert eval_mass(inverse_linear_profile(0.5), 1.0) == pytest.approx(2.0, abs=1e-14)

    def test_sech_at_zero(self):
        # m = cosh^2(x)/2
        assert eval_mass(sech_profile(), 0.0) == pytest.approx(0.5, abs=1e-14)

    def test_constant_unit_mass(self, inv_sqrt2):
        assert eval_mass(constant_profile(inv_sqrt2), 3.7) == pytest.approx(1.0, rel=1e-14)

    def test_positive_everywhere(self):
        for prof in builtin_profiles():
            assert np.all(eval_mass(prof, sample_window(prof)) > 0)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            eval_mass(inverse_linear_profile(0.5), -1.0)


class TestEvalY:
    def test_inverse_linear(self):
        assert eval_Y(inverse_linear_profile(0.5), 2.0) == pytest.approx(4.0, abs=1e-14)

    def test_sech_is_sinh(self):
        assert eval_Y(sech_profile(), 0.0) == 0.0
        assert eval_Y(sech_profile(), 1.5) == pytest.approx(math.sinh(1.5), rel=1e-14)

    def test_constant(self, inv_sqrt2):
        assert eval_Y(constant_profile(inv_sqrt2), 1.0) == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_linear_log(self):
        prof = linear_profile(-0.5)
        assert eval_Y(prof, 1.0) == 0.0
        assert eval_Y(prof, math.e) == pytest.approx(-2.0, rel=1e-14)

    @pytest.mark.parametrize("prof", builtin_profiles(), ids=lambda p: p.kind)
    def test_quadrature_matches_analytic(self, prof):
        quad_prof = dataclasses.replace(prof, y=None)
        xs = sample_window(prof)
        analytic = eval_Y(prof, xs)
        numeric = eval_Y(quad_prof, xs)
        assert np.max(np.abs(analytic - numeric)) < 1e-10

    @pytest.mark.parametrize("prof", builtin_profiles(), ids=lambda p: p.kind)
    def test_dY_dx_is_inverse_U(self, prof):
        xs = sample_window(prof)
        hd = 1e-6 * np.maximum(1.0, np.abs(xs))
        dy = (eval_Y(prof, xs + hd) - eval_Y(prof, xs - hd)) / (2 * hd)
        assert np.max(np.abs(dy * prof.u(xs) - 1.0)) < 1e-6


class TestEvalV0:
    def test_constant_vanishes(self, inv_sqrt2):
        assert eval_V0(constant_profile(inv_sqrt2), 0.3) == 0.0

    def test_inverse_linear_at_one(self):
        # U' = -1/(2x^2), U'' = 1/x^3: V0(1) = -1/16 - 1/4
        assert eval_V0(inverse_linear_profile(0.5), 1.0) == pytest.approx(-5.0 / 16.0, abs=1e-14)

    def test_sech_at_zero(self):
        # U'(0) = 0, U''(0) = -1
        assert eval_V0(sech_profile(), 0.0) == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize(
        "make",
        [
            lambda: (sech_profile(), custom_profile(lambda x: 1.0 / np.cosh(x), (-math.inf, math.inf))),
            lambda: (
                inverse_linear_profile(0.5),
                custom_profile(lambda x: 0.5 / x, (0.0, math.inf)),
            ),
        ],
        ids=["sech", "inverse-linear"],
    )
    def test_custom_matches_analytic(self, make):
        analytic, custom = make()
        xs = sample_window(analytic)
        va = eval_V0(analytic, xs)
        vc = eval_V0(custom, xs)
        assert np.all(np.abs(va - vc) < 1e-6 * np.maximum(1.0, np.abs(va)))


class TestCustomProfile:
    def test_quadrature_path(self):
        prof = custom_profile(lambda x: 1.0 / np.cosh(x), (-math.inf, math.inf))
        assert eval_Y(prof, 1.2) == pytest.approx(math.sinh(1.2), rel=1e-9)

    def test_singular_integrand_raises(self):
        # U vanishing inside the domain violates the profile contract and
        # must surface as a quadrature failure, not a silent wrong value
        prof = custom_profile(lambda x: x, (-1.0, 1.0))
        with pytest.raises((NumericsError, ZeroDivisionError)):
            eval_Y(prof, 0.5)

    def test_invert_Y_bisection(self):
        prof = custom_profile(lambda x: 1.0 / np.cosh(x), (-math.inf, math.inf))
        assert invert_Y(prof, math.sinh(0.8)) == pytest.approx(0.8, abs=1e-9)


class TestRegistry:
    def test_names(self):
        assert profile_by_name("constant", 2.0).kind == "constant"
        assert profile_by_name("inverse-linear", 0.5).kind == "inverse-linear"
        assert profile_by_name("sech-mass").kind == "sech-mass"
        assert profile_by_name("linear", -0.5).kind == "linear"

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            profile_by_name("nope", 1.0)

    def test_missing_value(self):
        with pytest.raises(DomainError):
            profile_by_name("linear")

    def test_zero_parameter_rejected(self):
        with pytest.raises(DomainError):
            constant_profile(0.0)


class TestGeometry:
    def test_invert_roundtrip(self):
        for prof in builtin_profiles():
            for x in sample_window(prof, 7):
                y = eval_Y(prof, x)
                assert invert_Y(prof, y) == pytest.approx(x, rel=1e-10, abs=1e-10)

    def test_y_interval_builtins(self):
        assert y_interval(inverse_linear_profile(0.5)) == (0.0, math.inf)
        assert y_interval(sech_profile()) == (-math.inf, math.inf)
