"""Factorization machinery on hand-built superpotentials.

The workhorse here is the shifted oscillator W(x, a) = x + a on a unit
profile: V1 = (x+a)^2 - 1, V2 = V1 + 2, R = 2, parameter fixed.  It is
shape invariant with equi-spaced levels 2n and Gaussian ground state,
which makes every operator property checkable in closed form.
"""

import math

import numpy as np
import pytest

from gsip import (
    Grid,
    GridFunction,
    IndeterminateError,
    Superpotential,
    UnboundLevelError,
    V1_from_W,
    V2_from_W,
    apply_A,
    apply_A_dagger,
    check_normalizability,
    constant_profile,
    discretize,
    ground_state_on_grid,
    ladder_excited_state,
    lowest_eigenpairs,
    overlap,
    shape_invariance_residual,
    spectrum_accumulate,
)
from gsip.eigensolver import count_sign_changes


def shifted_oscillator(r0: float = 2.0) -> Superpotential:
    prof = constant_profile(1.0)
    return Superpotential(
        w=lambda x, a: 0.5 * r0 * np.asarray(x, dtype=float) + a,
        u_ref=prof,
        param_step=lambda a: a,
        r_of_a=lambda a: r0,
        w_prime=lambda x, a: 0.5 * r0 * np.ones_like(np.asarray(x, dtype=float)),
        y_scale=1.0 / math.sqrt(r0),
    )


@pytest.fixture()
def osc():
    return shifted_oscillator()


@pytest.fixture()
def grid():
    return Grid(-10.0, 10.0, 2000)


class TestPotentials:
    def test_constant_w_gives_square(self):
        prof = constant_profile(1.0)
        w = Superpotential(
            w=lambda x, a: a * np.ones_like(np.asarray(x, dtype=float)),
            u_ref=prof,
            param_step=lambda a: a,
            r_of_a=lambda a: 0.0,
        )
        x = np.linspace(-2, 2, 11)
        assert np.allclose(V1_from_W(w, 3.0, x), 9.0, atol=1e-12)
        assert np.allclose(V2_from_W(w, 3.0, x), 9.0, atol=1e-12)

    def test_oscillator_closed_form(self, osc):
        x = np.linspace(-4, 4, 101)
        assert np.allclose(V1_from_W(osc, 0.5, x), (x + 0.5) ** 2 - 1.0, atol=1e-12)
        assert np.allclose(V2_from_W(osc, 0.5, x), (x + 0.5) ** 2 + 1.0, atol=1e-12)

    def test_partner_difference_is_constant(self, osc):
        # V2 - V1 = 2UW' - UU'' must equal R for alpha = 0 families
        x = np.linspace(-6, 6, 1000)
        diff = V2_from_W(osc, 1.0, x) - V1_from_W(osc, 1.0, x)
        assert np.max(np.abs(diff - 2.0)) < 1e-10

    def test_finite_difference_w_prime_fallback(self):
        prof = constant_profile(1.0)
        w_fd = Superpotential(
            w=lambda x, a: np.asarray(x, dtype=float) + a,
            u_ref=prof,
            param_step=lambda a: a,
            r_of_a=lambda a: 2.0,
        )
        x = np.linspace(-3, 3, 31)
        assert np.allclose(V1_from_W(w_fd, 0.0, x), x**2 - 1.0, atol=1e-8)


class TestShapeInvariance:
    def test_residual_vanishes(self, osc, grid):
        assert shape_invariance_residual(osc, 1.0, grid) < 1e-10

    def test_perturbation_grows_linearly(self, grid):
        # adding eps*x to W breaks the identity with a residual linear in eps
        def perturbed(eps):
            prof = constant_profile(1.0)
            return Superpotential(
                w=lambda x, a: np.asarray(x, dtype=float) * (1 + eps) + a,
                u_ref=prof,
                param_step=lambda a: a,
                r_of_a=lambda a: 2.0,
            )

        r1 = shape_invariance_residual(perturbed(1e-3), 0.0, grid)
        r2 = shape_invariance_residual(perturbed(2e-3), 0.0, grid)
        assert r1 > 1e-5
        assert r2 / r1 == pytest.approx(2.0, rel=0.01)


class TestSpectrumAccumulate:
    def test_equi_spaced(self, osc):
        assert [spectrum_accumulate(osc, 0.0, n) for n in range(4)] == [0.0, 2.0, 4.0, 6.0]

    def test_ground_is_zero(self, osc):
        assert spectrum_accumulate(osc, 5.0, 0) == 0.0

    def test_morse_like_prefix(self):
        prof = constant_profile(1.0)
        alpha = 1.0
        w = Superpotential(
            w=lambda x, a: a - np.exp(-np.asarray(x, dtype=float)) / 2,
            u_ref=prof,
            param_step=lambda a: a - alpha,
            r_of_a=lambda a: alpha * (2 * a - alpha),
        )
        vals = [spectrum_accumulate(w, 3.0, n) for n in range(4)]
        assert vals == [0.0, 5.0, 8.0, 9.0]
        with pytest.raises(UnboundLevelError):
            spectrum_accumulate(w, 3.0, 4)

    def test_negative_increment_rejected(self, osc):
        bad = Superpotential(
            w=osc.w, u_ref=osc.u_ref, param_step=lambda a: a, r_of_a=lambda a: -1.0
        )
        with pytest.raises(UnboundLevelError):
            spectrum_accumulate(bad, 0.0, 1)


class TestOperators:
    def test_A_annihilates_ground_state(self, osc, grid):
        psi0 = ground_state_on_grid(osc, 0.7, grid)
        res = apply_A(osc, 0.7, psi0).norm() / psi0.norm()
        assert res < 1e-6

    def test_A_of_zero_is_zero(self, osc, grid):
        zero = GridFunction(grid, np.zeros(grid.n))
        assert apply_A(osc, 1.0, zero).norm() == 0.0
        assert apply_A_dagger(osc, 1.0, zero).norm() == 0.0

    def test_discrete_adjointness(self, osc, grid):
        # <A' f, g> = <f, A g> for compactly supported smooth functions
        rng = np.random.default_rng(7)
        x = grid.nodes
        for _ in range(10):
            c1, c2 = rng.uniform(-4, 4, size=2)
            s1, s2 = rng.uniform(0.5, 1.5, size=2)
            f = GridFunction(grid, np.exp(-((x - c1) / s1) ** 2))
            g = GridFunction(grid, np.sin(x) * np.exp(-((x - c2) / s2) ** 2))
            lhs = apply_A_dagger(osc, 0.3, f).inner(g)
            rhs = f.inner(apply_A(osc, 0.3, g))
            assert abs(lhs - rhs) < 1e-8

    def test_AdaggerA_matches_H1_action(self, osc):
        # the operator composition reproduces the tridiagonal H1 action to O(h^2)
        errs = []
        for n in (500, 1001):
            g = Grid(-10.0, 10.0, n)
            x = g.nodes
            op = discretize(lambda t: np.full_like(t, 0.5), lambda t: V1_from_W(osc, 0.0, t), g)
            f = GridFunction(g, np.exp(-(x**2) / 2) * (1 + 0.3 * np.sin(2 * x)))
            lhs = apply_A_dagger(osc, 0.0, apply_A(osc, 0.0, f)).values
            rhs = op.matvec(f.values)
            interior = slice(5, -5)
            errs.append(np.max(np.abs(lhs[interior] - rhs[interior])))
        assert errs[0] < 5e-3
        # halving h cuts the defect by about four
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.35)

    def test_AdaggerA_on_ground_state(self, osc, grid):
        psi0 = ground_state_on_grid(osc, 0.0, grid)
        h1psi = apply_A_dagger(osc, 0.0, apply_A(osc, 0.0, psi0))
        assert h1psi.norm() / psi0.norm() < 1e-5


class TestLadder:
    def test_level_zero_is_ground_state(self, osc, grid):
        psi = ladder_excited_state(osc, 0.0, 0, grid)
        assert overlap(psi, ground_state_on_grid(osc, 0.0, grid)) > 1 - 1e-12

    def test_first_excited_has_one_node(self, osc, grid):
        psi1 = ladder_excited_state(osc, 0.0, 1, grid)
        assert count_sign_changes(psi1.values) == 1

    def test_overlap_with_eigensolver(self, osc):
        g = Grid(-8.0, 8.0, 3000)
        op = discretize(lambda t: np.full_like(t, 0.5), lambda t: V1_from_W(osc, 0.0, t), g)
        pairs = lowest_eigenpairs(op, 4)
        for n in range(4):
            psi = ladder_excited_state(osc, 0.0, n, g)
            assert overlap(psi, pairs[n][1]) > 0.999

    def test_unbound_ladder_rejected(self, osc):
        bad = Superpotential(
            w=osc.w, u_ref=osc.u_ref, param_step=lambda a: a, r_of_a=lambda a: -2.0
        )
        with pytest.raises(UnboundLevelError):
            ladder_excited_state(bad, 0.0, 2, Grid(-5, 5, 200))


class TestNormalizability:
    def test_oscillator_is_normalizable(self, osc):
        check = check_normalizability(osc, 0.0)
        assert check.normalizable
        assert check.w_lower < 0 < check.w_upper

    def test_flipped_sign_is_not(self, osc):
        flipped = Superpotential(
            w=lambda x, a: -osc.w(x, a),
            u_ref=osc.u_ref,
            param_step=lambda a: a,
            r_of_a=lambda a: 2.0,
        )
        assert not check_normalizability(flipped, 0.0)

    def test_same_signs_not_normalizable(self):
        prof = constant_profile(1.0)
        w = Superpotential(
            w=lambda x, a: np.asarray(x, dtype=float) ** 2 + 1.0,
            u_ref=prof,
            param_step=lambda a: a,
            r_of_a=lambda a: 1.0,
        )
        assert not check_normalizability(w, 0.0)

    def test_vanishing_w_indeterminate(self):
        prof = constant_profile(1.0)
        w = Superpotential(
            w=lambda x, a: np.zeros_like(np.asarray(x, dtype=float)),
            u_ref=prof,
            param_step=lambda a: a,
            r_of_a=lambda a: 0.0,
        )
        with pytest.raises(IndeterminateError) as err:
            check_normalizability(w, 0.0)
        assert err.value.samples is not None

    def test_oscillating_w_indeterminate(self):
        prof = constant_profile(1.0)
        w = Superpotential(
            w=lambda x, a: np.sin(np.asarray(x, dtype=float)),
            u_ref=prof,
            param_step=lambda a: a,
            r_of_a=lambda a: 1.0,
        )
        with pytest.raises(IndeterminateError):
            check_normalizability(w, 0.0)
