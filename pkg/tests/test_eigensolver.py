"""Discretization and the Sturm-bisection eigensolver."""

import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

import gsip.eigensolver as es
from gsip import (
    Grid,
    GridError,
    MassError,
    NumericsError,
    PotentialError,
    TridiagonalOperator,
    count_sign_changes,
    discretize,
    lowest_eigenpairs,
    lowest_eigenvalues,
    richardson_refine,
    sturm_count,
)

UNIT_MASS = lambda x: np.ones_like(x)
FREE = lambda x: np.zeros_like(x)


def box_levels(length: float, count: int) -> np.ndarray:
    j = np.arange(1, count + 1)
    return (j * math.pi / length) ** 2 / 2.0


class TestDiscretize:
    def test_unit_laplacian_stencil(self):
        # m = 1, V = 0, h = 1: diag = 2 * (1/2), offdiag = -1/2
        grid = Grid(0.0, 6.0, 5)
        op = discretize(UNIT_MASS, FREE, grid)
        assert np.allclose(op.diag, 1.0)
        assert np.allclose(op.offdiag, -0.5)

    def test_symmetric_by_construction(self):
        grid = Grid(-3.0, 3.0, 200)
        op = discretize(lambda x: 1 + x**2, lambda x: np.sin(x), grid)
        assert op.diag.shape == (200,)
        assert op.offdiag.shape == (199,)

    def test_negative_mass_rejected(self):
        grid = Grid(-1.0, 1.0, 50)
        with pytest.raises(MassError):
            discretize(lambda x: x, FREE, grid)

    def test_non_finite_potential_rejected(self):
        grid = Grid(-1.0, 1.0, 50)
        with pytest.raises(PotentialError):
            discretize(UNIT_MASS, lambda x: 1.0 / (x - x[0]), grid)


class TestLowestEigenpairs:
    def test_three_node_closed_form(self):
        op = TridiagonalOperator(np.array([2.0, 2.0, 2.0]), np.array([-1.0, -1.0]))
        pairs = lowest_eigenpairs(op, 3)
        expected = [2.0 - math.sqrt(2.0), 2.0, 2.0 + math.sqrt(2.0)]
        assert np.allclose([p[0] for p in pairs], expected, atol=1e-12)

    def test_ground_state_node_free(self):
        grid = Grid(-8.0, 8.0, 1200)
        op = discretize(UNIT_MASS, lambda x: 0.5 * x**2, grid)
        pairs = lowest_eigenpairs(op, 1)
        assert count_sign_changes(pairs[0][1].values) == 0

    def test_oscillation_theorem(self):
        grid = Grid(-9.0, 9.0, 1500)
        op = discretize(UNIT_MASS, lambda x: 0.5 * x**2, grid)
        pairs = lowest_eigenpairs(op, 6)
        for k, (_, vec) in enumerate(pairs):
            assert count_sign_changes(vec.values) == k

    def test_orthonormal_vectors(self):
        grid = Grid(-8.0, 8.0, 900)
        op = discretize(UNIT_MASS, lambda x: 0.5 * x**2, grid)
        pairs = lowest_eigenpairs(op, 5)
        vecs = np.array([p[1].values for p in pairs])
        gram = grid.h * vecs @ vecs.T
        assert np.max(np.abs(gram - np.eye(5))) < 1e-8

    def test_rayleigh_quotients_match(self):
        grid = Grid(-8.0, 8.0, 900)
        op = discretize(UNIT_MASS, lambda x: 0.5 * x**2, grid)
        for energy, vec in lowest_eigenpairs(op, 4):
            v = vec.values * math.sqrt(grid.h)  # back to unit 2-norm
            rq = float(v @ op.matvec(v))
            assert abs(rq - energy) <= 1e-10 * max(abs(energy), 1.0)

    def test_matches_lapack(self):
        # independent cross-check of the whole bisection + inverse
        # iteration stack on a stiff barrier problem
        grid = Grid(1e-3, 8.2, 2000)
        op = discretize(
            UNIT_MASS, lambda x: x**2 / 4 + 2.0 / x**2 - 1.5, grid
        )
        mine = lowest_eigenvalues(op, 5)
        ref = eigh_tridiagonal(
            op.diag, op.offdiag, select="i", select_range=(0, 4), eigvals_only=True
        )
        assert np.max(np.abs(mine - ref)) < 1e-8 * op.norm_bound() * 1e-3

    def test_k_larger_than_matrix(self):
        op = TridiagonalOperator(np.array([1.0, 2.0, 3.0, 4.0, 5.0]), -np.ones(4))
        with pytest.raises(GridError):
            lowest_eigenpairs(op, 6)

    def test_nonconvergence_carries_level(self, monkeypatch):
        monkeypatch.setattr(es, "_MAX_INVERSE_ITER", 0)
        op = TridiagonalOperator(np.arange(1.0, 8.0), -0.1 * np.ones(6))
        with pytest.raises(NumericsError) as err:
            lowest_eigenpairs(op, 2)
        assert err.value.level == 0


class TestSturmCount:
    def test_counts_match_spectrum(self):
        rng = np.random.default_rng(3)
        d = rng.standard_normal(40)
        e = rng.standard_normal(39)
        op = TridiagonalOperator(d, e)
        evals = eigh_tridiagonal(d, e, eigvals_only=True)
        shifts = np.linspace(evals[0] - 0.5, evals[-1] + 0.5, 23)
        counts = sturm_count(op, shifts)
        expected = np.array([np.sum(evals < s) for s in shifts])
        assert np.array_equal(counts, expected)

    def test_consecutive_eigenvalues_distinct(self):
        # simplicity of the 1-D spectrum, checked via Sturm counts
        grid = Grid(-8.0, 8.0, 900)
        op = discretize(UNIT_MASS, lambda x: 0.5 * x**2, grid)
        vals = lowest_eigenvalues(op, 6)
        gap = 1e-6
        for j, v in enumerate(vals):
            assert sturm_count(op, v + gap)[0] == j + 1


class TestBoxCase:
    def test_richardson_hits_closed_form(self):
        grid = Grid(0.0, 1.0, 700)
        refined = richardson_refine(UNIT_MASS, FREE, grid, 3)
        exact = box_levels(1.0, 3)
        assert np.max(np.abs(refined - exact) / exact) < 1e-8

    def test_convergence_is_second_order(self):
        exact = box_levels(1.0, 1)[0]
        errors = []
        for n in (99, 199, 399):
            op = discretize(UNIT_MASS, FREE, Grid(0.0, 1.0, n))
            errors.append(abs(lowest_eigenvalues(op, 1)[0] - exact))
        r1 = errors[0] / errors[1]
        r2 = errors[1] / errors[2]
        assert r1 == pytest.approx(4.0, rel=0.1)
        assert r2 == pytest.approx(4.0, rel=0.1)

    def test_refined_beats_raw(self):
        grid = Grid(-8.0, 8.0, 1000)
        pot = lambda x: 0.5 * x**2
        raw = lowest_eigenvalues(discretize(UNIT_MASS, pot, grid), 2)
        refined = richardson_refine(UNIT_MASS, pot, grid, 2)
        assert abs(refined[1] - 1.5) < abs(raw[1] - 1.5)


class TestRichardsonSelfConsistency:
    def test_half_line_variable_mass_stable(self):
        # m = 2 x^2 on (1e-3, 20]: refined energies are grid-stable.  The
        # x^-2 mass and x^-4 potential singularities at the wall leave a
        # non-smooth error component Richardson cannot cancel; measured
        # drift between these resolutions is ~2e-5 relative.
        mass = lambda x: 2.0 * x**2
        pot = lambda x: (x**2 + 1.0) ** 2 - 5.0 / (16 * x**4) - 1.0
        e1 = richardson_refine(mass, pot, Grid(1e-3, 20.0, 4000), 3)
        e2 = richardson_refine(mass, pot, Grid(1e-3, 20.0, 8001), 3)
        assert np.max(np.abs(e1 - e2) / np.abs(e2)) < 2e-4
