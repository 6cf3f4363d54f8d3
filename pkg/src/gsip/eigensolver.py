"""Independent numerical oracle for the variable-mass eigenproblem.

The Hamiltonian -d/dx (1/(2m)) d/dx + V is discretized on a uniform grid
in flux-conservative form: the conductivity kappa = 1/(2m) is sampled at
cell midpoints so the resulting tridiagonal matrix is symmetric and
respects the kinetic-operator ordering exactly.  Eigenvalues come from
bisection on Sturm-sequence sign counts, eigenvectors from shifted
inverse iteration, and a two-grid Richardson step cancels the leading
h^2 discretization error of the energies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_banded

from .errors import GridError, MassError, NumericsError, PotentialError
from .grids import Grid, GridFunction

# Bisection stops when every interval is narrower than this times the
# Gershgorin norm; Rayleigh quotients then polish to machine accuracy.
_BISECT_RTOL = 1e-12

# Probes per interval per multisection sweep (16-ary search).
_PROBES = 15

_MAX_INVERSE_ITER = 50


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix stored as diagonal and off-diagonal."""

    diag: NDArray[np.float64]
    offdiag: NDArray[np.float64]
    grid: Grid | None = None

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if e.shape != (max(d.size - 1, 0),):
            raise GridError("offdiag must have length n - 1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral radius."""
        r = np.zeros_like(self.diag)
        if self.offdiag.size:
            r[:-1] += np.abs(self.offdiag)
            r[1:] += np.abs(self.offdiag)
        return float(np.max(np.abs(self.diag) + r))

    def matvec(self, v: NDArray[np.float64]) -> NDArray[np.float64]:
        out = self.diag * v
        if self.offdiag.size:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out


def discretize(mass: Callable, potential: Callable, grid: Grid) -> TridiagonalOperator:
    """Flux-conservative discretization with kappa = 1/(2m) at half nodes.

    diag[i] = (kappa_{i-1/2} + kappa_{i+1/2})/h^2 + V(x_i)
    offdiag[i] = -kappa_{i+1/2}/h^2

    Dirichlet zeros at both endpoints are implied by the grid.
    """
    x = grid.nodes
    xh = grid.half_nodes
    m = np.asarray(mass(xh), dtype=float)
    if not np.all(np.isfinite(m)) or np.any(m <= 0.0):
        bad = xh[~(np.isfinite(m) & (m > 0.0))][0]
        raise MassError(f"mass must be positive and finite; offending half-node x = {bad:g}")
    v = np.asarray(potential(x), dtype=float)
    if not np.all(np.isfinite(v)):
        bad = x[~np.isfinite(v)][0]
        raise PotentialError(f"potential must be finite; offending node x = {bad:g}")
    kappa = 1.0 / (2.0 * m)
    h2 = grid.h**2
    diag = (kappa[:-1] + kappa[1:]) / h2 + v
    offdiag = -kappa[1:-1] / h2
    return TridiagonalOperator(diag, offdiag, grid)


def sturm_count(op: TridiagonalOperator, shifts) -> NDArray[np.int64]:
    """Number of eigenvalues strictly below each shift.

    Counts negative pivots of the LDL' factorization of T - shift, the
    classic Sturm-sequence argument; vectorized over shifts.
    """
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    d = op.diag
    e2 = op.offdiag**2
    tiny = np.finfo(float).tiny / np.finfo(float).eps
    q = d[0] - shifts
    count = (q < 0.0).astype(np.int64)
    for i in range(1, op.n):
        q = np.where(np.abs(q) < tiny, np.where(q < 0, -tiny, tiny), q)
        q = (d[i] - shifts) - e2[i - 1] / q
        count += q < 0.0
    return count


def _bisect_eigenvalues(op: TridiagonalOperator, k: int) -> NDArray[np.float64]:
    nrm = op.norm_bound()
    tol = _BISECT_RTOL * max(nrm, 1.0)
    lo = np.full(k, -nrm)
    hi = np.full(k, nrm)
    while np.max(hi - lo) > tol:
        # multisection: _PROBES interior points per interval, one batched
        # Sturm pass for all levels
        frac = np.arange(1, _PROBES + 1) / (_PROBES + 1)
        probes = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
        counts = sturm_count(op, probes.ravel()).reshape(k, _PROBES)
        for j in range(k):
            below = counts[j] <= j  # eigenvalue j sits above these probes
            if np.any(below):
                lo[j] = probes[j][below][-1]
            if not np.all(below):
                hi[j] = probes[j][~below][0]
    return 0.5 * (lo + hi)


def _inverse_iteration(
    op: TridiagonalOperator, sigma: float, previous: list[NDArray[np.float64]], level: int
) -> NDArray[np.float64]:
    n = op.n
    rng = np.random.default_rng(0x5EED + level)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    ab = np.zeros((3, n))
    ab[0, 1:] = op.offdiag
    ab[2, :-1] = op.offdiag
    shift = sigma
    nrm = op.norm_bound()
    for it in range(_MAX_INVERSE_ITER):
        ab[1, :] = op.diag - shift
        try:
            w = solve_banded((1, 1), ab, v)
        except np.linalg.LinAlgError:
            shift += 1e-13 * max(nrm, 1.0)
            continue
        if not np.all(np.isfinite(w)):
            shift += 1e-13 * max(nrm, 1.0)
            continue
        for u in previous:
            w -= (u @ w) * u
        wn = np.linalg.norm(w)
        if wn == 0.0:
            continue
        w /= wn
        hw = op.matvec(w)
        residual = np.linalg.norm(hw - (w @ hw) * w)
        converged = residual <= 1e-11 * max(nrm, 1.0)
        aligned = abs(abs(w @ v) - 1.0) < 1e-13
        v = w
        if converged or aligned:
            return v
    raise NumericsError(
        f"inverse iteration did not converge for level {level}", level=level
    )


def lowest_eigenpairs(op: TridiagonalOperator, k: int) -> list[tuple[float, GridFunction]]:
    """k smallest eigenpairs, energies ascending.

    Eigenvalues are located by Sturm bisection to 1e-12 times the
    operator norm, eigenvectors refined by inverse iteration with
    re-orthogonalization against the levels already found, and each
    returned energy is the Rayleigh quotient of its eigenvector.
    Vectors are L2-normalized with trapezoidal weight h (unit weight for
    operators without an attached grid).
    """
    if k < 1:
        raise ValueError("need k >= 1 eigenpairs")
    if k > op.n:
        raise GridError(f"requested {k} eigenpairs from an operator of size {op.n}")
    sigmas = _bisect_eigenvalues(op, k)
    vectors: list[NDArray[np.float64]] = []
    energies: list[float] = []
    for j in range(k):
        v = _inverse_iteration(op, float(sigmas[j]), vectors, j)
        vectors.append(v)
        energies.append(float(v @ op.matvec(v)))
    order = np.argsort(energies)
    h = op.grid.h if op.grid is not None else 1.0
    out = []
    for j in order:
        vec = vectors[j] / np.sqrt(h)
        if op.grid is not None:
            out.append((energies[j], GridFunction(op.grid, vec)))
        else:
            out.append((energies[j], vec))
    return out


def lowest_eigenvalues(op: TridiagonalOperator, k: int) -> NDArray[np.float64]:
    """Energies only; skips the inverse-iteration stage."""
    if k > op.n:
        raise GridError(f"requested {k} eigenvalues from an operator of size {op.n}")
    sigmas = _bisect_eigenvalues(op, k)
    # polish each by a single inverse-iteration Rayleigh quotient
    out = []
    vectors: list[NDArray[np.float64]] = []
    for j in range(k):
        v = _inverse_iteration(op, float(sigmas[j]), vectors, j)
        vectors.append(v)
        out.append(float(v @ op.matvec(v)))
    return np.sort(np.asarray(out))


def richardson_refine(mass: Callable, potential: Callable, grid: Grid, k: int) -> NDArray[np.float64]:
    """Energies extrapolated from the grid and its spacing-halved refinement.

    Returns (4 E_{h/2} - E_h) / 3 per level, eliminating the h^2 error
    term of the flux-conservative scheme.
    """
    coarse = lowest_eigenvalues(discretize(mass, potential, grid), k)
    fine = lowest_eigenvalues(discretize(mass, potential, grid.refined()), k)
    return (4.0 * fine - coarse) / 3.0


def count_sign_changes(values: NDArray[np.float64], rtol: float = 1e-8) -> int:
    """Interior sign changes, ignoring entries below rtol * max|values|."""
    v = np.asarray(values, dtype=float)
    keep = np.abs(v) > rtol * np.max(np.abs(v))
    signs = np.sign(v[keep])
    return int(np.sum(signs[1:] * signs[:-1] < 0))
