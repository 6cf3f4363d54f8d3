"""Factorization machinery built on a superpotential W(x, a).

The first-order operator A = U d/dx + W and its adjoint factorize the
variable-mass Hamiltonian: H1 = A'A has potential V1 = W^2 - (UW)', the
partner H2 = AA' has V2 = W^2 - (UW)' + 2UW' - UU''.  When the pair is
shape invariant, V2(x, a1) = V1(x, a2) + R(a1), the whole bound spectrum
is the running sum of R over the parameter orbit, and excited states
follow from chaining A' across it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from numpy.typing import ArrayLike

from .errors import GridError, IndeterminateError, UnboundLevelError
from .grids import Grid, GridFunction
from .profiles import MassProfile, invert_Y

_FD_STEP = 1e-6


@dataclass(frozen=True)
class Superpotential:
    """W(x, a) together with its profile and shape-invariance data.

    Fields:
        w: superpotential value, callable (x, a) -> real.
        u_ref: the mass profile U(x) entering A = U d/dx + W.
        param_step: the parameter map a1 -> a2 of the invariance relation.
        r_of_a: the spectrum increment R(a1).
        w_prime: optional analytic dW/dx; finite differences otherwise.
        y_domain: working interval in the Y coordinate (set-wise); used by
            the endpoint normalizability test.
        y_scale: characteristic Y scale of the shape terms, used to place
            endpoint probes.
    """

    w: Callable
    u_ref: MassProfile
    param_step: Callable[[float], float]
    r_of_a: Callable[[float], float]
    w_prime: Callable | None = None
    y_domain: tuple[float, float] = (-math.inf, math.inf)
    y_scale: float = 1.0

    def dw_dx(self, x: ArrayLike, a: float):
        if self.w_prime is not None:
            return self.w_prime(x, a)
        xs = np.asarray(x, dtype=float)
        hd = _FD_STEP * np.maximum(1.0, np.abs(xs))
        return (self.w(xs + hd, a) - self.w(xs - hd, a)) / (2 * hd)


def V1_from_W(w: Superpotential, a: float, x: ArrayLike):
    """Potential of H1 via the generalized Riccati relation W^2 - (UW)'."""
    prof = w.u_ref
    xs = prof.require(x)
    wv = w.w(xs, a)
    return wv**2 - prof.du(xs) * wv - prof.u(xs) * w.dw_dx(xs, a)


def V2_from_W(w: Superpotential, a: float, x: ArrayLike):
    """Partner potential W^2 - (UW)' + 2UW' - UU''."""
    prof = w.u_ref
    xs = prof.require(x)
    wv = w.w(xs, a)
    uv = prof.u(xs)
    return wv**2 - prof.du(xs) * wv + uv * w.dw_dx(xs, a) - uv * prof.d2u(xs)


def shape_invariance_residual(w: Superpotential, a1: float, grid: Grid) -> float:
    """max over grid nodes of |V2(x, a1) - V1(x, a2) - R(a1)|."""
    a2 = w.param_step(a1)
    x = grid.nodes
    res = V2_from_W(w, a1, x) - V1_from_W(w, a2, x) - w.r_of_a(a1)
    return float(np.max(np.abs(res)))


def spectrum_accumulate(w: Superpotential, a1: float, n: int) -> float:
    """n-th energy as the running sum of R along the parameter orbit.

    E_0 = 0 by construction.  Raises UnboundLevelError as soon as an
    increment R(a_i) fails to be positive: the first non-increase of the
    energy sequence terminates the bound spectrum.
    """
    if n < 0:
        raise ValueError("level index must be non-negative")
    energy = 0.0
    a = a1
    for i in range(1, n + 1):
        r = w.r_of_a(a)
        if r <= 0.0:
            raise UnboundLevelError(
                f"level {n} is not bound: R(a_{i}) = {r:g} at a = {a:g}"
            )
        energy += r
        a = w.param_step(a)
    return energy


def _derivative_4th(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative, 4th-order central stencil, one-sided at the edges."""
    n = len(values)
    if n < 5:
        raise GridError("4th-order stencil needs at least 5 nodes")
    d = np.empty_like(values)
    d[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)
    c0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    c1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
    d[0] = c0 @ values[:5] / h
    d[1] = c1 @ values[:5] / h
    d[-1] = -(c0 @ values[-5:][::-1]) / h
    d[-2] = -(c1 @ values[-5:][::-1]) / h
    return d


def apply_A(w: Superpotential, a: float, psi: GridFunction) -> GridFunction:
    """(A psi)(x) = U(x) psi'(x) + W(x, a) psi(x) on the grid."""
    x = psi.grid.nodes
    dpsi = _derivative_4th(psi.values, psi.grid.h)
    vals = w.u_ref.u(x) * dpsi + w.w(x, a) * psi.values
    return GridFunction(psi.grid, vals)


def apply_A_dagger(w: Superpotential, a: float, psi: GridFunction) -> GridFunction:
    """(A' psi)(x) = -(U psi)'(x) + W(x, a) psi(x) on the grid."""
    x = psi.grid.nodes
    dpsi = _derivative_4th(psi.values, psi.grid.h)
    prof = w.u_ref
    vals = -(prof.du(x) * psi.values + prof.u(x) * dpsi) + w.w(x, a) * psi.values
    return GridFunction(psi.grid, vals)


def ground_state_on_grid(w: Superpotential, a: float, grid: Grid) -> GridFunction:
    """Kernel of A on the grid: psi0 = exp(-int W/U dx), L2-normalized.

    The exponent is accumulated by trapezoidal quadrature over the grid
    nodes and shifted by its maximum before exponentiation.
    """
    x = grid.nodes
    integrand = w.w(x, a) / w.u_ref.u(x)
    expo = np.concatenate(([0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * grid.h)))
    expo = -expo
    psi = np.exp(expo - np.max(expo))
    return GridFunction(grid, psi).normalized()


def ladder_excited_state(w: Superpotential, a1: float, n: int, grid: Grid) -> GridFunction:
    """n-th bound state by chaining A' across the parameter orbit.

    psi_n is proportional to A'(a_1) ... A'(a_n) psi_0(a_{n+1}); the
    result is L2-normalized.  Levels 1..n must all be bound.
    """
    if n < 0:
        raise ValueError("level index must be non-negative")
    spectrum_accumulate(w, a1, n)  # raises UnboundLevelError if not bound
    params = [a1]
    for _ in range(n):
        params.append(w.param_step(params[-1]))
    psi = ground_state_on_grid(w, params[n], grid)
    for j in range(n, 0, -1):
        psi = apply_A_dagger(w, params[j - 1], psi)
        peak = float(np.max(np.abs(psi.values)))
        if peak > 0:
            psi = GridFunction(grid, psi.values / peak)
    return psi.normalized()


class NormalizabilityCheck(NamedTuple):
    """Outcome of the endpoint sign test, with the sampled values."""

    normalizable: bool
    w_lower: float
    w_upper: float
    y_lower_probe: float
    y_upper_probe: float

    def __bool__(self) -> bool:  # allows `if check:` in callers
        return self.normalizable


def _probe_pair(w: Superpotential, a: float, y_lo: float, y_hi: float, upper: bool):
    """Two W samples approaching one end of the Y interval."""
    scale = max(w.y_scale, 1e-6)
    if upper:
        end = y_hi
        probes = (
            [10 * scale, 20 * scale]
            if math.isinf(end)
            else [end - d * _finite_width(y_lo, y_hi, scale) for d in (1e-4, 1e-5)]
        )
    else:
        end = y_lo
        probes = (
            [-10 * scale, -20 * scale]
            if math.isinf(end)
            else [end + d * _finite_width(y_lo, y_hi, scale) for d in (1e-4, 1e-5)]
        )
    vals = []
    for yp in probes:
        xp = invert_Y(w.u_ref, yp)
        vals.append(float(w.w(xp, a)))
    return probes, vals


def _finite_width(y_lo: float, y_hi: float, scale: float) -> float:
    if math.isfinite(y_lo) and math.isfinite(y_hi):
        return y_hi - y_lo
    return scale


def check_normalizability(w: Superpotential, a: float) -> NormalizabilityCheck:
    """Endpoint sign test for square integrability of the ground state.

    psi0 = exp(-int^Y W dY') vanishes at both ends of the working Y
    interval iff the accumulated integral diverges to +inf there; with
    definite endpoint signs this reduces to W > 0 near the upper end and
    W < 0 near the lower end.  Infinite ends are sampled at 10x and 20x
    the characteristic scale, finite ends at two offsets just inside.

    Raises IndeterminateError when the two samples at an end disagree in
    sign or both sit at zero within tolerance.
    """
    y_lo, y_hi = w.y_domain
    results = {}
    for upper in (False, True):
        probes, vals = _probe_pair(w, a, y_lo, y_hi, upper)
        tol = 1e-9 * max(1.0, abs(vals[0]), abs(vals[1]))
        s0, s1 = np.sign(vals[0]), np.sign(vals[1])
        if abs(vals[0]) <= tol and abs(vals[1]) <= tol:
            raise IndeterminateError(
                f"W vanishes at both probes near the {'upper' if upper else 'lower'} end",
                samples=(vals[0], vals[1]),
            )
        if s0 != s1:
            raise IndeterminateError(
                f"sign of W changes between probes near the {'upper' if upper else 'lower'} end",
                samples=(vals[0], vals[1]),
            )
        results[upper] = (probes[-1], vals[-1])
    ok = results[True][1] > 0.0 and results[False][1] < 0.0
    return NormalizabilityCheck(
        normalizable=ok,
        w_lower=results[False][1],
        w_upper=results[True][1],
        y_lower_probe=results[False][0],
        y_upper_probe=results[True][0],
    )
