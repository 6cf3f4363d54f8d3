"""Closed-form shape-invariant families for the variable-mass equation.

Six families, each defined by a superpotential W(x, a) built from the
profile coordinate Y(x), together with its potential, parameter step,
spectrum increment R(a), closed-form energies, and analytic (unnormalized)
ground state.  Parameters follow one canonical set per family:

    OscShift       W = (U' + R0 Y)/2 + a          E_n = n R0
    Exponential    W = (U' - u0 e^{-aY})/2 + a    E_n = n alpha (2a - n alpha)
    OscLinearG     W = U'/2 + a Y                 E_n = 2 a n
    OscInverseG    W = U'/2 + C1 Y/4 + a/(aY)     E_n = C1 n
    Trigonometric  W = -a tan + b sec + U'/2      E_n = n alpha (n alpha - 2a)
    Hyperbolic     W = a tanh + b sech + U'/2     E_n = n alpha (2a - n alpha)

Trig functions take the argument alpha*Y.  Every potential carries the
mass-induced offset V0(x); every ground state carries the |U|^{-1/2}
prefactor and satisfies A psi0 = 0 identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from .errors import NormalizabilityError, PoleError, UnboundLevelError, ValidationError
from .profiles import MassProfile, eval_V0, eval_Y, invert_Y, y_interval
from .susy import Superpotential, check_normalizability

# Working-interval margin at sec/tan poles, in units of alpha*Y.
TRIG_EDGE_EPS = 1e-3

# Dirichlet-wall offset from a finite domain endpoint, in x units.
WALL_OFFSET = 1e-3

# Amplitude ratio defining the auto box: edges where |psi| drops to 1e-12
# of its peak, i.e. the negative-log envelope rises by this much.
_BOX_LOG_DROP = -math.log(1e-12)

_POLE_TOL = 1e-12


class Family(str, Enum):
    OscShift = "OscShift"
    Exponential = "Exponential"
    OscLinearG = "OscLinearG"
    OscInverseG = "OscInverseG"
    Trigonometric = "Trigonometric"
    Hyperbolic = "Hyperbolic"


# Families whose parameter decrement alpha must be nonzero; the alpha -> 0
# limits are served by OscShift / OscLinearG instead.
_NEEDS_ALPHA = {
    Family.Exponential,
    Family.OscInverseG,
    Family.Trigonometric,
    Family.Hyperbolic,
}


@dataclass(frozen=True)
class FamilySpec:
    """One family with its real parameters and mass profile."""

    family: Family
    profile: MassProfile
    a: float = 0.0
    alpha: float = 0.0
    R0: float = 0.0
    u0: float = 0.0
    C1: float = 0.0
    b: float = 0.0

    def stepped(self, times: int = 1) -> "FamilySpec":
        """Spec with the shape parameter advanced along the orbit."""
        a = self.a
        for _ in range(times):
            a = param_step_of(replace(self, a=a))
        return replace(self, a=a)


def validate_spec(spec: FamilySpec) -> None:
    """Structural parameter validation; raises ValidationError naming the field."""
    for name in ("a", "alpha", "R0", "u0", "C1", "b"):
        if not math.isfinite(getattr(spec, name)):
            raise ValidationError(name, "must be finite")
    fam = spec.family
    if fam in _NEEDS_ALPHA:
        if spec.alpha == 0.0:
            raise ValidationError("alpha", f"{fam.value} requires alpha != 0")
    elif spec.alpha != 0.0:
        raise ValidationError("alpha", f"{fam.value} has no parameter decrement; set alpha = 0")
    if fam is Family.OscShift:
        if spec.R0 <= 0.0:
            raise ValidationError("R0", "OscShift requires R0 > 0")
    elif spec.R0 != 0.0:
        raise ValidationError("R0", f"{fam.value} carries R0 = 0 in the standard parameterization")
    if fam is not Family.Exponential and spec.u0 != 0.0:
        raise ValidationError("u0", "u0 is only used by the Exponential family")
    if fam is not Family.OscInverseG and spec.C1 != 0.0:
        raise ValidationError("C1", "C1 is only used by the OscInverseG family")
    if fam not in (Family.Trigonometric, Family.Hyperbolic) and spec.b != 0.0:
        raise ValidationError("b", "b is only used by the Trigonometric and Hyperbolic families")


# ---------------------------------------------------------------------------
# trig/hyperbolic building blocks with pole guards


def _trig_terms(spec: FamilySpec, y):
    arg = spec.alpha * np.asarray(y, dtype=float)
    cosv = np.cos(arg)
    if np.any(np.abs(cosv) < _POLE_TOL):
        raise PoleError("evaluation within 1e-12 of a sec/tan pole")
    return np.tan(arg), 1.0 / cosv


def _hyp_terms(spec: FamilySpec, y):
    arg = spec.alpha * np.asarray(y, dtype=float)
    return np.tanh(arg), 1.0 / np.cosh(arg)


def _inverse_y_guard(y):
    ys = np.asarray(y, dtype=float)
    if np.any(np.abs(ys) < _POLE_TOL):
        raise PoleError("evaluation within 1e-12 of the Y = 0 pole")
    return ys


# ---------------------------------------------------------------------------
# the table rows


def superpotential_of(spec: FamilySpec, x: ArrayLike):
    """W(x, a) for the family, evaluated on the profile domain."""
    prof = spec.profile
    xs = prof.require(x)
    du = prof.du(xs)
    y = eval_Y(prof, xs)
    fam = spec.family
    if fam is Family.OscShift:
        return 0.5 * (du + spec.R0 * y) + spec.a
    if fam is Family.Exponential:
        return 0.5 * (du - spec.u0 * np.exp(-spec.alpha * y)) + spec.a
    if fam is Family.OscLinearG:
        return 0.5 * du + spec.a * y
    if fam is Family.OscInverseG:
        y = _inverse_y_guard(y)
        return 0.5 * du + 0.25 * spec.C1 * y + spec.a / (spec.alpha * y)
    if fam is Family.Trigonometric:
        t, s = _trig_terms(spec, y)
        return -spec.a * t + spec.b * s + 0.5 * du
    t, s = _hyp_terms(spec, y)
    return spec.a * t + spec.b * s + 0.5 * du


def _superpotential_prime(spec: FamilySpec, x: ArrayLike):
    """Analytic dW/dx for the family."""
    prof = spec.profile
    xs = prof.require(x)
    u = prof.u(xs)
    d2u = prof.d2u(xs)
    y = eval_Y(prof, xs)
    fam = spec.family
    al = spec.alpha
    if fam is Family.OscShift:
        return 0.5 * (d2u + spec.R0 / u)
    if fam is Family.Exponential:
        return 0.5 * (d2u + al * spec.u0 * np.exp(-al * y) / u)
    if fam is Family.OscLinearG:
        return 0.5 * d2u + spec.a / u
    if fam is Family.OscInverseG:
        y = _inverse_y_guard(y)
        return 0.5 * d2u + 0.25 * spec.C1 / u - spec.a / (al * y**2 * u)
    if fam is Family.Trigonometric:
        t, s = _trig_terms(spec, y)
        return 0.5 * d2u + (al / u) * (-spec.a * s**2 + spec.b * s * t)
    t, s = _hyp_terms(spec, y)
    return 0.5 * d2u + (al / u) * (spec.a * s**2 - spec.b * s * t)


def potential_of(spec: FamilySpec, x: ArrayLike):
    """Closed-form V1(x, a); identical to W^2 - (UW)' by construction."""
    prof = spec.profile
    xs = prof.require(x)
    v0 = eval_V0(prof, xs)
    y = eval_Y(prof, xs)
    fam = spec.family
    a, al, b = spec.a, spec.alpha, spec.b
    if fam is Family.OscShift:
        return 0.25 * ((spec.R0 * y + 2 * a) ** 2 - 2 * spec.R0) + v0
    if fam is Family.Exponential:
        z = spec.u0 * np.exp(-al * y)
        return 0.25 * ((z - 2 * a) ** 2 - 2 * al * z) + v0
    if fam is Family.OscLinearG:
        return a**2 * y**2 - a + v0
    if fam is Family.OscInverseG:
        y = _inverse_y_guard(y)
        return (
            spec.C1**2 * y**2 / 16
            + (a**2 / al**2 + a / al) / y**2
            + 0.5 * spec.C1 * (a / al - 0.5)
            + v0
        )
    if fam is Family.Trigonometric:
        t, s = _trig_terms(spec, y)
        return (a * t - b * s) ** 2 - al * s * (b * t - a * s) + v0
    t, s = _hyp_terms(spec, y)
    return (a * t + b * s) ** 2 + al * s * (b * t - a * s) + v0


def r_of(spec: FamilySpec, a: float | None = None) -> float:
    """Spectrum increment R(a) of the shape-invariance relation."""
    av = spec.a if a is None else a
    fam = spec.family
    if fam is Family.OscShift:
        return spec.R0
    if fam is Family.OscLinearG:
        return 2.0 * av
    if fam is Family.OscInverseG:
        return spec.C1
    if fam is Family.Trigonometric:
        return spec.alpha * (spec.alpha - 2.0 * av)
    # Exponential and Hyperbolic share R(a) = alpha (2a - alpha).
    return spec.alpha * (2.0 * av - spec.alpha)


def param_step_of(spec: FamilySpec) -> float:
    """Parameter map a -> a2: a - alpha, with alpha = 0 for the
    equi-spaced OscShift / OscLinearG families (a unchanged)."""
    return spec.a - spec.alpha


def _require_bound(spec: FamilySpec, n: int) -> None:
    a = spec.a
    for i in range(1, n + 1):
        r = r_of(spec, a)
        if r <= 0.0:
            raise UnboundLevelError(
                f"level {n} of {spec.family.value} is not bound "
                f"(R(a_{i}) = {r:g} at a = {a:g})"
            )
        a -= spec.alpha


def spectrum_of(spec: FamilySpec, n: int) -> float:
    """Closed-form n-th energy; raises UnboundLevelError past the bound prefix."""
    if n < 0:
        raise ValueError("level index must be non-negative")
    _require_bound(spec, n)
    fam = spec.family
    a, al = spec.a, spec.alpha
    if fam is Family.OscShift:
        return n * spec.R0
    if fam is Family.Exponential:
        return n * al * (2 * a - n * al)
    if fam is Family.OscLinearG:
        return 2.0 * a * n
    if fam is Family.OscInverseG:
        return spec.C1 * n
    if fam is Family.Trigonometric:
        return n * al * (n * al - 2 * a)
    return n * al * (2 * a - n * al)


def bound_level_count(spec: FamilySpec, limit: int = 64) -> int:
    """Number of bound levels (the ground state always counts), capped at
    `limit` for infinite spectra."""
    a = spec.a
    for i in range(1, limit):
        if r_of(spec, a) <= 0.0:
            return i
        a -= spec.alpha
    return limit


def ground_state_of(spec: FamilySpec, x: ArrayLike):
    """Unnormalized analytic ground state; satisfies A psi0 = 0 pointwise.

    Raises NormalizabilityError when the endpoint sign test fails.
    """
    if not check_normalizability(as_superpotential(spec), spec.a):
        raise NormalizabilityError(
            f"{spec.family.value} parameters give a non-normalizable ground state"
        )
    return _ground_state_raw(spec, x)


def _ground_state_raw(spec: FamilySpec, x: ArrayLike):
    prof = spec.profile
    xs = prof.require(x)
    pref = np.abs(prof.u(xs)) ** -0.5
    y = eval_Y(prof, xs)
    fam = spec.family
    a, al, b = spec.a, spec.alpha, spec.b
    if fam is Family.OscShift:
        return pref * np.exp(-0.25 * spec.R0 * y**2 - a * y)
    if fam is Family.Exponential:
        return pref * np.exp(-spec.u0 * np.exp(-al * y) / (2 * al) - a * y)
    if fam is Family.OscLinearG:
        return pref * np.exp(-0.5 * a * y**2)
    if fam is Family.OscInverseG:
        y = _inverse_y_guard(y)
        return pref * np.abs(y) ** (-a / al) * np.exp(-spec.C1 * y**2 / 8)
    if fam is Family.Trigonometric:
        t, s = _trig_terms(spec, y)
        return pref * np.abs(s) ** (a / al) * np.abs(t + s) ** (-b / al)
    arg = al * y
    return (
        pref
        * np.cosh(arg) ** (-a / al)
        * np.exp(-(b / al) * np.arctan(np.sinh(arg)))
    )


# ---------------------------------------------------------------------------
# working intervals and superpotential bridging


def _y_domain(spec: FamilySpec) -> tuple[float, float]:
    """Working interval in Y: profile image intersected with family walls."""
    lo, hi = y_interval(spec.profile)
    fam = spec.family
    if fam is Family.Trigonometric:
        wall = 0.5 * math.pi / abs(spec.alpha)
        lo, hi = max(lo, -wall), min(hi, wall)
    elif fam is Family.OscInverseG:
        lo = max(lo, 0.0)
    return lo, hi


def _y_scale(spec: FamilySpec) -> float:
    """Characteristic Y scale past which the shape terms saturate."""
    fam = spec.family
    a = abs(spec.a)
    if fam is Family.OscShift:
        return 1.0 / math.sqrt(spec.R0) + 2 * a / spec.R0
    if fam is Family.OscLinearG:
        return 1.0 / math.sqrt(max(a, 1e-9))
    if fam is Family.OscInverseG:
        return 4.0 / math.sqrt(max(abs(spec.C1), 1e-9)) + a / abs(spec.alpha)
    if fam is Family.Exponential:
        # beyond the zero of u0 e^{-aY} - 2a the constant term dominates
        ratio = abs(spec.u0) / max(2 * a, 1e-9)
        return (1.0 + max(0.0, math.log(max(ratio, 1e-9)))) / abs(spec.alpha)
    if fam is Family.Hyperbolic:
        ratio = abs(spec.b) / max(a, 1e-9)
        return (1.0 + math.log1p(ratio)) / abs(spec.alpha)
    return 1.0 / abs(spec.alpha)


def as_superpotential(spec: FamilySpec) -> Superpotential:
    """Bridge to the factorization machinery, with analytic dW/dx."""

    def w(x, a):
        return superpotential_of(replace(spec, a=a), x)

    def w_prime(x, a):
        return _superpotential_prime(replace(spec, a=a), x)

    return Superpotential(
        w=w,
        u_ref=spec.profile,
        param_step=lambda a: a - spec.alpha,
        r_of_a=lambda a: r_of(spec, a),
        w_prime=w_prime,
        y_domain=_y_domain(spec),
        y_scale=_y_scale(spec),
    )


def _log_envelope(spec: FamilySpec) -> Callable:
    """Negative log of the ground-state shape factor, as a function of Y.

    Drops the bounded |U|^{-1/2} prefactor; used only to size boxes.
    """
    fam = spec.family
    a, al, b = spec.a, spec.alpha, spec.b
    if fam is Family.OscShift:
        return lambda y: 0.25 * spec.R0 * y**2 + a * y
    if fam is Family.Exponential:
        return lambda y: spec.u0 * np.exp(-al * y) / (2 * al) + a * y
    if fam is Family.OscLinearG:
        return lambda y: 0.5 * a * y**2
    if fam is Family.OscInverseG:
        return lambda y: (a / al) * np.log(y) + spec.C1 * y**2 / 8
    if fam is Family.Hyperbolic:
        return lambda y: (a / al) * np.log(np.cosh(al * y)) + (b / al) * np.arctan(
            np.sinh(al * y)
        )
    raise ValueError("trigonometric boxes are wall-bounded; no envelope needed")


def auto_interval(spec: FamilySpec, k: int = 1) -> tuple[float, float]:
    """Box (x_lo, x_hi) where the slowest relevant state has decayed to 1e-12.

    Sizing uses the ground-state envelope of the k-th spec along the
    parameter orbit, which controls the decay of the (k-1)-th excited
    state.  Pole-walled ends sit at the standard wall margins instead.
    """
    spec_k = spec.stepped(max(k - 1, 0))
    y_lo, y_hi = _y_domain(spec)
    if spec.family is Family.Trigonometric:
        wall = (0.5 * math.pi - TRIG_EDGE_EPS) / abs(spec.alpha)
        edges = (max(y_lo, -wall), min(y_hi, wall))
    else:
        env = _log_envelope(spec_k)
        edges = _envelope_crossings(env, y_lo, y_hi, _y_scale(spec_k))
    if spec.family is Family.OscInverseG:
        # hold the Dirichlet wall off the Y = 0 pole; the inverse-square
        # barrier makes the spectrum insensitive to the exact position
        edges = (max(edges[0], 1e-3), edges[1])
    xs = sorted(float(invert_Y(spec.profile, yv)) for yv in edges)
    dom_lo, dom_hi = spec.profile.domain
    lo = xs[0] if math.isinf(dom_lo) else max(xs[0], dom_lo + WALL_OFFSET)
    hi = xs[1] if math.isinf(dom_hi) else min(xs[1], dom_hi - WALL_OFFSET)
    return lo, hi


def _envelope_crossings(env, y_lo, y_hi, scale) -> tuple[float, float]:
    """Y values where the envelope has risen _BOX_LOG_DROP above its minimum."""
    span = 60.0 * max(scale, 1e-3)
    lo = y_lo if math.isfinite(y_lo) else -span
    hi = y_hi if math.isfinite(y_hi) else span
    if math.isfinite(y_lo):
        lo = y_lo + 1e-9 * max(1.0, abs(y_lo)) + 1e-12
    grid = np.linspace(lo, hi, 4001)
    vals = env(grid)
    imin = int(np.argmin(vals))
    target = vals[imin] + _BOX_LOG_DROP
    out = []
    for side, yend, finite in ((-1, y_lo, math.isfinite(y_lo)), (1, y_hi, math.isfinite(y_hi))):
        y_peak = grid[imin]
        y_far = grid[0] if side < 0 else grid[-1]
        if env(np.array([y_far]))[0] < target:
            # envelope never rises enough before the domain end: walled side
            out.append(yend if finite else y_far)
            continue
        a_, b_ = y_peak, y_far
        for _ in range(80):
            mid = 0.5 * (a_ + b_)
            if env(np.array([mid]))[0] < target:
                a_ = mid
            else:
                b_ = mid
        edge = 0.5 * (a_ + b_)
        if not finite:
            edge += side * 0.15 * abs(edge - y_peak)  # padding on open ends
        out.append(edge)
    return out[0], out[1]


def si_interval(spec: FamilySpec, v_cap: float = 1e5) -> tuple[float, float]:
    """Interval for shape-invariance residual checks.

    Like the auto box but held back from potential walls: where |V1|
    exceeds v_cap, double-precision cancellation noise would mask the
    identity being tested, so the ends are trimmed until it does not.
    """
    if spec.family is Family.Trigonometric:
        wall = (0.5 * math.pi - 0.05) / abs(spec.alpha)
        y_lo, y_hi = _y_domain(spec)
        edges = (max(y_lo, -wall), min(y_hi, wall))
        xs = sorted(float(invert_Y(spec.profile, yv)) for yv in edges)
        lo, hi = xs[0], xs[1]
    else:
        lo, hi = auto_interval(spec, 1)
        if spec.family is Family.OscInverseG:
            x_at = float(invert_Y(spec.profile, 0.05 * _y_scale(spec)))
            lo = max(lo, min(x_at, hi - 1e-6))

    def v_abs(x: float) -> float:
        return float(abs(potential_of(spec, x)))

    for _ in range(200):  # trim the louder end until the cap holds
        v_lo, v_hi = v_abs(lo), v_abs(hi)
        if max(v_lo, v_hi) <= v_cap:
            break
        width = hi - lo
        if v_lo >= v_hi:
            lo += 0.02 * width
        else:
            hi -= 0.02 * width
    return lo, hi
