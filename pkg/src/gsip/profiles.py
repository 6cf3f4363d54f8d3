"""Mass profiles: the function U(x), its derivatives, and derived quantities.

A profile fixes the kinetic structure of the problem through
m(x) = 1 / (2 U(x)^2).  Two derived quantities appear throughout the
closed-form families:

* Y(x), the antiderivative of 1/U from a fixed reference point x_ref --
  the natural coordinate in which every family reduces to a
  constant-mass shape;
* V0(x) = -U'(x)^2/4 - U(x) U''(x)/2, the mass-induced potential offset.

Built-in profiles carry analytic closures for everything including the
inverse map x(Y); custom profiles fall back on central finite
differences and adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import quad

from .errors import DomainError, NumericsError

# Central-difference steps for custom profiles, scaled per evaluation
# point.  First derivatives balance truncation against roundoff at 1e-5;
# second derivatives use a wider step and a 4th-order stencil because
# their roundoff grows like eps / h^2.
FD_STEP = 1e-5
FD_STEP_2 = 2e-3

# Relative tolerance for the quadrature fallback of Y.
QUAD_RTOL = 1e-12


@dataclass(frozen=True)
class MassProfile:
    """Profile function U(x) on an open interval where U never vanishes."""

    kind: str
    u: Callable
    du: Callable
    d2u: Callable
    domain: tuple[float, float]
    x_ref: float
    y: Callable | None = None
    x_of_y: Callable | None = None
    param: float | None = None
    label: str = field(default="custom")
    # Range of Y over the domain, as a set (orientation-free); None means
    # probe numerically near the domain ends.
    y_image: tuple[float, float] | None = None

    def contains(self, x: ArrayLike) -> bool:
        xs = np.asarray(x, dtype=float)
        lo, hi = self.domain
        return bool(np.all((xs > lo) & (xs < hi)))

    def require(self, x: ArrayLike) -> NDArray[np.float64]:
        xs = np.asarray(x, dtype=float)
        if not self.contains(xs):
            raise DomainError(
                f"position outside profile domain ({self.domain[0]}, {self.domain[1]})"
            )
        return xs


def _as_ufunc(f):
    def wrapped(x):
        return f(np.asarray(x, dtype=float))

    return wrapped


def constant_profile(u0: float) -> MassProfile:
    """U(x) = u0 on the whole line; the constant-mass case m = 1/(2 u0^2)."""
    if u0 == 0.0:
        raise DomainError("constant profile requires u0 != 0")
    return MassProfile(
        kind="constant",
        u=_as_ufunc(lambda x: np.full_like(x, u0)),
        du=_as_ufunc(lambda x: np.zeros_like(x)),
        d2u=_as_ufunc(lambda x: np.zeros_like(x)),
        domain=(-math.inf, math.inf),
        x_ref=0.0,
        y=_as_ufunc(lambda x: x / u0),
        x_of_y=lambda yy: u0 * np.asarray(yy, dtype=float),
        param=u0,
        label=f"constant(u0={u0:g})",
        y_image=(-math.inf, math.inf),
    )


def inverse_linear_profile(c: float = 0.5) -> MassProfile:
    """U(x) = c/x on (0, inf); c = 1/2 gives m(x) = 2 x^2 and Y = x^2."""
    if c == 0.0:
        raise DomainError("inverse-linear profile requires c != 0")
    return MassProfile(
        kind="inverse-linear",
        u=_as_ufunc(lambda x: c / x),
        du=_as_ufunc(lambda x: -c / x**2),
        d2u=_as_ufunc(lambda x: 2 * c / x**3),
        domain=(0.0, math.inf),
        # 1/U = x/c is integrable down to 0, so the natural reference
        # giving Y = x^2/(2c) sits on the boundary.
        x_ref=0.0,
        y=_as_ufunc(lambda x: x**2 / (2 * c)),
        x_of_y=lambda yy: np.sqrt(2 * c * np.asarray(yy, dtype=float)),
        param=c,
        label=f"inverse-linear(c={c:g})",
        y_image=(0.0, math.inf),
    )


def sech_profile() -> MassProfile:
    """U(x) = 1/cosh(x); the graded-alloy mass m(x) = cosh(x)^2 / 2."""
    return MassProfile(
        kind="sech-mass",
        u=_as_ufunc(lambda x: 1.0 / np.cosh(x)),
        du=_as_ufunc(lambda x: -np.sinh(x) / np.cosh(x) ** 2),
        d2u=_as_ufunc(lambda x: (np.sinh(x) ** 2 - 1.0) / np.cosh(x) ** 3),
        domain=(-math.inf, math.inf),
        x_ref=0.0,
        y=_as_ufunc(np.sinh),
        x_of_y=lambda yy: np.arcsinh(np.asarray(yy, dtype=float)),
        label="sech-mass",
        y_image=(-math.inf, math.inf),
    )


def linear_profile(s: float) -> MassProfile:
    """U(x) = s*x on (0, inf); Y = ln(x)/s referenced to x = 1."""
    if s == 0.0:
        raise DomainError("linear profile requires s != 0")
    return MassProfile(
        kind="linear",
        u=_as_ufunc(lambda x: s * x),
        du=_as_ufunc(lambda x: np.full_like(x, s)),
        d2u=_as_ufunc(lambda x: np.zeros_like(x)),
        domain=(0.0, math.inf),
        x_ref=1.0,
        y=_as_ufunc(lambda x: np.log(x) / s),
        x_of_y=lambda yy: np.exp(s * np.asarray(yy, dtype=float)),
        param=s,
        label=f"linear(s={s:g})",
        y_image=(-math.inf, math.inf),
    )


def custom_profile(
    u: Callable,
    domain: tuple[float, float],
    y: Callable | None = None,
    x_of_y: Callable | None = None,
) -> MassProfile:
    """Profile from a bare U(x) callable; derivatives by central differences."""

    def du(x):
        x = np.asarray(x, dtype=float)
        hd = FD_STEP * np.maximum(1.0, np.abs(x))
        return (u(x + hd) - u(x - hd)) / (2 * hd)

    def d2u(x):
        # 4th-order stencil, step scaled with |x| so profiles singular at
        # the origin keep relative accuracy; floored for |x| near zero
        x = np.asarray(x, dtype=float)
        hd = FD_STEP_2 * np.maximum(np.abs(x), 0.1)
        return (
            -u(x + 2 * hd) + 16 * u(x + hd) - 30 * u(x) + 16 * u(x - hd) - u(x - 2 * hd)
        ) / (12 * hd**2)

    lo, hi = domain
    if lo < 0.0 < hi:
        x_ref = 0.0
    elif math.isfinite(lo) and math.isfinite(hi):
        x_ref = 0.5 * (lo + hi)
    elif math.isfinite(lo):
        x_ref = lo + 1.0
    else:
        x_ref = hi - 1.0
    return MassProfile(
        kind="custom",
        u=_as_ufunc(lambda x: np.asarray(u(x), dtype=float)),
        du=du,
        d2u=d2u,
        domain=domain,
        x_ref=x_ref,
        y=y,
        x_of_y=x_of_y,
        label="custom",
    )


# Built-in profiles addressable by name from config files.  "value" holds
# the single numeric parameter where the kind takes one.
PROFILE_BUILDERS: dict[str, Callable[..., MassProfile]] = {
    "constant": constant_profile,
    "inverse-linear": inverse_linear_profile,
    "sech-mass": lambda *a: sech_profile(),
    "linear": linear_profile,
}


def profile_by_name(kind: str, value: float | None = None) -> MassProfile:
    if kind not in PROFILE_BUILDERS:
        raise DomainError(
            f"unknown profile kind {kind!r}; expected one of {sorted(PROFILE_BUILDERS)}"
        )
    if kind == "sech-mass":
        return sech_profile()
    if value is None:
        raise DomainError(f"profile kind {kind!r} requires a numeric value")
    return PROFILE_BUILDERS[kind](value)


def eval_mass(profile: MassProfile, x: ArrayLike):
    """Effective mass m(x) = 1 / (2 U(x)^2); positive wherever U != 0."""
    xs = profile.require(x)
    return 1.0 / (2.0 * profile.u(xs) ** 2)


def _quad_y(profile: MassProfile, x: float) -> float:
    val, err = quad(
        lambda t: 1.0 / float(profile.u(t)),
        profile.x_ref,
        x,
        epsabs=0.0,
        epsrel=QUAD_RTOL,
        limit=200,
    )
    if not math.isfinite(val) or err > max(abs(val), 1.0) * 1e-9:
        raise NumericsError(
            f"quadrature for Y({x}) did not converge (estimate {val}, error {err})"
        )
    return val


def eval_Y(profile: MassProfile, x: ArrayLike):
    """Integrated inverse profile Y(x) = int_{x_ref}^{x} dt / U(t).

    Uses the analytic closed form when the profile carries one, otherwise
    adaptive quadrature at relative tolerance 1e-12.
    """
    xs = profile.require(x)
    if profile.y is not None:
        return profile.y(xs)
    flat = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.array([_quad_y(profile, float(t)) for t in flat])
    return out.reshape(np.shape(xs)) if np.ndim(xs) else float(out[0])


def eval_V0(profile: MassProfile, x: ArrayLike):
    """Mass-induced potential offset V0 = -U'^2/4 - U U''/2."""
    xs = profile.require(x)
    return -0.25 * profile.du(xs) ** 2 - 0.5 * profile.u(xs) * profile.d2u(xs)


def y_interval(profile: MassProfile) -> tuple[float, float]:
    """Range of Y over the profile domain, as an orientation-free set."""
    if profile.y_image is not None:
        return profile.y_image
    lo, hi = profile.domain
    vals = []
    for end, inner in ((lo, 1.0), (hi, -1.0)):
        if math.isinf(end):
            vals.append(math.copysign(math.inf, inner * -1.0))
            continue
        delta = 1e-9 * max(1.0, abs(end))
        vals.append(float(eval_Y(profile, end + inner * delta)))
    lo_y, hi_y = min(vals), max(vals)
    # An end probing to a huge |Y| is treated as infinite.
    if abs(lo_y) > 1e12:
        lo_y = -math.inf
    if abs(hi_y) > 1e12:
        hi_y = math.inf
    return (lo_y, hi_y)


def invert_Y(profile: MassProfile, y_target: float) -> float:
    """Position x with Y(x) = y_target; analytic where available, else bisection."""
    if profile.x_of_y is not None:
        return float(profile.x_of_y(y_target))
    lo, hi = profile.domain
    # Y is strictly monotone; bracket by marching from x_ref.
    sign = 1.0 if float(profile.u(profile.x_ref)) > 0 else -1.0
    step = 1.0
    a = b = profile.x_ref
    fa = 0.0 - y_target
    for _ in range(200):
        cand = profile.x_ref + (step if (y_target * sign >= 0) else -step)
        cand = min(max(cand, lo + 1e-12 * max(1, abs(lo))), hi - 1e-12 * max(1, abs(hi)))
        fc = eval_Y(profile, cand) - y_target
        if fa * fc <= 0:
            a, b = (min(profile.x_ref, cand), max(profile.x_ref, cand))
            break
        step *= 2.0
    else:
        raise NumericsError(f"could not bracket Y = {y_target}")
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = eval_Y(profile, mid) - y_target
        if (eval_Y(profile, a) - y_target) * fm <= 0:
            b = mid
        else:
            a = mid
        if b - a < 1e-13 * max(1.0, abs(mid)):
            break
    return 0.5 * (a + b)
