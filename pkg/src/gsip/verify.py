"""Cross-checks between the closed forms and the numerical oracle.

A verification case pairs one family spec with a grid: the analytic
spectrum is compared level by level against Richardson-refined
eigenvalues, the analytic ground state against the numeric one, ladder
states against eigenvectors, and the shape-invariance identity is
checked on a separate moderate-potential grid.  Results are collected in
plain-data reports that serialize deterministically to JSON.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .eigensolver import discretize, lowest_eigenpairs, richardson_refine
from .errors import GsipError, NormalizabilityError
from .families import (
    Family,
    FamilySpec,
    as_superpotential,
    auto_interval,
    bound_level_count,
    ground_state_of,
    potential_of,
    si_interval,
    spectrum_of,
    validate_spec,
)
from .grids import Grid, GridFunction, overlap
from .profiles import constant_profile, eval_mass
from .susy import (
    apply_A,
    check_normalizability,
    ladder_excited_state,
    shape_invariance_residual,
)

REPORT_SCHEMA = "gsip-report/1"

# Ladder states are compared up to this level.
_LADDER_LEVELS = 3


@dataclass(frozen=True)
class Thresholds:
    """Pass/fail gates for a verification case."""

    spectrum_rel: float = 1e-3
    ground_overlap_deficit: float = 1e-6
    shape_invariance: float = 1e-9

    def to_dict(self) -> dict:
        return {
            "spectrum_rel": self.spectrum_rel,
            "ground_overlap_deficit": self.ground_overlap_deficit,
            "shape_invariance": self.shape_invariance,
        }


@dataclass
class VerificationReport:
    """Per-case comparison of analytic and numerical results."""

    case_id: str
    family: str
    profile: str
    normalizable: bool = False
    levels: list[dict] = field(default_factory=list)
    excluded_levels: list[int] = field(default_factory=list)
    residual_shape_invariance: float = math.nan
    ground_overlap: float = math.nan
    ground_residual: float = math.nan
    ladder_overlaps: list[float] = field(default_factory=list)
    grid: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    passed: bool = False
    error: str | None = None
    # grid arrays for CSV/figure emission; never serialized
    artifacts: dict | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "family": self.family,
            "profile": self.profile,
            "normalizable": self.normalizable,
            "levels": self.levels,
            "excluded_levels": self.excluded_levels,
            "residual_shape_invariance": self.residual_shape_invariance,
            "ground_overlap": self.ground_overlap,
            "ground_residual": self.ground_residual,
            "ladder_overlaps": self.ladder_overlaps,
            "grid": self.grid,
            "thresholds": self.thresholds,
            "checks": self.checks,
            "passed": self.passed,
            "error": self.error,
        }


def _default_case_id(spec: FamilySpec, index: int | None = None) -> str:
    stem = f"{spec.family.value}-{spec.profile.kind}"
    return stem if index is None else f"{index:03d}-{stem}"


def run_case(
    spec: FamilySpec,
    grid: Grid | None = None,
    k: int = 4,
    case_id: str | None = None,
    thresholds: Thresholds | None = None,
    keep_artifacts: bool = True,
) -> VerificationReport:
    """Verify one family spec against the eigensolver.

    Validates parameters, rejects non-normalizable specs with
    NormalizabilityError, solves for the bound levels (clipped to the
    family's bound prefix and to eigenvalues below the box-edge
    potential), and fills a report.  Pass requires every kept level
    within the spectrum tolerance after Richardson refinement, ground
    overlap within its deficit gate, and the shape-invariance residual
    under its gate.
    """
    validate_spec(spec)
    thr = thresholds or Thresholds()
    sp = as_superpotential(spec)
    check = check_normalizability(sp, spec.a)
    if not check:
        raise NormalizabilityError(
            f"{spec.family.value} with a = {spec.a:g}: endpoint signs "
            f"({check.w_lower:g}, {check.w_upper:g}) do not give a bound ground state"
        )
    k_eff = max(1, min(k, bound_level_count(spec, limit=max(k, 2))))
    if grid is None:
        grid = Grid(*auto_interval(spec, k_eff), 4000)

    mass = lambda x: eval_mass(spec.profile, x)
    potential = lambda x: potential_of(spec, x)
    op = discretize(mass, potential, grid)
    pairs = lowest_eigenpairs(op, k_eff)
    refined = richardson_refine(mass, potential, grid, k_eff)

    # Levels at or above the shallower box edge are discretized-continuum
    # artifacts, not bound states of the untruncated problem.
    x = grid.nodes
    v_edge = float(min(potential(x[0]), potential(x[-1])))
    rows, excluded = [], []
    for n in range(k_eff):
        e_num = float(refined[n])
        if e_num >= v_edge:
            excluded.append(n)
            continue
        e_ana = spectrum_of(spec, n)
        abs_err = abs(e_num - e_ana)
        rel_err = abs_err / max(abs(e_ana), 1.0)
        rows.append(
            {
                "n": n,
                "E_analytic": e_ana,
                "E_numeric": e_num,
                "abs_err": abs_err,
                "rel_err": rel_err,
                "passed": rel_err <= thr.spectrum_rel,
            }
        )

    si_grid = Grid(*si_interval(spec), 1000)
    residual_si = shape_invariance_residual(sp, spec.a, si_grid)

    psi_analytic = GridFunction(grid, ground_state_of(spec, x)).normalized()
    ground_ov = overlap(psi_analytic, pairs[0][1])
    ground_res = apply_A(sp, spec.a, psi_analytic).norm() / psi_analytic.norm()

    ladder_ovs = []
    for n in range(1, min(_LADDER_LEVELS, k_eff - 1) + 1):
        psi_n = ladder_excited_state(sp, spec.a, n, grid)
        ladder_ovs.append(overlap(psi_n, pairs[n][1]))

    checks = {
        "spectrum": bool(rows) and all(r["passed"] for r in rows),
        "ground_overlap": ground_ov > 1.0 - thr.ground_overlap_deficit,
        "shape_invariance": residual_si < thr.shape_invariance,
    }
    report = VerificationReport(
        case_id=case_id or _default_case_id(spec),
        family=spec.family.value,
        profile=spec.profile.label,
        normalizable=bool(check),
        levels=rows,
        excluded_levels=excluded,
        residual_shape_invariance=float(residual_si),
        ground_overlap=float(ground_ov),
        ground_residual=float(ground_res),
        ladder_overlaps=[float(v) for v in ladder_ovs],
        grid={"x_lo": grid.x_lo, "x_hi": grid.x_hi, "n": grid.n, "h": grid.h},
        thresholds=thr.to_dict(),
        checks=checks,
        passed=all(checks.values()),
    )
    if keep_artifacts:
        report.artifacts = {
            "x": x,
            "potential": np.asarray(potential(x), dtype=float),
            "psi_analytic": psi_analytic.values,
            "psi_numeric": [p[1].values for p in pairs],
            "energies": [p[0] for p in pairs],
        }
    return report


def _failed_report(spec: FamilySpec, case_id: str, exc: Exception) -> VerificationReport:
    return VerificationReport(
        case_id=case_id,
        family=spec.family.value,
        profile=spec.profile.label,
        passed=False,
        error=f"{type(exc).__name__}: {exc}",
    )


def sweep(
    specs: Sequence[FamilySpec],
    grid_policy: Callable[[FamilySpec, int], Grid] | None = None,
    k: int | Sequence[int] = 4,
    thresholds: Thresholds | None = None,
    case_ids: Sequence[str] | None = None,
    keep_artifacts: bool = False,
) -> list[VerificationReport]:
    """Run one report per spec, order-preserving, failures isolated.

    Cases run concurrently on up to GSIP_THREADS workers (all cores when
    unset); a failing case yields a failed report without aborting the
    rest.  ``k`` may be a single level count or one per spec.
    """
    if not specs:
        raise ValueError("sweep requires at least one spec")
    ids = list(case_ids) if case_ids else [
        _default_case_id(s, i) for i, s in enumerate(specs)
    ]
    ks = list(k) if isinstance(k, (list, tuple)) else [k] * len(specs)

    def one(args):
        index, spec = args
        try:
            grid = grid_policy(spec, ks[index]) if grid_policy else None
            return run_case(
                spec, grid=grid, k=ks[index], case_id=ids[index],
                thresholds=thresholds, keep_artifacts=keep_artifacts,
            )
        except Exception as exc:  # isolation: one bad case must not abort the rest
            if not isinstance(exc, (GsipError, ValueError)):
                raise
            return _failed_report(spec, ids[index], exc)

    env = os.environ.get("GSIP_THREADS", "")
    cap = int(env) if env.strip().isdigit() else (os.cpu_count() or 1)
    workers = max(1, min(len(specs), cap))
    if workers == 1:
        return [one(item) for item in enumerate(specs)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, enumerate(specs)))


def reports_to_json(reports: Sequence[VerificationReport]) -> str:
    """Deterministic JSON document for a sweep (fixed key order, repr floats)."""
    doc = {
        "schema": REPORT_SCHEMA,
        "cases": [r.to_dict() for r in reports],
        "passed": all(r.passed for r in reports),
    }
    return json.dumps(doc, indent=2, allow_nan=True)


class CanonicalCase(NamedTuple):
    case_id: str
    spec: FamilySpec
    grid: Grid
    k: int


def canonical_cases() -> list[CanonicalCase]:
    """One well-conditioned reference case per family, constant profile.

    These are the cases exercised by the acceptance suite: the harmonic
    reduction, the Morse reduction, both equi-spaced families of the
    product ansatz, and the Scarf I / Scarf II reductions.
    """
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    cases = []

    spec = FamilySpec(Family.OscShift, constant_profile(inv_sqrt2), a=0.0, R0=2.0)
    cases.append(CanonicalCase("osc-shift-const", spec, Grid(-8.0, 8.0, 4000), 6))

    spec = FamilySpec(Family.Exponential, constant_profile(1.0), a=3.5, alpha=1.0, u0=1.0)
    cases.append(
        CanonicalCase("exponential-morse", spec, Grid(*auto_interval(spec, 4), 12000), 4)
    )

    spec = FamilySpec(Family.OscLinearG, constant_profile(inv_sqrt2), a=1.0)
    cases.append(
        CanonicalCase("osc-linear-g-const", spec, Grid(*auto_interval(spec, 5), 4000), 5)
    )

    spec = FamilySpec(Family.OscInverseG, constant_profile(inv_sqrt2), a=-2.0, alpha=1.0, C1=2.0)
    cases.append(
        CanonicalCase("osc-inverse-g-const", spec, Grid(*auto_interval(spec, 5), 4000), 5)
    )

    spec = FamilySpec(Family.Trigonometric, constant_profile(1.0), a=-3.0, alpha=1.0, b=0.5)
    cases.append(
        CanonicalCase("trigonometric-scarf1", spec, Grid(*auto_interval(spec, 4), 4000), 4)
    )

    # alpha = 0.8 keeps four strictly bound levels below the continuum
    # threshold a^2, avoiding the marginal zero-binding top level of the
    # integer-ratio point
    spec = FamilySpec(Family.Hyperbolic, constant_profile(1.0), a=3.0, alpha=0.8, b=0.5)
    cases.append(
        CanonicalCase("hyperbolic-scarf2", spec, Grid(*auto_interval(spec, 4), 16000), 4)
    )
    return cases
