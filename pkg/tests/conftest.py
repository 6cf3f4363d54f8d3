"""Shared fixtures: canonical cases are verified once per session."""

import math

import pytest

import gsip


@pytest.fixture(scope="session")
def canonical_reports():
    """case_id -> (CanonicalCase, VerificationReport) for the six references."""
    out = {}
    for case in gsip.canonical_cases():
        report = gsip.run_case(
            case.spec, grid=case.grid, k=case.k, case_id=case.case_id
        )
        out[case.case_id] = (case, report)
    return out


@pytest.fixture()
def inv_sqrt2():
    return 1.0 / math.sqrt(2.0)
