"""Command-line front end: gsip generate|verify|sweep|tabulate <config>.

Outputs land under --out: delimited data as case-<id>.csv, a JSON report
as report.json, and a rendered figure per case unless plotting is
disabled.  Exit codes: 0 pass, 1 verification failure, 2 usage/config
error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .config import (
    RunConfig,
    build_case_spec,
    build_family_spec,
    parse_config,
    resolve_grid,
)
from .errors import (
    ConfigError,
    DomainError,
    GsipError,
    NormalizabilityError,
    UnboundLevelError,
    ValidationError,
)
from .families import spectrum_of, superpotential_of, ground_state_of, potential_of
from .profiles import eval_mass, eval_Y
from .susy import V2_from_W
from .verify import REPORT_SCHEMA, Thresholds, reports_to_json, run_case, sweep
from . import families as _families
from . import verify as _verify

EXIT_PASS = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_FLOAT_FMT = "%.17g"


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = np.column_stack(columns)
    with path.open("w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_FLOAT_FMT % v for v in row) + "\n")


def _case_id(cfg: RunConfig, spec) -> str:
    return cfg.case_id or f"{spec.family.value}-{spec.profile.kind}"


def cmd_generate(cfg: RunConfig, out: Path) -> int:
    spec = build_family_spec(cfg)
    grid = resolve_grid(cfg, spec)
    case_id = _case_id(cfg, spec)
    x = grid.nodes
    sp = _families.as_superpotential(spec)
    w = superpotential_of(spec, x)
    v1 = potential_of(spec, x)
    v2 = V2_from_W(sp, spec.a, x)
    psi0 = ground_state_of(spec, x)
    columns = [
        x,
        eval_mass(spec.profile, x),
        spec.profile.u(x),
        eval_Y(spec.profile, x),
        w,
        v1,
        v2,
        psi0,
    ]
    header = ["x", "m", "U", "Y", "W", "V1", "V2", "psi0_analytic"]
    _write_csv(out / f"case-{case_id}.csv", header, columns)

    spectrum = []
    truncated = False
    for n in range(cfg.k + 1):
        try:
            spectrum.append(spectrum_of(spec, n))
        except UnboundLevelError:
            truncated = True
            break
    doc = {
        "schema": REPORT_SCHEMA,
        "command": "generate",
        "case_id": case_id,
        "spectrum": spectrum,
        "finite_spectrum": truncated,
    }
    (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
    if cfg.plot:
        from .plotting import render_generate_figure

        render_generate_figure(
            out / f"case-{case_id}.png", x, w, v1, v2, psi0,
            f"{spec.family.value} on {spec.profile.label}",
        )
    print(f"generate: wrote case-{case_id}.csv ({grid.n} nodes), spectrum up to k={cfg.k}")
    return EXIT_PASS


def _emit_case_outputs(cfg: RunConfig, report, out: Path) -> None:
    art = report.artifacts
    if art is None:
        return
    header = ["x", "psi_analytic"] + [
        f"psi_numeric_{j}" for j in range(len(art["psi_numeric"]))
    ]
    columns = [art["x"], art["psi_analytic"], *art["psi_numeric"]]
    _write_csv(out / f"case-{report.case_id}.csv", header, columns)
    if cfg.plot:
        from .plotting import render_verify_figure

        render_verify_figure(
            out / f"case-{report.case_id}.png", art,
            f"{report.family} on {report.profile}",
        )


def _print_report(report) -> None:
    mark = "PASS" if report.passed else "FAIL"
    print(f"[{mark}] {report.case_id}")
    if report.error:
        print(f"    error: {report.error}")
        return
    for row in report.levels:
        print(
            f"    n={row['n']}: E_analytic={row['E_analytic']:.10g} "
            f"E_numeric={row['E_numeric']:.10g} rel_err={row['rel_err']:.3e}"
        )
    if report.excluded_levels:
        print(f"    excluded (above box continuum): {report.excluded_levels}")
    print(
        f"    ground_overlap={report.ground_overlap:.12f} "
        f"SI_residual={report.residual_shape_invariance:.3e}"
    )


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    spec = build_family_spec(cfg)
    grid = resolve_grid(cfg, spec)
    thr = Thresholds(cfg.tol_spectrum, cfg.tol_overlap, cfg.tol_si)
    report = run_case(
        spec, grid=grid, k=cfg.k, case_id=_case_id(cfg, spec), thresholds=thr
    )
    (out / "report.json").write_text(reports_to_json([report]) + "\n")
    _emit_case_outputs(cfg, report, out)
    _print_report(report)
    return EXIT_PASS if report.passed else EXIT_VERIFY_FAIL


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    if cfg.cases:
        entries = [build_case_spec(cfg, case) for case in cfg.cases]
        specs = [e[0] for e in entries]
        grids = {i: e[1] for i, e in enumerate(entries)}
        ks = [e[2] for e in entries]
        ids = [case.case_id for case in cfg.cases]
    else:
        spec = build_family_spec(cfg)
        specs, grids, ks, ids = [spec], {0: resolve_grid(cfg, spec)}, [cfg.k], [_case_id(cfg, spec)]
    thr = Thresholds(cfg.tol_spectrum, cfg.tol_overlap, cfg.tol_si)
    index = {id(s): i for i, s in enumerate(specs)}

    def policy(spec, k):
        return grids[index[id(spec)]]

    reports = sweep(
        specs,
        grid_policy=policy,
        k=ks,
        thresholds=thr,
        case_ids=ids,
        keep_artifacts=True,
    )
    (out / "report.json").write_text(reports_to_json(reports) + "\n")
    for report in reports:
        _emit_case_outputs(cfg, report, out)
        _print_report(report)
    n_pass = sum(r.passed for r in reports)
    print(f"sweep: {n_pass}/{len(reports)} cases passed")
    return EXIT_PASS if n_pass == len(reports) else EXIT_VERIFY_FAIL


def cmd_tabulate(cfg: RunConfig) -> int:
    spec = build_family_spec(cfg)
    print(f"{'n':>4} {'E_n':>20} {'dE_n':>20}")
    previous = None
    for n in range(cfg.k + 1):
        try:
            e = spectrum_of(spec, n)
        except UnboundLevelError:
            print(f"(spectrum terminates: level {n} unbound)")
            break
        delta = "" if previous is None else f"{e - previous:>20.12g}"
        print(f"{n:>4} {e:>20.12g} {delta:>20}")
        previous = e
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsip",
        description="Closed-form variable-mass quantum wells and their numerical verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("generate", "tabulate the closed forms of one case onto a grid (CSV + figure)"),
        ("verify", "cross-check one case against the eigensolver"),
        ("sweep", "verify every [case.*] section of the config"),
        ("tabulate", "print the closed-form spectrum"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="path to the TOML-style config file")
        p.add_argument("--out", default=None, help="output directory (default: config value)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override a config value; repeatable",
        )
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"gsip: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = parse_config(text, command=args.command, overrides=args.overrides)
        if args.out:
            cfg = dataclasses.replace(cfg, out=args.out)
        if args.no_plot:
            cfg = dataclasses.replace(cfg, plot=False)
        out = Path(cfg.out)
        if cfg.command != "tabulate":
            out.mkdir(parents=True, exist_ok=True)
        if cfg.command == "generate":
            return cmd_generate(cfg, out)
        if cfg.command == "verify":
            return cmd_verify(cfg, out)
        if cfg.command == "sweep":
            return cmd_sweep(cfg, out)
        return cmd_tabulate(cfg)
    except (ConfigError, ValidationError, DomainError) as exc:
        print(f"gsip: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NormalizabilityError, UnboundLevelError) as exc:
        print(f"gsip: case rejected: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAIL
    except GsipError as exc:
        print(f"gsip: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
