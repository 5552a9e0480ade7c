"""Command-line front end: solve / check / demo / report.

Exit-code contract: 0 = success and all expectations met, 2 = configuration
error, 3 = numerical failure (rank instability, corrupted exports, failed
checks).  All numerics are driven by the config file and flags; environment
variables are never consulted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import yaml

from .demos import DEMO_NAMES, run_demo
from .errors import (
    ConfigError,
    DataFormatError,
    DivergenceError,
    FaithfulnessError,
    GroupMismatchError,
    RankInstabilityError,
    RepresentationError,
    SizeCapError,
    ToleranceInconsistencyError,
)
from .fixtures import FixtureSet, default_suite
from .groups import FiniteGroup, construct_group, subgroup_generate, whole_group
from .reps import permutation_rep, regular_rep
from .solver import NULL_THRESHOLD, build_relaxed, build_standard, export_basis, load_basis, solve_basis
from .verify import CheckReport, RegisteredCheck, bundle, expectations_met, run_all

ROUNDTRIP_DRIFT_TOL = 1e-12


def load_config(path) -> dict:
    if path is None:
        raise ConfigError("this command needs --config PATH")
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a mapping")
    return cfg


def _build_group(cfg: dict) -> tuple[FiniteGroup, dict]:
    spec = cfg.get("group")
    if not isinstance(spec, dict):
        raise ConfigError("config needs a 'group' mapping with kind and parameters")
    return construct_group(spec), spec


def _build_rep(group: FiniteGroup, kind: str):
    if kind == "permutation":
        return permutation_rep(group)
    if kind == "regular":
        return regular_rep(group)
    raise ConfigError(f"unknown representation kind {kind!r} (use permutation|regular)")


def _build_subgroup(group: FiniteGroup, layer_cfg: dict):
    gens = layer_cfg.get("k_generators")
    if gens == "all":
        return whole_group(group)
    if gens is None:
        gens = []
    try:
        idx = [group.index_of(tuple(int(v) for v in perm)) for perm in gens]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"k_generators entry is not an element of {group.name}: {exc}") from exc
    return subgroup_generate(group, idx)


def _layer_system(group, layer_cfg: dict):
    rep_in = _build_rep(group, layer_cfg.get("rep_in", "permutation"))
    rep_out = _build_rep(group, layer_cfg.get("rep_out", "permutation"))
    mode = layer_cfg.get("mode", "standard")
    if mode == "standard":
        return build_standard(rep_in, rep_out)
    if mode == "relaxed":
        return build_relaxed(rep_in, rep_out, _build_subgroup(group, layer_cfg))
    raise ConfigError(f"unknown layer mode {mode!r} (use standard|relaxed)")


def _out_dir(args, cfg) -> str:
    out = args.out or (cfg.get("run", {}) or {}).get("out") or "out"
    os.makedirs(out, exist_ok=True)
    return out


def _seed(args, cfg) -> int:
    if args.seed is not None:
        return args.seed
    return int((cfg.get("run", {}) or {}).get("seed", 0))


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    group, spec = _build_group(cfg)
    layers = cfg.get("layers")
    if not layers:
        raise ConfigError("config needs a non-empty 'layers' list")
    out = _out_dir(args, cfg)
    threshold = args.tol if args.tol is not None else NULL_THRESHOLD
    for i, layer_cfg in enumerate(layers):
        system = _layer_system(group, layer_cfg)
        basis = solve_basis(system, null_threshold=threshold)
        kinds = (system.rep_in.kind, system.rep_out.kind)
        export_basis(basis, os.path.join(out, f"layer_{i:03d}"), spec, kinds)
        print(
            f"layer {i}: group={group.name} mode={basis.mode} "
            f"constraint_blocks={len(system.blocks)} rank={basis.rank} "
            f"max_residual={basis.max_residual:.3e}"
        )
    return 0


def _roundtrip_report(basis_dir: str) -> CheckReport:
    basis = load_basis(basis_dir)    # re-verifies residuals, raises on corruption
    with open(os.path.join(basis_dir, "manifest.json")) as fh:
        manifest = json.load(fh)
    drift = abs(basis.max_residual - float(manifest["max_residual"]))
    passed = drift <= ROUNDTRIP_DRIFT_TOL and basis.rank == int(manifest["rank"])
    return CheckReport(
        check_name="basis_roundtrip",
        passed=passed,
        trials=basis.rank,
        max_violation=drift,
        witnesses=[] if passed else [{"dir": os.path.basename(basis_dir), "drift": drift}],
        config={
            "rank": basis.rank,
            "recorded_residual": float(manifest["max_residual"]),
            "reloaded_residual": basis.max_residual,
            "drift_tol": ROUNDTRIP_DRIFT_TOL,
        },
    )


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    check_cfg = cfg.get("check", {}) or {}
    seed = _seed(args, cfg)
    out = _out_dir(args, cfg)

    suite: list[RegisteredCheck] = []
    if check_cfg.get("suite", "default") == "default":
        fx = FixtureSet()
        suite += default_suite(
            fx,
            seed=seed,
            measure_samples=int(check_cfg.get("measure_samples", 100_000)),
            certificate_inputs=int(check_cfg.get("certificate_inputs", 60)),
        )
    for i, basis_dir in enumerate(check_cfg.get("basis_dirs", []) or []):
        suite.append(
            RegisteredCheck(f"basis_roundtrip_{i}", "pass",
                            lambda d=basis_dir: _roundtrip_report(d))
        )
    if not suite:
        raise ConfigError("check config selected no suite and no basis_dirs")

    reports = run_all(suite)
    payload = bundle(suite, reports, extra_config={"seed": seed})
    report_path = os.path.join(out, "report.json")
    with open(report_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for entry, report in zip(suite, reports):
        obs = payload["observed"][report.check_name]
        marker = "ok" if obs == entry.expect else "UNEXPECTED"
        print(f"{marker:10s} {report.check_name:32s} expect={entry.expect} got={obs} "
              f"max_violation={report.max_violation:.3e}")
    ok = expectations_met(suite, reports)
    print(f"report: {report_path}")
    print(f"all expectations met: {ok}")
    return 0 if ok else 3


def cmd_demo(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    name = args.name or (cfg.get("demo", {}) or {}).get("name")
    if not name:
        raise ConfigError(f"demo needs a name: {', '.join(DEMO_NAMES)}")
    seed = _seed(args, cfg)
    out = _out_dir(args, cfg)
    report = run_demo(name, seed, out)
    path = os.path.join(out, "demo_report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for key, value in sorted(report.items()):
        print(f"{key}: {value}")
    return 0 if report.get("passed", False) else 3


def cmd_report(args) -> int:
    try:
        with open(args.path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"cannot read report bundle: {exc}") from exc
    checks = payload.get("checks", [])
    expected = payload.get("expected", {})
    print(f"{'check':34s} {'expect':7s} {'outcome':8s} {'max_violation':14s} trials")
    for chk in checks:
        outcome = "skip" if chk.get("skipped") else ("pass" if chk["passed"] else "fail")
        exp = expected.get(chk["name"], "-")
        print(f"{chk['name']:34s} {exp:7s} {outcome:8s} {chk['max_violation']:<14.3e} "
              f"{chk['trials']}")
    print(f"all expectations met: {payload.get('all_expectations_met')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symbreak",
        description="Solve (relaxed-)equivariant weight bases and verify symmetry properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve layer constraint systems and export bases")
    p_solve.add_argument("--config", required=True, help="YAML run configuration")
    p_solve.add_argument("--seed", type=int, default=None)
    p_solve.add_argument("--out", default=None, help="output directory")
    p_solve.add_argument("--tol", type=float, default=None, help="null-space threshold")
    p_solve.set_defaults(fn=cmd_solve)

    p_check = sub.add_parser("check", help="run the verification suite / basis round-trips")
    p_check.add_argument("--config", required=True)
    p_check.add_argument("--seed", type=int, default=None)
    p_check.add_argument("--out", default=None)
    p_check.add_argument("--tol", type=float, default=None)
    p_check.set_defaults(fn=cmd_check)

    p_demo = sub.add_parser("demo", help="run a named demo scenario")
    p_demo.add_argument("name", nargs="?", choices=DEMO_NAMES, default=None)
    p_demo.add_argument("--config", default=None)
    p_demo.add_argument("--seed", type=int, default=None)
    p_demo.add_argument("--out", default=None)
    p_demo.add_argument("--tol", type=float, default=None)
    p_demo.set_defaults(fn=cmd_demo)

    p_report = sub.add_parser("report", help="pretty-print a JSON report bundle")
    p_report.add_argument("path")
    p_report.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SizeCapError, GroupMismatchError, KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (
        RankInstabilityError,
        DataFormatError,
        ToleranceInconsistencyError,
        DivergenceError,
        RepresentationError,
        FaithfulnessError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
