"""Command-line entry point.

Subcommands drive the harness pipelines from a JSON config file; every run
echoes its effective configuration into the output directory so a run can
be reproduced bit-for-bit from its own artifacts.

Exit codes: 0 success, 1 configuration error, 2 run diverged or comparison
inconclusive (outputs are still written).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import harness, integrator, sun
from .brackets import SchemeKind
from .integrator import DeltaIC, ExplicitIC, InitialCondition, RunConfig, SmoothIC
from .spectral import ModeField, ModeLattice


class ConfigError(Exception):
    pass


SEED_ENV_VAR = "ZEITLIN_LAB_SEED"

_COMMON_KEYS = {"seed"}
_SUBCOMMAND_KEYS = {
    "simulate": {
        "scheme", "n_modes", "dt", "t_end", "record_every", "initial_condition",
        "symmetry_tolerance", "casimir_pmax", "store_snapshots", "stop_factor",
        "tracked_pairs",
    },
    "compare-stability": {
        "n_modes", "dt", "t_end", "record_every", "initial_condition",
        "symmetry_tolerance", "stop_factor", "tracked_pairs",
    },
    "converge": {
        "sigma", "seed", "n_values", "n_reference", "t_end", "dt",
        "record_every", "support_radius",
    },
    "structure-report": {"pairs", "n_values"},
    "residual-report": {"sigma", "seed", "n_values"},
    "casimirs": {"snapshots", "p_max"},
}

_IC_KEYS = {
    "delta": {"kind", "x0", "amplitude", "perturbation", "seed"},
    "smooth": {"kind", "sigma", "seed", "max_wavenumber"},
    "explicit": {"kind", "coeffs"},
}


def _check_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown config key(s) in {where}: {', '.join(sorted(unknown))}")


def _parse_initial_condition(spec: Any, seed_override: Optional[int]) -> InitialCondition:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("initial_condition must be an object with a 'kind' key")
    kind = spec["kind"]
    if kind not in _IC_KEYS:
        raise ConfigError(f"unknown initial_condition kind '{kind}'")
    _check_keys(spec, _IC_KEYS[kind], f"initial_condition ({kind})")
    if kind == "delta":
        return DeltaIC(
            x0=tuple(spec.get("x0", (0.0, 0.0))),
            amplitude=float(spec.get("amplitude", 1.0)),
            perturbation=float(spec.get("perturbation", 0.0)),
            seed=int(seed_override if seed_override is not None else spec.get("seed", 0)),
        )
    if kind == "smooth":
        if "sigma" not in spec:
            raise ConfigError("smooth initial_condition requires 'sigma'")
        seed = seed_override if seed_override is not None else spec.get("seed", 0)
        mw = spec.get("max_wavenumber")
        return SmoothIC(sigma=float(spec["sigma"]), seed=int(seed),
                        max_wavenumber=None if mw is None else int(mw))
    coeffs = spec.get("coeffs")
    if coeffs is None:
        raise ConfigError("explicit initial_condition requires 'coeffs'")
    arr = np.asarray(coeffs, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ConfigError("explicit coeffs must be an N x N array of [re, im] pairs")
    values = arr[..., 0] + 1j * arr[..., 1]
    return ExplicitIC(coeffs=tuple(tuple(row) for row in values))


def _parse_scheme(name: Any) -> SchemeKind:
    for scheme in SchemeKind:
        if scheme.value == name:
            return scheme
    raise ConfigError(f"unknown scheme '{name}' (expected 'galerkin' or 'sine-bracket')")


def _coerce_override(value: str) -> Any:
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def _apply_overrides(config: dict, overrides: list[str]) -> dict:
    out = json.loads(json.dumps(config))  # deep copy
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got '{item}'")
        key, _, raw = item.partition("=")
        target = out
        parts = key.split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"cannot override through non-object key '{part}'")
        target[parts[-1]] = _coerce_override(raw)
    return out


def _load_config(path: str, overrides: list[str]) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    return _apply_overrides(config, overrides)


def _seed_override() -> Optional[int]:
    raw = os.environ.get(SEED_ENV_VAR)
    return int(raw) if raw else None


def _run_dir(out: str, subcommand: str, run_id: Optional[str], tag: str) -> Path:
    name = run_id if run_id else f"{subcommand}_{tag}_{time.strftime('%Y%m%dT%H%M%S')}"
    path = Path(out) / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def _echo_config(config: dict, directory: Path) -> None:
    (directory / "echo_config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _tracked_pairs(config: dict, n_modes: int) -> list[tuple[int, int]]:
    raw = config.get("tracked_pairs")
    if raw is None:
        half = (n_modes - 1) // 2
        return [(half, 0), ((half + 1) // 2, 0)]
    return [(int(a), int(b)) for a, b in raw]


def _write_snapshots(traj, path: Path) -> None:
    times = np.array([r.t for r in traj.records])
    coeffs = np.stack([s.coeffs for s in traj.snapshots])
    np.savez_compressed(path, times=times, coeffs=coeffs, n_modes=traj.config.n_modes)


# ---------------------------------------------------------------------------
# subcommand runners (return process exit code)


def _cmd_simulate(config: dict, out_dir: Path, jobs: int) -> int:
    seed = _seed_override()
    scheme = _parse_scheme(config.get("scheme", "sine-bracket"))
    n_modes = int(config.get("n_modes", 11))
    run_config = RunConfig(
        scheme=scheme,
        n_modes=n_modes,
        dt=float(config.get("dt", 1e-3)),
        t_end=float(config.get("t_end", 1.0)),
        initial_condition=_parse_initial_condition(
            config.get("initial_condition", {"kind": "delta"}), seed
        ),
        record_every=int(config.get("record_every", 10)),
        symmetry_tolerance=float(config.get("symmetry_tolerance", 1e-6)),
        casimir_pmax=int(config.get("casimir_pmax", 5)),
        store_snapshots=bool(config.get("store_snapshots", True)),
        stop_factor=config.get("stop_factor"),
    )
    traj = integrator.integrate(run_config)
    harness.write_diagnostics_csv(traj, out_dir / "diagnostics.csv")
    if traj.snapshots is not None:
        harness.write_mode_pair_csv(traj, _tracked_pairs(config, n_modes), out_dir / "modes.csv")
        _write_snapshots(traj, out_dir / "snapshots.npz")
    t_break = integrator.detect_symmetry_breaking(traj)
    summary = {
        "experiment": "simulate",
        "N": n_modes,
        "scheme": scheme.value,
        "t_final": traj.final_time,
        "records": len(traj.records),
        "diverged_at": traj.diverged_at,
        "t_break": t_break,
    }
    harness.write_jsonl([summary], out_dir / "report.jsonl")
    status = "diverged" if traj.diverged_at is not None else "ok"
    print(
        f"simulate N={n_modes} scheme={scheme.value}: {status}, "
        f"t_final={traj.final_time:g}, records={len(traj.records)}, t_break={t_break}"
    )
    return 2 if traj.diverged_at is not None else 0


def _cmd_compare_stability(config: dict, out_dir: Path, jobs: int) -> int:
    seed = _seed_override()
    n_modes = int(config.get("n_modes", 25))
    ic = _parse_initial_condition(
        config.get("initial_condition", {"kind": "delta", "perturbation": 1e-3}), seed
    )
    report, galerkin_traj, sine_traj = harness.stability_comparison(
        n_modes=n_modes,
        initial_condition=ic,
        dt=float(config.get("dt", 1e-3)),
        t_end=float(config.get("t_end", 40.0)),
        tol=float(config.get("symmetry_tolerance", 1e-6)),
        record_every=int(config.get("record_every", 20)),
        stop_factor=config.get("stop_factor", 1e4),
        jobs=jobs,
    )
    pairs = _tracked_pairs(config, n_modes)
    for tag, traj in (("galerkin", galerkin_traj), ("sine", sine_traj)):
        harness.write_diagnostics_csv(traj, out_dir / f"diagnostics_{tag}.csv")
        harness.write_mode_pair_csv(traj, pairs, out_dir / f"modes_{tag}.csv")
    harness.write_jsonl(harness.stability_report_rows(report), out_dir / "report.jsonl")
    if report.inconclusive:
        print(f"compare-stability N={n_modes}: inconclusive — extend t_end")
        return 2
    ratio = f"{report.ratio:.3g}" + (" (lower bound)" if report.sine_censored else "")
    print(
        f"compare-stability N={n_modes}: t_break galerkin={report.t_break_galerkin} "
        f"sine={report.t_break_sine}, ratio={ratio}"
    )
    return 0


def _cmd_converge(config: dict, out_dir: Path, jobs: int) -> int:
    seed = _seed_override()
    report = harness.convergence_experiment(
        sigma=float(config.get("sigma", 3.0)),
        seed=int(seed if seed is not None else config.get("seed", 0)),
        n_values=config.get("n_values", [9, 13, 17, 25]),
        n_reference=int(config.get("n_reference", 31)),
        t_end=float(config.get("t_end", 1.0)),
        dt=float(config.get("dt", 1e-3)),
        record_every=int(config.get("record_every", 10)),
        support_radius=int(config.get("support_radius", 2)),
        jobs=jobs,
    )
    harness.write_jsonl(harness.convergence_report_rows(report), out_dir / "report.jsonl")
    any_diverged = any(e.diverged for e in report.entries)
    sup = {e.n_modes: e.sup_diff for e in report.entries}
    print(
        f"converge sigma={report.sigma}: sup_diff={sup}, fitted_exponent={report.fitted_exponent}, "
        f"theory={report.theoretical_exponent:.4g}"
    )
    return 2 if any_diverged else 0


def _cmd_structure_report(config: dict, out_dir: Path, jobs: int) -> int:
    raw_pairs = config.get("pairs", [[[1, 0], [0, 1]], [[1, 2], [3, 1]], [[2, 1], [1, -1]]])
    pairs = [((int(p[0][0]), int(p[0][1])), (int(p[1][0]), int(p[1][1]))) for p in raw_pairs]
    report = harness.structure_constant_report(pairs, config.get("n_values", [15, 45, 135]))
    harness.write_jsonl(harness.structure_report_rows(report), out_dir / "report.jsonl")
    print(f"structure-report: {len(report.rows)} rows, orders={report.orders}")
    return 0


def _cmd_residual_report(config: dict, out_dir: Path, jobs: int) -> int:
    seed = _seed_override()
    sigma = float(config.get("sigma", 3.0))
    seed_val = int(seed if seed is not None else config.get("seed", 0))
    rows = harness.residual_report(sigma, seed_val, config.get("n_values", [15, 31]))
    harness.write_jsonl(harness.residual_report_rows(rows, sigma, seed_val), out_dir / "report.jsonl")
    print("residual-report: " + ", ".join(f"N={r.n_modes}: {r.residual_sum:.6g}" for r in rows))
    return 0


def _cmd_casimirs(config: dict, out_dir: Path, jobs: int) -> int:
    path = config.get("snapshots")
    if not path:
        raise ConfigError("casimirs requires a 'snapshots' path (snapshots.npz from simulate)")
    try:
        data = np.load(path)
    except OSError as exc:
        raise ConfigError(f"cannot read snapshots file: {exc}")
    p_max = int(config.get("p_max", 5))
    n_modes = int(data["n_modes"])
    lattice = ModeLattice(n_modes)
    rows = []
    for t, coeffs in zip(data["times"], data["coeffs"]):
        field = ModeField(lattice, coeffs)
        w = sun.field_to_matrix(field)
        values = sun.trace_casimirs(w, p_max)
        rows.append(
            {
                "experiment": "casimirs",
                "N": n_modes,
                "t": float(t),
                "casimirs": [[v.real, v.imag] for v in values],
            }
        )
    harness.write_jsonl(rows, out_dir / "report.jsonl")
    print(f"casimirs: {len(rows)} snapshots, p=2..{p_max}")
    return 0


_RUNNERS = {
    "simulate": _cmd_simulate,
    "compare-stability": _cmd_compare_stability,
    "converge": _cmd_converge,
    "structure-report": _cmd_structure_report,
    "residual-report": _cmd_residual_report,
    "casimirs": _cmd_casimirs,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zeitlin-lab",
        description="Finite-mode 2D Euler laboratory: Galerkin vs su(N) sine-bracket schemes",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default="runs", help="output directory root")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        p.add_argument("--run-id", help="fixed run directory name (default: timestamped)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry (repeatable, dotted keys allowed)")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config, args.set) if args.config else _apply_overrides({}, args.set)
        _check_keys(config, _SUBCOMMAND_KEYS[args.subcommand] | _COMMON_KEYS, args.subcommand)
        tag = str(config.get("n_modes", config.get("n_values", "run"))).replace(" ", "")
        out_dir = _run_dir(args.out, args.subcommand, args.run_id, tag)
        _echo_config(config, out_dir)
        return _RUNNERS[args.subcommand](config, out_dir, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
