"""Experiment pipelines: scheme-difference convergence, stability comparison,
structure-constant and residual convergence reports, and their CSV/JSONL
persistence formats.
"""

from __future__ import annotations

import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import brackets, integrator, spectral
from .brackets import SchemeKind
from .integrator import InitialCondition, RunConfig, Trajectory
from .spectral import ModeField, ModeLattice, Wavevector


# ---------------------------------------------------------------------------
# report types


@dataclasses.dataclass
class ConvergenceEntry:
    n_modes: int
    sup_diff: Optional[float]  # sup over record times of the l2 mode difference
    sup_diff_h1: Optional[float]  # same with (1+k^2) weight
    diverged: bool = False


@dataclasses.dataclass
class ConvergenceReport:
    sigma: float
    seed: int
    n_reference: int
    t_end: float
    dt: float
    entries: list[ConvergenceEntry]
    fitted_exponent: Optional[float]  # slope of log sup_diff vs log N
    theoretical_exponent: float  # -r/2 with r = 8(sigma-2)/(2sigma+3), for comparison only

    @property
    def n_values(self) -> list[int]:
        return [e.n_modes for e in self.entries]


@dataclasses.dataclass
class StabilityReport:
    n_modes: int
    t_break_galerkin: Optional[float]
    t_break_sine: Optional[float]
    ratio: Optional[float]
    t_end: float
    dt: float
    tolerance: float
    sine_censored: bool = False  # sine never broke before t_end; ratio is a lower bound
    inconclusive: bool = False  # neither run broke before t_end


@dataclasses.dataclass
class StructureConstantRow:
    pair: tuple[Wavevector, Wavevector]
    n_modes: int
    su_value: float
    sdiff_value: float
    gap: float


@dataclasses.dataclass
class StructureConstantReport:
    rows: list[StructureConstantRow]
    orders: dict[tuple[Wavevector, Wavevector], Optional[float]]


@dataclasses.dataclass
class ResidualRow:
    n_modes: int
    residual_sum: float


# ---------------------------------------------------------------------------
# experiments


def _run(config: RunConfig) -> Trajectory:
    return integrator.integrate(config)


def _map_runs(configs: Sequence[RunConfig], jobs: int) -> list[Trajectory]:
    if jobs <= 1 or len(configs) <= 1:
        return [_run(c) for c in configs]
    with ProcessPoolExecutor(max_workers=min(jobs, len(configs))) as pool:
        return list(pool.map(_run, configs))


def theoretical_rate(sigma: float) -> float:
    """The proven decay exponent r = 8(sigma-2)/(2sigma+3) of the residual sum."""
    return 8.0 * (sigma - 2.0) / (2.0 * sigma + 3.0)


def convergence_experiment(
    sigma: float,
    seed: int,
    n_values: Sequence[int],
    n_reference: int,
    t_end: float,
    dt: float = 1e-3,
    record_every: int = 10,
    support_radius: int = 2,
    jobs: int = 1,
) -> ConvergenceReport:
    """Sine-bracket runs at each N against a high-resolution Galerkin proxy.

    The initial field is a smooth random field supported in a small box, so
    the same coefficients can be restricted onto every lattice; the mode
    difference is therefore exactly zero at t = 0 and everything reported
    is dynamical divergence.
    """
    if sigma <= 2:
        raise ValueError("sigma must be > 2")
    n_values = sorted(int(n) for n in n_values)
    if n_reference <= max(n_values):
        raise ValueError("reference resolution must exceed every tested N")
    if 2 * support_radius + 1 > min(n_values):
        raise ValueError("initial support does not fit the smallest lattice")

    ic = integrator.SmoothIC(sigma=sigma, seed=seed, max_wavenumber=support_radius)
    ref_lattice = ModeLattice(n_reference)

    def config(scheme: SchemeKind, n: int) -> RunConfig:
        return RunConfig(
            scheme=scheme,
            n_modes=n,
            dt=dt,
            t_end=t_end,
            initial_condition=ic,
            record_every=record_every,
            store_snapshots=True,
        )

    configs = [config(SchemeKind.GALERKIN, n_reference)]
    configs += [config(SchemeKind.SINE_BRACKET, n) for n in n_values]
    trajectories = _map_runs(configs, jobs)
    reference, runs = trajectories[0], trajectories[1:]
    if reference.diverged_at is not None:
        raise RuntimeError(f"reference run diverged at t={reference.diverged_at}")

    entries = []
    for n, traj in zip(n_values, runs):
        if traj.diverged_at is not None:
            entries.append(ConvergenceEntry(n, None, None, diverged=True))
            continue
        sup_l2 = 0.0
        sup_h1 = 0.0
        for snap, ref_snap in zip(traj.snapshots, reference.snapshots):
            diff = spectral.embed_field(snap, ref_lattice).coeffs - ref_snap.coeffs
            diff_field = ModeField(ref_lattice, diff)
            sup_l2 = max(sup_l2, spectral.l2_norm(diff_field))
            sup_h1 = max(sup_h1, np.sqrt(spectral.sobolev_norm_sq(diff_field, 1.0)))
        entries.append(ConvergenceEntry(n, sup_l2, sup_h1))

    fitted = None
    valid = [(e.n_modes, e.sup_diff) for e in entries if not e.diverged and e.sup_diff and e.sup_diff > 0]
    if len(valid) >= 2:
        logn = np.log([v[0] for v in valid])
        logd = np.log([v[1] for v in valid])
        fitted = float(np.polyfit(logn, logd, 1)[0])

    return ConvergenceReport(
        sigma=sigma,
        seed=seed,
        n_reference=n_reference,
        t_end=t_end,
        dt=dt,
        entries=entries,
        fitted_exponent=fitted,
        theoretical_exponent=-theoretical_rate(sigma) / 2.0,
    )


def stability_comparison(
    n_modes: int,
    initial_condition: InitialCondition,
    dt: float,
    t_end: float,
    tol: float = 1e-6,
    record_every: int = 20,
    stop_factor: Optional[float] = 1e4,
    jobs: int = 1,
) -> tuple[StabilityReport, Trajectory, Trajectory]:
    """Run both schemes with identical parameters and compare symmetry-breaking times.

    When the sine-bracket run never breaks before t_end while the Galerkin
    run does, the reported ratio is the right-censored lower bound
    t_end / t_break_galerkin (flagged `sine_censored`).
    """

    def config(scheme: SchemeKind) -> RunConfig:
        return RunConfig(
            scheme=scheme,
            n_modes=n_modes,
            dt=dt,
            t_end=t_end,
            initial_condition=initial_condition,
            record_every=record_every,
            symmetry_tolerance=tol,
            store_snapshots=True,
            stop_factor=stop_factor,
        )

    galerkin_traj, sine_traj = _map_runs(
        [config(SchemeKind.GALERKIN), config(SchemeKind.SINE_BRACKET)], jobs
    )
    t_galerkin = integrator.detect_symmetry_breaking(galerkin_traj, tol)
    t_sine = integrator.detect_symmetry_breaking(sine_traj, tol)

    ratio = None
    censored = False
    if t_galerkin is not None and t_sine is not None:
        ratio = t_sine / t_galerkin
    elif t_galerkin is not None and t_sine is None:
        ratio = t_end / t_galerkin
        censored = True
    report = StabilityReport(
        n_modes=n_modes,
        t_break_galerkin=t_galerkin,
        t_break_sine=t_sine,
        ratio=ratio,
        t_end=t_end,
        dt=dt,
        tolerance=tol,
        sine_censored=censored,
        inconclusive=t_galerkin is None and t_sine is None,
    )
    return report, galerkin_traj, sine_traj


def structure_constant_report(
    pairs: Sequence[tuple[Wavevector, Wavevector]],
    n_values: Sequence[int],
) -> StructureConstantReport:
    """su(N) vs sdiff structure constants with empirical gap order in 1/N."""
    rows = []
    orders: dict[tuple[Wavevector, Wavevector], Optional[float]] = {}
    for pair in pairs:
        m, n = tuple(pair[0]), tuple(pair[1])
        sdiff = brackets.structure_constant_sdiff(m, n)
        gaps = []
        for nn in n_values:
            su = brackets.structure_constant_suN(m, n, nn)
            gap = abs(su - sdiff)
            rows.append(StructureConstantRow((m, n), nn, su, sdiff, gap))
            gaps.append(gap)
        if all(g > 0 for g in gaps) and len(gaps) >= 2:
            logn = np.log(list(n_values))
            logg = np.log(gaps)
            # gap ~ C * N^(-order)
            orders[(m, n)] = float(-np.polyfit(logn, logg, 1)[0])
        else:
            orders[(m, n)] = None
    return StructureConstantReport(rows, orders)


def residual_report(
    sigma: float,
    seed: int,
    n_values: Sequence[int],
) -> list[ResidualRow]:
    """residual_sum of one fixed smooth field evaluated at each lattice scale.

    The field is generated with support inside the smallest box and embedded
    onto the larger lattices, so all entries see identical coefficients and
    only eps = 2*pi/N varies (plus outer modes entering the sum).
    """
    n_values = sorted(int(n) for n in n_values)
    support = (n_values[0] - 1) // 2
    base = spectral.smooth_initial_condition(ModeLattice(n_values[0]), sigma, seed, support)
    rows = []
    for n in n_values:
        field = base if n == n_values[0] else spectral.embed_field(base, ModeLattice(n))
        rows.append(ResidualRow(n, brackets.residual_sum(field, brackets.epsilon(n))))
    return rows


# ---------------------------------------------------------------------------
# persistence


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def diagnostics_header(casimir_pmax: int, with_casimirs: bool) -> list[str]:
    cols = ["t", "energy", "enstrophy", "sym_residual", "l2_norm"]
    if with_casimirs:
        for p in range(2, casimir_pmax + 1):
            cols += [f"casimir_re_{p}", f"casimir_im_{p}"]
    return cols


def write_diagnostics_csv(traj: Trajectory, path: Path | str) -> None:
    """One row per record; UTF-8, LF endings, 17 significant digits."""
    with_casimirs = traj.config.scheme is SchemeKind.SINE_BRACKET
    cols = diagnostics_header(traj.config.casimir_pmax, with_casimirs)
    lines = [",".join(cols)]
    for r in traj.records:
        vals = [r.t, r.energy, r.enstrophy, r.symmetry_residual, r.l2_norm]
        if with_casimirs:
            for c in r.casimirs:
                vals += [c.real, c.imag]
        lines.append(",".join(_fmt(v) for v in vals))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def write_mode_pair_csv(
    traj: Trajectory, pairs: Sequence[Wavevector], path: Path | str
) -> None:
    """Time series of the (k, -k) coefficient pairs, one row per record and pair."""
    if traj.snapshots is None:
        raise ValueError("trajectory was run without snapshots")
    header = "t,mode_k1,mode_k2,re_plus,im_plus,re_minus,im_minus"
    lines = [header]
    for record, snap in zip(traj.records, traj.snapshots):
        for k in pairs:
            k = (int(k[0]), int(k[1]))
            plus = snap[k]
            minus = snap[(-k[0], -k[1])]
            lines.append(
                ",".join(
                    [_fmt(record.t), str(k[0]), str(k[1])]
                    + [_fmt(v) for v in (plus.real, plus.imag, minus.real, minus.imag)]
                )
            )
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def write_jsonl(objs: Sequence[dict], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for obj in objs:
            f.write(json.dumps(obj) + "\n")


def convergence_report_rows(report: ConvergenceReport) -> list[dict]:
    rows = []
    for e in report.entries:
        rows.append(
            {
                "experiment": "converge",
                "N": e.n_modes,
                "sigma": report.sigma,
                "seed": report.seed,
                "N_reference": report.n_reference,
                "t_end": report.t_end,
                "dt": report.dt,
                "sup_diff": e.sup_diff,
                "sup_diff_h1": e.sup_diff_h1,
                "diverged": e.diverged,
                "fitted_exponent": report.fitted_exponent,
                "theoretical_exponent": report.theoretical_exponent,
            }
        )
    return rows


def stability_report_rows(report: StabilityReport) -> list[dict]:
    return [
        {
            "experiment": "compare-stability",
            "N": report.n_modes,
            "t_break_galerkin": report.t_break_galerkin,
            "t_break_sine": report.t_break_sine,
            "ratio": report.ratio,
            "t_end": report.t_end,
            "dt": report.dt,
            "tolerance": report.tolerance,
            "sine_censored": report.sine_censored,
            "inconclusive": report.inconclusive,
        }
    ]


def structure_report_rows(report: StructureConstantReport) -> list[dict]:
    rows = []
    for r in report.rows:
        rows.append(
            {
                "experiment": "structure-report",
                "N": r.n_modes,
                "pair": [list(r.pair[0]), list(r.pair[1])],
                "su_value": r.su_value,
                "sdiff_value": r.sdiff_value,
                "gap": r.gap,
                "empirical_order": report.orders[r.pair],
            }
        )
    return rows


def residual_report_rows(rows: Sequence[ResidualRow], sigma: float, seed: int) -> list[dict]:
    return [
        {
            "experiment": "residual-report",
            "N": r.n_modes,
            "sigma": sigma,
            "seed": seed,
            "residual_sum": r.residual_sum,
        }
        for r in rows
    ]
