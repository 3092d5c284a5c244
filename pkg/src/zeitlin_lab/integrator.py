"""Fixed-step RK4 integration with conservation and symmetry diagnostics.

The integrator never re-projects onto the reality-symmetric subspace:
the growth of the conjugate-symmetry defect out of accumulated rounding
is precisely the stability diagnostic the destabilization experiments
measure, so it must be left untouched.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import brackets, spectral, sun
from .brackets import SchemeKind
from .spectral import ModeField, ModeLattice

RhsFunction = Callable[[ModeField], ModeField]


@dataclasses.dataclass(frozen=True)
class DeltaIC:
    """Point-vortex data, optionally with a small even random perturbation.

    The pure delta field is an exact steady state of the sine-bracket
    system (every coupling cancels pairwise, wrap included), so a run
    started on it never leaves the initial state and the symmetry defect
    cannot grow.  A nonzero `perturbation` adds that relative amount of a
    seeded random field that is real and even in k, which preserves both
    the reality symmetry and the pairwise equality omega_k = omega_{-k}
    while making the dynamics of both schemes non-trivial.
    """

    x0: tuple[float, float] = (0.0, 0.0)
    amplitude: float = 1.0
    perturbation: float = 0.0
    seed: int = 0

    def build(self, lattice: ModeLattice) -> ModeField:
        field = spectral.delta_initial_condition(lattice, self.x0, self.amplitude)
        if self.perturbation == 0.0:
            return field
        rng = np.random.default_rng(self.seed)
        bump = rng.uniform(-1.0, 1.0, (lattice.n_modes, lattice.n_modes))
        bump = 0.5 * (bump + np.roll(bump[::-1, ::-1], 1, axis=(0, 1)))
        coeffs = field.coeffs + self.amplitude * self.perturbation * bump
        coeffs[0, 0] = 0.0
        return ModeField(lattice, coeffs)


@dataclasses.dataclass(frozen=True)
class SmoothIC:
    sigma: float
    seed: int
    max_wavenumber: Optional[int] = None

    def build(self, lattice: ModeLattice) -> ModeField:
        return spectral.smooth_initial_condition(
            lattice, self.sigma, self.seed, self.max_wavenumber
        )


@dataclasses.dataclass(frozen=True)
class ExplicitIC:
    coeffs: tuple  # nested tuples, complex entries, wrapped storage layout

    def build(self, lattice: ModeLattice) -> ModeField:
        return ModeField(lattice, np.array(self.coeffs, dtype=complex))


InitialCondition = Union[DeltaIC, SmoothIC, ExplicitIC]


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything that must match for two runs to be comparable."""

    scheme: SchemeKind
    n_modes: int
    dt: float
    t_end: float
    initial_condition: InitialCondition
    record_every: int = 10
    symmetry_tolerance: float = 1e-6
    casimir_pmax: int = 5
    store_snapshots: bool = False
    # stop integrating once the symmetry residual exceeds this multiple of
    # the detection threshold (None = run to t_end); keeps long stability
    # runs from burning time after the diagnostic has fired
    stop_factor: Optional[float] = None

    def __post_init__(self) -> None:
        if self.n_modes % 2 == 0 or self.n_modes < 3:
            raise ValueError(f"N must be odd and >= 3, got {self.n_modes}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive step count")
        steps = round(self.t_end / self.dt)
        if abs(steps * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError("t_end must be an integer number of steps")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)


@dataclasses.dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy: float
    enstrophy: float
    casimirs: tuple[complex, ...]
    symmetry_residual: float
    l2_norm: float


@dataclasses.dataclass
class Trajectory:
    config: RunConfig
    records: list[DiagnosticsRecord]
    snapshots: Optional[list[ModeField]]
    initial_max_abs: float
    diverged_at: Optional[float] = None
    stopped_at: Optional[float] = None

    @property
    def final_time(self) -> float:
        return self.records[-1].t if self.records else 0.0


def resolve_rhs(scheme: SchemeKind) -> RhsFunction:
    return brackets.scheme_rhs(scheme)


def rk4_step(field: ModeField, dt: float, scheme: Union[SchemeKind, RhsFunction]) -> ModeField:
    """One classical Runge-Kutta step; reality symmetry deliberately not enforced."""
    rhs = resolve_rhs(scheme) if isinstance(scheme, SchemeKind) else scheme
    lattice = field.lattice
    y = field.coeffs
    k1 = rhs(field).coeffs
    k2 = rhs(ModeField(lattice, y + 0.5 * dt * k1)).coeffs
    k3 = rhs(ModeField(lattice, y + 0.5 * dt * k2)).coeffs
    k4 = rhs(ModeField(lattice, y + dt * k3)).coeffs
    return ModeField(lattice, y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4))


def _make_record(t: float, field: ModeField, config: RunConfig) -> DiagnosticsRecord:
    casimirs: tuple[complex, ...] = ()
    with np.errstate(over="ignore", invalid="ignore"):
        if config.scheme is SchemeKind.SINE_BRACKET:
            w = sun.field_to_matrix(field)
            casimirs = tuple(sun.trace_casimirs(w, config.casimir_pmax))
        return DiagnosticsRecord(
            t=t,
            energy=spectral.energy(field),
            enstrophy=spectral.enstrophy(field),
            casimirs=casimirs,
            symmetry_residual=spectral.reality_residual(field),
            l2_norm=spectral.l2_norm(field),
        )


def _record_is_finite(record: DiagnosticsRecord) -> bool:
    values = [record.energy, record.enstrophy, record.symmetry_residual, record.l2_norm]
    values += [c.real for c in record.casimirs] + [c.imag for c in record.casimirs]
    return bool(np.all(np.isfinite(values)))


def integrate(config: RunConfig, rhs: Optional[RhsFunction] = None) -> Trajectory:
    """Run the configured scheme to t_end, recording diagnostics.

    `rhs` overrides the scheme's tendency function (used to drive the
    matrix-oracle path through the identical stepping code).  A non-finite
    state terminates the run early with `diverged_at` set; records made
    before the blow-up are kept.
    """
    lattice = ModeLattice(config.n_modes)
    field = config.initial_condition.build(lattice)
    rhs_fn = rhs if rhs is not None else resolve_rhs(config.scheme)
    initial_max = float(np.abs(field.coeffs).max())
    stop_threshold = None
    if config.stop_factor is not None:
        stop_threshold = config.stop_factor * config.symmetry_tolerance * initial_max

    records = [_make_record(0.0, field, config)]
    snapshots = [field] if config.store_snapshots else None
    traj = Trajectory(config, records, snapshots, initial_max)

    for step in range(1, config.n_steps + 1):
        # blow-up is an expected, handled outcome; keep its overflow quiet
        with np.errstate(over="ignore", invalid="ignore"):
            field = rk4_step(field, config.dt, rhs_fn)
        t = step * config.dt
        if not np.all(np.isfinite(field.coeffs)):
            traj.diverged_at = t
            break
        if step % config.record_every == 0 or step == config.n_steps:
            record = _make_record(t, field, config)
            if not _record_is_finite(record):
                traj.diverged_at = t
                break
            records.append(record)
            if snapshots is not None:
                snapshots.append(field)
            if stop_threshold is not None and record.symmetry_residual > stop_threshold:
                traj.stopped_at = t
                break
    return traj


def detect_symmetry_breaking(traj: Trajectory, tol: Optional[float] = None) -> Optional[float]:
    """Earliest record time at which the symmetry residual exceeds
    tol * (initial max |omega_k|), or None if it never does."""
    if tol is None:
        tol = traj.config.symmetry_tolerance
    threshold = tol * traj.initial_max_abs
    if math.isinf(threshold):
        return None
    for record in traj.records:
        if record.symmetry_residual > threshold:
            return record.t
    return None
