"""Finite-mode laboratory for 2D ideal hydrodynamics on the torus."""

from .brackets import (
    SchemeKind,
    epsilon,
    galerkin_rhs,
    residual_coefficient,
    residual_sum,
    sine_bracket_rhs,
    structure_constant_sdiff,
    structure_constant_suN,
)
from .integrator import (
    DeltaIC,
    DiagnosticsRecord,
    ExplicitIC,
    RunConfig,
    SmoothIC,
    Trajectory,
    detect_symmetry_breaking,
    integrate,
    rk4_step,
)
from .spectral import (
    ModeField,
    ModeLattice,
    cross_product,
    delta_initial_condition,
    embed_field,
    energy,
    enstrophy,
    inverse_laplacian,
    l2_norm,
    reality_residual,
    restrict_field,
    smooth_initial_condition,
)
from .sun import (
    basis_matrix,
    build_generators,
    commutator_rhs,
    field_to_matrix,
    matrix_to_field,
    renormalized_basis_norm,
    trace_casimirs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
