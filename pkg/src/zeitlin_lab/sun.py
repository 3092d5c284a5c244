"""Explicit su(N)/gl(N) matrix realization of the sine-bracket dynamics.

The clock-and-shift generators g, h with lambda = exp(4i*pi/N) produce the
unitary basis

    J_n = lambda^(n1*n2/2) g^n1 h^n2,   lambda^(1/2) := exp(2i*pi/N),

which is N-periodic in both index components and orthogonal under the
trace pairing tr(J_m^dag J_n) = N delta_{mn}.  With this matrix layout
g h = lambda^(-1) h g, and the renormalized generators L_n = (iN/4pi) J_n
satisfy

    [L_n, L_m] = (N/2pi) sin((2pi/N)(n x m)) L_{(n+m) mod N}

with a positive global sign (pinned by a unit test at N = 3).  The matrix
commutator therefore provides an independent evaluation path for the
sine-bracket tendency, used as the cross-validation oracle.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .spectral import ModeField, ModeLattice, Wavevector, ksq_grid, wavenumber_axis

# [L_n, L_m] carries + sin((2pi/N)(n x m)) for g, h as built below; the
# opposite matrix layout (shift transposed) would flip this to -1.
COMMUTATOR_SIGN = +1


def build_generators(n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Clock matrix g = diag(1, lambda, ..., lambda^(N-1)) and cyclic shift h."""
    if n_modes % 2 == 0 or n_modes < 3:
        raise ValueError(f"N must be odd and >= 3, got {n_modes}")
    lam = np.exp(4j * np.pi / n_modes)
    g = np.diag(lam ** np.arange(n_modes))
    h = np.zeros((n_modes, n_modes), complex)
    for a in range(n_modes):
        h[a, (a + 1) % n_modes] = 1.0
    return g, h


def basis_matrix(n: Wavevector, n_modes: int) -> np.ndarray:
    """Unitary basis matrix J_n; rejects the origin (it would be the identity)."""
    if n == (0, 0):
        raise ValueError("the origin is excluded from the dynamical basis")
    if n_modes % 2 == 0 or n_modes < 3:
        raise ValueError(f"N must be odd and >= 3, got {n_modes}")
    n1, n2 = n
    a = np.arange(n_modes)
    phase = np.exp(2j * np.pi * n1 * n2 / n_modes) * np.exp(4j * np.pi * a * n1 / n_modes)
    out = np.zeros((n_modes, n_modes), complex)
    out[a, (a + n2) % n_modes] = phase
    return out


@lru_cache(maxsize=8)
def _basis_stack(n_modes: int) -> np.ndarray:
    """J matrices for every lattice wavevector, indexed by storage index."""
    stack = np.zeros((n_modes, n_modes, n_modes, n_modes), complex)
    w = wavenumber_axis(n_modes)
    for i1 in range(n_modes):
        for i2 in range(n_modes):
            if (i1, i2) == (0, 0):
                stack[i1, i2] = np.eye(n_modes)
            else:
                stack[i1, i2] = basis_matrix((int(w[i1]), int(w[i2])), n_modes)
    stack.flags.writeable = False
    return stack


def field_to_matrix(field: ModeField) -> np.ndarray:
    """W = sum over nonzero modes of omega_n J_n."""
    stack = _basis_stack(field.lattice.n_modes)
    return np.einsum("ij,ijab->ab", field.coeffs, stack)


def matrix_to_field(w: np.ndarray, lattice: ModeLattice) -> ModeField:
    """Inverse of field_to_matrix via the trace pairing omega_n = tr(J_n^dag W)/N.

    The component along the identity (the excluded mean) is discarded.
    """
    n = lattice.n_modes
    w = np.asarray(w, dtype=complex)
    if w.shape != (n, n):
        raise ValueError(f"matrix shape {w.shape} does not match lattice size {n}")
    stack = _basis_stack(n)
    coeffs = np.einsum("ijab,ab->ij", stack.conj(), w) / n
    coeffs[0, 0] = 0.0
    return ModeField(lattice, coeffs)


def commutator_rhs(field: ModeField) -> ModeField:
    """Sine-bracket tendency computed on the matrix side.

    Builds W from omega and P from the stream weights omega_k / k^2, then
    maps alpha * [P, W] back to mode space with alpha = i N / (4 pi).  This
    path shares no code with the direct mode-space convolution and matches
    it to within rounding.
    """
    n = field.lattice.n_modes
    ksq = ksq_grid(n).copy()
    ksq[0, 0] = 1.0
    psi_weights = ModeField(field.lattice, field.coeffs / ksq)
    w = field_to_matrix(field)
    p = field_to_matrix(psi_weights)
    alpha = COMMUTATOR_SIGN * 1j * n / (4.0 * np.pi)
    return matrix_to_field(alpha * (p @ w - w @ p), field.lattice)


def trace_casimirs(w: np.ndarray, p_max: int) -> list[complex]:
    """Traces of matrix powers tr W^p for p = 2 .. p_max."""
    if p_max < 2:
        raise ValueError(f"p_max must be >= 2, got {p_max}")
    out = []
    power = np.asarray(w, dtype=complex)
    for _ in range(2, p_max + 1):
        power = power @ w
        out.append(complex(np.trace(power)))
    return out


def renormalized_basis_norm(n: Wavevector, n_modes: int) -> float:
    """Frobenius norm of (iN/4pi) J_n: exactly N^(3/2)/(4 pi), unbounded in N.

    The J_n are unitary, so the norm is independent of n; the divergence of
    the renormalized basis is what distinguishes it from the sdiff(T^2)
    generators, whose norms do not grow.
    """
    if n == (0, 0):
        raise ValueError("the origin is excluded from the dynamical basis")
    return n_modes ** 1.5 / (4.0 * np.pi)
