"""Right-hand sides of the two finite-mode Euler systems.

Galerkin scheme (box truncation of the spectral vorticity equation):

    d/dt omega_m = sum_k (m x k)/k^2 * omega_{m+k} * omega_{-k}

with omega_{m+k} = 0 whenever m+k leaves the symmetric box.  Sine-bracket
scheme (the su(N) Lie-Poisson truncation):

    d/dt omega_m = sum_k (N/2pi) sin((2pi/N)(m x k))/k^2
                   * omega_{(m+k) mod N} * omega_{-k}

with the target index wrapped mod N into the symmetric range; a wrapped
target of (0,0) and k = (0,0) contribute nothing.  Both kernels are dense
O(N^4) convolutions evaluated as a precomputed coefficient matrix times a
gathered coefficient table, summed per output mode in one fixed order.
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

from .spectral import ModeField, ModeLattice, Wavevector, cross_product, wavenumber_axis


class SchemeKind(enum.Enum):
    GALERKIN = "galerkin"
    SINE_BRACKET = "sine-bracket"


def epsilon(n_modes: int) -> float:
    """Lattice coupling scale 2*pi/N."""
    return 2.0 * np.pi / n_modes


def structure_constant_sdiff(m: Wavevector, n: Wavevector) -> float:
    """Coefficient of L_{n+m} in the bracket [L_n, L_m] on sdiff(T^2)."""
    return float(cross_product(n, m))


def structure_constant_suN(m: Wavevector, n: Wavevector, n_modes: int) -> float:
    """Coefficient of L_{(n+m) mod N} in the su(N) bracket [L_n, L_m].

    Equals (N/2pi) sin((2pi/N)(n x m)); converges to the sdiff value like
    1/N^2 for fixed (n, m).
    """
    if n_modes % 2 == 0 or n_modes < 3:
        raise ValueError(f"N must be odd and >= 3, got {n_modes}")
    return float(
        n_modes / (2.0 * np.pi) * np.sin(2.0 * np.pi * cross_product(n, m) / n_modes)
    )


class _Kernel:
    """Precomputed dense quadratic kernel, summed over folded (k, -k) pairs.

    The k-sum runs over the lexicographically positive half lattice; each
    term adds the k and -k contributions elementwise before any reduction:

        rhs_m = sum_h [ coef+(m,h) W[m+k_h] W[-k_h] + coef-(m,h) W[m-k_h] W[k_h] ]

    with coef-(m,h) constructed as the exact IEEE negation of the unmasked
    coef+(m,h) (the couplings are odd in k).  Pair-folding makes states
    whose pair contributions cancel (notably the point-vortex data, a steady
    Euler state) exact fixed points of the evaluated map, independent of
    accumulation order.  Rows for m = 0 are zero, so the zero-mean
    invariant holds structurally.
    """

    def __init__(
        self,
        coef_pos: np.ndarray,
        coef_neg: np.ndarray,
        gather_pos: np.ndarray,
        gather_neg: np.ndarray,
        half_idx: np.ndarray,
        half_neg_idx: np.ndarray,
        n: int,
    ):
        self.coef_pos = coef_pos
        self.coef_neg = coef_neg
        self.gather_pos = gather_pos
        self.gather_neg = gather_neg
        self.half_idx = half_idx
        self.half_neg_idx = half_neg_idx
        self.n = n

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        flat = coeffs.ravel()
        a = self.coef_pos * flat.take(self.gather_pos)
        a *= flat.take(self.half_neg_idx)[None, :]
        b = self.coef_neg * flat.take(self.gather_neg)
        b *= flat.take(self.half_idx)[None, :]
        a += b
        out = a.sum(axis=1)
        out[0] = 0.0  # structurally zero row; keep it exact even for non-finite states
        return out.reshape(self.n, self.n)


def _flat_components(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    i1, i2 = np.divmod(np.arange(n * n), n)
    w = wavenumber_axis(n)
    return i1, i2, w[i1], w[i2]


@lru_cache(maxsize=16)
def _bracket_kernel(n: int, scheme: SchemeKind) -> _Kernel:
    half = (n - 1) // 2
    i1, i2, k1, k2 = _flat_components(n)
    # lexicographically positive half of the nonzero modes
    half_mask = (k1 > 0) | ((k1 == 0) & (k2 > 0))
    h1, h2 = k1[half_mask], k2[half_mask]
    j1, j2 = i1[half_mask], i2[half_mask]
    cross = k1[:, None] * h2[None, :] - k2[:, None] * h1[None, :]
    ksq = (h1 * h1 + h2 * h2).astype(float)
    if scheme is SchemeKind.GALERKIN:
        value = cross / ksq[None, :]
        coef_pos = np.where(
            (np.abs(k1[:, None] + h1[None, :]) <= half)
            & (np.abs(k2[:, None] + h2[None, :]) <= half),
            value,
            0.0,
        )
        coef_neg = np.where(
            (np.abs(k1[:, None] - h1[None, :]) <= half)
            & (np.abs(k2[:, None] - h2[None, :]) <= half),
            -value,
            0.0,
        )
    else:
        value = (n / (2.0 * np.pi)) * np.sin(epsilon(n) * cross) / ksq[None, :]
        # a wrapped target index of (0,0) contributes nothing (the coupling
        # there vanishes identically; zero it against rounding in the sine)
        coef_pos = np.where(
            (((i1[:, None] + j1[None, :]) % n) == 0)
            & (((i2[:, None] + j2[None, :]) % n) == 0),
            0.0,
            value,
        )
        coef_neg = np.where(
            (((i1[:, None] - j1[None, :]) % n) == 0)
            & (((i2[:, None] - j2[None, :]) % n) == 0),
            0.0,
            -value,
        )
    origin_rows = (k1 == 0) & (k2 == 0)
    coef_pos[origin_rows, :] = 0.0
    coef_neg[origin_rows, :] = 0.0
    gather_pos = ((i1[:, None] + j1[None, :]) % n) * n + (i2[:, None] + j2[None, :]) % n
    gather_neg = ((i1[:, None] - j1[None, :]) % n) * n + (i2[:, None] - j2[None, :]) % n
    half_idx = j1 * n + j2
    half_neg_idx = ((-j1) % n) * n + (-j2) % n
    return _Kernel(
        coef_pos,
        coef_neg,
        gather_pos.astype(np.intp),
        gather_neg.astype(np.intp),
        half_idx.astype(np.intp),
        half_neg_idx.astype(np.intp),
        n,
    )


def galerkin_rhs(field: ModeField) -> ModeField:
    """Box-truncated spectral vorticity tendency."""
    kernel = _bracket_kernel(field.lattice.n_modes, SchemeKind.GALERKIN)
    return ModeField(field.lattice, kernel.apply(field.coeffs))


def sine_bracket_rhs(field: ModeField) -> ModeField:
    """su(N) sine-bracket vorticity tendency (mod-N wrapped convolution)."""
    kernel = _bracket_kernel(field.lattice.n_modes, SchemeKind.SINE_BRACKET)
    return ModeField(field.lattice, kernel.apply(field.coeffs))


def scheme_rhs(scheme: SchemeKind):
    """Tendency function for a scheme."""
    return galerkin_rhs if scheme is SchemeKind.GALERKIN else sine_bracket_rhs


def residual_coefficient(m: Wavevector, k: Wavevector, eps: float) -> float:
    """Coefficient mismatch (m x k)/k^2 * (1 - sin(eps*(m x k))/(eps*(m x k))).

    This is the per-term defect between the box coupling and the sine
    coupling; it vanishes continuously at m x k = 0 and decays like eps^2.
    """
    if k == (0, 0):
        raise ValueError("k must be nonzero")
    cx = cross_product(m, k)
    if cx == 0:
        return 0.0
    ksq = k[0] * k[0] + k[1] * k[1]
    x = eps * cx
    return float(cx / ksq * (1.0 - np.sin(x) / x))


class _ResidualKernel:
    def __init__(self, coef: np.ndarray, gather: np.ndarray, neg: np.ndarray, n: int):
        self.coef = coef
        self.gather = gather
        self.neg = neg
        self.n = n

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        flat = coeffs.ravel()
        table = flat.take(self.gather)
        table *= self.coef
        return (table @ flat.take(self.neg)).reshape(self.n, self.n)


@lru_cache(maxsize=16)
def _residual_kernel(n: int, eps: float) -> _ResidualKernel:
    half = (n - 1) // 2
    i1, i2, k1, k2 = _flat_components(n)
    cross = k1[:, None] * k2[None, :] - k2[:, None] * k1[None, :]
    ksq = (k1 * k1 + k2 * k2).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        # np.sinc(x/pi) = sin(x)/x with the removable singularity filled in
        coef = cross / ksq[None, :] * (1.0 - np.sinc(eps * cross / np.pi))
        outside = (np.abs(k1[:, None] + k1[None, :]) > half) | (
            np.abs(k2[:, None] + k2[None, :]) > half
        )
        coef[outside] = 0.0
    coef[:, ksq == 0] = 0.0
    gather = ((i1[:, None] + i1[None, :]) % n) * n + (i2[:, None] + i2[None, :]) % n
    neg = ((-i1) % n) * n + (-i2) % n
    return _ResidualKernel(coef, gather.astype(np.intp), neg.astype(np.intp), n)


def residual_sum(field: ModeField, eps: float) -> float:
    """Sum over m of |a_m(eps)|^2 where a_m = sum_k residual coefficient
    times omega_{m+k} omega_{-k} (box truncated, no wrapping).

    Serves as the computable part of the scheme-difference source term;
    for smooth fields it decreases toward zero as eps -> 0.
    """
    kernel = _residual_kernel(field.lattice.n_modes, float(eps))
    a = kernel.apply(field.coeffs)
    return float(np.sum(np.abs(a) ** 2))
