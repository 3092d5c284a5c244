"""Mode lattice, vorticity fields and initial conditions.

All dynamics in this package live in Fourier space.  A field is a dense
N x N array of complex mode coefficients on the symmetric integer lattice
-(N-1)/2 .. (N-1)/2 (N odd), stored with wrapped indices so that the
coefficient of wavevector k sits at ``coeffs[k1 % N, k2 % N]``.  The mean
(origin) coefficient is pinned to zero and a real-valued vorticity field
has the conjugate symmetry ``coeffs[-k] == conj(coeffs[k])``.
"""

from __future__ import annotations

import dataclasses
from functools import lru_cache

import numpy as np

Wavevector = tuple[int, int]


def cross_product(m: Wavevector, n: Wavevector) -> int:
    """Planar cross product m1*n2 - m2*n1."""
    return m[0] * n[1] - m[1] * n[0]


@dataclasses.dataclass(frozen=True)
class ModeLattice:
    """Symmetric square lattice of N x N Fourier modes, N odd."""

    n_modes: int

    def __post_init__(self) -> None:
        if self.n_modes < 3 or self.n_modes % 2 == 0:
            raise ValueError(f"lattice size must be odd and >= 3, got {self.n_modes}")

    @property
    def half(self) -> int:
        return (self.n_modes - 1) // 2

    def contains(self, k: Wavevector) -> bool:
        return abs(k[0]) <= self.half and abs(k[1]) <= self.half

    def wrap(self, k: Wavevector) -> Wavevector:
        """Reduce k mod N into the symmetric range per component."""
        n = self.n_modes
        return ((k[0] + self.half) % n - self.half, (k[1] + self.half) % n - self.half)

    def index(self, k: Wavevector) -> tuple[int, int]:
        """Storage index of wavevector k (wrapped)."""
        return (k[0] % self.n_modes, k[1] % self.n_modes)

    def wavevectors(self) -> list[Wavevector]:
        """All lattice wavevectors, lexicographic order, origin included."""
        r = range(-self.half, self.half + 1)
        return [(a, b) for a in r for b in r]


@lru_cache(maxsize=32)
def wavenumber_axis(n_modes: int) -> np.ndarray:
    """Signed wavenumber for each storage index along one axis."""
    w = np.arange(n_modes)
    return np.where(w <= (n_modes - 1) // 2, w, w - n_modes)


@lru_cache(maxsize=32)
def ksq_grid(n_modes: int) -> np.ndarray:
    """|k|^2 on the storage grid; the origin entry is 0."""
    w = wavenumber_axis(n_modes)
    out = (w[:, None] ** 2 + w[None, :] ** 2).astype(float)
    out.flags.writeable = False
    return out


@dataclasses.dataclass(frozen=True)
class ModeField:
    """Immutable complex coefficient array over a ModeLattice.

    The origin coefficient must be exactly zero (zero mean vorticity).
    The coefficient array is frozen in place; operations return new fields.
    """

    lattice: ModeLattice
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        n = self.lattice.n_modes
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.shape != (n, n):
            raise ValueError(f"coefficients must have shape {(n, n)}, got {arr.shape}")
        if arr[0, 0] != 0:
            raise ValueError("mean (origin) coefficient must be exactly zero")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    def __getitem__(self, k: Wavevector) -> complex:
        return complex(self.coeffs[self.lattice.index(k)])


def zero_field(lattice: ModeLattice) -> ModeField:
    return ModeField(lattice, np.zeros((lattice.n_modes, lattice.n_modes), complex))


def field_from_modes(lattice: ModeLattice, modes: dict[Wavevector, complex]) -> ModeField:
    """Build a field from a sparse {wavevector: coefficient} table."""
    coeffs = np.zeros((lattice.n_modes, lattice.n_modes), complex)
    for k, v in modes.items():
        if not lattice.contains(k):
            raise ValueError(f"wavevector {k} outside lattice of size {lattice.n_modes}")
        coeffs[lattice.index(k)] = v
    return ModeField(lattice, coeffs)


def conjugate_mirror(coeffs: np.ndarray) -> np.ndarray:
    """Array whose entry at k is conj(coeffs at -k)."""
    return np.roll(coeffs[::-1, ::-1], 1, axis=(0, 1)).conj()


def reality_residual(field: ModeField | np.ndarray) -> float:
    """Max over k of |coeff(k) - conj(coeff(-k))|; zero for a real field."""
    coeffs = field.coeffs if isinstance(field, ModeField) else np.asarray(field)
    return float(np.abs(coeffs - conjugate_mirror(coeffs)).max())


def enforce_reality(coeffs: np.ndarray) -> np.ndarray:
    """Project raw coefficients onto the conjugate-symmetric subspace."""
    out = 0.5 * (np.asarray(coeffs, dtype=complex) + conjugate_mirror(coeffs))
    out[0, 0] = 0.0
    return out


def inverse_laplacian(field: ModeField) -> ModeField:
    """Stream function psi with Delta psi = omega: psi_k = -omega_k / k^2."""
    ksq = ksq_grid(field.lattice.n_modes).copy()
    ksq[0, 0] = 1.0  # origin coefficient is zero; avoid 0/0
    return ModeField(field.lattice, -field.coeffs / ksq)


def energy(field: ModeField) -> float:
    """Kinetic energy 0.5 * sum |omega_k|^2 / k^2."""
    ksq = ksq_grid(field.lattice.n_modes).copy()
    ksq[0, 0] = 1.0
    return float(0.5 * np.sum(np.abs(field.coeffs) ** 2 / ksq))


def enstrophy(field: ModeField) -> float:
    """Quadratic Casimir sum |omega_k|^2."""
    return float(np.sum(np.abs(field.coeffs) ** 2))


def l2_norm(field: ModeField) -> float:
    return float(np.sqrt(enstrophy(field)))


def sobolev_norm_sq(field: ModeField, order: float) -> float:
    """Weighted norm sum |omega_k|^2 (1 + k^2)^order."""
    weight = (1.0 + ksq_grid(field.lattice.n_modes)) ** order
    return float(np.sum(np.abs(field.coeffs) ** 2 * weight))


def delta_initial_condition(
    lattice: ModeLattice,
    x0: tuple[float, float] = (0.0, 0.0),
    amplitude: float = 1.0,
) -> ModeField:
    """Zero-mean point-vortex data: omega_k = amplitude * exp(-i k . x0).

    The physical-space picture is amplitude * (N^2 delta_{x,x0} - 1) on the
    uniform N x N grid x_j = 2*pi*j/N.  x0 is given in radians.
    """
    w = wavenumber_axis(lattice.n_modes)
    phase = w[:, None] * x0[0] + w[None, :] * x0[1]
    coeffs = amplitude * np.exp(-1j * phase)
    coeffs[0, 0] = 0.0
    return ModeField(lattice, coeffs)


def smooth_initial_condition(
    lattice: ModeLattice,
    sigma: float,
    seed: int,
    max_wavenumber: int | None = None,
) -> ModeField:
    """Random real field with Sobolev-type decay omega_k = c_k (1+k^2)^(-sigma/2).

    |c_k| <= 1 is drawn reproducibly from the seed.  Draws are made per
    wavevector in a fixed order over the support box, so two lattices large
    enough to hold the same support produce identical coefficients.  Requires
    sigma > 2 (the regularity regime the convergence experiments assume).
    """
    if sigma <= 2:
        raise ValueError(f"sigma must be > 2, got {sigma}")
    support = lattice.half if max_wavenumber is None else int(max_wavenumber)
    if support < 1 or support > lattice.half:
        raise ValueError(f"support radius {support} does not fit lattice {lattice.n_modes}")
    rng = np.random.default_rng(seed)
    coeffs = np.zeros((lattice.n_modes, lattice.n_modes), complex)
    for k1 in range(-support, support + 1):
        for k2 in range(-support, support + 1):
            if (k1, k2) <= (0, 0):
                continue  # draw one half; the mirror is the conjugate
            r = rng.uniform(0.0, 1.0)
            theta = rng.uniform(0.0, 2.0 * np.pi)
            c = r * np.exp(1j * theta)
            envelope = (1.0 + k1 * k1 + k2 * k2) ** (-sigma / 2.0)
            coeffs[lattice.index((k1, k2))] = c * envelope
            coeffs[lattice.index((-k1, -k2))] = np.conj(c) * envelope
    return ModeField(lattice, coeffs)


def embed_field(field: ModeField, target: ModeLattice) -> ModeField:
    """Place the field's coefficients at the same wavevectors of a larger lattice."""
    if target.n_modes < field.lattice.n_modes:
        raise ValueError("target lattice is smaller than the field's lattice")
    coeffs = np.zeros((target.n_modes, target.n_modes), complex)
    h = field.lattice.half
    src = field.coeffs
    for k1 in range(-h, h + 1):
        coeffs[k1 % target.n_modes, np.arange(-h, h + 1) % target.n_modes] = src[
            k1 % field.lattice.n_modes, np.arange(-h, h + 1) % field.lattice.n_modes
        ]
    return ModeField(target, coeffs)


def restrict_field(field: ModeField, target: ModeLattice) -> ModeField:
    """Keep only the modes inside a smaller lattice box."""
    if target.n_modes > field.lattice.n_modes:
        raise ValueError("target lattice is larger than the field's lattice")
    coeffs = np.zeros((target.n_modes, target.n_modes), complex)
    h = target.half
    for k1 in range(-h, h + 1):
        coeffs[k1 % target.n_modes, np.arange(-h, h + 1) % target.n_modes] = field.coeffs[
            k1 % field.lattice.n_modes, np.arange(-h, h + 1) % field.lattice.n_modes
        ]
    return ModeField(target, coeffs)
