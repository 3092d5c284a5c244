import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zeitlin_lab.spectral import (
    ModeField,
    ModeLattice,
    cross_product,
    delta_initial_condition,
    embed_field,
    energy,
    enforce_reality,
    enstrophy,
    field_from_modes,
    inverse_laplacian,
    reality_residual,
    restrict_field,
    smooth_initial_condition,
    sobolev_norm_sq,
    zero_field,
)

wavevectors = st.tuples(st.integers(-20, 20), st.integers(-20, 20))


def random_symmetric_field(lattice, rng, scale=1.0):
    n = lattice.n_modes
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return ModeField(lattice, scale * enforce_reality(raw))


class TestCrossProduct:
    def test_examples(self):
        assert cross_product((1, 0), (0, 1)) == 1
        assert cross_product((2, 3), (4, 5)) == -2
        assert cross_product((3, 6), (1, 2)) == 0

    @given(wavevectors, wavevectors)
    def test_antisymmetric(self, m, n):
        assert cross_product(m, n) == -cross_product(n, m)

    @given(wavevectors)
    def test_self_zero(self, m):
        assert cross_product(m, m) == 0


class TestModeLattice:
    def test_rejects_even_or_small(self):
        for bad in (0, 1, 2, 4, 10):
            with pytest.raises(ValueError):
                ModeLattice(bad)

    def test_wrap_into_symmetric_range(self):
        lat = ModeLattice(5)
        assert lat.wrap((3, -3)) == (-2, 2)
        assert lat.wrap((5, 5)) == (0, 0)
        assert lat.wrap((-2, 2)) == (-2, 2)

    def test_wavevector_count(self):
        lat = ModeLattice(7)
        assert len(lat.wavevectors()) == 49
        assert (0, 0) in lat.wavevectors()


class TestModeField:
    def test_rejects_nonzero_mean(self):
        lat = ModeLattice(5)
        coeffs = np.zeros((5, 5), complex)
        coeffs[0, 0] = 1.0
        with pytest.raises(ValueError):
            ModeField(lat, coeffs)

    def test_immutable(self):
        f = zero_field(ModeLattice(5))
        with pytest.raises(ValueError):
            f.coeffs[1, 1] = 1.0

    def test_lookup_by_wavevector(self):
        lat = ModeLattice(5)
        f = field_from_modes(lat, {(1, 0): 2.0, (-1, 0): 2.0})
        assert f[(1, 0)] == 2.0
        assert f[(-1, 0)] == 2.0
        assert f[(2, 2)] == 0.0


class TestRealityResidual:
    def test_symmetric_field_is_zero(self):
        rng = np.random.default_rng(0)
        f = random_symmetric_field(ModeLattice(7), rng)
        assert reality_residual(f) == 0.0

    def test_known_defect(self):
        lat = ModeLattice(5)
        coeffs = np.zeros((5, 5), complex)
        coeffs[lat.index((1, 0))] = 1.0
        coeffs[lat.index((-1, 0))] = 1.0 + 1.0j
        # |1 - conj(1+i)| = |1 - (1-i)| = 1
        assert reality_residual(coeffs) == pytest.approx(1.0, abs=0)

    def test_enforce_reality_output_is_exact(self):
        rng = np.random.default_rng(1)
        raw = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
        assert reality_residual(enforce_reality(raw)) == 0.0


class TestInverseLaplacian:
    def test_single_mode_pair(self):
        lat = ModeLattice(5)
        f = field_from_modes(lat, {(1, 0): 1.0, (-1, 0): 1.0})
        psi = inverse_laplacian(f)
        assert psi[(1, 0)] == -1.0
        assert psi[(-1, 0)] == -1.0

    def test_zero_field(self):
        psi = inverse_laplacian(zero_field(ModeLattice(5)))
        assert np.all(psi.coeffs == 0)

    def test_diagonal_mode(self):
        lat = ModeLattice(5)
        f = field_from_modes(lat, {(1, 1): 2.0, (-1, -1): 2.0})
        psi = inverse_laplacian(f)
        assert psi[(1, 1)] == -1.0
        assert psi[(-1, -1)] == -1.0

    def test_linearity(self):
        rng = np.random.default_rng(2)
        lat = ModeLattice(7)
        f = random_symmetric_field(lat, rng)
        g = random_symmetric_field(lat, rng)
        lhs = inverse_laplacian(ModeField(lat, 2.0 * f.coeffs + 3.0 * g.coeffs))
        rhs = 2.0 * inverse_laplacian(f).coeffs + 3.0 * inverse_laplacian(g).coeffs
        assert np.abs(lhs.coeffs - rhs).max() < 1e-14

    def test_preserves_reality(self):
        rng = np.random.default_rng(3)
        psi = inverse_laplacian(random_symmetric_field(ModeLattice(9), rng))
        assert reality_residual(psi) == 0.0


class TestDeltaInitialCondition:
    def test_origin_phase_gives_all_ones(self):
        f = delta_initial_condition(ModeLattice(5))
        coeffs = f.coeffs.copy()
        assert coeffs[0, 0] == 0.0
        coeffs[0, 0] = 1.0
        assert np.all(coeffs == 1.0)

    def test_mean_removed(self):
        f = delta_initial_condition(ModeLattice(7), x0=(2 * np.pi / 7, 4 * np.pi / 7))
        assert f[(0, 0)] == 0.0

    def test_phase_at_grid_point(self):
        f = delta_initial_condition(ModeLattice(5), x0=(2 * np.pi / 5, 0.0))
        assert f[(1, 0)] == pytest.approx(np.exp(-2j * np.pi / 5), abs=1e-15)

    def test_invariants(self):
        f = delta_initial_condition(ModeLattice(9), x0=(2 * np.pi / 9, 8 * np.pi / 9))
        assert reality_residual(f) < 1e-15
        assert f[(0, 0)] == 0.0


class TestSmoothInitialCondition:
    def test_rejects_low_sigma(self):
        with pytest.raises(ValueError):
            smooth_initial_condition(ModeLattice(5), 2.0, seed=0)

    def test_deterministic(self):
        a = smooth_initial_condition(ModeLattice(7), 3.0, seed=42)
        b = smooth_initial_condition(ModeLattice(7), 3.0, seed=42)
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_envelope_bound(self):
        f = smooth_initial_condition(ModeLattice(9), 3.0, seed=5)
        assert abs(f[(1, 0)]) <= 2.0 ** (-1.5)
        for k in ModeLattice(9).wavevectors():
            if k == (0, 0):
                continue
            bound = (1.0 + k[0] ** 2 + k[1] ** 2) ** (-1.5)
            assert abs(f[k]) <= bound + 1e-15

    def test_weighted_norm_finite(self):
        f = smooth_initial_condition(ModeLattice(9), 3.0, seed=5)
        # sum |c_k|^2 <= number of nonzero lattice modes
        assert sobolev_norm_sq(f, 3.0) <= 9 * 9 - 1

    def test_invariants(self):
        f = smooth_initial_condition(ModeLattice(9), 2.5, seed=3)
        assert reality_residual(f) == 0.0
        assert f[(0, 0)] == 0.0

    def test_support_restriction_matches_across_lattices(self):
        small = smooth_initial_condition(ModeLattice(9), 3.0, seed=11, max_wavenumber=2)
        big = smooth_initial_condition(ModeLattice(15), 3.0, seed=11, max_wavenumber=2)
        for k in ModeLattice(9).wavevectors():
            if max(abs(k[0]), abs(k[1])) <= 2:
                assert big[k] == small[k]
        for k in ModeLattice(15).wavevectors():
            if max(abs(k[0]), abs(k[1])) > 2:
                assert big[k] == 0.0


class TestEmbedRestrict:
    @given(st.sampled_from([(5, 9), (7, 15), (9, 31)]), st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_roundtrip_identity(self, sizes, seed):
        small, big = sizes
        rng = np.random.default_rng(seed)
        f = random_symmetric_field(ModeLattice(small), rng)
        back = restrict_field(embed_field(f, ModeLattice(big)), ModeLattice(small))
        assert np.array_equal(back.coeffs, f.coeffs)

    def test_embedding_preserves_wavevectors(self):
        f = field_from_modes(ModeLattice(5), {(2, -1): 1 + 2j, (-2, 1): 1 - 2j})
        g = embed_field(f, ModeLattice(11))
        assert g[(2, -1)] == 1 + 2j
        assert enstrophy(g) == enstrophy(f)

    def test_size_checks(self):
        f = zero_field(ModeLattice(9))
        with pytest.raises(ValueError):
            embed_field(f, ModeLattice(5))
        with pytest.raises(ValueError):
            restrict_field(f, ModeLattice(11))


class TestQuadraticDiagnostics:
    def test_single_pair_values(self):
        lat = ModeLattice(5)
        f = field_from_modes(lat, {(1, 0): 1.0, (-1, 0): 1.0})
        assert enstrophy(f) == pytest.approx(2.0, abs=0)
        assert energy(f) == pytest.approx(1.0, abs=0)

    def test_energy_weighting(self):
        lat = ModeLattice(5)
        f = field_from_modes(lat, {(1, 1): 1.0, (-1, -1): 1.0})
        assert energy(f) == pytest.approx(0.5, rel=1e-15)
