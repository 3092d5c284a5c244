import numpy as np
import pytest

from zeitlin_lab.brackets import sine_bracket_rhs, structure_constant_suN
from zeitlin_lab.spectral import (
    ModeField,
    ModeLattice,
    enforce_reality,
    field_from_modes,
    zero_field,
)
from zeitlin_lab.sun import (
    COMMUTATOR_SIGN,
    basis_matrix,
    build_generators,
    commutator_rhs,
    field_to_matrix,
    matrix_to_field,
    renormalized_basis_norm,
    trace_casimirs,
)


def random_symmetric_field(n, seed):
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return ModeField(ModeLattice(n), enforce_reality(raw))


class TestGenerators:
    def test_rejects_bad_n(self):
        for bad in (1, 2, 4, 6):
            with pytest.raises(ValueError):
                build_generators(bad)

    def test_clock_matrix_n3(self):
        g, _ = build_generators(3)
        lam = np.exp(4j * np.pi / 3)
        assert np.allclose(np.diag(g), [1.0, lam, lam ** 2], atol=1e-15)

    def test_shift_order(self):
        _, h = build_generators(3)
        assert np.allclose(np.linalg.matrix_power(h, 3), np.eye(3), atol=1e-15)

    def test_unitary_and_order_n(self):
        for n in (5, 7):
            g, h = build_generators(n)
            for u in (g, h):
                assert np.allclose(u @ u.conj().T, np.eye(n), atol=1e-13)
                assert np.allclose(np.linalg.matrix_power(u, n), np.eye(n), atol=1e-12)
            assert np.linalg.norm(g, "fro") == pytest.approx(np.sqrt(n), rel=1e-14)
            assert np.linalg.norm(h, "fro") == pytest.approx(np.sqrt(n), rel=1e-14)

    def test_commutation_phase_sign(self):
        # fixes the layout convention: g h = lambda^(-1) h g, which makes
        # the renormalized bracket carry a positive sine coefficient
        for n in (3, 5):
            g, h = build_generators(n)
            lam = np.exp(4j * np.pi / n)
            assert np.allclose(g @ h, lam ** (-1) * h @ g, atol=1e-13)
        assert COMMUTATOR_SIGN == 1


class TestBasisMatrix:
    def test_rejects_origin(self):
        with pytest.raises(ValueError):
            basis_matrix((0, 0), 5)

    def test_unitary_fixed_frobenius_norm(self):
        for n in (5, 7):
            for wv in [(1, 0), (2, 3), (-1, -2), (3, -3)]:
                j = basis_matrix(wv, n)
                assert np.allclose(j @ j.conj().T, np.eye(n), atol=1e-13)
                assert np.linalg.norm(j, "fro") == pytest.approx(np.sqrt(n), rel=1e-14)

    def test_matches_generator_product(self):
        n = 5
        g, h = build_generators(n)
        for n1, n2 in [(1, 0), (0, 1), (2, 2), (-1, 2), (-2, -2)]:
            want = (
                np.exp(2j * np.pi * n1 * n2 / n)
                * np.linalg.matrix_power(g, n1 % n)
                @ np.linalg.matrix_power(h, n2 % n)
            )
            assert np.abs(basis_matrix((n1, n2), n) - want).max() < 1e-12

    def test_commutator_example_n5(self):
        # [L_(1,0), L_(0,1)] = coeff * L_(1,1) by direct 5x5 multiplication
        n = 5
        alpha = 1j * n / (4 * np.pi)
        la = alpha * basis_matrix((1, 0), n)
        lb = alpha * basis_matrix((0, 1), n)
        comm = la @ lb - lb @ la
        target = alpha * basis_matrix((1, 1), n)
        coeff = comm[0, 1] / target[0, 1]
        assert abs(coeff) == pytest.approx(0.756826728640657, abs=1e-12)
        assert np.abs(comm - coeff * target).max() < 1e-12

    def test_commutation_relation_all_pairs_n7(self):
        n = 7
        lattice = ModeLattice(n)
        alpha = 1j * n / (4 * np.pi)
        mats = {
            wv: alpha * basis_matrix(wv, n)
            for wv in lattice.wavevectors()
            if wv != (0, 0)
        }
        rng = np.random.default_rng(0)
        pool = [wv for wv in mats]
        for _ in range(150):
            a = pool[rng.integers(len(pool))]
            b = pool[rng.integers(len(pool))]
            comm = mats[a] @ mats[b] - mats[b] @ mats[a]
            coeff = structure_constant_suN(m=b, n=a, n_modes=n)
            target = lattice.wrap((a[0] + b[0], a[1] + b[1]))
            if target == (0, 0):
                want = np.zeros((n, n))
            else:
                want = coeff * mats[target]
            assert np.abs(comm - want).max() < 1e-12


class TestFieldMatrixMaps:
    def test_zero_roundtrip(self):
        lat = ModeLattice(5)
        w = field_to_matrix(zero_field(lat))
        assert np.all(w == 0)
        back = matrix_to_field(np.zeros((5, 5)), lat)
        assert np.all(back.coeffs == 0)

    def test_trace_pairing_orthonormality_n5(self):
        n = 5
        lattice = ModeLattice(n)
        nonzero = [wv for wv in lattice.wavevectors() if wv != (0, 0)]
        for a in nonzero:
            ja = basis_matrix(a, n)
            for b in nonzero:
                jb = basis_matrix(b, n)
                tr = np.trace(ja.conj().T @ jb)
                want = n if a == b else 0.0
                assert abs(tr - want) < 1e-12

    def test_roundtrip_random_field(self):
        f = random_symmetric_field(7, seed=3)
        back = matrix_to_field(field_to_matrix(f), f.lattice)
        assert np.abs(back.coeffs - f.coeffs).max() < 1e-12

    def test_single_mode_linearity(self):
        lat = ModeLattice(5)
        f = field_from_modes(lat, {(1, 0): 1.0, (-1, 0): 1.0})
        w = field_to_matrix(f)
        want = basis_matrix((1, 0), 5) + basis_matrix((-1, 0), 5)
        assert np.abs(w - want).max() < 1e-14

    def test_hermitian_for_symmetric_field(self):
        f = random_symmetric_field(7, seed=4)
        w = field_to_matrix(f)
        assert np.abs(w - w.conj().T).max() < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            matrix_to_field(np.zeros((5, 5)), ModeLattice(7))


class TestCommutatorRhs:
    def test_zero_field(self):
        out = commutator_rhs(zero_field(ModeLattice(5)))
        assert np.abs(out.coeffs).max() == 0.0

    def test_eigenfunction_steady(self):
        f = field_from_modes(
            ModeLattice(7), {(1, 0): 1.0, (-1, 0): 1.0, (0, 1): 1.0, (0, -1): 1.0}
        )
        assert np.abs(commutator_rhs(f).coeffs).max() < 1e-13

    @pytest.mark.parametrize("n", [5, 7, 9])
    def test_matches_sine_bracket(self, n):
        for seed in range(3):
            f = random_symmetric_field(n, seed=seed)
            a = sine_bracket_rhs(f).coeffs
            b = commutator_rhs(f).coeffs
            assert np.abs(a - b).max() < 1e-10


class TestTraceCasimirs:
    def test_rejects_low_pmax(self):
        with pytest.raises(ValueError):
            trace_casimirs(np.eye(3), 1)

    def test_zero_matrix(self):
        values = trace_casimirs(np.zeros((5, 5)), 5)
        assert values == [0j, 0j, 0j, 0j]

    def test_pair_field_n5(self):
        # W = J_(1,0) + J_(-1,0): tr W^2 = 2 tr I = 2N (cross terms give
        # J_(+-2,0), trace zero), verified against the dense matrix power
        f = field_from_modes(ModeLattice(5), {(1, 0): 1.0, (-1, 0): 1.0})
        w = field_to_matrix(f)
        values = trace_casimirs(w, 2)
        dense = np.trace(w @ w)
        assert values[0] == pytest.approx(10.0, abs=1e-12)
        assert values[0] == pytest.approx(dense, abs=1e-12)

    def test_real_for_symmetric_field(self):
        f = random_symmetric_field(7, seed=9)
        w = field_to_matrix(f)
        for value in trace_casimirs(w, 5):
            assert abs(value.imag) < 1e-9 * max(1.0, abs(value.real))


class TestRenormalizedBasisNorm:
    def test_closed_form_value(self):
        assert renormalized_basis_norm((1, 0), 5) == pytest.approx(
            0.8897031792714714, abs=1e-14
        )

    def test_matches_explicit_frobenius_norm(self):
        for n in (5, 11):
            for wv in [(1, 0), (2, -1), (n // 2, n // 2)]:
                j = (1j * n / (4 * np.pi)) * basis_matrix(wv, n)
                assert np.linalg.norm(j, "fro") == pytest.approx(
                    renormalized_basis_norm(wv, n), rel=1e-13
                )

    def test_power_law_ratio(self):
        ratio = renormalized_basis_norm((1, 0), 25) / renormalized_basis_norm((1, 0), 5)
        assert ratio == pytest.approx(5.0 ** 1.5, rel=1e-13)

    def test_independent_of_mode(self):
        values = {renormalized_basis_norm(wv, 7) for wv in [(1, 0), (3, 3), (-2, 1)]}
        assert len(values) == 1


class TestStructureConstantConvergence:
    def test_gap_ratio_eps_squared(self):
        # through N = 5, 15, 45 the su(N) coefficient approaches the sdiff
        # value with consecutive gap ratios ~ 9
        m, n = (0, 1), (1, 0)
        gaps = [abs(structure_constant_suN(m, n, nn) - 1.0) for nn in (5, 15, 45)]
        assert gaps[0] / gaps[1] == pytest.approx(9.0, rel=0.15)
        assert gaps[1] / gaps[2] == pytest.approx(9.0, rel=0.05)
