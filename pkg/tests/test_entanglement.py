import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermispin.entanglement import (
    Bipartition,
    negativity_measure,
    pair_pt_eigenvalues,
    partial_transpose,
    ppt_separability_pair,
    sylvester_witness,
    witness_from_source,
)
from fermispin.errors import InvalidArgumentError, ResourceLimitError
from fermispin.reduction import LIMIT, partial_trace, two_spin_reduced_analytic
from fermispin.rho import ExactDensityMatrix
from fermispin.spin_core import SpinBasisState

from conftest import partial_transpose_reference

PRODUCT_STATE = ExactDensityMatrix(2, np.eye(4, dtype=np.int64), 4)


def random_matrix(n, seed):
    rng = np.random.default_rng(seed)
    num = rng.integers(-20, 20, size=(2**n, 2**n))
    return ExactDensityMatrix(n, num + num.T, 13)


class TestBipartition:
    def test_from_a(self):
        bp = Bipartition.from_a([2, 0], 4)
        assert (bp.part_a, bp.part_b) == ((0, 2), (1, 3))
        assert str(bp) == "0,2|1,3"

    @pytest.mark.parametrize("a,b", [((), (0, 1)), ((0,), (0, 1)), ((0,), (2,))])
    def test_invalid(self, a, b):
        with pytest.raises(InvalidArgumentError):
            Bipartition(a, b, 2)


class TestPartialTranspose:
    @pytest.mark.parametrize("part_b", [(0,), (1,), (0, 2), (1, 2, 3), (3,)])
    def test_matches_reference(self, part_b):
        m = random_matrix(4, 7)
        bp = Bipartition(tuple(i for i in range(4) if i not in part_b), part_b, 4)
        expected = partial_transpose_reference(m.numerators, 4, part_b)
        np.testing.assert_array_equal(partial_transpose(m, bp).numerators, expected)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31), st.sets(st.integers(0, 3), min_size=1, max_size=3))
    def test_involution_trace_symmetry(self, seed, part_b):
        m = random_matrix(4, seed)
        bp = Bipartition.from_a([i for i in range(4) if i not in part_b], 4)
        pt = partial_transpose(m, bp)
        assert partial_transpose(pt, bp) == m
        assert pt.trace() == m.trace()
        assert pt.is_symmetric()

    def test_product_state_invariant(self):
        bp = Bipartition((0,), (1,), 2)
        assert partial_transpose(PRODUCT_STATE, bp) == PRODUCT_STATE

    def test_singlet_spectrum(self, rho_of):
        pt = partial_transpose(rho_of(2), Bipartition((0,), (1,), 2))
        vals = np.linalg.eigvalsh(pt.float_view)
        np.testing.assert_allclose(vals, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)

    def test_dimension_mismatch(self, rho_of):
        with pytest.raises(InvalidArgumentError):
            partial_transpose(rho_of(4), Bipartition((0,), (1,), 2))


class TestNegativity:
    def test_rho4_two_two(self, rho_of):
        res = negativity_measure(rho_of(4), Bipartition.from_a([0, 1], 4))
        expected = sorted([0.5] + [1 / 6] * 6 + [-1 / 6] * 3 + [0.0] * 6)
        np.testing.assert_allclose(res.eigenvalues, expected, atol=1e-10)
        assert res.negativity == pytest.approx(1.0, abs=1e-10)

    def test_singlet(self, rho_of):
        res = negativity_measure(rho_of(2), Bipartition((0,), (1,), 2))
        assert res.negativity == pytest.approx(1.0, abs=1e-12)

    def test_n4_pair_state_not_entangled(self):
        res = negativity_measure(two_spin_reduced_analytic(4).matrix(), Bipartition((0,), (1,), 2))
        assert res.negativity == 0.0
        assert not res.entangled

    def test_block_solver_matches_dense(self, rho_of):
        bp = Bipartition.from_a([0, 3, 4], 6)
        res = negativity_measure(rho_of(6), bp)
        dense = np.linalg.eigvalsh(partial_transpose(rho_of(6), bp).float_view)
        np.testing.assert_allclose(res.eigenvalues, dense, atol=1e-12)

    def test_limit(self, rho_of):
        with pytest.raises(ResourceLimitError, match="sylvester_witness"):
            negativity_measure(rho_of(6), Bipartition.from_a([0], 6), max_n=4)

    def test_three_spin_subsystem_regression(self, rho_of):
        # no published value; frozen from the block eigensolve
        rho3 = partial_trace(rho_of(4), [0, 1, 2])
        res = negativity_measure(rho3, Bipartition((0,), (1, 2), 3))
        assert res.negativity == pytest.approx(1 / 3, abs=1e-10)
        np.testing.assert_allclose(
            res.eigenvalues, [-1 / 12, -1 / 12, 1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 4, 1 / 4], atol=1e-12
        )


class TestWitness:
    def test_six_spin_half_split_example(self, rho_of):
        bp = Bipartition.from_a([0, 1, 2], 6)
        i = SpinBasisState.from_label("↑↑↑↓↓↓").bits
        j = SpinBasisState.from_label("↓↓↓↑↑↑").bits
        w = witness_from_source(rho_of(6), bp, i, j)
        assert w is not None
        assert SpinBasisState(w.row, 6).label == "↑↑↑↑↑↑"
        assert SpinBasisState(w.col, 6).label == "↓↓↓↓↓↓"
        assert w.block == (3, -3)
        assert w.minor == -w.source_value**2 < 0

    def test_found_with_negative_minor(self, rho_of):
        bp = Bipartition.from_a([0], 4)
        w = sylvester_witness(rho_of(4), bp)
        assert w is not None and w.minor < 0
        assert negativity_measure(rho_of(4), bp).negativity > 0

    def test_minor_matches_transposed_matrix(self, rho_of):
        bp = Bipartition.from_a([0, 1, 2], 6)
        w = sylvester_witness(rho_of(6), bp)
        pt = partial_transpose(rho_of(6), bp)
        i, j = w.row, w.col
        assert w.minor == pt.entry(i, i) * pt.entry(j, j) - pt.entry(i, j) ** 2
        assert pt.entry(i, j) == rho_of(6).entry(w.source_row, w.source_col)
        assert w.block[0] != 0 and w.block[1] != 0

    def test_scan_order_is_first(self, rho_of):
        # no earlier source element in row-major order qualifies
        rho = rho_of(4)
        bp = Bipartition.from_a([0, 1], 4)
        w = sylvester_witness(rho, bp)
        for i, j in itertools.product(range(16), repeat=2):
            if (i, j) == (w.source_row, w.source_col):
                break
            if i != j and rho.numerators[i, j] and witness_from_source(rho, bp, i, j):
                sz = lambda b: bin(b & bp.mask_b).count("1") * 2 - 2  # noqa: E731
                assert sz(i) == sz(j) or sz(i) == 0 or sz(j) == 0

    def test_product_state_not_found(self):
        assert sylvester_witness(PRODUCT_STATE, Bipartition((0,), (1,), 2)) is None

    def test_record_shape(self, rho_of):
        rec = sylvester_witness(rho_of(4), Bipartition.from_a([0], 4)).to_record()
        assert set(rec) == {"row", "col", "row_label", "col_label", "minor", "block", "source"}
        assert int(rec["minor"]["num"]) < 0
        assert set(rec["block"]) == {"sz_row", "sz_col"}

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_agrees_with_negativity(self, rho_of, n):
        for a in itertools.chain.from_iterable(
            itertools.combinations(range(n), k) for k in range(1, n - 1)
        ):
            bp = Bipartition.from_a(a, n)
            w = sylvester_witness(rho_of(n), bp)
            if w is not None:
                assert negativity_measure(rho_of(n), bp).eigenvalues[0] < 0


class TestPairSeparability:
    def test_n2_npt(self):
        assert ppt_separability_pair(2) is False

    @pytest.mark.parametrize("n", [4, 6, 8, 50, 1000, LIMIT])
    def test_ppt(self, n):
        assert ppt_separability_pair(n) is True

    def test_n6_min_eigenvalue(self):
        w = two_spin_reduced_analytic(6)
        assert pair_pt_eigenvalues(6)[0] == (3 * w.w_triplet_each - w.w_singlet) / 2 == Fraction(1, 10)

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
    def test_closed_form_matches_eigensolve(self, n):
        pt = partial_transpose(two_spin_reduced_analytic(n).matrix(), Bipartition((0,), (1,), 2))
        vals = np.linalg.eigvalsh(pt.float_view)
        np.testing.assert_allclose(vals, [float(x) for x in pair_pt_eigenvalues(n)], atol=1e-14)
