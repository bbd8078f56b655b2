"""Jordan block bookkeeping for order-p operators and the dimension chain."""

import pytest
from hypothesis import given, settings, strategies as st

from smith_tate.errors import NotOrderP
from smith_tate.fp_core import FpMatrix
from smith_tate.module_decomp import (
    ModuleDecomposition,
    decompose,
    smith_chain_check,
    tate_and_invariant_dims,
)
from smith_tate.random_instances import random_sigma_matrix, random_sigma_with_multiplicities


def cyclic_shift(n, p):
    return FpMatrix.from_triplets(n, n, [((j + 1) % n, j, 1) for j in range(n)], p)


class TestModuleDecomposition:
    def test_derived_quantities(self):
        d = ModuleDecomposition(3, (2, 0, 1))
        assert d.dim == 5
        assert d.free_rank == 1
        assert not d.is_free
        assert ModuleDecomposition(3, (0, 0, 2)).is_free

    def test_length_must_be_p(self):
        with pytest.raises(ValueError):
            ModuleDecomposition(3, (1, 2))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            ModuleDecomposition(3, (1, -1, 0))


class TestDecompose:
    def test_identity_is_all_trivial(self):
        d = decompose(FpMatrix.identity(4, 3))
        assert d.multiplicities == (4, 0, 0)

    def test_regular_module(self):
        d = decompose(cyclic_shift(5, 5))
        assert d.multiplicities == (0, 0, 0, 0, 1)
        assert d.is_free and d.free_rank == 1

    def test_trivial_plus_regular(self):
        s = FpMatrix.from_triplets(
            4, 4, [(0, 0, 1)] + [((j + 1) % 3 + 1, j + 1, 1) for j in range(3)], 3
        )
        assert decompose(s).multiplicities == (1, 0, 1)

    def test_jordan_block_of_middle_size(self):
        s = FpMatrix([[1, 1], [0, 1]], 3)
        assert decompose(s).multiplicities == (0, 1, 0)

    def test_non_square_rejected(self):
        with pytest.raises(NotOrderP):
            decompose(FpMatrix.zeros(2, 3, 5))

    def test_wrong_order_rejected(self):
        with pytest.raises(NotOrderP):
            decompose(FpMatrix([[2]], 5))  # 2 has order 4 in F_5
        with pytest.raises(NotOrderP):
            decompose(cyclic_shift(4, 5))  # a 4-cycle has order 4, not 5

    def test_conjugation_invariant(self):
        base = cyclic_shift(3, 3)
        g = FpMatrix([[1, 2, 0], [0, 1, 1], [0, 0, 1]], 3)
        ginv = FpMatrix([[1, 1, 2], [0, 1, 2], [0, 0, 1]], 3)
        assert (g @ ginv) == FpMatrix.identity(3, 3)
        assert decompose(g @ base @ ginv).multiplicities == decompose(base).multiplicities


class TestTateAndInvariantDims:
    @pytest.mark.parametrize(
        "mults,expected",
        [
            ((1, 0, 0), (2, 1)),
            ((0, 0, 1), (0, 1)),
            ((2, 1, 0), (6, 3)),
            ((0, 0, 0), (0, 0)),
        ],
    )
    def test_formula(self, mults, expected):
        assert tate_and_invariant_dims(ModuleDecomposition(3, mults)) == expected


class TestSmithChainCheck:
    def test_trivial_line_everything_tight(self):
        report = smith_chain_check(1, FpMatrix.identity(1, 3))
        assert (report.sharpened_bound, report.invariant_dim, report.module_dim) == (1, 1, 1)
        assert report.chain_holds
        assert not report.sharpened_strictly_stronger

    def test_free_module_separates_the_bounds(self):
        # one free block: classical bound 1 passes, sharpened bound 0 fails
        report = smith_chain_check(1, cyclic_shift(3, 3))
        assert report.sharpened_bound == 0
        assert report.invariant_dim == 1
        assert report.module_dim == 3
        assert not report.holds_sharpened
        assert report.holds_classical
        assert report.holds_invariant_leq_dim
        assert report.sharpened_strictly_stronger
        assert not report.chain_holds

    def test_mixed_module(self):
        s = FpMatrix.from_triplets(
            5,
            5,
            [(0, 0, 1), (1, 1, 1)] + [((j + 1) % 3 + 2, j + 2, 1) for j in range(3)],
            3,
        )
        report = smith_chain_check(2, s)
        assert (report.sharpened_bound, report.invariant_dim, report.module_dim) == (2, 3, 5)
        assert report.chain_holds
        assert report.sharpened_strictly_stronger
        assert report.decomposition.multiplicities == (2, 0, 1)

    def test_negative_dimension_rejected(self):
        with pytest.raises(ValueError):
            smith_chain_check(-1, FpMatrix.identity(1, 3))


@given(st.sampled_from((2, 3, 5)), st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_planted_multiplicities_recovered(p, seed):
    sigma, mults = random_sigma_with_multiplicities(p, seed, max_dim=10)
    assert decompose(sigma).multiplicities == mults


@given(st.integers(0, 100_000))
@settings(max_examples=30, deadline=None)
def test_dimension_chain_on_planted_sigma(seed):
    p = 3
    sigma, mults = random_sigma_with_multiplicities(p, seed, max_dim=10)
    d = decompose(sigma)
    tate_total, invariant = tate_and_invariant_dims(d)
    assert tate_total == 2 * sum(mults[:-1])
    assert invariant <= d.dim
    report = smith_chain_check(0, sigma)
    assert report.chain_holds


def test_explicit_multiplicity_request():
    sigma = random_sigma_matrix(3, (1, 1, 1), 42)
    assert sigma.rows == 6
    assert decompose(sigma).multiplicities == (1, 1, 1)
