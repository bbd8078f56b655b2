"""Action-filtration spectral sequences and equivariant deformation models."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smith_tate.complexes import (
    ChainComplex,
    EquivariantComplex,
    FilteredComplex,
    Generator,
)
from smith_tate.errors import (
    FiltrationViolation,
    InvalidComplex,
    MalformedInput,
    NotSquareZero,
)
from smith_tate.fp_core import FpMatrix
from smith_tate.random_instances import random_filtered_complex, random_floer_model
from smith_tate.spectral import (
    EquivariantFloerModel,
    action_ss_pages,
    algebraic_ss_pages,
    model_from_json,
    model_to_json,
)
from smith_tate.tate import tate_cohomology_dims


def free_orbit(p, degree=0):
    gens = [Generator(f"e{j}", degree) for j in range(p)]
    sigma = {f"e{j}": {f"e{(j + 1) % p}": 1} for j in range(p)}
    return EquivariantComplex(p, gens, {}, sigma)


class TestActionSS:
    def test_single_level_no_differential(self):
        fc = FilteredComplex(3, [Generator("x", 0, 0), Generator("y", 1, 0)], {})
        ss = action_ss_pages(fc)
        assert len(ss.pages) == 1
        assert ss.pages[0].dims == {(0, 0): 1, (0, 1): 1}
        assert ss.stabilized_at == 1
        assert ss.converges
        assert ss.infinity == ss.pages[0].dims

    def test_many_levels_no_differential(self):
        fc = FilteredComplex(
            3,
            [Generator("x", 0, 0), Generator("y", 1, 1), Generator("z", 0, 2)],
            {},
        )
        ss = action_ss_pages(fc)
        assert len(ss.pages) == 3
        # level index 0 is the top action level
        assert ss.pages[0].dims == {(0, 0): 1, (1, 1): 1, (2, 0): 1}
        assert all(pg.dims == ss.pages[0].dims for pg in ss.pages)
        assert ss.stabilized_at == 1
        assert ss.converges

    def test_adjacent_cancellation(self):
        fc = FilteredComplex(3, [Generator("a", 0, 1), Generator("b", 1, 0)], {"a": {"b": 1}})
        ss = action_ss_pages(fc)
        assert len(ss.pages) == 2
        assert ss.pages[0].dims == {(0, 0): 1, (1, 1): 1}
        assert ss.pages[0].differential_ranks == {(0, 0): 1}
        assert ss.infinity == {}
        assert ss.stabilized_at == 2
        assert ss.converges

    def test_long_differential_fires_on_page_three(self):
        fc = FilteredComplex(
            3,
            [
                Generator("v3", 1, Fraction(-3)),
                Generator("v5", 0, Fraction(12)),
                Generator("v7", 2, Fraction(3, 2)),
                Generator("v9", 2, Fraction(17, 2)),
            ],
            {"v5": {"v3": 2}},
        )
        ss = action_ss_pages(fc)
        assert ss.levels == [Fraction(-3), Fraction(3, 2), Fraction(17, 2), Fraction(12)]
        assert len(ss.pages) == 4
        e1 = {(0, 0): 1, (1, 2): 1, (2, 2): 1, (3, 1): 1}
        assert ss.pages[0].dims == e1
        assert ss.pages[1].dims == e1
        assert ss.pages[1].differential_ranks == {}
        assert ss.pages[2].dims == e1
        assert ss.pages[2].differential_ranks == {(0, 0): 1}
        assert ss.pages[3].dims == {(1, 2): 1, (2, 2): 1}
        assert ss.infinity == {(1, 2): 1, (2, 2): 1}
        assert ss.total_homology == {2: 2}
        assert ss.converges
        assert ss.stabilized_at == 4

    def test_non_filtered_input_rejected(self):
        cx = ChainComplex(3, [Generator("x", 0, 0), Generator("y", 1, 0)], {"x": {"y": 1}})
        with pytest.raises(FiltrationViolation):
            action_ss_pages(cx)

    def test_empty_complex(self):
        ss = action_ss_pages(FilteredComplex(3, [], {}))
        assert ss.pages[-1].dims == {}
        assert ss.converges


class TestFloerModelConstruction:
    def setup_method(self):
        self.base = EquivariantComplex(3, [Generator("x", 0), Generator("y", 1)], {}, {})

    def test_i_max_required(self):
        with pytest.raises(MalformedInput):
            EquivariantFloerModel(self.base)

    def test_impossible_slot_rejected(self):
        with pytest.raises(MalformedInput):
            EquivariantFloerModel(self.base, {(0, 1): FpMatrix.zeros(2, 2, 3)}, i_max=2)

    def test_supplied_term_above_i_max_rejected(self):
        with pytest.raises(MalformedInput):
            EquivariantFloerModel(self.base, {(3, 0): FpMatrix.zeros(2, 2, 3)}, i_max=2)

    def test_defaults_above_i_max_dropped(self):
        model = EquivariantFloerModel(self.base, i_max=1)
        assert all(i <= 1 for (i, _) in model.terms)

    def test_wrong_shape_rejected(self):
        with pytest.raises(MalformedInput):
            EquivariantFloerModel(self.base, {(2, 0): FpMatrix.zeros(3, 3, 3)}, i_max=2)

    def test_term_degree_enforced(self):
        m = np.zeros((2, 2), dtype=np.int64)
        m[0, 1] = 1  # x <- y drops degree, but slot (1, 0) preserves it
        with pytest.raises(InvalidComplex):
            EquivariantFloerModel(self.base, {(1, 0): FpMatrix(m, 3)}, i_max=2)

    def test_filtration_term_must_strictly_decrease(self):
        m = np.zeros((2, 2), dtype=np.int64)
        m[1, 0] = 1  # y <- x raises degree but keeps action constant
        with pytest.raises(FiltrationViolation):
            EquivariantFloerModel(self.base, {(0, 0): FpMatrix(m, 3)}, i_max=2)

    def test_assembled_square_checked(self):
        wide = EquivariantComplex(
            3, [Generator("x", 0), Generator("y", 1), Generator("z", 2)], {}, {}
        )
        m = np.zeros((3, 3), dtype=np.int64)
        m[0, 1] = 1
        m[1, 2] = 1
        with pytest.raises(NotSquareZero):
            EquivariantFloerModel(wide, {(2, 0): FpMatrix(m, 3)}, i_max=2)
        assert EquivariantFloerModel(wide, i_max=2).square_is_zero()


class TestAlgebraicSS:
    def test_free_orbit_dies_at_page_two(self):
        pages = algebraic_ss_pages(EquivariantFloerModel(free_orbit(3), i_max=2))
        assert pages.e1_even_dims == {0: 3}
        assert pages.e1_odd_dims == {0: 3}
        # page-one differentials are 1 - sigma and the norm
        assert pages.d10_induced[0].tolist() == [[1, 0, 2], [2, 1, 0], [0, 2, 1]]
        assert pages.d21_induced[0].tolist() == [[1, 1, 1]] * 3
        assert pages.e2_by_degree == {0: {"one": 0, "theta": 0}}
        assert pages.e2_dims == (0, 0)
        assert pages.einf_dims == (0, 0)
        assert pages.tate_bound_holds
        assert pages.sigma_module.multiplicities == (0, 0, 1)
        assert pages.sigma_module_tate_dim == 0

    def test_trivial_point_survives(self):
        triv = EquivariantComplex(3, [Generator("v", 0)], {}, {})
        pages = algebraic_ss_pages(EquivariantFloerModel(triv, i_max=2))
        assert pages.d10_induced[0].tolist() == [[0]]
        assert pages.d21_induced[0].tolist() == [[0]]
        assert pages.e2_by_degree == {0: {"one": 1, "theta": 1}}
        assert pages.e2_dims == (1, 1)
        assert pages.einf_dims == (1, 1)
        assert pages.sigma_module.multiplicities == (1, 0, 0)
        assert pages.sigma_module_tate_dim == 2

    def test_deformation_collapses_page_two(self):
        """A u^2-term pairs the two surviving classes and kills them at E_inf."""
        base = EquivariantComplex(3, [Generator("x", 0), Generator("y", 1)], {}, {})
        m = np.zeros((2, 2), dtype=np.int64)
        m[0, 1] = 1
        model = EquivariantFloerModel(base, {(2, 0): FpMatrix(m, 3)}, i_max=2)
        pages = algebraic_ss_pages(model)
        assert pages.e1_even_dims == {0: 1, 1: 1}
        assert pages.e1_odd_dims == {0: 1, 1: 1}
        assert pages.e2_by_degree == {
            0: {"one": 1, "theta": 1},
            1: {"one": 1, "theta": 1},
        }
        assert pages.e2_dims == (2, 2)
        assert pages.einf_dims == (1, 1)
        assert pages.tate_bound_holds
        assert pages.sigma_module.multiplicities == (2, 0, 0)
        assert pages.sigma_module_tate_dim == 4

    def test_undeformed_model_matches_tate(self):
        for seed in range(6):
            model = random_floer_model(3, seed, deform=False)
            pages = algebraic_ss_pages(model)
            assert pages.einf_dims == tate_cohomology_dims(model.base)
            assert pages.tate_bound_holds


class TestModelJson:
    def test_round_trip(self):
        base = EquivariantComplex(3, [Generator("x", 0), Generator("y", 1)], {}, {})
        m = np.zeros((2, 2), dtype=np.int64)
        m[0, 1] = 1
        model = EquivariantFloerModel(base, {(2, 0): FpMatrix(m, 3)}, i_max=2)
        data = model_to_json(model)
        back = model_from_json(data)
        assert model_to_json(back) == data
        assert back.i_max == 2

    def test_i_max_inferred_when_missing(self):
        base = EquivariantComplex(3, [Generator("v", 0)], {}, {})
        data = model_to_json(EquivariantFloerModel(base, i_max=2))
        data.pop("i_max", None)
        assert model_from_json(data).i_max == 2

    def test_random_model_round_trip(self):
        model = random_floer_model(3, 11)
        data = model_to_json(model)
        assert model_to_json(model_from_json(data)) == data


@given(st.sampled_from((2, 3, 5)), st.integers(0, 100_000))
@settings(max_examples=25, deadline=None)
def test_action_ss_converges_to_homology(p, seed):
    fc = random_filtered_complex(p, seed, max_gens=10)
    ss = action_ss_pages(fc)
    assert ss.converges
    assert ss.total_homology == fc.homology_dims()
    collapsed: dict[int, int] = {}
    for (_, k), d in ss.infinity.items():
        collapsed[k] = collapsed.get(k, 0) + d
    assert collapsed == fc.homology_dims()
    assert 1 <= ss.stabilized_at <= len(ss.pages)


@given(st.integers(0, 100_000))
@settings(max_examples=12, deadline=None)
def test_algebraic_bound_on_random_models(seed):
    model = random_floer_model(3, seed)
    pages = algebraic_ss_pages(model)
    assert pages.tate_bound_holds
    even, odd = pages.einf_dims
    assert even <= pages.e2_dims[0] and odd <= pages.e2_dims[1]
