"""Polynomial and rational-function matrices over F_p: exact rank two ways."""

import pytest
from hypothesis import given, settings, strategies as st

from smith_tate.ratfun import (
    RatFun,
    bareiss_rank,
    padd,
    pconst,
    pdivmod,
    peval,
    pgcd,
    pmul,
    pnorm,
    poly_mat_from_int,
    poly_matrix_rank,
    poly_matrix_ranks,
    psub,
    pupow,
    ratfun_rank,
    ratfun_rank_by_evaluation,
)

U = (0, 1)  # the variable u as a coefficient tuple


def test_poly_primitives():
    p = 5
    assert pconst(7, p) == (2,)
    assert pconst(0, p) == ()
    assert pupow(2, 3, p) == (0, 0, 3)
    assert padd((1, 2), (4, 3), p) == ()  # (1+4, 2+3) = 0
    assert psub((1,), (1,), p) == ()
    assert pmul((1, 1), (1, 4), p) == (1, 0, 4)  # (1+u)(1+4u) = 1 + 4u^2
    assert peval((1, 2, 1), 3, 5) == (1 + 6 + 9) % 5


def test_pdivmod_and_gcd():
    p = 7
    a = pmul((1, 1), (2, 0, 1), p)
    q, r = pdivmod(a, (1, 1), p)
    assert q == (2, 0, 1) and r == ()
    g = pgcd(pmul((1, 1), (1, 2), p), pmul((1, 1), (3, 1), p), p)
    assert g == (1, 1)  # monic gcd


def test_bareiss_rank_oracles():
    p = 3
    diag = [[U, ()], [(), pmul(U, U, p)]]
    assert bareiss_rank(diag, p) == 2
    # [[u, 1], [u^2, u]] has zero determinant
    dep = [[U, (1,)], [pmul(U, U, p), U]]
    assert bareiss_rank(dep, p) == 1
    assert bareiss_rank([[(), ()], [(), ()]], p) == 0


def test_evaluation_rank_matches_bareiss():
    p = 3
    mats = [
        [[U, (1,)], [pmul(U, U, p), U]],
        [[U, ()], [(), pmul(U, U, p)]],
        [[(1, 1), (2,)], [(0, 0, 2), (1,)]],
    ]
    for m in mats:
        assert poly_matrix_rank(m, p) == bareiss_rank(m, p)
    assert poly_matrix_ranks(mats, p) == [bareiss_rank(m, p) for m in mats]


def test_ratfun_arithmetic_and_rank():
    p = 5
    u = RatFun.from_poly(U, p)
    one = RatFun.const(1, p)
    q = u / (u + one)
    assert not q.is_zero()
    assert (q * (u + one) - u).is_zero()
    mat = [[u, one], [u * u, u]]
    assert ratfun_rank(mat) == 1
    assert ratfun_rank_by_evaluation(mat, p) == 1
    mat2 = [[one / u, one], [one, u]]  # det = 1/u * u - 1 = 0
    assert ratfun_rank(mat2) == 1


def test_ratfun_division_by_zero():
    p = 3
    with pytest.raises(ZeroDivisionError):
        RatFun.const(1, p) / RatFun.const(0, p)


def test_poly_mat_from_int_shift():
    m = poly_mat_from_int([[2, 0], [0, 1]], 5, u_shift=1)
    assert m[0][0] == (0, 2)
    assert m[0][1] == ()
    assert m[1][1] == (0, 1)


@st.composite
def poly_matrices(draw):
    p = draw(st.sampled_from((2, 3, 5)))
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    poly = st.lists(st.integers(0, p - 1), min_size=0, max_size=3).map(
        lambda cs: pnorm(cs, p)
    )
    rows = draw(
        st.lists(st.lists(poly, min_size=m, max_size=m), min_size=n, max_size=n)
    )
    return rows, p


@given(poly_matrices())
@settings(max_examples=50, deadline=None)
def test_rank_routes_agree(case):
    """Fraction-free elimination and multi-point evaluation always agree."""
    mat, p = case
    assert bareiss_rank([row[:] for row in mat], p) == poly_matrix_rank(mat, p)
