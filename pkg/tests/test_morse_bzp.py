"""Critical-point bookkeeping, the alternating resolution, unit constants."""

import cmath

import pytest

from smith_tate.errors import MalformedInput, NotPrime
from smith_tate.fp_core import FpScalar
from smith_tate.morse_bzp import (
    CriticalPoint,
    enumerate_critical_points,
    local_euler_constant,
    resolution_homology,
    wilson_constant,
)


class TestCriticalPoints:
    def test_counts(self):
        assert len(enumerate_critical_points(3, 0)) == 6
        assert len(enumerate_critical_points(2, 1)) == 8
        pts = enumerate_critical_points(5, 3)
        assert len(pts) == 2 * 5 * 4

    def test_exactly_p_per_index(self):
        pts = enumerate_critical_points(3, 2)
        by_index: dict[int, int] = {}
        for c in pts:
            by_index[c.index] = by_index.get(c.index, 0) + 1
        assert by_index == {k: 3 for k in range(6)}

    def test_index_formula(self):
        assert CriticalPoint(3, 2, 0, "even").index == 4
        assert CriticalPoint(3, 2, 0, "odd").index == 5

    def test_root_index_wraps(self):
        assert CriticalPoint(3, 0, 5, "odd").root_index == 2

    def test_coordinates_are_roots(self):
        for c in enumerate_critical_points(3, 1):
            z = c.coordinate()
            target = 1 if c.parity == "odd" else -1
            assert cmath.isclose(z**3, target, abs_tol=1e-12)

    def test_validation(self):
        with pytest.raises(MalformedInput):
            CriticalPoint(3, -1, 0, "even")
        with pytest.raises(MalformedInput):
            CriticalPoint(3, 0, 0, "mixed")
        with pytest.raises(NotPrime):
            CriticalPoint(4, 0, 0, "even")
        with pytest.raises(MalformedInput):
            enumerate_critical_points(3, -1)


class TestResolutionHomology:
    def test_small_cases(self):
        assert resolution_homology(3, 6) == (1, 0, 0, 0, 0, 1)
        assert resolution_homology(2, 4) == (1, 0, 0, 1)
        assert resolution_homology(7, 8) == (1, 0, 0, 0, 0, 0, 0, 1)

    def test_leading_one_and_interior_vanishing(self):
        for p in (2, 3, 5, 7):
            dims = resolution_homology(p, 10)
            assert dims[0] == 1
            assert not any(dims[1:-1])

    def test_minimum_length(self):
        with pytest.raises(MalformedInput):
            resolution_homology(3, 1)
        assert resolution_homology(3, 2)[0] == 1


class TestWilsonConstant:
    def test_small_primes(self):
        assert wilson_constant(2) == FpScalar(1, 2)
        assert wilson_constant(3) == FpScalar(2, 3)
        assert wilson_constant(5) == FpScalar(4, 5)
        assert wilson_constant(7) == FpScalar(6, 7)

    def test_is_always_minus_one(self):
        for p in (2, 3, 5, 7, 11, 13, 31):
            assert wilson_constant(p).value == p - 1

    def test_needs_prime(self):
        with pytest.raises(NotPrime):
            wilson_constant(6)


class TestEulerConstant:
    def test_zero_copies(self):
        c = local_euler_constant(0, 5)
        assert (c.sign.value, c.u_exponent) == (1, 0)

    def test_single_copy(self):
        c = local_euler_constant(1, 3)
        assert (c.sign.value, c.u_exponent) == (2, 2)

    def test_two_copies(self):
        c = local_euler_constant(2, 5)
        assert (c.sign.value, c.u_exponent) == (1, 8)

    def test_sign_alternates(self):
        for n in range(6):
            c = local_euler_constant(n, 7)
            assert c.sign.value == (1 if n % 2 == 0 else 6)
            assert c.u_exponent == 6 * n

    def test_to_rp_element(self):
        x = local_euler_constant(2, 3).to_rp_element()
        assert x.as_dict() == {(4, 0): 1}
        assert x.degree() == 8

    def test_negative_n_rejected(self):
        with pytest.raises(MalformedInput):
            local_euler_constant(-1, 3)
