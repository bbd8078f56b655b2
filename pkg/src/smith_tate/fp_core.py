"""Exact dense linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries reduced mod p; every public
routine returns fully reduced results.  Kernel and image bases come out of
one reduced row echelon computation and are deterministic for a fixed
column order (callers wanting "lexicographic by generator id" order their
columns that way).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNilpotent, NotPrime

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = 41
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return p


@dataclass(frozen=True)
class FpScalar:
    """A residue in [0, p); the modulus is primality-checked."""

    value: int
    p: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def __add__(self, other: "FpScalar") -> "FpScalar":
        self._same(other)
        return FpScalar(self.value + other.value, self.p)

    def __sub__(self, other: "FpScalar") -> "FpScalar":
        self._same(other)
        return FpScalar(self.value - other.value, self.p)

    def __mul__(self, other: "FpScalar") -> "FpScalar":
        self._same(other)
        return FpScalar(self.value * other.value, self.p)

    def inverse(self) -> "FpScalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FpScalar(pow(self.value, -1, self.p), self.p)

    def _same(self, other: "FpScalar") -> None:
        if self.p != other.p:
            raise ValueError(f"mixed moduli {self.p} and {other.p}")

    def __int__(self) -> int:
        return self.value


class FpMatrix:
    """Dense matrix over F_p.  Immutable by convention: operations copy."""

    __slots__ = ("a", "p")

    def __init__(self, array, p: int):
        check_prime(p)
        a = np.asarray(array, dtype=np.int64)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        elif a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.ndim != 2:
            raise ValueError("FpMatrix needs a 2-d array")
        self.a = a % p
        self.p = p

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int, p: int) -> "FpMatrix":
        return FpMatrix(np.zeros((rows, cols), dtype=np.int64), p)

    @staticmethod
    def identity(n: int, p: int) -> "FpMatrix":
        return FpMatrix(np.eye(n, dtype=np.int64), p)

    @staticmethod
    def from_triplets(rows: int, cols: int, triplets, p: int) -> "FpMatrix":
        a = np.zeros((rows, cols), dtype=np.int64)
        for i, j, v in triplets:
            a[i, j] = (a[i, j] + v) % p
        return FpMatrix(a, p)

    # -- shape / access ----------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def entry(self, i: int, j: int) -> FpScalar:
        return FpScalar(int(self.a[i, j]), self.p)

    def column(self, j: int) -> np.ndarray:
        return self.a[:, j].copy()

    def is_zero(self) -> bool:
        return not self.a.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.a.shape == other.a.shape
            and bool((self.a == other.a).all())
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.a.tolist()})"

    # -- arithmetic ----------------------------------------------------

    def _same(self, other: "FpMatrix") -> None:
        if self.p != other.p:
            raise ValueError(f"mixed moduli {self.p} and {other.p}")

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._same(other)
        return FpMatrix(self.a + other.a, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._same(other)
        return FpMatrix(self.a - other.a, self.p)

    def __neg__(self) -> "FpMatrix":
        return FpMatrix(-self.a, self.p)

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        self._same(other)
        return FpMatrix(self.a @ other.a, self.p)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix(self.a * (c % self.p), self.p)

    def power(self, k: int) -> "FpMatrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        out = FpMatrix.identity(self.rows, self.p)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self.a.T, self.p)

    def mul_vec(self, v: np.ndarray) -> np.ndarray:
        return (self.a @ (np.asarray(v, dtype=np.int64) % self.p)) % self.p

    def submatrix(self, row_idx, col_idx) -> "FpMatrix":
        return FpMatrix(self.a[np.ix_(list(row_idx), list(col_idx))], self.p)

    def hstack(self, other: "FpMatrix") -> "FpMatrix":
        self._same(other)
        return FpMatrix(np.hstack([self.a, other.a]), self.p)


def _row_reduce(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """In-place RREF of a copy; returns (reduced array, pivot column list)."""
    a = a % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            a[mask] = (a[mask] - np.outer(col[mask], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


@dataclass(frozen=True)
class RrefResult:
    rank: int
    kernel_basis: list  # list of int64 vectors, m.v = 0
    image_basis: list  # original columns spanning the column space
    pivots: tuple
    reduced: np.ndarray


def rref(m: FpMatrix) -> RrefResult:
    """Reduced row echelon form with kernel and image bases.

    kernel vectors use the standard free-variable parameterization (one
    basis vector per non-pivot column, unit in that coordinate); the image
    basis is the original pivot columns, so both are deterministic.
    """
    red, pivots = _row_reduce(m.a.copy(), m.p)
    rank = len(pivots)
    pivset = set(pivots)
    free = [c for c in range(m.cols) if c not in pivset]
    kernel = []
    for f in free:
        v = np.zeros(m.cols, dtype=np.int64)
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-red[r, f]) % m.p
        kernel.append(v)
    image = [m.column(c) for c in pivots]
    return RrefResult(rank, kernel, image, tuple(pivots), red)


def rank(m: FpMatrix) -> int:
    return len(_row_reduce(m.a.copy(), m.p)[1])


def kernel_basis(m: FpMatrix) -> list:
    return rref(m).kernel_basis


def solve(m: FpMatrix, b: np.ndarray):
    """One solution x of m.x = b, or None if inconsistent."""
    b = np.asarray(b, dtype=np.int64).reshape(-1) % m.p
    if b.shape[0] != m.rows:
        raise ValueError("dimension mismatch")
    aug = np.hstack([m.a, b.reshape(-1, 1)])
    red, pivots = _row_reduce(aug, m.p)
    if m.cols in pivots:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = red[r, m.cols]
    return x


def solve_in_span(basis: list, v: np.ndarray, p: int):
    """Coefficients expressing v in the given spanning vectors, or None."""
    if not basis:
        return None if (np.asarray(v) % p).any() else np.zeros(0, dtype=np.int64)
    m = FpMatrix(np.column_stack(basis), p)
    return solve(m, v)


def nilpotent_partition(t: FpMatrix) -> list[int]:
    """Jordan block sizes of a nilpotent operator with t^p = 0.

    Computed from the rank sequence: the number of blocks of size >= k is
    rank(t^{k-1}) - rank(t^k).  Returned sorted descending; sizes sum to
    the dimension.
    """
    if t.rows != t.cols:
        raise NotNilpotent("operator must be square")
    n = t.rows
    p = t.p
    if not t.power(p).is_zero():
        raise NotNilpotent(f"t^{p} != 0")
    ranks = [n]
    power = FpMatrix.identity(n, p)
    for _ in range(p):
        power = power @ t
        ranks.append(rank(power))
    # ranks[k] = rank(t^k); t^p = 0 so ranks[p] = 0
    sizes: list[int] = []
    for k in range(1, p + 1):
        at_least_k = ranks[k - 1] - ranks[k]
        at_least_k1 = ranks[k] - ranks[k + 1] if k < p else 0
        sizes.extend([k] * (at_least_k - at_least_k1))
    sizes.sort(reverse=True)
    assert sum(sizes) == n
    return sizes
