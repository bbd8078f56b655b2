"""The cyclic-group Morse model on odd spheres and its Euler-class constants.

The infinite lens space is approached through finite skeleta: each level l
contributes 2p critical points, p of even index 2l (coordinate z_l a p-th
root of -1) and p of odd index 2l+1 (z_l a p-th root of 1).  The resulting
cochain complex is the standard alternating resolution

    F_p[G] --(1-sigma)--> F_p[G] --N--> F_p[G] --(1-sigma)--> ...

whose homology is F_p in degree 0 and zero in the interior degrees; the
last degree is a truncation boundary and carries no claim.

The local invertibility constants come from the top Chern class of n
copies of the reduced regular representation: (-1)^n u^{n(p-1)}, with the
sign produced by the product of all units of F_p (Wilson's theorem).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .complexes import ChainComplex, Generator
from .errors import MalformedInput
from .fp_core import FpScalar, check_prime
from .tate import RpElement

__all__ = [
    "CriticalPoint",
    "EulerConstant",
    "enumerate_critical_points",
    "resolution_homology",
    "wilson_constant",
    "local_euler_constant",
]


@dataclass(frozen=True)
class CriticalPoint:
    """A critical circle representative on the sphere skeleton.

    level is the coordinate index l; root_index locates the distinguished
    coordinate among the p roots (of 1 for odd parity, of -1 for even);
    the Morse index is 2*level plus one for odd parity.
    """

    p: int
    level: int
    root_index: int
    parity: str  # "even" or "odd"

    def __post_init__(self):
        check_prime(self.p)
        if self.level < 0:
            raise MalformedInput("level must be non-negative")
        if self.parity not in ("even", "odd"):
            raise MalformedInput(f"parity must be 'even' or 'odd', got {self.parity!r}")
        object.__setattr__(self, "root_index", self.root_index % self.p)

    @property
    def index(self) -> int:
        return 2 * self.level + (1 if self.parity == "odd" else 0)

    def coordinate(self) -> complex:
        """Numeric value of the distinguished coordinate z_level."""
        root = cmath.exp(2j * cmath.pi * self.root_index / self.p)
        return root if self.parity == "odd" else -root


def enumerate_critical_points(p: int, l_max: int) -> list[CriticalPoint]:
    """All critical points up to level l_max: exactly p per Morse index,
    2p(l_max + 1) in total."""
    check_prime(p)
    if l_max < 0:
        raise MalformedInput("l_max must be non-negative")
    return [
        CriticalPoint(p, l, k, parity)
        for l in range(l_max + 1)
        for parity in ("even", "odd")
        for k in range(p)
    ]


def resolution_homology(p: int, length: int) -> tuple[int, ...]:
    """Homology dimensions of the length-term alternating resolution.

    Degree k holds one copy of F_p[G]; the map out of degree k is
    1 - sigma for even k and the norm N for odd k.  Returns one dimension
    per degree; all but the first and last must vanish, and the last is a
    truncation artifact with no vanishing claim.
    """
    check_prime(p)
    if length < 2:
        raise MalformedInput("resolution needs at least 2 terms")
    gens = [Generator(f"e{k}.{j}", k, 0) for k in range(length) for j in range(p)]
    diff: dict[str, dict[str, int]] = {}
    for k in range(length - 1):
        for j in range(p):
            if k % 2 == 0:
                # (1 - sigma) e_j = e_j - e_{j+1}
                diff[f"e{k}.{j}"] = {f"e{k + 1}.{j}": 1, f"e{k + 1}.{(j + 1) % p}": p - 1}
            else:
                diff[f"e{k}.{j}"] = {f"e{k + 1}.{i}": 1 for i in range(p)}
    cx = ChainComplex(p, gens, diff)
    dims = cx.homology_dims()
    return tuple(dims.get(k, 0) for k in range(length))


def wilson_constant(p: int) -> FpScalar:
    """Product of all units of F_p; always the residue p - 1."""
    check_prime(p)
    out = 1
    for a in range(2, p):
        out = (out * a) % p
    return FpScalar(out, p)


@dataclass(frozen=True)
class EulerConstant:
    """Top Chern-class coefficient of n reduced regular representations:
    the monomial sign * u^(n(p-1)) with sign = (-1)^n in F_p."""

    p: int
    n: int
    sign: FpScalar
    u_exponent: int

    def to_rp_element(self) -> RpElement:
        return RpElement.monomial(self.u_exponent, 0, self.sign.value, self.p)


def local_euler_constant(n: int, p: int) -> EulerConstant:
    """The constant for n copies: sign (-1)^n (as a Wilson-product power),
    u-exponent n(p-1)."""
    check_prime(p)
    if n < 0:
        raise MalformedInput("n must be non-negative")
    w = wilson_constant(p).value
    return EulerConstant(p=p, n=n, sign=FpScalar(pow(w, n, p), p), u_exponent=n * (p - 1))
