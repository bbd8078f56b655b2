"""Cochain complexes over F_p with Z/pZ-action and action filtration.

A complex is a finite set of generators, each carrying a cohomological
degree and a rational action value, together with a degree +1 differential.
The equivariant variant adds a degree- and action-preserving operator sigma
with sigma^p = 1 commuting with the differential.  The filtered variant
requires the differential to strictly decrease action, which is what makes
barcodes and the action spectral sequence well defined.

Generators are stored sorted by id, so matrix layouts, homology
representatives, and JSON output are reproducible across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    InadmissibleWindow,
    InvalidComplex,
    MalformedInput,
)
from .fp_core import FpMatrix, RrefResult, check_prime, rref, solve

CoeffMap = dict[str, dict[str, int]]


@dataclass(frozen=True, order=True)
class Generator:
    id: str
    degree: int
    action: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise MalformedInput("generator id must be a nonempty string")
        object.__setattr__(self, "action", Fraction(self.action))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    checks: dict[str, bool]
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ActionWindow:
    """Half-open action interval (lower, upper]; None means infinite."""

    lower: Fraction | None = None
    upper: Fraction | None = None

    def __post_init__(self):
        lo = None if self.lower is None else Fraction(self.lower)
        hi = None if self.upper is None else Fraction(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo is not None and hi is not None and not lo < hi:
            raise InadmissibleWindow(f"need lower < upper, got ({lo}, {hi}]")

    def contains(self, a: Fraction) -> bool:
        if self.lower is not None and a <= self.lower:
            return False
        if self.upper is not None and a > self.upper:
            return False
        return True

    def scaled(self, factor: int) -> "ActionWindow":
        """The window factor * (lower, upper]; factor must be positive."""
        if factor <= 0:
            raise InadmissibleWindow("scale factor must be positive")
        lo = None if self.lower is None else self.lower * factor
        hi = None if self.upper is None else self.upper * factor
        return ActionWindow(lo, hi)

    def __repr__(self) -> str:
        lo = "-inf" if self.lower is None else str(self.lower)
        hi = "inf" if self.upper is None else str(self.upper)
        return f"ActionWindow(({lo}, {hi}])"


def _clean_coeff_map(raw: CoeffMap, ids: set[str], p: int, what: str) -> CoeffMap:
    out: CoeffMap = {}
    for src, row in raw.items():
        if src not in ids:
            raise MalformedInput(f"{what} references unknown generator {src!r}")
        cleaned = {}
        for tgt, c in row.items():
            if tgt not in ids:
                raise MalformedInput(f"{what} references unknown generator {tgt!r}")
            if not isinstance(c, int):
                raise MalformedInput(f"{what} coefficient for {src!r}->{tgt!r} is not an int")
            c %= p
            if c:
                cleaned[tgt] = c
        if cleaned:
            out[src] = cleaned
    return out


class ChainComplex:
    """Finite cochain complex over F_p with action-labelled generators.

    differential maps a generator id to the coefficient dict of its image;
    d must raise degree by exactly 1 and satisfy d(d(x)) = 0.
    """

    def __init__(self, p: int, generators, differential: CoeffMap, *, check: bool = True):
        check_prime(p)
        self.p = p
        gens = tuple(sorted(generators, key=lambda g: g.id))
        if len({g.id for g in gens}) != len(gens):
            raise MalformedInput("generator ids must be unique")
        self.generators = gens
        self._index = {g.id: i for i, g in enumerate(gens)}
        self.differential = _clean_coeff_map(differential, set(self._index), p, "differential")
        self._deg_index: dict[int, list[int]] = {}
        for i, g in enumerate(gens):
            self._deg_index.setdefault(g.degree, []).append(i)
        self._block_cache: dict[int, FpMatrix] = {}
        self._homology_cache: dict[int, tuple[list[np.ndarray], RrefResult]] = {}
        if check:
            bad = self._structure_violations()
            if bad:
                raise InvalidComplex("; ".join(bad))

    # -- structure ---------------------------------------------------------

    def _structure_violations(self) -> list[str]:
        out = []
        for src, row in self.differential.items():
            dsrc = self.generators[self._index[src]].degree
            for tgt in row:
                if self.generators[self._index[tgt]].degree != dsrc + 1:
                    out.append(f"d({src}) hits {tgt}, which is not one degree higher")
        for k in self.degrees():
            prod = self.d_block(k + 1) @ self.d_block(k)
            if not prod.is_zero():
                out.append(f"d.d != 0 out of degree {k}")
        return out

    def degrees(self) -> list[int]:
        return sorted(self._deg_index)

    def dim(self, k: int | None = None) -> int:
        if k is None:
            return len(self.generators)
        return len(self._deg_index.get(k, []))

    def degree_indices(self, k: int) -> list[int]:
        return list(self._deg_index.get(k, []))

    def generator(self, gid: str) -> Generator:
        return self.generators[self._index[gid]]

    def index_of(self, gid: str) -> int:
        return self._index[gid]

    def d_block(self, k: int) -> FpMatrix:
        """Matrix of d from degree k to degree k+1 in stored generator order."""
        if k in self._block_cache:
            return self._block_cache[k]
        src = self._deg_index.get(k, [])
        tgt = self._deg_index.get(k + 1, [])
        pos = {idx: r for r, idx in enumerate(tgt)}
        a = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for c, i in enumerate(src):
            row = self.differential.get(self.generators[i].id)
            if not row:
                continue
            for tid, coeff in row.items():
                r = pos.get(self._index[tid])
                if r is not None:
                    a[r, c] = coeff
        m = FpMatrix(a, self.p)
        self._block_cache[k] = m
        return m

    def matrix_in_order(self, order: list[int]) -> FpMatrix:
        """Full differential matrix with rows/columns indexed by `order`."""
        pos = {idx: r for r, idx in enumerate(order)}
        a = np.zeros((len(order), len(order)), dtype=np.int64)
        for c, i in enumerate(order):
            row = self.differential.get(self.generators[i].id)
            if not row:
                continue
            for tid, coeff in row.items():
                j = self._index[tid]
                if j in pos:
                    a[pos[j], c] = coeff
        return FpMatrix(a, self.p)

    # -- homology ----------------------------------------------------------

    def _homology_data(self, k: int):
        """(representatives, solver rref) for H^k; reps are cocycle vectors."""
        if k in self._homology_cache:
            return self._homology_cache[k]
        dk = self.d_block(k)
        dprev = self.d_block(k - 1)
        ker = rref(dk).kernel_basis
        im = rref(dprev).image_basis
        n = self.dim(k)
        cols = list(im) + list(ker)
        stacked = FpMatrix(
            np.array(cols, dtype=np.int64).T if cols else np.zeros((n, 0), dtype=np.int64),
            self.p,
        )
        res = rref(stacked)
        reps = [ker[j - len(im)] for j in res.pivots if j >= len(im)]
        assert len(reps) == len(ker) - len(im)
        self._homology_cache[k] = (reps, res)
        return self._homology_cache[k]

    def homology_basis(self, k: int) -> list[np.ndarray]:
        """Cocycle representatives of a basis of H^k, in degree-k coordinates."""
        return [v.copy() for v in self._homology_data(k)[0]]

    def homology_dims(self) -> dict[int, int]:
        out = {}
        for k in self.degrees():
            d = len(self._homology_data(k)[0])
            if d:
                out[k] = d
        return out

    def express_in_homology(self, k: int, v: np.ndarray) -> np.ndarray:
        """Coefficients of the class [v] in the homology_basis(k) order."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if self.d_block(k).mul_vec(v).any():
            raise InvalidComplex("vector is not a cocycle")
        reps, _ = self._homology_data(k)
        im = rref(self.d_block(k - 1)).image_basis
        cols = list(im) + list(reps)
        n = self.dim(k)
        stacked = FpMatrix(
            np.array(cols, dtype=np.int64).T if cols else np.zeros((n, 0), dtype=np.int64),
            self.p,
        )
        x = solve(stacked, v)
        if x is None:
            raise InvalidComplex("cocycle not in span of homology data")
        return x[len(im):] % self.p

    # -- misc ----------------------------------------------------------------

    def actions(self) -> list[Fraction]:
        return sorted({g.action for g in self.generators})

    def filtration_order(self) -> list[int]:
        """Generator indices sorted by (action, id)."""
        return sorted(range(len(self.generators)), key=lambda i: (self.generators[i].action, self.generators[i].id))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(p={self.p}, dims={ {k: self.dim(k) for k in self.degrees()} })"


class EquivariantComplex(ChainComplex):
    """ChainComplex with a Z/pZ-action sigma commuting with d.

    sigma maps each generator id to its image coefficients; omitted ids act
    as the identity on that generator.
    """

    def __init__(self, p, generators, differential, sigma: CoeffMap | None = None, *, check=True):
        super().__init__(p, generators, differential, check=check)
        sigma = sigma or {}
        self.sigma = _clean_coeff_map(sigma, set(self._index), p, "sigma")
        self._sigma_cache: dict[int, FpMatrix] = {}
        if check:
            report = self.validate()
            if not report.ok:
                raise InvalidComplex("; ".join(report.violations))

    def sigma_block(self, k: int) -> FpMatrix:
        if k in self._sigma_cache:
            return self._sigma_cache[k]
        idx = self._deg_index.get(k, [])
        pos = {i: r for r, i in enumerate(idx)}
        a = np.zeros((len(idx), len(idx)), dtype=np.int64)
        for r, i in enumerate(idx):
            gid = self.generators[i].id
            row = self.sigma.get(gid)
            if row is None:
                a[r, r] = 1
                continue
            for tid, coeff in row.items():
                j = self._index[tid]
                if j not in pos:
                    raise InvalidComplex(f"sigma({gid}) leaves degree {k}")
                a[pos[j], r] = coeff
        m = FpMatrix(a, self.p)
        self._sigma_cache[k] = m
        return m

    def norm_block(self, k: int) -> FpMatrix:
        """1 + sigma + ... + sigma^(p-1) in degree k."""
        s = self.sigma_block(k)
        out = FpMatrix.identity(self.dim(k), self.p)
        acc = FpMatrix.identity(self.dim(k), self.p)
        for _ in range(self.p - 1):
            acc = s @ acc
            out = out + acc
        return out

    def validate(self, *, strict_action: bool = False) -> ValidationReport:
        """Check the structural invariants; never raises.

        strict_action additionally demands that d strictly decrease action,
        the requirement for filtered use.
        """
        checks = {
            "unique_ids": True,
            "degree_one_differential": True,
            "square_zero": True,
            "sigma_structure": True,
            "equivariance": True,
        }
        violations: list[str] = []
        structural = self._structure_violations()
        for msg in structural:
            if "degree" in msg:
                checks["degree_one_differential"] = False
            else:
                checks["square_zero"] = False
        violations.extend(structural)

        for src, row in self.sigma.items():
            g = self.generator(src)
            for tgt, _ in row.items():
                h = self.generator(tgt)
                if h.degree != g.degree:
                    checks["sigma_structure"] = False
                    violations.append(f"sigma({src}) changes degree")
                if h.action != g.action:
                    checks["sigma_structure"] = False
                    violations.append(f"sigma({src}) changes action")
        if checks["sigma_structure"]:
            for k in self.degrees():
                s = self.sigma_block(k)
                if s.power(self.p) != FpMatrix.identity(self.dim(k), self.p):
                    checks["sigma_structure"] = False
                    violations.append(f"sigma^{self.p} != 1 in degree {k}")
                dk = self.d_block(k)
                if dk @ s != self.sigma_block(k + 1) @ dk:
                    checks["equivariance"] = False
                    violations.append(f"sigma does not commute with d out of degree {k}")

        if strict_action:
            checks["action_decrease"] = True
            for src, row in self.differential.items():
                a = self.generator(src).action
                for tgt in row:
                    if not self.generator(tgt).action < a:
                        checks["action_decrease"] = False
                        violations.append(f"d({src}) does not strictly decrease action at {tgt}")
        ok = all(checks.values())
        return ValidationReport(ok, checks, violations)


class FilteredComplex(ChainComplex):
    """ChainComplex whose differential strictly decreases action."""

    def __init__(self, p, generators, differential, *, check=True):
        super().__init__(p, generators, differential, check=check)
        if check:
            for src, row in self.differential.items():
                a = self.generator(src).action
                for tgt in row:
                    if not self.generator(tgt).action < a:
                        raise InvalidComplex(
                            f"d({src}) does not strictly decrease action at {tgt}"
                        )

    def levels(self) -> list[Fraction]:
        return self.actions()


# ---------------------------------------------------------------------------
# operations


def tensor_power(base: ChainComplex, power: int | None = None) -> EquivariantComplex:
    """p-fold tensor power with the signed cyclic permutation action.

    Word generators are tuples of base generators; degree and action add.
    The differential follows the Leibniz rule with Koszul signs, and sigma
    rotates factors with the Koszul sign of moving the last factor to the
    front.  The result is a genuine Z/pZ-complex for any base complex.
    """
    p = base.p
    r = p if power is None else power
    if r != p:
        raise MalformedInput("tensor power must equal the coefficient prime")
    ids = [g.id for g in base.generators]
    degs = {g.id: g.degree for g in base.generators}
    acts = {g.id: g.action for g in base.generators}

    def word_id(word: tuple[str, ...]) -> str:
        return "|".join(word)

    from itertools import product as _product

    words = list(_product(ids, repeat=p))
    gens = [
        Generator(word_id(w), sum(degs[x] for x in w), sum((acts[x] for x in w), Fraction(0)))
        for w in words
    ]
    diff: CoeffMap = {}
    for w in words:
        row: dict[str, int] = {}
        sign_deg = 0
        for i, x in enumerate(w):
            drow = base.differential.get(x)
            if drow:
                s = -1 if sign_deg % 2 else 1
                for tgt, c in drow.items():
                    nw = w[:i] + (tgt,) + w[i + 1:]
                    key = word_id(nw)
                    row[key] = (row.get(key, 0) + s * c) % p
            sign_deg += degs[x]
        row = {k: v for k, v in row.items() if v}
        if row:
            diff[word_id(w)] = row
    sigma: CoeffMap = {}
    for w in words:
        last = w[-1]
        rest_deg = sum(degs[x] for x in w[:-1])
        s = -1 if (degs[last] * rest_deg) % 2 else 1
        sigma[word_id(w)] = {word_id((last,) + w[:-1]): s % p}
    return EquivariantComplex(p, gens, diff, sigma)


def invariants_coinvariants(V: EquivariantComplex) -> tuple[dict[int, int], dict[int, int]]:
    """Dimensions of ker(1 - sigma) and coker(1 - sigma) per degree."""
    inv: dict[int, int] = {}
    coinv: dict[int, int] = {}
    for k in V.degrees():
        n = V.dim(k)
        one_minus = FpMatrix.identity(n, V.p) - V.sigma_block(k)
        r = rref(one_minus).rank
        if n - r:
            inv[k] = n - r
            coinv[k] = n - r
    return inv, coinv


def window_truncate(V: ChainComplex, window: ActionWindow):
    """Subquotient complex spanned by generators with action in the window.

    Differential entries leaving the window are dropped; for a filtered
    complex this is the quotient of one action sublevel by another, so the
    result is again a complex of the same kind.
    """
    keep = {g.id for g in V.generators if window.contains(g.action)}
    gens = [g for g in V.generators if g.id in keep]
    diff = {
        src: {t: c for t, c in row.items() if t in keep}
        for src, row in V.differential.items()
        if src in keep
    }
    if isinstance(V, EquivariantComplex):
        sigma = {s: dict(row) for s, row in V.sigma.items() if s in keep}
        return EquivariantComplex(V.p, gens, diff, sigma)
    if isinstance(V, FilteredComplex):
        return FilteredComplex(V.p, gens, diff)
    return ChainComplex(V.p, gens, diff)


# ---------------------------------------------------------------------------
# JSON


def _action_to_json(a: Fraction) -> dict:
    return {"num": a.numerator, "den": a.denominator}


def _action_from_json(v) -> Fraction:
    if isinstance(v, bool):
        raise MalformedInput("action must be a number or {num, den}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, dict) and set(v) <= {"num", "den"}:
        try:
            return Fraction(int(v["num"]), int(v.get("den", 1)))
        except (KeyError, ZeroDivisionError, ValueError) as e:
            raise MalformedInput(f"bad action fraction: {v!r}") from e
    raise MalformedInput(f"bad action value: {v!r}")


def complex_to_json(V: ChainComplex) -> dict:
    out = {
        "p": V.p,
        "generators": [
            {"id": g.id, "degree": g.degree, "action": _action_to_json(g.action)}
            for g in V.generators
        ],
        "differential": {s: dict(row) for s, row in sorted(V.differential.items())},
    }
    if isinstance(V, EquivariantComplex):
        out["sigma"] = {s: dict(row) for s, row in sorted(V.sigma.items())}
    if isinstance(V, FilteredComplex):
        out["filtered"] = True
    return out


def complex_from_json(data, *, expect: str | None = None):
    """Rebuild a complex from its JSON dict (or JSON string).

    expect: None infers the richest type the payload supports ("sigma" key
    gives an EquivariantComplex, "filtered": true a FilteredComplex);
    passing "chain", "equivariant", or "filtered" forces one.
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise MalformedInput(f"invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise MalformedInput("complex JSON must be an object")
    try:
        p = int(data["p"])
        raw_gens = data["generators"]
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedInput("complex JSON needs integer 'p' and 'generators'") from e
    if not isinstance(raw_gens, list):
        raise MalformedInput("'generators' must be a list")
    gens = []
    for item in raw_gens:
        if not isinstance(item, dict) or "id" not in item or "degree" not in item:
            raise MalformedInput(f"bad generator entry: {item!r}")
        gens.append(
            Generator(
                str(item["id"]),
                int(item["degree"]),
                _action_from_json(item.get("action", 0)),
            )
        )
    diff = data.get("differential", {})
    if not isinstance(diff, dict) or not all(isinstance(r, dict) for r in diff.values()):
        raise MalformedInput("'differential' must map ids to coefficient objects")
    diff = {str(s): {str(t): int(c) for t, c in row.items()} for s, row in diff.items()}
    kind = expect
    if kind is None:
        if "sigma" in data:
            kind = "equivariant"
        elif data.get("filtered"):
            kind = "filtered"
        else:
            kind = "chain"
    if kind == "equivariant":
        sigma = data.get("sigma", {})
        if not isinstance(sigma, dict) or not all(isinstance(r, dict) for r in sigma.values()):
            raise MalformedInput("'sigma' must map ids to coefficient objects")
        sigma = {str(s): {str(t): int(c) for t, c in row.items()} for s, row in sigma.items()}
        return EquivariantComplex(p, gens, diff, sigma)
    if kind == "filtered":
        return FilteredComplex(p, gens, diff)
    if kind == "chain":
        return ChainComplex(p, gens, diff)
    raise MalformedInput(f"unknown complex kind {kind!r}")
