"""Seeded generators of random instances for tests and the fuzz harness.

Every generator takes a seed (or a random.Random) and is deterministic for
a fixed seed.  Square-zero differentials are produced by planting a
matching between degree-adjacent generators and conjugating by a unipotent
filtration-preserving change of basis, so validity is by construction and
each instance carries its provenance (planted data) where tests need an
oracle.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from .complexes import (
    ChainComplex,
    EquivariantComplex,
    FilteredComplex,
    Generator,
)
from .fp_core import FpMatrix, _row_reduce, rank
from .persistence import Bar, Barcode, scale_barcode
from .ratfun import poly_mat_add, poly_mat_coeff, poly_mat_max_degree, poly_mat_mul, pupow
from .spectral import EquivariantFloerModel
from .tate import _global_d, _global_norm, _global_sigma

__all__ = [
    "random_free_equivariant",
    "random_sigma_matrix",
    "random_sigma_with_multiplicities",
    "random_chain_complex",
    "random_filtered_complex",
    "planted_filtered_complex",
    "random_equivariant_filtered",
    "random_floer_model",
    "random_barcode",
    "adversarial_iterated_pair",
]


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _shuffled(rng: random.Random, items: list) -> list:
    out = list(items)
    rng.shuffle(out)
    return out


# ---------------------------------------------------------------------------
# unipotent changes of basis


def _unipotent_pair(n: int, p: int, entries: list[tuple[int, int, int]]):
    """(P, P^-1) for P = I + E with E supported on the given (row, col, val)
    triples; E must be nilpotent for the Neumann series to terminate."""
    e = np.zeros((n, n), dtype=np.int64)
    for r, c, v in entries:
        e[r, c] = (e[r, c] + v) % p
    pm = (np.eye(n, dtype=np.int64) + e) % p
    inv = np.eye(n, dtype=np.int64)
    term = np.eye(n, dtype=np.int64)
    for _ in range(n):
        term = (-term @ e) % p
        if not term.any():
            break
        inv = (inv + term) % p
    else:
        raise ValueError("conjugation support is not nilpotent")
    return pm, inv


def _conjugate_differential(cx: ChainComplex, pm: np.ndarray, inv: np.ndarray) -> dict:
    d = (pm @ _global_d(cx) @ inv) % cx.p
    ids = [g.id for g in cx.generators]
    out: dict[str, dict[str, int]] = {}
    for c in range(len(ids)):
        col = {ids[r]: int(d[r, c]) for r in np.nonzero(d[:, c])[0]}
        if col:
            out[ids[c]] = col
    return out


# ---------------------------------------------------------------------------
# free equivariant complexes


def random_free_equivariant(p: int, seed, max_blocks: int | None = None) -> EquivariantComplex:
    """A free F_p[Z/pZ]-complex: orbit blocks, a matched-pair differential
    with random circulant coefficients, and a random equivariant
    action-decreasing change of basis."""
    rng = _rng(seed)
    if max_blocks is None:
        max_blocks = max(1, 21 // p)
    m = rng.randint(1, max_blocks)
    degs = [rng.randint(-2, 3) for _ in range(m)]
    acts = [Fraction(rng.randint(0, 30), rng.choice((1, 2, 3))) for _ in range(m)]
    gens = []
    for b in range(m):
        gens.extend(Generator(f"b{b}.{j}", degs[b], acts[b]) for j in range(p))
    sigma = {f"b{b}.{j}": {f"b{b}.{(j + 1) % p}": 1} for b in range(m) for j in range(p)}

    # matched pairs: each block used at most once, so d squares to zero
    blocks = _shuffled(rng, list(range(m)))
    diff: dict[str, dict[str, int]] = {}
    used = set()
    for src in blocks:
        if src in used:
            continue
        targets = [
            t
            for t in blocks
            if t not in used and t != src and degs[t] == degs[src] + 1 and acts[t] < acts[src]
        ]
        if not targets or rng.random() < 0.3:
            continue
        tgt = rng.choice(targets)
        used.update((src, tgt))
        coeffs = [rng.randrange(p) for _ in range(p)]
        if not any(coeffs):
            coeffs[0] = 1 + rng.randrange(p - 1) if p > 1 else 1
        for j in range(p):
            row = {}
            for i, c in enumerate(coeffs):
                if c:
                    row[f"b{tgt}.{(j + i) % p}"] = c
            diff[f"b{src}.{j}"] = row

    # equivariant unipotent conjugation: circulant maps toward lower action.
    # indices refer to the complex's own (sorted) basis.
    base = EquivariantComplex(p, gens, diff, sigma)
    entries = []
    for _ in range(2 * m):
        a, b = rng.randrange(m), rng.randrange(m)
        if degs[a] != degs[b] or not acts[b] < acts[a]:
            continue
        shift, val = rng.randrange(p), 1 + rng.randrange(p - 1)
        for j in range(p):
            entries.append((base.index_of(f"b{b}.{(j + shift) % p}"), base.index_of(f"b{a}.{j}"), val))
    pm, inv = _unipotent_pair(m * p, p, entries)
    return EquivariantComplex(p, gens, _conjugate_differential(base, pm, inv), sigma)


# ---------------------------------------------------------------------------
# sigma matrices with planted module structure


def random_sigma_matrix(p: int, multiplicities, seed) -> FpMatrix:
    """An order-dividing-p matrix whose unipotent-part Jordan multiplicities
    are exactly the given tuple (m_1, ..., m_p for block sizes 1..p)."""
    rng = _rng(seed)
    if len(multiplicities) != p or any(m < 0 for m in multiplicities):
        raise ValueError("multiplicities must be p non-negative counts")
    n = sum((k + 1) * m for k, m in enumerate(multiplicities))
    j = np.zeros((n, n), dtype=np.int64)
    off = 0
    for k, m in enumerate(multiplicities):
        size = k + 1
        for _ in range(m):
            j[off : off + size, off : off + size] = np.eye(size, dtype=np.int64)
            for t in range(size - 1):
                j[off + t, off + t + 1] = 1
            off += size
    if n == 0:
        return FpMatrix(j, p)
    while True:
        q = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        qm = FpMatrix(q, p)
        if rank(qm) == n:
            break
    # invert by row-reducing the augmented identity
    aug = np.concatenate([q, np.eye(n, dtype=np.int64)], axis=1) % p
    qinv = _row_reduce(aug, p)[0][:, n:]
    return FpMatrix((q @ j @ qinv) % p, p)


def random_sigma_with_multiplicities(p: int, seed, max_dim: int = 12):
    """(sigma, multiplicities) with random planted Jordan structure."""
    rng = _rng(seed)
    mults = [0] * p
    budget = rng.randint(1, max_dim)
    while budget > 0:
        size = rng.randint(1, min(p, budget))
        mults[size - 1] += 1
        budget -= size
    mults = tuple(mults)
    return random_sigma_matrix(p, mults, rng), mults


# ---------------------------------------------------------------------------
# plain chain complexes


def random_chain_complex(p: int, seed, max_dim: int = 6, degree_lo: int = -1, degree_hi: int = 3) -> ChainComplex:
    """A random complex: planted matching conjugated by a random unipotent
    degree-preserving change of basis."""
    rng = _rng(seed)
    n = rng.randint(1, max_dim)
    degs = [rng.randint(degree_lo, degree_hi) for _ in range(n)]
    gens = [Generator(f"v{i}", degs[i], 0) for i in range(n)]
    order = _shuffled(rng, list(range(n)))
    diff: dict[str, dict[str, int]] = {}
    used = set()
    for src in order:
        if src in used:
            continue
        targets = [t for t in order if t not in used and t != src and degs[t] == degs[src] + 1]
        if not targets or rng.random() < 0.35:
            continue
        tgt = rng.choice(targets)
        used.update((src, tgt))
        diff[f"v{src}"] = {f"v{tgt}": 1 + rng.randrange(p - 1)}
    base = ChainComplex(p, gens, diff)
    position = {v: i for i, v in enumerate(order)}
    entries = []
    for _ in range(2 * n):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b and degs[a] == degs[b] and position[a] < position[b]:
            entries.append((base.index_of(f"v{b}"), base.index_of(f"v{a}"), rng.randrange(p)))
    pm, inv = _unipotent_pair(n, p, entries)
    return ChainComplex(p, gens, _conjugate_differential(base, pm, inv))


# ---------------------------------------------------------------------------
# filtered complexes


def _random_levels(rng: random.Random, count: int) -> list[Fraction]:
    vals = set()
    while len(vals) < count:
        vals.add(Fraction(rng.randint(-12, 24), rng.choice((1, 2, 4))))
    return sorted(vals)


def random_filtered_complex(
    p: int, seed, max_gens: int = 15, max_levels: int = 6, degree_lo: int = -1, degree_hi: int = 3
) -> FilteredComplex:
    """A random strictly action-filtered complex with a generic square-zero
    differential (planted matching + action-decreasing conjugation)."""
    rng = _rng(seed)
    n = rng.randint(1, max_gens)
    levels = _random_levels(rng, rng.randint(1, max_levels))
    degs = [rng.randint(degree_lo, degree_hi) for _ in range(n)]
    acts = [rng.choice(levels) for _ in range(n)]
    gens = [Generator(f"v{i}", degs[i], acts[i]) for i in range(n)]
    order = _shuffled(rng, list(range(n)))
    diff: dict[str, dict[str, int]] = {}
    used = set()
    for src in order:
        if src in used:
            continue
        targets = [
            t
            for t in order
            if t not in used and t != src and degs[t] == degs[src] + 1 and acts[t] < acts[src]
        ]
        if not targets or rng.random() < 0.3:
            continue
        tgt = rng.choice(targets)
        used.update((src, tgt))
        diff[f"v{src}"] = {f"v{tgt}": 1 + rng.randrange(p - 1)}
    base = FilteredComplex(p, gens, diff)
    entries = []
    for _ in range(2 * n):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b and degs[a] == degs[b] and acts[b] < acts[a]:
            entries.append((base.index_of(f"v{b}"), base.index_of(f"v{a}"), rng.randrange(p)))
    pm, inv = _unipotent_pair(n, p, entries)
    return FilteredComplex(p, gens, _conjugate_differential(base, pm, inv))


def planted_filtered_complex(p: int, finite_bars, infinite_starts, seed, degree_lo: int = 0):
    """(complex, barcode) realizing the given bars exactly.

    Each finite (a, b] becomes a matched generator pair dying at b; each
    infinite start becomes an untouched generator; the whole complex is then
    conjugated by an action-decreasing unipotent map, which does not change
    the barcode.
    """
    rng = _rng(seed)
    gens = []
    diff: dict[str, dict[str, int]] = {}
    bars = []
    i = 0
    for a, b, mult in finite_bars:
        a, b = Fraction(a), Fraction(b)
        for _ in range(mult):
            k = degree_lo + rng.randint(0, 2)
            gens.append(Generator(f"t{i}", k + 1, a))
            gens.append(Generator(f"s{i}", k, b))
            diff[f"s{i}"] = {f"t{i}": 1 + rng.randrange(p - 1)}
            i += 1
        bars.append(Bar(a, b, mult))
    for j, a in enumerate(infinite_starts):
        gens.append(Generator(f"e{j}", degree_lo + rng.randint(0, 3), Fraction(a)))
        bars.append(Bar(Fraction(a), None))
    base = FilteredComplex(p, gens, diff)
    n = len(gens)
    degs = [g.degree for g in base.generators]
    acts = [g.action for g in base.generators]
    entries = []
    for _ in range(2 * n):
        x, y = rng.randrange(n), rng.randrange(n)
        if x != y and degs[x] == degs[y] and acts[y] < acts[x]:
            entries.append((y, x, rng.randrange(p)))
    pm, inv = _unipotent_pair(n, p, entries)
    fc = FilteredComplex(p, gens, _conjugate_differential(base, pm, inv))
    return fc, Barcode(p, bars)


# ---------------------------------------------------------------------------
# equivariant filtered complexes and models


def random_equivariant_filtered(
    p: int, seed, max_orbits: int = 3, max_trivial: int = 4, degree_lo: int = -1, degree_hi: int = 2
) -> EquivariantComplex:
    """An equivariant, strictly action-filtered complex mixing free orbits
    and trivial generators, with an equivariant matched-pair differential
    and an equivariant action-decreasing change of basis."""
    rng = _rng(seed)
    n_orb = rng.randint(0, max_orbits)
    n_triv = rng.randint(0 if n_orb else 1, max_trivial)
    units: list[dict] = []
    for b in range(n_orb):
        units.append({"kind": "orbit", "name": f"o{b}", "deg": rng.randint(degree_lo, degree_hi)})
    for t in range(n_triv):
        units.append({"kind": "trivial", "name": f"t{t}", "deg": rng.randint(degree_lo, degree_hi)})
    levels = _random_levels(rng, rng.randint(1, 4))
    for u in units:
        u["act"] = rng.choice(levels)
    gens = []
    sigma: dict[str, dict[str, int]] = {}
    for u in units:
        if u["kind"] == "orbit":
            for j in range(p):
                gens.append(Generator(f"{u['name']}.{j}", u["deg"], u["act"]))
                sigma[f"{u['name']}.{j}"] = {f"{u['name']}.{(j + 1) % p}": 1}
        else:
            gens.append(Generator(u["name"], u["deg"], u["act"]))

    def unit_ids(u):
        return [f"{u['name']}.{j}" for j in range(p)] if u["kind"] == "orbit" else [u["name"]]

    # equivariant matched pairs between any unit kinds
    order = _shuffled(rng, list(range(len(units))))
    diff: dict[str, dict[str, int]] = {}
    used = set()
    for si in order:
        if si in used:
            continue
        s = units[si]
        targets = [
            ti
            for ti in order
            if ti not in used and ti != si and units[ti]["deg"] == s["deg"] + 1 and units[ti]["act"] < s["act"]
        ]
        if not targets or rng.random() < 0.3:
            continue
        ti = rng.choice(targets)
        used.update((si, ti))
        t = units[ti]
        val = 1 + rng.randrange(p - 1)
        if s["kind"] == "orbit" and t["kind"] == "orbit":
            shift = rng.randrange(p)
            for j in range(p):
                diff[f"{s['name']}.{j}"] = {f"{t['name']}.{(j + shift) % p}": val}
        elif s["kind"] == "orbit" and t["kind"] == "trivial":
            for j in range(p):
                diff[f"{s['name']}.{j}"] = {t["name"]: val}
        elif s["kind"] == "trivial" and t["kind"] == "orbit":
            diff[s["name"]] = {f"{t['name']}.{j}": val for j in range(p)}
        else:
            diff[s["name"]] = {t["name"]: val}

    base = EquivariantComplex(p, gens, diff, sigma)
    # equivariant conjugation entries between same-degree lower-action units
    index_of = {g.id: i for i, g in enumerate(base.generators)}
    entries = []
    for _ in range(2 * len(units)):
        a, b = rng.randrange(len(units)), rng.randrange(len(units))
        ua, ub = units[a], units[b]
        if ua["deg"] != ub["deg"] or not ub["act"] < ua["act"]:
            continue
        val = 1 + rng.randrange(p - 1)
        if ua["kind"] == "orbit" and ub["kind"] == "orbit":
            shift = rng.randrange(p)
            for j in range(p):
                entries.append((index_of[f"{ub['name']}.{(j + shift) % p}"], index_of[f"{ua['name']}.{j}"], val))
        elif ua["kind"] == "orbit" and ub["kind"] == "trivial":
            for j in range(p):
                entries.append((index_of[ub["name"]], index_of[f"{ua['name']}.{j}"], val))
        elif ua["kind"] == "trivial" and ub["kind"] == "orbit":
            for j in range(p):
                entries.append((index_of[f"{ub['name']}.{j}"], index_of[ua["name"]], val))
        else:
            entries.append((index_of[ub["name"]], index_of[ua["name"]], val))
    pm, inv = _unipotent_pair(len(gens), p, entries)
    return EquivariantComplex(p, gens, _conjugate_differential(base, pm, inv), sigma)


def random_floer_model(p: int, seed, deform: bool = True, **kwargs) -> EquivariantFloerModel:
    """A valid equivariant model over a genuine base; with deform, the
    default differential is conjugated by I + uR for a random R of degree
    -2 strictly decreasing action, which plants higher parameter terms
    while preserving all page dimensions over the Novikov variable."""
    rng = _rng(seed)
    base = random_equivariant_filtered(p, rng, **kwargs)
    n = base.dim()
    d = _global_d(base)
    s = _global_sigma(base)
    nm = _global_norm(base)

    def as_poly(m, shift=0):
        return [[pupow(shift, int(v), p) if int(v) % p else () for v in row] for row in m]

    a0 = as_poly(d)
    b0 = as_poly(nm, shift=1)
    c0 = as_poly((np.eye(n, dtype=np.int64) - s) % p)
    d0 = as_poly((-d) % p)
    if deform and n:
        degs = [g.degree for g in base.generators]
        acts = [g.action for g in base.generators]
        r = np.zeros((n, n), dtype=np.int64)
        for _ in range(2 * n):
            x, y = rng.randrange(n), rng.randrange(n)
            if degs[y] == degs[x] - 2 and acts[y] < acts[x]:
                r[y, x] = rng.randrange(p)
        ident = [[(1,) if i == j else () for j in range(n)] for i in range(n)]
        q = poly_mat_add(ident, as_poly(r, shift=1), p)
        # Neumann series for the inverse; uR is nilpotent since R strictly
        # decreases action
        minus_ur = as_poly((-r) % p, shift=1)
        qinv = ident
        term = ident
        while True:
            term = poly_mat_mul(term, minus_ur, p)
            if poly_mat_max_degree(term) < 0:
                break
            qinv = poly_mat_add(qinv, term, p)

        def conj(mat):
            return poly_mat_mul(poly_mat_mul(q, mat, p), qinv, p)

        a0, b0, c0, d0 = conj(a0), conj(b0), conj(c0), conj(d0)
    terms = {}
    for mat, alpha, parity in ((a0, 0, 0), (c0, 0, 1), (d0, 1, 1), (b0, 1, 0)):
        top = poly_mat_max_degree(mat)
        for j in range(top + 1):
            coeff = np.array(poly_mat_coeff(mat, j), dtype=np.int64) if n else np.zeros((0, 0), dtype=np.int64)
            if not coeff.any():
                continue
            i = 2 * j + parity
            terms[(i, alpha)] = coeff
    assert (0, 1) not in terms
    i_max = max((i for i, _ in terms), default=2)
    return EquivariantFloerModel(base, terms, max(2, i_max))


# ---------------------------------------------------------------------------
# barcodes


def random_barcode(
    p: int,
    seed,
    max_bars: int = 8,
    normalized: bool = False,
    distinct_infinite: bool = False,
    allow_finite: bool = True,
) -> Barcode:
    """A random barcode.  normalized: all infinite bars start at 0 and no
    finite bars appear (identity-like).  distinct_infinite: at least two
    infinite bars with different starting points."""
    rng = _rng(seed)
    bars = []
    if normalized:
        for _ in range(rng.randint(1, max_bars)):
            bars.append(Bar(Fraction(0), None, rng.randint(1, 3)))
        return Barcode(p, bars)
    count = rng.randint(1, max_bars)
    for _ in range(count):
        start = Fraction(rng.randint(-20, 20), rng.choice((1, 2, 3, 4)))
        if not allow_finite or rng.random() < 0.4:
            bars.append(Bar(start, None, rng.randint(1, 3)))
        else:
            bars.append(Bar(start, start + Fraction(rng.randint(1, 10), rng.choice((1, 2))), rng.randint(1, 3)))
    if distinct_infinite:
        starts = {b.start for b in bars if not b.finite}
        while len(starts) < 2:
            s = Fraction(rng.randint(-20, 20), rng.choice((1, 2, 3)))
            if s not in starts:
                bars.append(Bar(s, None))
                starts.add(s)
    return Barcode(p, bars)


def adversarial_iterated_pair(b1: Barcode, p: int, seed):
    """(b1, bp) where bp is the scaled barcode with one finite bar's
    multiplicity reduced; the count inequality must fail at that bar."""
    rng = _rng(seed)
    scaled = scale_barcode(b1, p)
    finite = [i for i, bar in enumerate(scaled.bars) if bar.finite]
    if not finite:
        raise ValueError("need at least one finite bar to delete")
    k = rng.choice(finite)
    bars = []
    for i, bar in enumerate(scaled.bars):
        if i == k:
            if bar.multiplicity > 1:
                bars.append(Bar(bar.start, bar.end, bar.multiplicity - 1))
        else:
            bars.append(bar)
    return b1, Barcode(b1.p, bars)
