"""Spectral sequences of the action filtration and the algebraic u-filtration.

Two filtrations drive this module.  A filtered complex is graded by its
real action values: the differential strictly lowers action, the sorted
distinct values give a finite decreasing filtration, and the standard
subquotient pages E_r^s converge to total homology.

The equivariant model filters by powers of u instead.  Its differential on
V<1, theta> over F_p[[u]] is assembled from a family of maps d_alpha^i
(alpha marks the theta-component of the source; i is the parameter index,
with d_alpha^i of internal degree 1 - i + alpha):

    d(x ox 1)     = sum_even_i  u^(i/2) d_0^i x ox 1
                  + sum_odd_i   u^((i-1)/2) d_0^i x ox theta
    d(x ox theta) = sum_odd_i   u^((i-1)/2) d_1^i x ox theta
                  + sum_even_i>=2 u^(i/2) d_1^i x ox 1

Only d_0^0 and d_1^1 preserve the u-filtration level, so the E_1 page is
the d_0^0-homology tensor R_p, with page differential induced by d_0^1 and
d_1^2; when the model comes from a genuine group action these induce
1 - sigma* and the norm N*, making E_2 the group cohomology of H(V).  The
infinity page is computed directly as the Tate cohomology of the assembled
matrix, and must fit under E_2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import ChainComplex, EquivariantComplex, FilteredComplex
from .errors import (
    FiltrationViolation,
    InvalidComplex,
    MalformedInput,
    NotSquareZero,
)
from .fp_core import FpMatrix, rank, rref
from .module_decomp import ModuleDecomposition, decompose, tate_and_invariant_dims
from .ratfun import poly_matrix_ranks, pupow
from .tate import _global_d, _global_norm, _global_sigma, assemble_parity_blocks, blocks_square_zero

__all__ = [
    "FilteredComplex",
    "EquivariantFloerModel",
    "SpectralSequencePages",
    "PageData",
    "AlgebraicSSPages",
    "action_ss_pages",
    "algebraic_ss_pages",
    "model_to_json",
    "model_from_json",
]


# ---------------------------------------------------------------------------
# action spectral sequence


@dataclass(frozen=True)
class PageData:
    r: int
    dims: dict  # (filtration index s, degree k) -> dim E_r^{s,k}
    differential_ranks: dict  # (s, k) -> rank of d_r: E_r^{s,k} -> E_r^{s+r,k+1}

    def total(self) -> int:
        return sum(self.dims.values())

    def dims_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (_, k), v in self.dims.items():
            out[k] = out.get(k, 0) + v
        return out


@dataclass(frozen=True)
class SpectralSequencePages:
    levels: list  # ascending distinct action values; index s filters from above
    pages: list  # PageData for r = 1, 2, ...
    infinity: dict  # (s, k) -> dim E_inf^{s,k}
    total_homology: dict  # k -> dim H^k of the total complex
    converges: bool
    stabilized_at: int


def _subspace_dim(vectors: list[np.ndarray], p: int, n: int) -> int:
    if not vectors:
        return 0
    return rref(FpMatrix(np.array(vectors, dtype=np.int64).T.reshape(n, len(vectors)), p)).rank


def action_ss_pages(fc: ChainComplex) -> SpectralSequencePages:
    """Pages of the spectral sequence of the action filtration.

    Filtration index s keeps generators with action <= the (L-s)-th distinct
    value, so the differential raises s by at least 1.  E_r is computed by
    the subquotient formula Z_r^s / (Z_{r-1}^{s+1} + d Z_{r-1}^{s-r+1}).
    A differential can jump at most L-1 filtration steps, so page L is
    already the infinity page; every page up to there is computed, since a
    quiet page does not preclude a longer differential later.  E_infinity
    must total to the homology of the complex in each degree.
    """
    for src, row in fc.differential.items():
        a = fc.generator(src).action
        for tgt in row:
            if not fc.generator(tgt).action < a:
                raise FiltrationViolation(
                    f"d({src}) does not strictly decrease action at {tgt}"
                )
    p = fc.p
    n = fc.dim()
    levels = fc.actions()
    L = len(levels)
    d = _global_d(fc)
    degs = [g.degree for g in fc.generators]
    acts = [g.action for g in fc.generators]

    # filtration membership: F^s = span of generators with action <= levels[L-1-s]
    def in_filt(i: int, s: int) -> bool:
        if s <= 0:
            return True
        if s >= L:
            return False
        return acts[i] <= levels[L - 1 - s]

    degrees = sorted(set(degs)) if n else []

    def z_space(r: int, s: int, k: int) -> list[np.ndarray]:
        """Basis of Z_r^s in degree k: x in F^s with dx in F^(s+r)."""
        src = [i for i in range(n) if degs[i] == k and in_filt(i, s)]
        if not src:
            return []
        tgt = [j for j in range(n) if degs[j] == k + 1 and not in_filt(j, s + r)]
        m = FpMatrix(d[np.ix_(tgt, src)] if tgt else np.zeros((0, len(src)), dtype=np.int64), p)
        out = []
        for v in rref(m).kernel_basis:
            w = np.zeros(n, dtype=np.int64)
            w[src] = v
            out.append(w)
        return out

    def page_dim_and_boundary(r: int, s: int, k: int):
        z = z_space(r, s, k)
        border = z_space(r - 1, s + 1, k)
        border += [(d @ np.array(v)) % p for v in z_space(r - 1, s - r + 1, k - 1)]
        dim_b = _subspace_dim(border, p, n)
        dim_z = _subspace_dim(z, p, n)
        # the boundary space sits inside Z_r^s, so the quotient dim subtracts
        return dim_z - dim_b, z, border

    pages = []
    last_page = max(1, L)
    for r in range(1, last_page + 1):
        dims = {}
        ranks = {}
        cache: dict = {}
        for s in range(L):
            for k in degrees:
                dim, z, border = page_dim_and_boundary(r, s, k)
                cache[(s, k)] = (z, border)
                if dim:
                    dims[(s, k)] = dim
        for (s, k), (z, _) in cache.items():
            # rank of d_r out of E_r^{s,k}: dim(d z + B^{s+r,k+1}) - dim B^{s+r,k+1}
            tborder = cache.get((s + r, k + 1), ([], []))[1]
            img = [(d @ v) % p for v in z]
            ranks_val = _subspace_dim(tborder + img, p, n) - _subspace_dim(tborder, p, n)
            if ranks_val:
                ranks[(s, k)] = ranks_val
        pages.append(PageData(r=r, dims=dims, differential_ranks=ranks))
    inf_dims = pages[-1].dims
    # earliest page that already equals E_infinity with nothing left to run
    stabilized_at = last_page
    for pg in reversed(pages[:-1]):
        if pg.dims != inf_dims or pg.differential_ranks:
            break
        stabilized_at = pg.r
    total_h = fc.homology_dims()
    einf_by_degree: dict[int, int] = {}
    for (_, k), v in inf_dims.items():
        einf_by_degree[k] = einf_by_degree.get(k, 0) + v
    converges = einf_by_degree == {k: v for k, v in total_h.items() if v}
    return SpectralSequencePages(
        levels=levels,
        pages=pages,
        infinity=inf_dims,
        total_homology=total_h,
        converges=converges,
        stabilized_at=stabilized_at,
    )


# ---------------------------------------------------------------------------
# the equivariant model


class EquivariantFloerModel:
    """A Z/pZ-equivariant deformation of a filtered complex.

    base supplies the generators, the action values, sigma, and the default
    structure maps; d_terms maps (i, alpha) to an n x n matrix over F_p in
    the stored generator order, replacing or extending the defaults

        d_0^0 = d,  d_0^1 = 1 - sigma,  d_1^1 = -d,  d_1^2 = N.

    Every term d_alpha^i must have internal degree 1 - i + alpha; the two
    filtration-level terms d_0^0 and d_1^1 must strictly decrease action and
    all others must not increase it.  The assembled differential must square
    to zero over F_p[[u]].
    """

    def __init__(
        self,
        base: EquivariantComplex,
        d_terms: dict[tuple[int, int], FpMatrix] | None = None,
        i_max: int | None = None,
        *,
        check: bool = True,
    ):
        self.base = base
        self.p = base.p
        n = base.dim()
        d = _global_d(base)
        s = _global_sigma(base)
        nm = _global_norm(base)
        terms: dict[tuple[int, int], np.ndarray] = {
            (0, 0): d,
            (1, 0): (np.eye(n, dtype=np.int64) - s) % self.p,
            (1, 1): (-d) % self.p,
            (2, 1): nm,
        }
        supplied = d_terms or {}
        for (i, alpha), m in supplied.items():
            if alpha not in (0, 1) or i < 0:
                raise MalformedInput(f"bad d_term slot ({i}, {alpha})")
            if (i, alpha) == (0, 1):
                raise MalformedInput("the (i=0, alpha=1) slot does not exist")
            a = m.a if isinstance(m, FpMatrix) else np.asarray(m, dtype=np.int64) % self.p
            if a.shape != (n, n):
                raise MalformedInput(f"d_term ({i},{alpha}) must be {n} x {n}")
            terms[(i, alpha)] = a % self.p
        if i_max is None:
            raise MalformedInput("i_max is required")
        self.i_max = int(i_max)
        for (i, alpha) in list(terms):
            if i > self.i_max:
                if (i, alpha) in supplied:
                    raise MalformedInput(f"d_term ({i},{alpha}) exceeds i_max={self.i_max}")
                del terms[(i, alpha)]  # defaults above i_max are dropped
        self.terms = {k: v for k, v in terms.items() if v.any()}
        if check:
            self._validate()

    def term(self, i: int, alpha: int) -> np.ndarray:
        n = self.base.dim()
        return self.terms.get((i, alpha), np.zeros((n, n), dtype=np.int64))

    def _validate(self):
        base = self.base
        degs = [g.degree for g in base.generators]
        acts = [g.action for g in base.generators]
        for (i, alpha), m in self.terms.items():
            want = 1 - i + alpha
            strict = (i, alpha) in ((0, 0), (1, 1))
            for r, c in zip(*np.nonzero(m)):
                if degs[r] != degs[c] + want:
                    raise InvalidComplex(
                        f"d_term ({i},{alpha}) entry {base.generators[c].id} -> "
                        f"{base.generators[r].id} violates degree 1-i+alpha = {want}"
                    )
                if strict and not acts[r] < acts[c]:
                    raise FiltrationViolation(
                        f"d_term ({i},{alpha}) must strictly decrease action "
                        f"({base.generators[c].id} -> {base.generators[r].id})"
                    )
                if not strict and acts[r] > acts[c]:
                    raise FiltrationViolation(
                        f"d_term ({i},{alpha}) must not increase action "
                        f"({base.generators[c].id} -> {base.generators[r].id})"
                    )
        A, B, C, D = self.blocks()
        if not blocks_square_zero(A, B, C, D, self.p):
            raise NotSquareZero("assembled equivariant differential does not square to zero")

    def blocks(self) -> tuple[list, list, list, list]:
        """Poly matrices (A, B, C, D) of the assembled differential:
        A: 1->1, B: theta->1, C: 1->theta, D: theta->theta."""
        p = self.p
        n = self.base.dim()

        def zero():
            return [[() for _ in range(n)] for _ in range(n)]

        A, B, C, D = zero(), zero(), zero(), zero()
        for (i, alpha), m in self.terms.items():
            if alpha == 0:
                tgt, shift = (A, i // 2) if i % 2 == 0 else (C, (i - 1) // 2)
            else:
                tgt, shift = (D, (i - 1) // 2) if i % 2 == 1 else (B, i // 2)
            for r, c in zip(*np.nonzero(m)):
                mono = pupow(shift, int(m[r, c]), p)
                cur = tgt[r][c]
                if cur:
                    a = list(cur) + [0] * max(0, len(mono) - len(cur))
                    for idx, v in enumerate(mono):
                        a[idx] = (a[idx] + v) % p
                    while a and a[-1] == 0:
                        a.pop()
                    tgt[r][c] = tuple(a)
                else:
                    tgt[r][c] = mono
        return A, B, C, D

    def square_is_zero(self) -> bool:
        A, B, C, D = self.blocks()
        return blocks_square_zero(A, B, C, D, self.p)

    def tate_parity_dims(self) -> tuple[int, int]:
        """(even, odd) F_p((u))-dims of the homology of the assembled complex."""
        A, B, C, D = self.blocks()
        degs = [g.degree for g in self.base.generators]
        e2o, o2e, even, odd = assemble_parity_blocks(degs, A, B, C, D, self.p)
        r_e, r_o = poly_matrix_ranks([e2o, o2e], self.p, sum_bound=self.base.dim())
        return len(even) - r_e - r_o, len(odd) - r_o - r_e

    def __repr__(self) -> str:
        slots = sorted(self.terms)
        return f"EquivariantFloerModel(p={self.p}, n={self.base.dim()}, terms={slots}, i_max={self.i_max})"


# ---------------------------------------------------------------------------
# algebraic spectral sequence


@dataclass
class AlgebraicSSPages:
    """E_1, E_2, E_infinity data of the u-filtration spectral sequence.

    e1_* give the page-one dimensions per internal degree (homology of the
    filtration-preserving terms); d10_induced / d21_induced are the page
    differentials in those homology bases.  e2/einf dims are (even, odd)
    over F_p((u)); sigma_module reports the Jordan decomposition of the
    induced sigma* when the zeroth term is genuinely equivariant.
    """

    p: int
    e1_even_dims: dict
    e1_odd_dims: dict
    d10_induced: dict
    d21_induced: dict
    e2_by_degree: dict
    e2_dims: tuple[int, int]
    einf_dims: tuple[int, int]
    tate_bound_holds: bool
    sigma_module: ModuleDecomposition | None
    sigma_module_tate_dim: int | None

    @property
    def e2_total(self) -> int:
        return self.e2_dims[0] + self.e2_dims[1]

    @property
    def einf_total(self) -> int:
        return self.einf_dims[0] + self.einf_dims[1]


def _complex_from_matrix(base: ChainComplex, m: np.ndarray, sign: int = 1) -> ChainComplex:
    """Chain complex on the same generators with differential matrix m."""
    p = base.p
    ids = [g.id for g in base.generators]
    diff: dict[str, dict[str, int]] = {}
    mm = (sign * m) % p
    for c in range(len(ids)):
        col = {ids[r]: int(mm[r, c]) for r in np.nonzero(mm[:, c])[0]}
        if col:
            diff[ids[c]] = col
    return ChainComplex(p, list(base.generators), diff)


def algebraic_ss_pages(model: EquivariantFloerModel) -> AlgebraicSSPages:
    """E_1, E_2 and E_infinity of the u-filtration, with the dimension bound.

    E_1 is the homology of d_0^0 (even u-slots) and of d_1^1 (odd slots);
    the induced maps of d_0^1 and d_1^2 are computed in those bases and
    alternate to give E_2.  E_infinity is the directly computed Tate
    cohomology of the assembled complex; the bound asserts it fits under
    E_2 parity by parity.
    """
    if not model.square_is_zero():
        raise NotSquareZero("model differential does not square to zero")
    p = model.p
    base = model.base
    n = base.dim()
    even_cx = _complex_from_matrix(base, model.term(0, 0))
    odd_cx = _complex_from_matrix(base, model.term(1, 1))
    d10 = model.term(1, 0)
    d21 = model.term(2, 1)
    e1_even = even_cx.homology_dims()
    e1_odd = odd_cx.homology_dims()
    degrees = sorted(set(e1_even) | set(e1_odd))
    d10_induced: dict[int, np.ndarray] = {}
    d21_induced: dict[int, np.ndarray] = {}
    e2_by_degree: dict[int, dict[str, int]] = {}
    e2_even_total = 0
    e2_odd_total = 0
    for k in degrees:
        src_e = even_cx.homology_basis(k)
        src_o = odd_cx.homology_basis(k)
        idx = base.degree_indices(k)
        # both induced maps have internal degree 0
        m10 = np.zeros((len(src_o), len(src_e)), dtype=np.int64)
        for c, z in enumerate(src_e):
            w = np.zeros(n, dtype=np.int64)
            w[idx] = z
            img = (d10 @ w) % p
            m10[:, c] = odd_cx.express_in_homology(k, img[idx])
        m21 = np.zeros((len(src_e), len(src_o)), dtype=np.int64)
        for c, z in enumerate(src_o):
            w = np.zeros(n, dtype=np.int64)
            w[idx] = z
            img = (d21 @ w) % p
            m21[:, c] = even_cx.express_in_homology(k, img[idx])
        d10_induced[k] = m10
        d21_induced[k] = m21
        r10 = rank(FpMatrix(m10, p))
        r21 = rank(FpMatrix(m21, p))
        one_part = len(src_e) - r10 - r21  # ker[d10] / im[d21]
        theta_part = len(src_o) - r21 - r10  # ker[d21] / im[d10]
        e2_by_degree[k] = {"one": one_part, "theta": theta_part}
        if k % 2 == 0:
            e2_even_total += one_part
            e2_odd_total += theta_part
        else:
            e2_even_total += theta_part
            e2_odd_total += one_part
    einf = model.tate_parity_dims()
    bound = einf[0] <= e2_even_total and einf[1] <= e2_odd_total
    sigma_module = None
    sigma_tate = None
    s = _global_sigma(base)
    d00 = model.term(0, 0)
    order_p = FpMatrix(s, p).power(p) == FpMatrix.identity(n, p) if n else True
    if order_p and ((s @ d00 - d00 @ s) % p == 0).all():
        # sigma descends to H(d_0^0); decompose the induced module
        blocks = []
        for k in degrees:
            reps = even_cx.homology_basis(k)
            idx = base.degree_indices(k)
            m = np.zeros((len(reps), len(reps)), dtype=np.int64)
            for c, z in enumerate(reps):
                w = np.zeros(n, dtype=np.int64)
                w[idx] = z
                img = (s @ w) % p
                m[:, c] = even_cx.express_in_homology(k, img[idx])
            blocks.append(m)
        total = sum(b.shape[0] for b in blocks)
        sig_star = np.zeros((total, total), dtype=np.int64)
        off = 0
        for b in blocks:
            sig_star[off:off + b.shape[0], off:off + b.shape[0]] = b
            off += b.shape[0]
        sigma_module = decompose(FpMatrix(sig_star, p))
        sigma_tate = tate_and_invariant_dims(sigma_module)[0]
    return AlgebraicSSPages(
        p=p,
        e1_even_dims=e1_even,
        e1_odd_dims=e1_odd,
        d10_induced=d10_induced,
        d21_induced=d21_induced,
        e2_by_degree=e2_by_degree,
        e2_dims=(e2_even_total, e2_odd_total),
        einf_dims=einf,
        tate_bound_holds=bound,
        sigma_module=sigma_module,
        sigma_module_tate_dim=sigma_tate,
    )


# ---------------------------------------------------------------------------
# JSON


def model_to_json(model: EquivariantFloerModel) -> dict:
    from .complexes import complex_to_json

    out = complex_to_json(model.base)
    out["i_max"] = model.i_max
    out["d_terms"] = [
        {
            "i": i,
            "alpha": alpha,
            "matrix": [[int(r), int(c), int(m[r, c])] for r, c in zip(*np.nonzero(m))],
        }
        for (i, alpha), m in sorted(model.terms.items())
    ]
    return out


def model_from_json(data) -> EquivariantFloerModel:
    import json as _json

    from .complexes import complex_from_json

    if isinstance(data, str):
        try:
            data = _json.loads(data)
        except _json.JSONDecodeError as e:
            raise MalformedInput(f"invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise MalformedInput("model JSON must be an object")
    base = complex_from_json(
        {k: v for k, v in data.items() if k not in ("d_terms", "i_max", "filtered")},
        expect="equivariant",
    )
    n = base.dim()
    terms: dict[tuple[int, int], np.ndarray] = {}
    raw = data.get("d_terms", [])
    if not isinstance(raw, list):
        raise MalformedInput("'d_terms' must be a list")
    for item in raw:
        if not isinstance(item, dict) or "i" not in item or "alpha" not in item:
            raise MalformedInput(f"bad d_term entry: {item!r}")
        i, alpha = int(item["i"]), int(item["alpha"])
        m = np.zeros((n, n), dtype=np.int64)
        for trip in item.get("matrix", []):
            if len(trip) != 3:
                raise MalformedInput(f"bad matrix triplet: {trip!r}")
            r, c, v = (int(x) for x in trip)
            if not (0 <= r < n and 0 <= c < n):
                raise MalformedInput(f"triplet index out of range: {trip!r}")
            m[r, c] = v % base.p
        terms[(i, alpha)] = m
    i_max = data.get("i_max")
    if i_max is None:
        # the JSON wire format may omit i_max; infer the smallest consistent
        # value from the supplied terms and the defaults
        i_max = max([i for (i, _) in terms], default=2)
        i_max = max(i_max, 2)
    return EquivariantFloerModel(base, terms, int(i_max))
