"""Barcodes of filtered complexes and exact window/Smith-inequality checkers.

Bars are half-open intervals (a, b] or (a, inf) with positive integer
multiplicity, endpoints exact rationals.  A filtered complex yields its
barcode through standard boundary-matrix reduction in action order; window
dimensions follow the three counting formulas (window shapes are classified
by which endpoints are present, and endpoints must avoid the spectrum).
The p-th iterate comparison bundles the pointwise finite-bar count
inequality m(t) <= m(pt), the total-length inequality it integrates to,
and the window-dimension inequality over a canonical window family.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexes import ActionWindow, ChainComplex
from .errors import (
    EmptyBarcode,
    FiltrationViolation,
    InadmissibleWindow,
    MalformedInput,
    SpectralEndpoint,
)

__all__ = [
    "Bar",
    "Barcode",
    "BarStats",
    "SmithBarcodeReport",
    "barcode_from_filtered",
    "window_dim",
    "bar_stats",
    "smith_barcode_check",
    "torsion_witness",
    "generate_iterated_barcode",
    "gamma_beta_check",
    "scale_barcode",
    "barcode_to_json",
    "barcode_from_json",
]


def _frac(x, what: str) -> Fraction:
    if isinstance(x, bool):
        raise MalformedInput(f"{what} must be a rational number, got {x!r}")
    try:
        return Fraction(x)
    except (TypeError, ValueError) as e:
        raise MalformedInput(f"{what} must be a rational number, got {x!r}") from e


@dataclass(frozen=True)
class Bar:
    """Half-open interval (start, end] with multiplicity; end None means +inf."""

    start: Fraction
    end: Fraction | None
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "start", _frac(self.start, "bar start"))
        if self.end is not None:
            object.__setattr__(self, "end", _frac(self.end, "bar end"))
            if not self.start < self.end:
                raise MalformedInput(f"bar needs start < end, got ({self.start}, {self.end}]")
        if not isinstance(self.multiplicity, int) or isinstance(self.multiplicity, bool) or self.multiplicity < 1:
            raise MalformedInput(f"bar multiplicity must be a positive integer, got {self.multiplicity!r}")

    @property
    def finite(self) -> bool:
        return self.end is not None

    def contains(self, t: Fraction) -> bool:
        if self.end is None:
            return self.start < t
        return self.start < t <= self.end

    def length(self) -> Fraction | None:
        return None if self.end is None else self.end - self.start

    def __repr__(self) -> str:
        tail = "inf)" if self.end is None else f"{self.end}]"
        m = f" x{self.multiplicity}" if self.multiplicity != 1 else ""
        return f"({self.start}, {tail}{m}"


class Barcode:
    """Canonical multiset of bars: sorted by (start, end), equal bars merged."""

    def __init__(self, p: int, bars=()):
        self.p = int(p)
        merged: dict[tuple, int] = {}
        for b in bars:
            if not isinstance(b, Bar):
                b = Bar(*b)
            merged[(b.start, b.end)] = merged.get((b.start, b.end), 0) + b.multiplicity
        key = lambda se: (se[0], se[1] is None, se[1] if se[1] is not None else 0)
        self.bars: tuple[Bar, ...] = tuple(
            Bar(s, e, m) for (s, e), m in sorted(merged.items(), key=lambda kv: key(kv[0]))
        )

    def __len__(self) -> int:
        return sum(b.multiplicity for b in self.bars)

    def __eq__(self, other) -> bool:
        return isinstance(other, Barcode) and self.p == other.p and self.bars == other.bars

    def __hash__(self):
        return hash((self.p, self.bars))

    def __iter__(self):
        return iter(self.bars)

    def endpoints(self) -> list[Fraction]:
        """Sorted distinct spectral values (starts and finite ends)."""
        pts = {b.start for b in self.bars}
        pts |= {b.end for b in self.bars if b.end is not None}
        return sorted(pts)

    def __repr__(self) -> str:
        return f"Barcode(p={self.p}, bars=[{', '.join(map(repr, self.bars))}])"


def scale_barcode(b: Barcode, factor) -> Barcode:
    factor = Fraction(factor)
    if factor <= 0:
        raise InadmissibleWindow(f"scaling factor must be positive, got {factor}")
    return Barcode(
        b.p,
        [Bar(bar.start * factor, None if bar.end is None else bar.end * factor, bar.multiplicity) for bar in b.bars],
    )


# ---------------------------------------------------------------------------
# reduction


def barcode_from_filtered(fc: ChainComplex) -> Barcode:
    """Barcode of the action sublevel filtration by column reduction.

    Generators are processed by increasing (action, id); a column that
    reduces to a nonzero vector pairs its lowest entry i with its own index
    j as a finite bar (action_i, action_j]; reduced-to-zero columns that are
    never paired give infinite bars.
    """
    for src, row in fc.differential.items():
        a = fc.generator(src).action
        for tgt in row:
            if not fc.generator(tgt).action < a:
                raise FiltrationViolation(f"d({src}) does not strictly decrease action at {tgt}")
    p = fc.p
    order = fc.filtration_order()
    n = len(order)
    d = fc.matrix_in_order(order).a.copy()
    low_of: dict[int, int] = {}  # low row -> column that holds it
    lows = np.full(n, -1, dtype=np.int64)
    for j in range(n):
        while True:
            nz = np.nonzero(d[:, j])[0]
            if len(nz) == 0:
                lows[j] = -1
                break
            lo = int(nz[-1])
            k = low_of.get(lo)
            if k is None:
                low_of[lo] = j
                lows[j] = lo
                break
            factor = (d[lo, j] * pow(int(d[lo, k]), -1, p)) % p
            d[:, j] = (d[:, j] - factor * d[:, k]) % p
    bars = []
    paired = set(int(x) for x in lows if x >= 0)
    acts = [fc.generators[i].action for i in order]
    for j in range(n):
        if lows[j] >= 0:
            bars.append(Bar(acts[lows[j]], acts[j]))
        elif j not in paired:
            bars.append(Bar(acts[j], None))
    return Barcode(p, bars)


# ---------------------------------------------------------------------------
# window counting


def _check_not_spectral(b: Barcode, *points):
    spectrum = set(b.endpoints())
    for t in points:
        if t is not None and t in spectrum:
            raise SpectralEndpoint(f"window endpoint {t} is a bar endpoint")


def window_dim(b: Barcode, w: ActionWindow) -> int:
    """dim of the window-restricted homology, counted from the barcode.

    Selects the counting formula by window shape: bars containing t for
    (-inf, t]; finite bars containing t plus infinite bars born after t for
    (t, inf); one-endpoint-inside finite bars plus infinite bars born inside
    for (a, b]; infinite-bar count for the whole line.
    """
    a, t = w.lower, w.upper
    _check_not_spectral(b, a, t)
    if a is None and t is None:
        return sum(bar.multiplicity for bar in b.bars if not bar.finite)
    if a is None:
        return sum(bar.multiplicity for bar in b.bars if bar.contains(t))
    if t is None:
        out = 0
        for bar in b.bars:
            if bar.finite:
                out += bar.multiplicity if bar.contains(a) else 0
            else:
                out += bar.multiplicity if bar.start > a else 0
        return out
    out = 0
    for bar in b.bars:
        if bar.finite:
            if bar.contains(a) != bar.contains(t):
                out += bar.multiplicity
        else:
            if not bar.contains(a) and bar.contains(t):
                out += bar.multiplicity
    return out


# ---------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class BarStats:
    finite_count: int  # K, multiplicity-weighted
    infinite_count: int  # B
    total_count: int  # N = 2K + B
    beta_tot: Fraction
    beta_max: Fraction  # 0 when there is no finite bar
    c_plus: Fraction | None  # max / min infinite-bar start; None without
    c_minus: Fraction | None  # infinite bars (unless required)


def bar_stats(b: Barcode, *, require_extremal_starts: bool = False) -> BarStats:
    """Multiplicity-weighted bar counts and length statistics.

    c_plus / c_minus are None when no infinite bar exists; pass
    require_extremal_starts to make that case an EmptyBarcode error.
    """
    K = sum(bar.multiplicity for bar in b.bars if bar.finite)
    B = sum(bar.multiplicity for bar in b.bars if not bar.finite)
    beta_tot = sum((bar.length() * bar.multiplicity for bar in b.bars if bar.finite), Fraction(0))
    beta_max = max((bar.length() for bar in b.bars if bar.finite), default=Fraction(0))
    starts = [bar.start for bar in b.bars if not bar.finite]
    if not starts and require_extremal_starts:
        raise EmptyBarcode("no infinite bars: extremal starting points are undefined")
    return BarStats(
        finite_count=K,
        infinite_count=B,
        total_count=2 * K + B,
        beta_tot=beta_tot,
        beta_max=beta_max,
        c_plus=max(starts) if starts else None,
        c_minus=min(starts) if starts else None,
    )


def finite_bar_count_at(b: Barcode, t: Fraction) -> int:
    """m(t): multiplicity-weighted number of finite bars containing t."""
    t = Fraction(t)
    return sum(bar.multiplicity for bar in b.bars if bar.finite and bar.contains(t))


def _integrate_finite_count(b: Barcode) -> Fraction:
    """Exact integral of m(t) dt, piecewise over the endpoint arrangement."""
    pts = sorted({bar.start for bar in b.bars if bar.finite} | {bar.end for bar in b.bars if bar.finite})
    total = Fraction(0)
    for lo, hi in zip(pts, pts[1:]):
        mid = (lo + hi) / 2
        total += finite_bar_count_at(b, mid) * (hi - lo)
    return total


# ---------------------------------------------------------------------------
# the p-th iterate comparison


def _midpoint_probes(events: list[Fraction]) -> list[Fraction]:
    """One generic test point per region of the complement of `events`."""
    if not events:
        return [Fraction(0)]
    probes = [events[0] - 1]
    for lo, hi in zip(events, events[1:]):
        if lo != hi:
            probes.append((lo + hi) / 2)
    probes.append(events[-1] + 1)
    return probes


@dataclass(frozen=True)
class SmithBarcodeReport:
    p: int
    m_ok: bool
    m_failures: tuple  # (t, m(t, b1), m(pt, bp)) triples
    beta_tot_single: Fraction
    beta_tot_iterate: Fraction
    beta_direct_ok: bool
    beta_integral_ok: bool
    window_ok: bool
    window_failures: tuple  # (window, dim single, dim iterate) triples

    @property
    def ok(self) -> bool:
        return self.m_ok and self.beta_direct_ok and self.beta_integral_ok and self.window_ok

    def __bool__(self) -> bool:
        return self.ok


def smith_barcode_check(b1: Barcode, bp: Barcode, p: int) -> SmithBarcodeReport:
    """Compare a barcode with a claimed barcode of the p-th iterate.

    Verifies m(t, b1) <= m(p t, bp) at one generic point per region of the
    merged endpoint arrangement, the total-length consequence
    beta_tot(bp) >= p * beta_tot(b1) both directly and by integrating the
    pointwise counts, and dim^w(b1) <= dim^(pw)(bp) over all canonical
    windows spanned by the arrangement's generic points.
    """
    events = sorted(set(b1.endpoints()) | {e / p for e in bp.endpoints()})
    probes = _midpoint_probes(events)
    m_failures = []
    for t in probes:
        m1 = finite_bar_count_at(b1, t)
        mp = finite_bar_count_at(bp, p * t)
        if m1 > mp:
            m_failures.append((t, m1, mp))
    beta1 = bar_stats(b1).beta_tot
    betap = bar_stats(bp).beta_tot
    beta_direct_ok = betap >= p * beta1
    beta_integral_ok = _integrate_finite_count(bp) >= p * _integrate_finite_count(b1)
    windows = [ActionWindow(None, None)]
    windows += [ActionWindow(None, t) for t in probes]
    windows += [ActionWindow(t, None) for t in probes]
    windows += [ActionWindow(a, t) for i, a in enumerate(probes) for t in probes[i + 1 :]]
    window_failures = []
    for w in windows:
        d1 = window_dim(b1, w)
        dp = window_dim(bp, w.scaled(p))
        if d1 > dp:
            window_failures.append((w, d1, dp))
    return SmithBarcodeReport(
        p=p,
        m_ok=not m_failures,
        m_failures=tuple(m_failures),
        beta_tot_single=beta1,
        beta_tot_iterate=betap,
        beta_direct_ok=beta_direct_ok,
        beta_integral_ok=beta_integral_ok,
        window_ok=not window_failures,
        window_failures=tuple(window_failures),
    )


# ---------------------------------------------------------------------------
# torsion detection


def _pick_avoiding(lo: Fraction, hi: Fraction, avoid: set[Fraction]) -> Fraction:
    """Some rational strictly inside (lo, hi) avoiding a finite set."""
    cuts = [lo] + sorted(x for x in avoid if lo < x < hi) + [hi]
    for a, b in zip(cuts, cuts[1:]):
        if a < b:
            return (a + b) / 2
    raise ValueError("empty interval")


def torsion_witness(b: Barcode) -> ActionWindow | None:
    """A window with closure avoiding 0 and positive dimension, if one exists.

    Assumes actions normalized so that a common infinite-bar starting point
    sits at 0.  Distinct infinite-bar starting points give a window around
    a nonzero extremal start; otherwise any finite bar yields a one-sided
    window, since (start, end) always contains nonzero points.  Returns
    None when all infinite bars share one starting point and no finite bar
    exists.
    """
    if not b.bars:
        raise EmptyBarcode("torsion detection needs a nonempty barcode")
    avoid = set(b.endpoints())
    stats = bar_stats(b)
    if stats.c_plus is not None and stats.c_plus > stats.c_minus:
        s = stats.c_plus if stats.c_plus != 0 else stats.c_minus
        r = abs(s) / 2
        return ActionWindow(_pick_avoiding(s - r, s, avoid), _pick_avoiding(s, s + r, avoid))
    for bar in b.bars:
        if not bar.finite:
            continue
        a, e = bar.start, bar.end
        if e > 0:
            lo = _pick_avoiding(max(a, Fraction(0)), e, avoid)
            return ActionWindow(lo, _pick_avoiding(e, e + 1, avoid))
        if e < 0:
            return ActionWindow(_pick_avoiding(a, e, avoid), _pick_avoiding(e, Fraction(0), avoid))
        # e == 0: stay strictly negative on both sides
        return ActionWindow(_pick_avoiding(a - 1, a, avoid), _pick_avoiding(a, Fraction(0), avoid))
    return None


# ---------------------------------------------------------------------------
# fixtures and the norm comparison


def generate_iterated_barcode(b1: Barcode, p: int, extra_bars: int = 0, seed: int = 0) -> Barcode:
    """A barcode that provably passes smith_barcode_check against b1.

    Every bar of b1 is scaled by p; extra_bars random bars are appended.
    Scaled bars match the left side of every pointwise count exactly, and
    extra bars only increase the right side, so all checks pass.
    """
    out = list(scale_barcode(b1, p).bars)
    rng = random.Random(seed)
    for _ in range(max(0, int(extra_bars))):
        start = Fraction(rng.randint(-24, 24), rng.randint(1, 4))
        if rng.random() < 0.3:
            out.append(Bar(start, None, rng.randint(1, 3)))
        else:
            out.append(Bar(start, start + Fraction(rng.randint(1, 12), rng.randint(1, 4)), rng.randint(1, 3)))
    return Barcode(b1.p, out)


def gamma_beta_check(gamma, b: Barcode) -> bool:
    """Whether a supplied norm value dominates the longest finite bar."""
    return Fraction(gamma) >= bar_stats(b).beta_max


# ---------------------------------------------------------------------------
# JSON


def _frac_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def barcode_to_json(b: Barcode) -> dict:
    return {
        "p": b.p,
        "bars": [
            {
                "start": _frac_to_str(bar.start),
                "end": None if bar.end is None else _frac_to_str(bar.end),
                "mult": bar.multiplicity,
            }
            for bar in b.bars
        ],
    }


def barcode_from_json(data) -> Barcode:
    import json as _json

    if isinstance(data, str):
        try:
            data = _json.loads(data)
        except _json.JSONDecodeError as e:
            raise MalformedInput(f"invalid JSON: {e}") from e
    if not isinstance(data, dict) or "p" not in data:
        raise MalformedInput("barcode JSON must be an object with a 'p' key")
    raw = data.get("bars", [])
    if not isinstance(raw, list):
        raise MalformedInput("'bars' must be a list")
    bars = []
    for item in raw:
        if not isinstance(item, dict) or "start" not in item:
            raise MalformedInput(f"bad bar entry: {item!r}")
        try:
            start = Fraction(str(item["start"]))
            end = None if item.get("end") is None else Fraction(str(item["end"]))
        except (ValueError, ZeroDivisionError) as e:
            raise MalformedInput(f"bad bar endpoint in {item!r}") from e
        bars.append(Bar(start, end, int(item.get("mult", 1))))
    return Barcode(int(data["p"]), bars)
