"""Exact solvers for worst-case bit-compressibility and rate regions.

The sink's optimal adaptive strategy is a binary decision tree over
codeword bit locations; its worst-case transmitted-bit count is computed
by exact minimax recursion over conditional sets::

    value(C) = 0                       if |C| = 1
    value(C) = min over undefined j of 1 + max(value(C|j=0), value(C|j=1))

States are bitmasks over tuple indices and memoized by set identity, since
many query orders reach the same conditional set.  Per-informant-subset
minimum bits use the same recursion over Pareto frontiers of
(worst total, worst bits from the subset) pairs, which is safe to prune
because the combination step is monotone in both coordinates.

Block-coding variants solve the k-fold extension and report per-block
values as exact rationals; the closed-form transform and the asymptotic
limit of the per-subset bounds are computed with integer arithmetic
(`ceil(k log2 b)` is the bit length of ``b**k - 1``), so no floating point
enters any bound that a test pins exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import oracle
from .errors import CapExceededError, InvariantViolationError
from .protocols import TieRule, greedy_worst_depth
from .support import Label, SupportSet, ceil_log2

DEFAULT_MAX_MU = 512
DEFAULT_MAX_WIDTH = 20
DEFAULT_MAX_REGION_INFORMANTS = 6


@dataclass(frozen=True)
class StrategyNode:
    """Node of an optimal adaptive query strategy (a decision tree)."""

    bit: int | None = None  # global bit location queried here
    informant: int | None = None  # its owner, 1-based
    zero: "StrategyNode | None" = None
    one: "StrategyNode | None" = None
    leaf: tuple[Label, ...] | None = None

    def worst_depth(self) -> int:
        if self.leaf is not None:
            return 0
        assert self.zero is not None and self.one is not None
        return 1 + max(self.zero.worst_depth(), self.one.worst_depth())


@dataclass(frozen=True)
class CompressibilityResult:
    c_b: int
    greedy_bits: int
    certificate_bound: int
    strategy: StrategyNode
    width_bound: int  # sum of informant word widths

    @property
    def bit_incompressible(self) -> bool:
        return self.c_b == self.width_bound


class _Solver:
    """Shared machinery: bitmask states over tuple indices."""

    def __init__(self, s: SupportSet, max_mu: int, max_width: int):
        if s.mu > max_mu:
            raise CapExceededError(f"mu={s.mu} above the solver cap {max_mu}")
        w = s.layout.total_width
        if w > max_width:
            raise CapExceededError(f"width={w} above the solver cap {max_width}")
        self.s = s
        self.w = w
        self.full = (1 << s.mu) - 1
        # ones[j]: bitmask over tuple indices whose codeword has 1 at j
        self.ones = []
        for j in range(w):
            shift = w - 1 - j
            m = 0
            for k, cw in enumerate(s.codewords):
                if cw >> shift & 1:
                    m |= 1 << k
            self.ones.append(m)
        self.value_memo: dict[int, int] = {}

    def undefined(self, state: int) -> list[int]:
        out = []
        for j, m in enumerate(self.ones):
            hit = state & m
            if hit and hit != state:
                out.append(j)
        return out

    def value(self, state: int) -> int:
        """Minimax optimum: worst-case queried bits to reach a singleton."""
        if state & (state - 1) == 0:
            return 0
        hit = self.value_memo.get(state)
        if hit is not None:
            return hit
        lower = ceil_log2(state.bit_count())
        best = None
        for j in self.undefined(state):
            one = state & self.ones[j]
            v = 1 + max(self.value(state & ~self.ones[j]), self.value(one))
            if best is None or v < best:
                best = v
                if best == lower:
                    break  # cannot beat the information bound
        assert best is not None
        self.value_memo[state] = best
        return best

    def extract_strategy(self, state: int) -> StrategyNode:
        """One optimal tree; ties broken toward the lowest bit index."""
        if state & (state - 1) == 0:
            return StrategyNode(leaf=self.s.tuples[state.bit_length() - 1])
        best_j = None
        best_v = None
        for j in self.undefined(state):
            one = state & self.ones[j]
            v = 1 + max(self.value(state & ~self.ones[j]), self.value(one))
            if best_v is None or v < best_v:
                best_v, best_j = v, j
        assert best_j is not None
        owner = self.s.layout.owner_of(best_j)[0] + 1
        return StrategyNode(
            bit=best_j,
            informant=owner,
            zero=self.extract_strategy(state & ~self.ones[best_j]),
            one=self.extract_strategy(state & self.ones[best_j]),
        )

    def frontier(self, state: int, weighted: list[bool], memo: dict) -> tuple:
        """Pareto-minimal (worst total, worst subset bits) pairs."""
        if state & (state - 1) == 0:
            return ((0, 0),)
        hit = memo.get(state)
        if hit is not None:
            return hit
        cand: set[tuple[int, int]] = set()
        for j in self.undefined(state):
            w = 1 if weighted[j] else 0
            f0 = self.frontier(state & ~self.ones[j], weighted, memo)
            f1 = self.frontier(state & self.ones[j], weighted, memo)
            for t0, s0 in f0:
                for t1, s1 in f1:
                    cand.add((1 + max(t0, t1), w + max(s0, s1)))
        front = _pareto(cand)
        memo[state] = front
        return front


def _pareto(pairs) -> tuple:
    """Minimal elements under componentwise <= (both coordinates minimized)."""
    out: list[tuple[int, int]] = []
    for t, sub in sorted(pairs):
        if not out or sub < out[-1][1]:
            out.append((t, sub))
    return tuple(out)


def solve_c_b(
    s: SupportSet,
    max_mu: int = DEFAULT_MAX_MU,
    max_width: int = DEFAULT_MAX_WIDTH,
) -> CompressibilityResult:
    """Exact worst-case bit-compressibility with greedy and certificate
    cross-checks.

    The result carries the minimax optimum (`c_b`), the bit-serial
    protocol's own worst case (`greedy_bits`), the certificate bound from
    the brute-force oracle, and one optimal strategy tree.  The sandwich
    ``ceil(log2 mu) <= certificate <= c_b <= greedy <= width`` is enforced
    as a tripwire.
    """
    solver = _Solver(s, max_mu, max_width)
    c_b = solver.value(solver.full)
    strategy = solver.extract_strategy(solver.full)
    greedy = greedy_worst_depth(s, TieRule())
    certificate = oracle.certificate_c_b(s)
    width = s.layout.total_width
    info = ceil_log2(s.mu)
    if not info <= certificate <= c_b <= greedy <= width:
        raise InvariantViolationError(
            f"sandwich breach: info={info}, certificate={certificate}, "
            f"c_b={c_b}, greedy={greedy}, width={width}"
        )
    return CompressibilityResult(
        c_b=c_b,
        greedy_bits=greedy,
        certificate_bound=certificate,
        strategy=strategy,
        width_bound=width,
    )


def per_informant_min_bits(
    s: SupportSet,
    max_mu: int = DEFAULT_MAX_MU,
    max_width: int = DEFAULT_MAX_WIDTH,
) -> tuple[int, ...]:
    """For each informant, its minimum worst-case bits over optimal
    strategies (those whose worst-case total equals c_b)."""
    solver = _Solver(s, max_mu, max_width)
    c_b = solver.value(solver.full)
    out = []
    for i in range(1, s.n + 1):
        weighted = [solver.s.layout.owner_of(j)[0] + 1 == i for j in range(solver.w)]
        front = solver.frontier(solver.full, weighted, {})
        out.append(min(sub for t, sub in front if t == c_b))
    return tuple(out)


@dataclass(frozen=True)
class RateRegion:
    """Per-subset lower bounds on worst-case informant bits, plus corners."""

    n_informants: int
    subset_bounds: Mapping[frozenset[int], Fraction]
    c_b: Fraction
    corners: tuple[tuple[Fraction, Fraction], ...]


def _corners(
    n: int, bounds: Mapping[frozenset[int], Fraction], c_b: Fraction
) -> tuple[tuple[Fraction, Fraction], ...]:
    if n != 2:
        return ()
    b1 = bounds[frozenset({1})]
    b2 = bounds[frozenset({2})]
    return ((b1, c_b - b1), (c_b - b2, b2))


def rate_region(
    s: SupportSet,
    max_mu: int = DEFAULT_MAX_MU,
    max_width: int = DEFAULT_MAX_WIDTH,
    max_informants: int = DEFAULT_MAX_REGION_INFORMANTS,
) -> RateRegion:
    """Minimum worst-case bits for every nonempty informant subset.

    For two informants the region is the polygon ``R1 >= b1, R2 >= b2,
    R1 + R2 >= c_b`` and its two corner points are reported.
    """
    if s.n > max_informants:
        raise CapExceededError(
            f"rate region over {s.n} informants exceeds the cap {max_informants}"
        )
    solver = _Solver(s, max_mu, max_width)
    c_b = solver.value(solver.full)
    bounds: dict[frozenset[int], Fraction] = {}
    for mask in range(1, 1 << s.n):
        ids = frozenset(i + 1 for i in range(s.n) if mask >> i & 1)
        weighted = [s.layout.owner_of(j)[0] + 1 in ids for j in range(solver.w)]
        front = solver.frontier(solver.full, weighted, {})
        bounds[ids] = Fraction(min(sub for t, sub in front if t == c_b))
    full = frozenset(range(1, s.n + 1))
    if bounds[full] != c_b:
        raise InvariantViolationError(
            f"full-subset bound {bounds[full]} differs from c_b {c_b}"
        )
    return RateRegion(
        n_informants=s.n,
        subset_bounds=bounds,
        c_b=Fraction(c_b),
        corners=_corners(s.n, bounds, Fraction(c_b)),
    )


# -- block coding ---------------------------------------------------------------


@dataclass(frozen=True)
class KBlockResult:
    k: int
    result: CompressibilityResult
    per_block: Fraction  # c_b^k / k
    gap: Fraction  # oneshot c_b - per_block


def k_block_solve(
    s: SupportSet,
    k: int,
    max_mu: int = DEFAULT_MAX_MU,
    max_width: int = DEFAULT_MAX_WIDTH,
) -> KBlockResult:
    """Solve the k-extension and compare its per-block cost with oneshot."""
    base = solve_c_b(s, max_mu, max_width)
    if k == 1:
        return KBlockResult(1, base, Fraction(base.c_b), Fraction(0))
    if s.mu**k > max_mu:
        raise CapExceededError(
            f"mu^k = {s.mu ** k} above the solver cap {max_mu}"
        )
    ext = s.k_extension(k, max_tuples=max_mu)
    res = solve_c_b(ext, max_mu, max_width)
    per_block = Fraction(res.c_b, k)
    return KBlockResult(k, res, per_block, Fraction(base.c_b) - per_block)


def block_bound(m: int | Fraction, k: int) -> Fraction:
    """Closed-form k-block transform of a oneshot subset bound.

    A oneshot bound of M bits describes a set of at least ``2**(M-1) + 1``
    values, whose k-extension needs ``ceil(k log2(2**(M-1)+1))`` bits, i.e.
    ``bit_length((2**(M-1)+1)**k - 1)`` exactly.  M = 0 stays 0.
    """
    m = int(m)
    if m < 0:
        raise ValueError(f"negative bound {m}")
    if m == 0:
        return Fraction(0)
    base = (1 << (m - 1)) + 1
    return Fraction((base**k - 1).bit_length(), k)


def asymptotic_bound(m: int | Fraction) -> float:
    """Limit of `block_bound` as the block length grows: log2(2**(M-1)+1)."""
    m = int(m)
    if m == 0:
        return 0.0
    return math.log2((1 << (m - 1)) + 1)


def k_block_rate_region(base: RateRegion, k: int) -> RateRegion:
    """Transform every oneshot subset bound by the closed form; k = 1 is
    the identity."""
    if k < 1:
        raise ValueError(f"block length must be >= 1, got {k}")
    bounds = {ids: block_bound(m, k) for ids, m in base.subset_bounds.items()}
    c_b = block_bound(base.c_b, k)
    return RateRegion(
        n_informants=base.n_informants,
        subset_bounds=bounds,
        c_b=c_b,
        corners=_corners(base.n_informants, bounds, c_b),
    )


@dataclass(frozen=True)
class AsymptoticRegion:
    n_informants: int
    subset_bounds: Mapping[frozenset[int], float]
    c_b: float
    corners: tuple[tuple[float, float], ...]


def asymptotic_rate_region(base: RateRegion) -> AsymptoticRegion:
    """Per-subset limits of the k-block bounds as the block length grows."""
    bounds = {ids: asymptotic_bound(m) for ids, m in base.subset_bounds.items()}
    c_b = asymptotic_bound(base.c_b)
    corners = ()
    if base.n_informants == 2:
        b1 = bounds[frozenset({1})]
        b2 = bounds[frozenset({2})]
        corners = ((b1, c_b - b1), (c_b - b2, b2))
    return AsymptoticRegion(base.n_informants, bounds, c_b, corners)


def normalized_region(region: RateRegion, k: int) -> RateRegion:
    """Per-block view of a k-extension's region (every bound divided by k)."""
    bounds = {ids: m / k for ids, m in region.subset_bounds.items()}
    c_b = region.c_b / k
    return RateRegion(
        n_informants=region.n_informants,
        subset_bounds=bounds,
        c_b=c_b,
        corners=_corners(region.n_informants, bounds, c_b)
        if region.n_informants == 2
        else (),
    )


@dataclass(frozen=True)
class BlockRow:
    k: int
    cb_k: int
    per_block: Fraction
    gap: Fraction
    region: RateRegion  # per-block view of the k-extension's region


@dataclass(frozen=True)
class BlockGainReport:
    rows: tuple[BlockRow, ...]
    asymptotic: AsymptoticRegion
    truncated_at: int | None  # first k the caps refused, if any
    gap_ok: bool  # oneshot c_b - per-block value <= 1 on every row
    monotone_ok: bool  # per-block values nonincreasing in k
    lower_ok: bool  # per-block value >= ceil(k log2 mu)/k on every row


def block_gain_report(
    s: SupportSet,
    k_max: int,
    max_mu: int = DEFAULT_MAX_MU,
    max_width: int = DEFAULT_MAX_WIDTH,
) -> BlockGainReport:
    """Per-block compressibility and regions for k = 1..k_max plus the
    asymptotic row; truncates with a notice when caps stop the table."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    rows: list[BlockRow] = []
    truncated_at = None
    base_cb = None
    for k in range(1, k_max + 1):
        try:
            if s.mu**k > max_mu:
                raise CapExceededError(f"mu^k = {s.mu ** k} above cap {max_mu}")
            ext = s if k == 1 else s.k_extension(k, max_tuples=max_mu)
            region = rate_region(ext, max_mu, max_width)
            cb_k = int(region.c_b)
            if base_cb is None:
                base_cb = cb_k
            per_block = Fraction(cb_k, k)
            rows.append(
                BlockRow(
                    k=k,
                    cb_k=cb_k,
                    per_block=per_block,
                    gap=Fraction(base_cb) - per_block,
                    region=normalized_region(region, k),
                )
            )
        except CapExceededError:
            truncated_at = k
            break
    if not rows:
        raise CapExceededError("even the oneshot instance exceeds the caps")
    base_region = rows[0].region
    asym = asymptotic_rate_region(
        RateRegion(
            base_region.n_informants,
            {ids: Fraction(m) for ids, m in base_region.subset_bounds.items()},
            base_region.c_b,
            base_region.corners,
        )
    )
    gap_ok = all(row.gap <= 1 for row in rows)
    monotone_ok = all(
        rows[i].per_block >= rows[i + 1].per_block for i in range(len(rows) - 1)
    )
    lower_ok = all(
        row.per_block >= Fraction((s.mu**row.k - 1).bit_length(), row.k)
        for row in rows
    )
    return BlockGainReport(
        rows=tuple(rows),
        asymptotic=asym,
        truncated_at=truncated_at,
        gap_ok=gap_ok,
        monotone_ok=monotone_ok,
        lower_ok=lower_ok,
    )
