"""Brute-force ground truth for compressibility on small instances.

Everything here is deliberately naive: certificates come from subset
enumeration in increasing size, and the tree search explores every query
order without memoization or pruning.  The point is to certify the exact
solvers in `compress` on instances small enough to afford it; the caps are
hard errors, never silent truncation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CapExceededError, MembershipError
from .support import Label, SupportSet

MAX_CERTIFICATE_WIDTH = 20
MAX_TREE_MU = 12
MAX_TREE_WIDTH = 8


@dataclass(frozen=True)
class Certificate:
    """A minimum set of bit locations whose values pin down one vector."""

    x: tuple[Label, ...]
    bit_subset: tuple[int, ...]
    size: int


def _difference_masks(s: SupportSet, pos: int) -> list[int]:
    """Nonzero XOR masks between x's codeword and every other codeword."""
    cw = s.codewords[pos]
    return sorted({cw ^ other for other in s.codewords if other != cw})


def min_certificate(s: SupportSet, x: Sequence[Label]) -> Certificate:
    """Smallest bit subset such that x's values there leave only x.

    Subsets are enumerated in increasing size, lexicographic within a size,
    so the witness is deterministic.  A subset works exactly when it hits
    every difference mask against the other codewords.
    """
    w = s.layout.total_width
    if w > MAX_CERTIFICATE_WIDTH:
        raise CapExceededError(
            f"certificate search over {w} bits exceeds the cap {MAX_CERTIFICATE_WIDTH}"
        )
    pos = s.index_of(x)
    diffs = _difference_masks(s, pos)
    if not diffs:
        return Certificate(tuple(x), (), 0)
    bit_masks = [1 << (w - 1 - j) for j in range(w)]
    for size in range(1, w + 1):
        for subset in itertools.combinations(range(w), size):
            m = 0
            for j in subset:
                m |= bit_masks[j]
            if all(d & m for d in diffs):
                return Certificate(tuple(x), subset, size)
    raise MembershipError(f"{tuple(x)!r} shares its codeword with another tuple")


def certificate_c_b(s: SupportSet) -> int:
    """Worst case over members of the minimum defining-subset size."""
    return max(min_certificate(s, x).size for x in s.tuples)


@dataclass(frozen=True)
class TreeSearchResult:
    optimum: int
    per_informant_min_bits: tuple[int, ...]
    pair_sets: tuple[frozenset[tuple[int, int]], ...]


def _check_tree_caps(s: SupportSet) -> None:
    if s.mu > MAX_TREE_MU or s.layout.total_width > MAX_TREE_WIDTH:
        raise CapExceededError(
            f"tree search caps are mu <= {MAX_TREE_MU} and width <= {MAX_TREE_WIDTH}; "
            f"got mu={s.mu}, width={s.layout.total_width}"
        )


def exhaustive_optimum(s: SupportSet) -> int:
    """Minimum worst-case transmitted bits over every adaptive strategy."""
    _check_tree_caps(s)
    cws = s.codewords
    w = s.layout.total_width

    def best(idxs: tuple[int, ...]) -> int:
        if len(idxs) == 1:
            return 0
        out = None
        for j in range(w):
            shift = w - 1 - j
            one = tuple(k for k in idxs if cws[k] >> shift & 1)
            if not one or len(one) == len(idxs):
                continue
            zero = tuple(k for k in idxs if not cws[k] >> shift & 1)
            v = 1 + max(best(zero), best(one))
            if out is None or v < out:
                out = v
        assert out is not None
        return out

    return best(tuple(range(s.mu)))


def exhaustive_subset_pairs(
    s: SupportSet, informants: Iterable[int]
) -> frozenset[tuple[int, int]]:
    """All achievable (worst total, worst bits from the subset) cost pairs.

    One pair per strategy outcome, across every adaptive strategy; pairs
    are deduplicated but never Pareto-pruned, so optimal strategies can be
    read off directly: the subset's minimum bits at optimal total t* is
    ``min(sub for (t, sub) in pairs if t == t*)``.
    """
    _check_tree_caps(s)
    ids = {int(i) for i in informants}
    for i in ids:
        if not 1 <= i <= s.n:
            raise ValueError(f"informant id {i} outside 1..{s.n}")
    cws = s.codewords
    w = s.layout.total_width
    owner_in_subset = [s.layout.owner_of(j)[0] + 1 in ids for j in range(w)]

    def pairs(idxs: tuple[int, ...]) -> frozenset[tuple[int, int]]:
        if len(idxs) == 1:
            return frozenset({(0, 0)})
        out: set[tuple[int, int]] = set()
        for j in range(w):
            shift = w - 1 - j
            one = tuple(k for k in idxs if cws[k] >> shift & 1)
            if not one or len(one) == len(idxs):
                continue
            zero = tuple(k for k in idxs if not cws[k] >> shift & 1)
            weight = 1 if owner_in_subset[j] else 0
            p_zero = pairs(zero)
            p_one = pairs(one)
            for t0, s0 in p_zero:
                for t1, s1 in p_one:
                    out.add((1 + max(t0, t1), weight + max(s0, s1)))
        return frozenset(out)

    return pairs(tuple(range(s.mu)))


def exhaustive_tree_search(s: SupportSet) -> TreeSearchResult:
    """Optimum plus, per informant, its minimum worst-case bits over the
    strategies achieving that optimum."""
    optimum = exhaustive_optimum(s)
    pair_sets = []
    mins = []
    for i in range(1, s.n + 1):
        ps = exhaustive_subset_pairs(s, (i,))
        pair_sets.append(ps)
        mins.append(min(sub for t, sub in ps if t == optimum))
    return TreeSearchResult(optimum, tuple(mins), tuple(pair_sets))
