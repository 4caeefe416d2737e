"""Ambiguity measures over joint support sets, and their axiom battery.

Ambiguity of a set is its cardinality; information ambiguity is the bit
count ``ceil(log2 mu)`` needed to name one element in the worst case.
Conditional variants count the values one informant subset can still take
once another subset's values are known.  All logarithms are computed on
exact integer counts through bit length, never floating point.

`property_suite` turns the measure's axioms (expansibility, monotonicity,
symmetry, subadditivity, additivity within one bit per variable, the
conditioning and chain inequalities, and the intersection identities for
conditional sets) into executable checks evaluated exhaustively within
small caps.  Failures indicate implementation bugs, so the suite doubles as
a tripwire.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import CapExceededError, MembershipError
from .support import Label, SupportSet, build_support_set, ceil_log2


def ambiguity(s: SupportSet) -> int:
    """Number of jointly possible data vectors."""
    return s.mu


def information_ambiguity(s: SupportSet) -> int:
    """Worst-case bits to name one element: ceil(log2 mu)."""
    return ceil_log2(s.mu)


def _check_ids(s: SupportSet, ids: Iterable[int], what: str) -> tuple[int, ...]:
    out = tuple(sorted(set(int(i) for i in ids)))
    if not out:
        raise ValueError(f"{what} must be a nonempty informant subset")
    for i in out:
        if not 1 <= i <= s.n:
            raise ValueError(f"{what} id {i} outside 1..{s.n}")
    return out

def _marginal_tuples(s: SupportSet, ids: Sequence[int]) -> set[tuple[Label, ...]]:
    return {tuple(t[i - 1] for i in ids) for t in s.tuples}


def _conditional_table(
    s: SupportSet, targets: Sequence[int], given_ids: Sequence[int]
) -> dict[tuple[Label, ...], int]:
    """Map each jointly possible given-value to its conditional ambiguity."""
    pairs = {
        (
            tuple(t[i - 1] for i in targets),
            tuple(t[i - 1] for i in given_ids),
        )
        for t in s.tuples
    }
    table: dict[tuple[Label, ...], int] = {}
    for _, b in pairs:
        table[b] = table.get(b, 0) + 1
    return table


def conditional_support(
    s: SupportSet, targets: Iterable[int], given: Mapping[int, Label]
) -> tuple[tuple[Label, ...], ...]:
    """Possible target-subset values compatible with the given assignment."""
    a = _check_ids(s, targets, "target")
    b = _check_ids(s, given.keys(), "given")
    if set(a) & set(b):
        raise ValueError("target and given informant subsets must be disjoint")
    xb = tuple(given[i] for i in b)
    if xb not in _marginal_tuples(s, b):
        raise MembershipError(
            f"conditioning value {xb!r} not in the marginal support of {b}"
        )
    hits = {
        tuple(t[i - 1] for i in a)
        for t in s.tuples
        if all(t[i - 1] == given[i] for i in b)
    }
    return tuple(sorted(hits, key=str))


def conditional_ambiguity(
    s: SupportSet, targets: Iterable[int], given: Mapping[int, Label]
) -> int:
    """Count of target values possible under the given assignment."""
    return len(conditional_support(s, targets, given))


def max_conditional_ambiguity(
    s: SupportSet, targets: Iterable[int], given_ids: Iterable[int]
) -> int:
    """Worst conditional ambiguity over every value the given subset takes."""
    a = _check_ids(s, targets, "target")
    b = _check_ids(s, given_ids, "given")
    if set(a) & set(b):
        raise ValueError("target and given informant subsets must be disjoint")
    return max(_conditional_table(s, a, b).values())


@dataclass(frozen=True)
class ChainBound:
    bits: int
    order: tuple[int, ...]  # 1-based informant ids, best permutation


def chain_bound(s: SupportSet, max_informants: int = 8) -> ChainBound:
    """Tightest permutation chain of max-conditional information ambiguities.

    For each informant ordering, charges ceil(log2) of the first marginal
    ambiguity plus ceil(log2) of each later informant's maximum conditional
    ambiguity given the earlier ones, and returns the cheapest ordering.
    """
    if s.n > max_informants:
        raise CapExceededError(
            f"chain bound over {s.n} informants exceeds the cap {max_informants}"
        )
    best: ChainBound | None = None
    for perm in itertools.permutations(range(1, s.n + 1)):
        total = ceil_log2(len(_marginal_tuples(s, (perm[0],))))
        for i in range(1, s.n):
            table = _conditional_table(s, (perm[i],), tuple(sorted(perm[:i])))
            total += ceil_log2(max(table.values()))
        if best is None or total < best.bits:
            best = ChainBound(total, perm)
    assert best is not None
    return best


@dataclass(frozen=True)
class AmbiguityReport:
    """Joint, marginal, and pairwise-conditional ambiguity figures."""

    joint_ambiguity: int
    information_ambiguity: int
    per_informant: tuple[tuple[int, int], ...]  # (mu_i, info_i) per informant
    conditional_tables: dict[tuple[int, int], dict[Label, int]]
    max_conditionals: dict[tuple[int, int], int]
    chain: ChainBound | None


def measure(s: SupportSet, pair_tables_up_to: int = 6) -> AmbiguityReport:
    """Full ambiguity report: marginals, pairwise conditionals, chain bound.

    Pairwise conditional tables index (target i given j) by j's value; they
    are omitted beyond `pair_tables_up_to` informants to bound output size.
    """
    per = tuple(
        (len(m), ceil_log2(len(m)) if m else 0) for m in s.marginals
    )
    tables: dict[tuple[int, int], dict[Label, int]] = {}
    maxes: dict[tuple[int, int], int] = {}
    if 2 <= s.n <= pair_tables_up_to:
        for i in range(1, s.n + 1):
            for j in range(1, s.n + 1):
                if i == j:
                    continue
                raw = _conditional_table(s, (i,), (j,))
                tables[(i, j)] = {b[0]: c for b, c in raw.items()}
                maxes[(i, j)] = max(raw.values())
    chain = chain_bound(s) if s.n <= 8 else None
    return AmbiguityReport(
        joint_ambiguity=s.mu,
        information_ambiguity=ceil_log2(s.mu),
        per_informant=per,
        conditional_tables=tables,
        max_conditionals=maxes,
        chain=chain,
    )


# -- axiom battery -------------------------------------------------------------


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class PropertyReport:
    checks: tuple[PropertyCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> PropertyCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _subset_sizes(n: int) -> range:
    # exhaustive for small sets; singletons and pairs beyond that
    return range(1, n + 1) if n <= 4 else range(1, 3)


def _disjoint_pairs(n: int):
    ids = range(1, n + 1)
    for ka in _subset_sizes(n):
        for a in itertools.combinations(ids, ka):
            rest = [i for i in ids if i not in a]
            for kb in _subset_sizes(len(rest)) if rest else range(0):
                for b in itertools.combinations(rest, kb):
                    yield a, b


def property_suite(s: SupportSet, removal_cap: int = 12) -> PropertyReport:
    """Evaluate every measure axiom on one support set; all should pass."""
    checks: list[PropertyCheck] = []
    info = information_ambiguity(s)
    per_info = [ceil_log2(len(m)) for m in s.marginals]

    # conditioning never increases ambiguity, for every disjoint (A, B) pair
    if s.n >= 2:
        bad = None
        tried = 0
        for a, b in _disjoint_pairs(s.n):
            mu_a = len(_marginal_tuples(s, a))
            for xb, c in _conditional_table(s, a, b).items():
                tried += 1
                if c > mu_a or ceil_log2(c) > ceil_log2(mu_a):
                    bad = f"A={a} B={b} x_B={xb!r}: {c} > {mu_a}"
                    break
            if bad:
                break
        checks.append(
            PropertyCheck(
                "conditioning-reduces",
                bad is None,
                bad or f"{tried} conditional values checked",
            )
        )

    # joint information ambiguity never exceeds the sum of marginal ones
    ok = info <= sum(per_info)
    checks.append(
        PropertyCheck("subadditivity", ok, f"{info} <= {sum(per_info)}")
    )

    # on full product sets, equality within one bit per informant
    product_size = 1
    for m in s.marginals:
        product_size *= len(m)
    if s.mu == product_size:
        gap = abs(info - sum(per_info))
        checks.append(
            PropertyCheck("additivity", gap <= s.n, f"product set, |gap|={gap}")
        )
    else:
        checks.append(
            PropertyCheck("additivity", True, "not a product set; vacuous")
        )

    # adding a zero-weight cell changes nothing
    spare = next(
        (c for c in itertools.product(*s.marginals) if c not in s), None
    )
    if spare is None:
        checks.append(
            PropertyCheck("expansibility", True, "no spare cell; vacuous")
        )
    else:
        entries = [(t, None) for t in s.tuples] + [(spare, 0.0)]
        rebuilt = build_support_set(entries, alphabets=s.coding_supports)
        checks.append(
            PropertyCheck(
                "expansibility",
                rebuilt == s,
                f"zero-weight cell {spare!r} added",
            )
        )

    # subsets (same layout) never have larger information ambiguity
    bad = None
    for k in range(min(s.mu, removal_cap)):
        if s.mu == 1:
            break
        sub = s.subset(i for i in range(s.mu) if i != k)
        if information_ambiguity(sub) > info:
            bad = f"dropping tuple #{k} raised the measure"
            break
    checks.append(
        PropertyCheck("monotonicity", bad is None, bad or "tuple removals checked")
    )

    # permuting informants preserves mu and the measure
    perms = (
        list(itertools.permutations(range(s.n)))
        if s.n <= 3
        else [tuple(reversed(range(s.n))), tuple(range(1, s.n)) + (0,)]
    )
    bad = None
    for p in perms:
        permuted = SupportSet(
            [tuple(t[q] for q in p) for t in s.tuples],
            alphabets=[s.coding_supports[q] for q in p],
        )
        if permuted.mu != s.mu or information_ambiguity(permuted) != info:
            bad = f"permutation {p} changed the measure"
            break
    checks.append(PropertyCheck("symmetry", bad is None, bad or f"{len(perms)} permutations"))

    # every permutation chain of max-conditional terms dominates the measure
    if s.n >= 2 and s.n <= 8:
        bad = None
        worst = None
        for perm in itertools.permutations(range(1, s.n + 1)):
            total = ceil_log2(len(_marginal_tuples(s, (perm[0],))))
            for i in range(1, s.n):
                table = _conditional_table(s, (perm[i],), tuple(sorted(perm[:i])))
                total += ceil_log2(max(table.values()))
            if total < info:
                bad = f"chain {perm} gives {total} < {info}"
                break
            worst = total if worst is None else min(worst, total)
        checks.append(
            PropertyCheck("chain-rule", bad is None, bad or f"min chain {worst} >= {info}")
        )
        cb = chain_bound(s)
        checks.append(
            PropertyCheck(
                "chain-bound-dominates", cb.bits >= info, f"{cb.bits} >= {info}"
            )
        )

    # conditional sets given several informants equal the intersection of
    # the sets given each one alone; counts obey the min bounds
    if s.n >= 3:
        bad_set = None
        bad_min = None
        bad_hat = None
        for i in range(1, s.n + 1):
            others = [j for j in range(1, s.n + 1) if j != i]
            for ka in range(2, min(len(others), max(_subset_sizes(s.n))) + 1):
                for a in itertools.combinations(others, ka):
                    hat_lhs = 0
                    for xa in sorted(_marginal_tuples(s, a), key=str):
                        given = dict(zip(a, xa))
                        lhs = {
                            v[0] for v in conditional_support(s, (i,), given)
                        }
                        rhs: set | None = None
                        singles = []
                        for j, xj in given.items():
                            sj = {
                                v[0]
                                for v in conditional_support(s, (i,), {j: xj})
                            }
                            singles.append(len(sj))
                            rhs = sj if rhs is None else rhs & sj
                        if lhs != rhs and bad_set is None:
                            bad_set = f"i={i} A={a} x_A={xa!r}"
                        if len(lhs) > min(singles) and bad_min is None:
                            bad_min = f"i={i} A={a} x_A={xa!r}"
                        hat_lhs = max(hat_lhs, len(lhs))
                    hats = [
                        max_conditional_ambiguity(s, (i,), (j,)) for j in a
                    ]
                    if hat_lhs > min(hats) and bad_hat is None:
                        bad_hat = f"i={i} A={a}: {hat_lhs} > {min(hats)}"
        checks.append(
            PropertyCheck("intersection", bad_set is None, bad_set or "set identities hold")
        )
        checks.append(
            PropertyCheck("mu-min-bound", bad_min is None, bad_min or "count bounds hold")
        )
        checks.append(
            PropertyCheck("mu-hat-min-bound", bad_hat is None, bad_hat or "max bounds hold")
        )

    return PropertyReport(tuple(checks))
