"""Joint support sets, their binary codecs, conditioning, and block extensions.

The central object is a finite set of N-tuples (one component per informant)
together with a fixed binary code: informant i's values are ranked inside an
ordered marginal support and written big-endian in ``ceil(log2 mu_i)`` bits;
a full data vector is encoded as the concatenation of the per-informant
words.  Global bit index 0 is the leftmost bit of informant 1's word.

Conditioning on known bit values (`condition`) returns the subset of tuples
whose codewords agree with the known bits.  The result keeps the *parent's*
code, so bit indices keep their meaning across chained conditioning; this is
what the query protocols rely on.  `project` and `k_extension` instead build
fresh sets that carry their own code.

Value ranking is deterministic: labels are ordered by the declared alphabet
when one is given, otherwise ascending (numerically when every label parses
as an integer, else lexicographically).
"""

from __future__ import annotations

import itertools
import warnings
from bisect import bisect_right
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    CapExceededError,
    DegenerateSupportError,
    MembershipError,
    ParseError,
)

Label = Hashable

# k-extensions refuse to materialize more than this many tuples.
DEFAULT_EXTENSION_CAP = 1_000_000


def ceil_log2(n: int) -> int:
    """Smallest w with 2**w >= n, for n >= 1.  Integer-exact."""
    if n < 1:
        raise ValueError(f"ceil_log2 needs a positive count, got {n}")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class BitLayout:
    """Per-informant bit widths and global bit indexing of the joint code."""

    widths: tuple[int, ...]
    offsets: tuple[int, ...]
    total_width: int

    @classmethod
    def from_widths(cls, widths: Sequence[int]) -> "BitLayout":
        offsets = []
        acc = 0
        for w in widths:
            offsets.append(acc)
            acc += w
        return cls(tuple(widths), tuple(offsets), acc)

    def owner_of(self, j: int) -> tuple[int, int]:
        """Map a global bit index to (informant index 0-based, local bit)."""
        if not 0 <= j < self.total_width:
            raise ValueError(f"global bit index {j} outside [0, {self.total_width})")
        # zero-width informants own no index; bisect skips them
        i = bisect_right(self.offsets, j) - 1
        while self.widths[i] == 0:  # pragma: no cover - offsets tie only at width 0
            i -= 1
        return i, j - self.offsets[i]

    def global_of(self, informant0: int, local: int) -> int:
        if not 0 <= local < self.widths[informant0]:
            raise ValueError(
                f"local bit {local} outside informant {informant0 + 1}'s width "
                f"{self.widths[informant0]}"
            )
        return self.offsets[informant0] + local


class BitAssignment:
    """A set of (global bit index, bit value) facts known at the sink."""

    __slots__ = ("facts",)

    def __init__(self, facts: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(facts, Mapping):
            items = facts.items()
        else:
            items = list(facts)
        seen: dict[int, int] = {}
        for j, b in items:
            j = int(j)
            b = int(b)
            if j < 0:
                raise ValueError(f"negative bit index {j}")
            if b not in (0, 1):
                raise ValueError(f"bit value must be 0 or 1, got {b}")
            if j in seen and seen[j] != b:
                raise ValueError(f"contradictory facts for bit {j}")
            seen[j] = b
        self.facts: tuple[tuple[int, int], ...] = tuple(sorted(seen.items()))

    def __iter__(self):
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitAssignment) and self.facts == other.facts

    def __hash__(self) -> int:
        return hash(self.facts)

    def __repr__(self) -> str:
        body = ", ".join(f"{j}={b}" for j, b in self.facts)
        return f"BitAssignment({body})"


class BitPartition(NamedTuple):
    """Defined bit locations with their forced values, and the undefined rest."""

    defined: dict[int, int]
    undefined: tuple[int, ...]


def _inferred_order(labels: Iterable[Label]) -> tuple[Label, ...]:
    """Ascending order for an inferred alphabet: numeric when possible."""
    distinct = list(dict.fromkeys(labels))
    try:
        return tuple(sorted(distinct, key=lambda v: (0, int(v))))
    except (TypeError, ValueError):
        return tuple(sorted(distinct, key=str))


class SupportSet:
    """Canonical, immutable joint support set with its binary codec.

    ``alphabets`` fixes the label order per informant; ``coding_supports``
    is the ordered label set actually used for ranking and bit widths.  For
    a set built from scratch the coding support is just its own marginal
    support; a set produced by `condition` inherits the parent's coding so
    that conditioning never re-encodes anything.
    """

    __slots__ = (
        "n",
        "alphabets",
        "tuples",
        "coding_supports",
        "marginals",
        "layout",
        "codewords",
        "_ranks",
        "_pos",
    )

    def __init__(
        self,
        tuples: Iterable[Sequence[Label]],
        alphabets: Sequence[Sequence[Label]] | None = None,
        *,
        _coding: tuple[tuple[Label, ...], ...] | None = None,
    ):
        tups = [tuple(t) for t in tuples]
        if alphabets is not None:
            alphabets = tuple(tuple(a) for a in alphabets)
            n = len(alphabets)
        elif _coding is not None:
            n = len(_coding)
        elif tups:
            n = len(tups[0])
        else:
            raise DegenerateSupportError(
                "cannot build an empty support set without alphabets"
            )
        for t in tups:
            if len(t) != n:
                raise ParseError(
                    f"inconsistent arity: expected {n}-tuples, got {len(t)}-tuple {t!r}"
                )
        if len(set(tups)) != len(tups):
            raise ParseError("duplicate tuples; use build_support_set to collapse them")

        used: list[set[Label]] = [set() for _ in range(n)]
        for t in tups:
            for i, v in enumerate(t):
                used[i].add(v)

        if alphabets is None:
            if _coding is not None:
                alphabets = _coding
            else:
                alphabets = tuple(_inferred_order(u) for u in used)
        for i, a in enumerate(alphabets):
            if len(set(a)) != len(a):
                raise ParseError(f"alphabet of informant {i + 1} has repeated labels")
            extra = used[i] - set(a)
            if extra:
                raise ParseError(
                    f"informant {i + 1} uses labels outside its alphabet: {sorted(map(str, extra))}"
                )

        if _coding is None:
            coding = tuple(
                tuple(v for v in alphabets[i] if v in used[i]) for i in range(n)
            )
        else:
            coding = _coding
            for i in range(n):
                if not used[i] <= set(coding[i]):
                    raise MembershipError(
                        f"informant {i + 1} label outside its coding support"
                    )

        ranks = tuple({v: r for r, v in enumerate(c)} for c in coding)
        widths = tuple(ceil_log2(len(c)) if len(c) > 1 else 0 for c in coding)
        lay = BitLayout.from_widths(widths)

        # canonical order: lexicographic by per-informant rank, which equals
        # numeric order of the concatenated codewords
        def codeword(t: tuple[Label, ...]) -> int:
            c = 0
            for i in range(n):
                c = (c << widths[i]) | ranks[i][t[i]]
            return c

        order = sorted(range(len(tups)), key=lambda k: codeword(tups[k]))
        tups = [tups[k] for k in order]

        self.n = n
        self.alphabets = alphabets
        self.tuples = tuple(tups)
        self.coding_supports = coding
        self.marginals = tuple(
            tuple(v for v in coding[i] if v in used[i]) for i in range(n)
        )
        self.layout = lay
        self.codewords = tuple(codeword(t) for t in self.tuples)
        self._ranks = ranks
        self._pos = {t: k for k, t in enumerate(self.tuples)}

    # -- basic accessors ---------------------------------------------------

    @property
    def mu(self) -> int:
        """Cardinality of the set (its ambiguity)."""
        return len(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __contains__(self, x) -> bool:
        return tuple(x) in self._pos

    def index_of(self, x: Sequence[Label]) -> int:
        try:
            return self._pos[tuple(x)]
        except KeyError:
            raise MembershipError(f"{tuple(x)!r} is not in the support set") from None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SupportSet)
            and self.n == other.n
            and self.coding_supports == other.coding_supports
            and self.tuples == other.tuples
        )

    def __hash__(self) -> int:
        return hash((self.n, self.coding_supports, self.tuples))

    def __repr__(self) -> str:
        return (
            f"SupportSet(n={self.n}, mu={self.mu}, widths={self.layout.widths})"
        )

    # -- codec ---------------------------------------------------------------

    def bit_of_codeword(self, codeword: int, j: int) -> int:
        return (codeword >> (self.layout.total_width - 1 - j)) & 1

    def encode(self, x: Sequence[Label]) -> str:
        """Concatenated big-endian rank encoding of a member vector."""
        cw = self.codewords[self.index_of(x)]
        return format(cw, f"0{self.layout.total_width}b") if self.layout.total_width else ""

    def decode(self, bits: str) -> tuple[Label, ...]:
        """Inverse of `encode` on valid codewords of members."""
        w = self.layout.total_width
        if len(bits) != w or any(c not in "01" for c in bits):
            raise MembershipError(f"expected a {w}-bit binary string, got {bits!r}")
        values = []
        for i in range(self.n):
            off, wi = self.layout.offsets[i], self.layout.widths[i]
            rank = int(bits[off : off + wi], 2) if wi else 0
            coding = self.coding_supports[i]
            if rank >= len(coding):
                raise MembershipError(
                    f"informant {i + 1} word {bits[off:off + wi]} has no value (rank {rank})"
                )
            values.append(coding[rank])
        x = tuple(values)
        if x not in self._pos:
            raise MembershipError(f"decoded vector {x!r} is not in the support set")
        return x

    # -- views and operations ------------------------------------------------

    def subset(self, indices: Iterable[int]) -> "SupportSet":
        """Subset view (same codec) from indices into this set's tuple order."""
        idx = sorted(set(indices))
        view = object.__new__(SupportSet)
        view.n = self.n
        view.alphabets = self.alphabets
        view.tuples = tuple(self.tuples[k] for k in idx)
        view.coding_supports = self.coding_supports
        used = [set() for _ in range(self.n)]
        for t in view.tuples:
            for i, v in enumerate(t):
                used[i].add(v)
        view.marginals = tuple(
            tuple(v for v in self.coding_supports[i] if v in used[i])
            for i in range(self.n)
        )
        view.layout = self.layout
        view.codewords = tuple(self.codewords[k] for k in idx)
        view._ranks = self._ranks
        view._pos = {t: k for k, t in enumerate(view.tuples)}
        return view

    def condition(self, assignment: BitAssignment | Mapping[int, int]) -> "SupportSet":
        """Tuples whose codewords agree with every known bit.  May be empty."""
        if not isinstance(assignment, BitAssignment):
            assignment = BitAssignment(assignment)
        w = self.layout.total_width
        mask = 0
        want = 0
        for j, b in assignment:
            if j >= w:
                raise ValueError(f"bit index {j} outside layout of width {w}")
            bit = 1 << (w - 1 - j)
            mask |= bit
            if b:
                want |= bit
        if not mask:
            return self
        idx = [k for k, cw in enumerate(self.codewords) if cw & mask == want]
        return self.subset(idx)

    def defined_bits(self) -> BitPartition:
        """Partition global bit indices into forced (defined) and undefined."""
        if not self.tuples:
            raise DegenerateSupportError("defined_bits needs a nonempty set")
        w = self.layout.total_width
        first = self.codewords[0]
        agree_mask = ~0
        for cw in self.codewords:
            agree_mask &= ~(cw ^ first)
        defined: dict[int, int] = {}
        undefined: list[int] = []
        for j in range(w):
            bit = 1 << (w - 1 - j)
            if agree_mask & bit:
                defined[j] = 1 if first & bit else 0
            else:
                undefined.append(j)
        return BitPartition(defined, tuple(undefined))

    def project(self, informants: Iterable[int]) -> "SupportSet":
        """Marginal support of a nonempty subset of informants (1-based ids)."""
        ids = sorted(set(int(i) for i in informants))
        if not ids:
            raise ValueError("projection needs a nonempty informant subset")
        for i in ids:
            if not 1 <= i <= self.n:
                raise ValueError(f"informant id {i} outside 1..{self.n}")
        if not self.tuples:
            raise DegenerateSupportError("cannot project an empty set")
        proj = {tuple(t[i - 1] for i in ids) for t in self.tuples}
        alph = tuple(self.coding_supports[i - 1] for i in ids)
        return SupportSet(sorted(proj, key=str), alphabets=alph)

    def k_extension(self, k: int, max_tuples: int = DEFAULT_EXTENSION_CAP) -> "SupportSet":
        """k-fold Cartesian power; informant i's labels become k-tuples.

        The 1-extension is the set itself.  The extension's informant-i
        alphabet is the full k-fold product of the marginal support, ordered
        lexicographically by rank, so extension codewords agree with the
        base-mu_i positional value of the component ranks.
        """
        if k < 1:
            raise ValueError(f"extension order must be >= 1, got {k}")
        if k == 1:
            return self
        if not self.tuples:
            raise DegenerateSupportError("cannot extend an empty set")
        total = self.mu**k
        if total > max_tuples:
            raise CapExceededError(
                f"k-extension would hold {total} tuples, above the cap {max_tuples}"
            )
        ext_tuples = []
        for draw in itertools.product(self.tuples, repeat=k):
            ext_tuples.append(
                tuple(tuple(sample[i] for sample in draw) for i in range(self.n))
            )
        ext_alphabets = tuple(
            tuple(itertools.product(self.marginals[i], repeat=k)) for i in range(self.n)
        )
        return SupportSet(ext_tuples, alphabets=ext_alphabets)


# -- module-level operation surface -------------------------------------------


def build_support_set(
    entries: Iterable[tuple[Sequence[Label], float | None]],
    alphabets: Sequence[Sequence[Label] | None] | None = None,
) -> SupportSet:
    """Build a canonical support set from (tuple, optional weight) entries.

    Zero-weight entries are dropped (they carry no support); negative weights
    are rejected; duplicates are collapsed with a warning.  Weights are
    otherwise discarded: everything downstream depends only on the support.
    """
    kept: list[tuple[Label, ...]] = []
    arity: int | None = None
    for entry in entries:
        try:
            values, weight = entry
        except (TypeError, ValueError):
            raise ParseError(f"entry {entry!r} is not a (tuple, weight) pair") from None
        values = tuple(values)
        if arity is None:
            arity = len(values)
        elif len(values) != arity:
            raise ParseError(
                f"inconsistent arity: expected {arity}-tuples, got {values!r}"
            )
        if weight is not None:
            weight = float(weight)
            if weight < 0:
                raise ParseError(f"negative weight {weight} for {values!r}")
            if weight == 0.0:
                continue
        kept.append(values)

    distinct = list(dict.fromkeys(kept))
    dups = len(kept) - len(distinct)
    if dups:
        warnings.warn(f"collapsed {dups} duplicate support tuples", stacklevel=2)
    if not distinct:
        raise DegenerateSupportError("degenerate distribution: no positive-weight cells")

    full_alphabets = None
    if alphabets is not None:
        n = len(distinct[0])
        if len(alphabets) != n:
            raise ParseError(
                f"{len(alphabets)} alphabets declared for {n}-tuples"
            )
        full_alphabets = []
        for i, a in enumerate(alphabets):
            if a is None:
                full_alphabets.append(_inferred_order(t[i] for t in distinct))
            else:
                full_alphabets.append(tuple(a))
    return SupportSet(distinct, alphabets=full_alphabets)


def support_set_from_tuples(
    tuples: Iterable[Sequence[Label]],
    alphabets: Sequence[Sequence[Label] | None] | None = None,
) -> SupportSet:
    """Convenience wrapper: every tuple has implicit positive weight."""
    return build_support_set(((t, None) for t in tuples), alphabets=alphabets)


def project(s: SupportSet, informants: Iterable[int]) -> SupportSet:
    return s.project(informants)


def layout(s: SupportSet) -> BitLayout:
    return s.layout


def encode(s: SupportSet, x: Sequence[Label]) -> str:
    return s.encode(x)


def decode(s: SupportSet, bits: str) -> tuple[Label, ...]:
    return s.decode(bits)


def condition(s: SupportSet, assignment: BitAssignment | Mapping[int, int]) -> SupportSet:
    return s.condition(assignment)


def defined_bits(s: SupportSet) -> BitPartition:
    return s.defined_bits()


def k_extension(
    s: SupportSet, k: int, max_tuples: int = DEFAULT_EXTENSION_CAP
) -> SupportSet:
    return s.k_extension(k, max_tuples=max_tuples)
