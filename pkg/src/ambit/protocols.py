"""Interactive sink/informant query protocols with exact bit accounting.

The sink knows the joint support set; each informant knows only its own
value, encoded in its fixed-width word.  Communication proceeds in rounds:
the sink names bit locations, informants answer with bit values, and the
sink conditions its ambiguity set on the answers.  Informants are
memoryless; all adaptivity lives at the sink.

Two concrete protocols are implemented.

* Bit-serial: one bit per round.  The sink queries the undefined bit
  location whose 0/1 counts over the current conditional set are closest to
  balanced (``argmin |N0 - N1|``), so each answer splits the set as close
  to half as possible.
* Round-parallel: ``ceil(log2 mu)`` bits per round, chosen sequentially
  under hypothesized worst-case answers to the earlier picks of the same
  batch, then queried together; the sink conditions on the actual answers.

Responses come from a `Responder`.  Honest responders answer with a fixed
data vector's bits.  `Responder.adversarial()` realizes the protocol's
exact worst case: at each answer it looks ahead along the protocol's own
future behavior and keeps the costlier branch, so its total always equals
the maximum over honest runs (under the deterministic tie rule).
`Responder.greedy_adversarial()` instead answers with whichever single bit
value leaves the larger conditional set (ties resolved to 0).  The greedy
rule is the natural per-round heuristic but provably falls short of the
worst case on some sets: a cardinality tie, or occasionally even a strict
cardinality gap, can point away from the deeper subtree.  Both are kept;
everything that must certify worst-case totals uses the exact adversary.

Bit accounting: every response is one informant bit.  Sink bits follow the
closed forms: per bit-serial round ``ceil(log2 N) + addr(i)``, per
round-parallel round ``N ceil(log2 N) + N + sum addr(i)`` over the chosen
bits, where ``addr(i) = ceil(log2 w_i)`` (0 when the word has at most one
bit) addresses a bit position inside informant i's w_i-bit word.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    CapExceededError,
    DegenerateSupportError,
    InvariantViolationError,
    MembershipError,
)
from .support import DEFAULT_EXTENSION_CAP, Label, SupportSet, ceil_log2

BIT_SERIAL = "bit-serial"
ROUND_PARALLEL = "round-parallel"


@dataclass(frozen=True)
class TieRule:
    """How to break ties among equally balanced candidate bit locations."""

    mode: str = "lowest-index"  # or "seeded-random"
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in ("lowest-index", "seeded-random"):
            raise ValueError(f"unknown tie rule {self.mode!r}")
        if self.mode == "seeded-random" and self.seed is None:
            raise ValueError("seeded-random tie rule needs a seed")

    @property
    def deterministic(self) -> bool:
        return self.mode == "lowest-index"

    def fresh_rng(self) -> random.Random | None:
        return random.Random(self.seed) if self.mode == "seeded-random" else None

    def choose(self, candidates: Sequence[int], rng: random.Random | None) -> int:
        if self.mode == "lowest-index" or len(candidates) == 1:
            return candidates[0]
        assert rng is not None
        return rng.choice(candidates)


@dataclass(frozen=True)
class Responder:
    """Honest responder carrying a data vector, or one of two adversaries."""

    kind: str = "honest"  # "honest" | "worst" | "greedy"
    x: tuple[Label, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("honest", "worst", "greedy"):
            raise ValueError(f"unknown responder kind {self.kind!r}")
        if (self.kind == "honest") != (self.x is not None):
            raise ValueError("honest responders carry a vector; adversaries do not")

    @classmethod
    def honest(cls, x: Sequence[Label]) -> "Responder":
        return cls("honest", tuple(x))

    @classmethod
    def adversarial(cls) -> "Responder":
        """Exact worst case: totals match the worst honest run."""
        return cls("worst")

    @classmethod
    def greedy_adversarial(cls) -> "Responder":
        """Per-answer ambiguity maximizer (ties to 0); may miss the worst case."""
        return cls("greedy")

    @property
    def is_adversarial(self) -> bool:
        return self.kind != "honest"


@dataclass(frozen=True)
class Round:
    """One communication round: queried locations and the answers."""

    queries: tuple[tuple[int, int], ...]  # (informant 1-based, local bit index)
    global_bits: tuple[int, ...]
    responses: tuple[int, ...]
    mu_before: int
    mu_after: int
    sink_bits: int


@dataclass(frozen=True)
class Transcript:
    protocol: str
    rounds: tuple[Round, ...]
    informant_bits: int
    sink_bits: int
    round_count: int
    final_set: SupportSet
    decoded: tuple[Label, ...] | None

    def bits_from_informant(self, informant: int) -> int:
        """Response bits informant (1-based) sent over the whole run."""
        return sum(
            1 for r in self.rounds for q in r.queries if q[0] == informant
        )


def _addr_bits(width: int) -> int:
    # bits to address one position inside a w-bit word; 0 when w <= 1
    return ceil_log2(width) if width >= 2 else 0


def _bit(cw: int, j: int, total_width: int) -> int:
    return (cw >> (total_width - 1 - j)) & 1


def _ones_per_bit(cws: Sequence[int], idxs: Sequence[int], width: int) -> list[int]:
    ones = [0] * width
    for k in idxs:
        cw = cws[k]
        for j in range(width):
            if cw >> (width - 1 - j) & 1:
                ones[j] += 1
    return ones


def _pick_balanced(
    cws: Sequence[int],
    idxs: Sequence[int],
    width: int,
    tie: TieRule,
    rng: random.Random | None,
) -> tuple[int, int, int]:
    """Undefined bit with 0/1 counts closest to balanced; returns (j, n0, n1)."""
    n = len(idxs)
    ones = _ones_per_bit(cws, idxs, width)
    best_diff = None
    cands: list[int] = []
    for j in range(width):
        n1 = ones[j]
        if n1 == 0 or n1 == n:
            continue  # defined at this location
        diff = abs(n - 2 * n1)
        if best_diff is None or diff < best_diff:
            best_diff = diff
            cands = [j]
        elif diff == best_diff:
            cands.append(j)
    if not cands:
        raise InvariantViolationError("no undefined bit in a non-singleton set")
    j = tie.choose(cands, rng)
    n1 = ones[j]
    return j, n - n1, n1


def _validate_start(s: SupportSet, responder: Responder) -> tuple[list[int], int | None]:
    if s.mu == 0:
        raise DegenerateSupportError("cannot run a protocol on an empty set")
    xcw = None
    if not responder.is_adversarial:
        xcw = s.codewords[s.index_of(responder.x)]
    return list(range(s.mu)), xcw


def _greedy_depth(
    cws: Sequence[int], w: int, idxs: tuple[int, ...], memo: dict
) -> int:
    """Worst leaf depth of the bit-serial tree below this state
    (deterministic lowest-index ties)."""
    if len(idxs) == 1:
        return 0
    hit = memo.get(idxs)
    if hit is not None:
        return hit
    j, _, _ = _pick_balanced(cws, idxs, w, TieRule(), None)
    zero = tuple(k for k in idxs if not _bit(cws[k], j, w))
    one = tuple(k for k in idxs if _bit(cws[k], j, w))
    d = 1 + max(_greedy_depth(cws, w, zero, memo), _greedy_depth(cws, w, one, memo))
    memo[idxs] = d
    return d


def run_bit_serial(
    s: SupportSet, responder: Responder, tie: TieRule = TieRule()
) -> Transcript:
    """One-bit-per-round gathering; stops when the set is a singleton.

    Honest runs decode exactly the responder's vector.  Implicitly defined
    bits (forced by earlier answers) are never queried and cost nothing.
    The exact adversary answers toward the deeper remaining subtree (depth
    ties toward the larger side, then toward 0); it needs the
    deterministic tie rule and degrades to the greedy rule otherwise.
    """
    idxs, xcw = _validate_start(s, responder)
    cws = s.codewords
    w = s.layout.total_width
    rng = tie.fresh_rng()
    addr_of = [_addr_bits(wi) for wi in s.layout.widths]
    sink_per_round_base = ceil_log2(s.n)
    lookahead = responder.kind == "worst" and tie.deterministic
    depth_memo: dict = {}

    rounds: list[Round] = []
    while len(idxs) > 1:
        j, n0, n1 = _pick_balanced(cws, idxs, w, tie, rng)
        if responder.is_adversarial:
            if lookahead:
                zero = tuple(k for k in idxs if not _bit(cws[k], j, w))
                one = tuple(k for k in idxs if _bit(cws[k], j, w))
                d0 = _greedy_depth(cws, w, zero, depth_memo)
                d1 = _greedy_depth(cws, w, one, depth_memo)
                if d1 != d0:
                    b = 1 if d1 > d0 else 0
                else:
                    b = 1 if n1 > n0 else 0
            else:
                b = 1 if n1 > n0 else 0  # keep the larger side; ties take 0
        else:
            b = _bit(xcw, j, w)
        nxt = [k for k in idxs if _bit(cws[k], j, w) == b]
        owner, local = s.layout.owner_of(j)
        cost = sink_per_round_base + addr_of[owner]
        rounds.append(
            Round(
                queries=((owner + 1, local),),
                global_bits=(j,),
                responses=(b,),
                mu_before=len(idxs),
                mu_after=len(nxt),
                sink_bits=cost,
            )
        )
        idxs = nxt

    final = s.subset(idxs)
    decoded = final.tuples[0]
    if not responder.is_adversarial and decoded != responder.x:
        raise InvariantViolationError(
            f"honest run decoded {decoded!r} instead of {responder.x!r}"
        )
    return Transcript(
        protocol=BIT_SERIAL,
        rounds=tuple(rounds),
        informant_bits=len(rounds),
        sink_bits=sum(r.sink_bits for r in rounds),
        round_count=len(rounds),
        final_set=final,
        decoded=decoded,
    )


def _select_batch(
    cws: Sequence[int],
    idxs: Sequence[int],
    w: int,
    tie: TieRule,
    rng: random.Random | None,
) -> tuple[list[int], list[int]]:
    """Pick ceil(log2 mu) bit locations under worst-case hypotheses.

    Each pick is the most balanced undefined bit of the hypothetical set
    obtained by assuming the earlier picks answered with the value keeping
    the larger side (ties to 0).  Returns (locations, hypothesized values).
    """
    batch_quota = ceil_log2(len(idxs))
    hyp = list(idxs)
    batch: list[int] = []
    hypothesized: list[int] = []
    for _ in range(batch_quota):
        if len(hyp) <= 1:
            break  # unreachable under the worst-case hypotheses; guarded anyway
        j, n0, n1 = _pick_balanced(cws, hyp, w, tie, rng)
        b_star = 1 if n1 > n0 else 0
        batch.append(j)
        hypothesized.append(b_star)
        hyp = [k for k in hyp if _bit(cws[k], j, w) == b_star]
    return batch, hypothesized


def _rp_cost(cws: Sequence[int], w: int, idxs: tuple[int, ...], memo: dict) -> int:
    """Worst-case total informant bits of the batched protocol from here
    (deterministic lowest-index ties)."""
    if len(idxs) == 1:
        return 0
    hit = memo.get(idxs)
    if hit is not None:
        return hit
    batch, _ = _select_batch(cws, idxs, w, TieRule(), None)
    shifts = [w - 1 - j for j in batch]
    children: dict[tuple[int, ...], list[int]] = {}
    for k in idxs:
        pattern = tuple(cws[k] >> sh & 1 for sh in shifts)
        children.setdefault(pattern, []).append(k)
    cost = len(batch) + max(
        _rp_cost(cws, w, tuple(ch), memo) for ch in children.values()
    )
    memo[idxs] = cost
    return cost


def run_round_parallel(
    s: SupportSet, responder: Responder, tie: TieRule = TieRule()
) -> Transcript:
    """Batched gathering: ceil(log2 mu) bits per round, one sink message.

    Batch members after the first are selected as if the earlier members
    had answered with their worst-case values (the value keeping the larger
    hypothetical set), recomputing hypothetically defined bits inside the
    batch.  An honest responder answers with its own bits and the sink
    conditions on all answers at once.  The greedy adversary echoes the
    hypothesized values (so its trajectory is exactly the provisioned
    worst case); the exact adversary instead picks, among the response
    patterns some member could give, one maximizing the remaining cost.
    """
    idxs, xcw = _validate_start(s, responder)
    cws = s.codewords
    w = s.layout.total_width
    rng = tie.fresh_rng()
    addr_of = [_addr_bits(wi) for wi in s.layout.widths]
    sink_round_base = s.n * ceil_log2(s.n) + s.n
    lookahead = responder.kind == "worst" and tie.deterministic
    cost_memo: dict = {}

    rounds: list[Round] = []
    while len(idxs) > 1:
        batch, hypothesized = _select_batch(cws, idxs, w, tie, rng)

        if responder.is_adversarial:
            if lookahead:
                shifts = [w - 1 - j for j in batch]
                children: dict[tuple[int, ...], list[int]] = {}
                for k in idxs:
                    pattern = tuple(cws[k] >> sh & 1 for sh in shifts)
                    children.setdefault(pattern, []).append(k)
                answers = None
                best = -1
                for pattern in sorted(children):
                    c = _rp_cost(cws, w, tuple(children[pattern]), cost_memo)
                    if c > best:
                        best = c
                        answers = list(pattern)
                assert answers is not None
            else:
                answers = list(hypothesized)
        else:
            answers = [_bit(xcw, j, w) for j in batch]
        nxt = idxs
        for j, b in zip(batch, answers):
            nxt = [k for k in nxt if _bit(cws[k], j, w) == b]

        owners = [s.layout.owner_of(j) for j in batch]
        cost = sink_round_base + sum(addr_of[o] for o, _ in owners)
        rounds.append(
            Round(
                queries=tuple((o + 1, loc) for o, loc in owners),
                global_bits=tuple(batch),
                responses=tuple(answers),
                mu_before=len(idxs),
                mu_after=len(nxt),
                sink_bits=cost,
            )
        )
        idxs = nxt

    final = s.subset(idxs)
    decoded = final.tuples[0]
    if not responder.is_adversarial and decoded != responder.x:
        raise InvariantViolationError(
            f"honest run decoded {decoded!r} instead of {responder.x!r}"
        )
    return Transcript(
        protocol=ROUND_PARALLEL,
        rounds=tuple(rounds),
        informant_bits=sum(len(r.responses) for r in rounds),
        sink_bits=sum(r.sink_bits for r in rounds),
        round_count=len(rounds),
        final_set=final,
        decoded=decoded,
    )


def run_k_bit_serial(
    s: SupportSet,
    k: int,
    responder: Responder,
    tie: TieRule = TieRule(),
    max_tuples: int = DEFAULT_EXTENSION_CAP,
) -> Transcript:
    """Bit-serial gathering over the k-extension (block coding over k draws).

    For ``k == 1`` this is exactly `run_bit_serial` on the base set.  For
    larger k an honest responder must carry an extension vector: one
    k-tuple of values per informant.
    """
    if k == 1:
        return run_bit_serial(s, responder, tie)
    ext = s.k_extension(k, max_tuples=max_tuples)
    tr = run_bit_serial(ext, responder, tie)
    return Transcript(
        protocol=f"{BIT_SERIAL}[k={k}]",
        rounds=tr.rounds,
        informant_bits=tr.informant_bits,
        sink_bits=tr.sink_bits,
        round_count=tr.round_count,
        final_set=tr.final_set,
        decoded=tr.decoded,
    )


def greedy_worst_depth(s: SupportSet, tie: TieRule = TieRule()) -> int:
    """Worst-case informant bits of the bit-serial protocol itself.

    Walks the protocol's own decision tree (the same balanced-bit picks it
    would make against any responder) and takes the deepest leaf.  Requires
    the deterministic tie rule so the tree is well defined.
    """
    if not tie.deterministic:
        raise ValueError("greedy worst depth needs the deterministic tie rule")
    if s.mu == 0:
        raise DegenerateSupportError("empty set")
    cws = s.codewords
    w = s.layout.total_width

    def deepest(idxs: list[int]) -> int:
        if len(idxs) == 1:
            return 0
        j, _, _ = _pick_balanced(cws, idxs, w, tie, None)
        zero = [k for k in idxs if not _bit(cws[k], j, w)]
        one = [k for k in idxs if _bit(cws[k], j, w)]
        return 1 + max(deepest(zero), deepest(one))

    return deepest(list(range(s.mu)))


@dataclass(frozen=True)
class HonestRun:
    x: tuple[Label, ...]
    informant_bits: int
    rounds: int
    sink_bits: int
    per_informant: tuple[int, ...]


@dataclass(frozen=True)
class SweepReport:
    protocol: str
    runs: tuple[HonestRun, ...]
    max_informant_bits: int
    mean_informant_bits: float
    per_informant_worst: tuple[int, ...]
    max_rounds: int
    max_sink_bits: int
    adversarial_informant_bits: int
    adversarial_matches_max: bool


def worst_case_sweep(
    s: SupportSet,
    protocol: str = BIT_SERIAL,
    tie: TieRule = TieRule(),
    k: int = 1,
) -> SweepReport:
    """Run the protocol honestly for every member and once adversarially.

    With the deterministic tie rule the adversarial total is asserted to
    equal the maximum honest total; a mismatch raises, since it means the
    greedy adversary failed to realize the protocol's worst leaf.
    """
    runner = {BIT_SERIAL: run_bit_serial, ROUND_PARALLEL: run_round_parallel}[protocol]
    target = s if k == 1 else s.k_extension(k)
    runs = []
    for x in target.tuples:
        tr = runner(target, Responder.honest(x), tie)
        per = tuple(tr.bits_from_informant(i) for i in range(1, target.n + 1))
        runs.append(
            HonestRun(x, tr.informant_bits, tr.round_count, tr.sink_bits, per)
        )
    adv = runner(target, Responder.adversarial(), tie)
    max_bits = max((r.informant_bits for r in runs), default=0)
    matches = adv.informant_bits == max_bits
    if tie.deterministic and not matches:
        raise InvariantViolationError(
            f"{protocol}: adversarial run sent {adv.informant_bits} bits but the "
            f"worst honest member needs {max_bits}"
        )
    per_worst = tuple(
        max((r.per_informant[i] for r in runs), default=0) for i in range(target.n)
    )
    return SweepReport(
        protocol=protocol,
        runs=tuple(runs),
        max_informant_bits=max_bits,
        mean_informant_bits=(
            sum(r.informant_bits for r in runs) / len(runs) if runs else 0.0
        ),
        per_informant_worst=per_worst,
        max_rounds=max((r.rounds for r in runs), default=0),
        max_sink_bits=max((r.sink_bits for r in runs), default=0),
        adversarial_informant_bits=adv.informant_bits,
        adversarial_matches_max=matches,
    )


@dataclass(frozen=True)
class ShrinkDiagnostics:
    """Per-round shrink factors and the implied round-count bound."""

    protocol: str
    epsilons: tuple[float, ...]
    epsilon: float | None
    bound: int | None
    bound_ok: bool
    vacuous: bool


def _ceil_log_ratio(target: int, ratio: Fraction, limit: int = 10_000) -> int | None:
    """Smallest m >= 0 with ratio**m >= target, exactly; None if ratio <= 1."""
    if ratio <= 1:
        return None if target > 1 else 0
    p, q = ratio.numerator, ratio.denominator
    pm, qm, m = 1, 1, 0
    while pm < target * qm:
        pm *= p
        qm *= q
        m += 1
        if m > limit:  # pragma: no cover - defensive
            raise InvariantViolationError("shrink bound did not converge")
    return m


def round_shrink_diagnostics(tr: Transcript) -> ShrinkDiagnostics:
    """How far each round fell short of a perfect halving, and the bound.

    Bit-serial rounds should shrink the set by a factor 2 each; batched
    rounds by 2**ceil(log2 mu).  epsilon_l measures the shortfall of round
    l; rounds must then number at most ceil(log2 mu / (1 - eps)) for
    bit-serial and at most ceil(1 / (1 - eps)) for round-parallel.
    """
    if not tr.rounds:
        return ShrinkDiagnostics(tr.protocol, (), None, None, True, False)
    mu0 = tr.rounds[0].mu_before
    parallel = tr.protocol == ROUND_PARALLEL
    info0 = ceil_log2(mu0)
    eps: list[float] = []
    min_ratio = None
    for r in tr.rounds:
        ratio = Fraction(r.mu_before, r.mu_after)
        gain = math.log2(r.mu_before / r.mu_after)
        eps.append(1.0 - (gain / info0 if parallel else gain))
        if min_ratio is None or ratio < min_ratio:
            min_ratio = ratio
    assert min_ratio is not None
    vacuous = min_ratio <= 1
    if vacuous:
        return ShrinkDiagnostics(tr.protocol, tuple(eps), max(eps), None, False, True)
    if parallel:
        bound = _ceil_log_ratio(1 << info0, min_ratio)
    else:
        bound = _ceil_log_ratio(mu0, min_ratio)
    assert bound is not None
    return ShrinkDiagnostics(
        protocol=tr.protocol,
        epsilons=tuple(eps),
        epsilon=max(eps),
        bound=bound,
        bound_ok=tr.round_count <= bound,
        vacuous=False,
    )
