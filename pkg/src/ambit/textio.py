"""Support-set text format and machine-readable report emission.

Input format (UTF-8, whitespace-separated tokens, ``#`` starts a comment)::

    informants N
    alphabet i: v1 v2 ...     # optional, fixes value order for informant i
    tuple v1 ... vN [weight]  # weight omitted means positive

Labels are arbitrary non-whitespace tokens and are kept as strings.  A
tuple line with a weight of 0 contributes nothing; a tuple line whose
arity disagrees with the header is a syntax error at that line.

Reports are line oriented: measurement and property reports are
``key<TAB>value`` records; rate regions use ``subset``/``corner``/``cb``
lines; the block-coding comparison is a TSV.  Exact rationals are rendered
as integers when integral, as exact decimals when the denominator divides
a power of ten, and as ``p/q`` otherwise, so nothing loses precision.
"""

from __future__ import annotations

import io
from fractions import Fraction
from typing import Iterable, TextIO

from .ambiguity import AmbiguityReport, PropertyReport
from .compress import AsymptoticRegion, BlockGainReport, RateRegion, StrategyNode
from .errors import ParseError
from .protocols import Transcript
from .support import Label, SupportSet, build_support_set


def parse_support_text(text: str, source: str = "<string>") -> SupportSet:
    """Parse the support-set text format with line-accurate diagnostics."""
    n: int | None = None
    alphabets: dict[int, tuple[str, ...]] = {}
    entries: list[tuple[tuple[str, ...], float | None]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "informants":
            if n is not None:
                raise ParseError("duplicate 'informants' line", source, lineno)
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise ParseError(
                    "expected 'informants N' with a positive integer", source, lineno
                )
            n = int(tokens[1])
        elif head == "alphabet":
            if n is None:
                raise ParseError("'alphabet' before 'informants'", source, lineno)
            rest = tokens[1:]
            if rest and rest[0].endswith(":"):
                idx_tok, labels = rest[0][:-1], rest[1:]
            elif len(rest) >= 2 and rest[1] == ":":
                idx_tok, labels = rest[0], rest[2:]
            else:
                idx_tok, labels = (rest[0] if rest else ""), rest[1:]
            if not idx_tok.isdigit() or not 1 <= int(idx_tok) <= n:
                raise ParseError(
                    f"alphabet index must be in 1..{n}", source, lineno
                )
            i = int(idx_tok)
            if i in alphabets:
                raise ParseError(f"duplicate alphabet for informant {i}", source, lineno)
            if not labels:
                raise ParseError("alphabet line with no labels", source, lineno)
            if len(set(labels)) != len(labels):
                raise ParseError("alphabet with repeated labels", source, lineno)
            alphabets[i] = tuple(labels)
        elif head == "tuple":
            if n is None:
                raise ParseError("'tuple' before 'informants'", source, lineno)
            vals = tokens[1:]
            weight: float | None = None
            if len(vals) == n + 1:
                try:
                    weight = float(vals[-1])
                except ValueError:
                    raise ParseError(
                        f"trailing token {vals[-1]!r} is neither a value of a "
                        f"{n + 1}-informant tuple nor a weight",
                        source,
                        lineno,
                    ) from None
                vals = vals[:-1]
            if len(vals) != n:
                raise ParseError(
                    f"expected {n} values per tuple, got {len(vals)}", source, lineno
                )
            if weight is not None and weight < 0:
                raise ParseError(f"negative weight {weight}", source, lineno)
            entries.append((tuple(vals), weight))
        else:
            raise ParseError(f"unknown directive {head!r}", source, lineno)
    if n is None:
        raise ParseError("missing 'informants' line", source)
    alpha_arg = [alphabets.get(i) for i in range(1, n + 1)]
    try:
        return build_support_set(entries, alphabets=alpha_arg)
    except ParseError as exc:
        raise ParseError(str(exc), source) from None


def parse_support_file(path: str) -> SupportSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_support_text(fh.read(), source=path)


def emit_support_text(s: SupportSet) -> str:
    """Canonical text form; parsing it back yields an equal set."""
    out = [f"informants {s.n}"]
    for i, coding in enumerate(s.coding_supports, start=1):
        out.append(f"alphabet {i}: " + " ".join(str(v) for v in coding))
    for t in s.tuples:
        out.append("tuple " + " ".join(str(v) for v in t))
    return "\n".join(out) + "\n"


# -- value and report rendering -------------------------------------------------


def fmt_label(v: Label) -> str:
    if isinstance(v, tuple):
        return "(" + ",".join(fmt_label(c) for c in v) + ")"
    return str(v)


def fmt_vector(x: Iterable[Label]) -> str:
    return "(" + ",".join(fmt_label(v) for v in x) + ")"


def fmt_exact(v) -> str:
    """Render ints and rationals without precision loss, floats to 12 s.f."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        if v < 0:
            return "-" + fmt_exact(-v)
        if v.denominator == 1:
            return str(v.numerator)
        den = v.denominator
        twos = fives = 0
        while den % 2 == 0:
            den //= 2
            twos += 1
        while den % 5 == 0:
            den //= 5
            fives += 1
        if den == 1:  # finite decimal expansion
            digits = max(twos, fives)
            scaled = v.numerator * 10**digits // v.denominator
            text = f"{scaled:0{digits + 1}d}"
            return text[:-digits] + "." + text[-digits:]
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def emit_measure_report(rep: AmbiguityReport, out: TextIO) -> None:
    w = out.write
    w(f"joint_ambiguity\t{rep.joint_ambiguity}\n")
    w(f"information_ambiguity\t{rep.information_ambiguity}\n")
    for i, (mu, info) in enumerate(rep.per_informant, start=1):
        w(f"mu_{i}\t{mu}\n")
        w(f"info_{i}\t{info}\n")
    for (i, j), table in sorted(rep.conditional_tables.items()):
        for value, count in table.items():
            w(f"mu_{i}|{j}({fmt_label(value)})\t{count}\n")
    for (i, j), m in sorted(rep.max_conditionals.items()):
        w(f"mu_hat_{i}|{j}\t{m}\n")
    if rep.chain is not None:
        w(f"chain_bound\t{rep.chain.bits}\n")
        w("chain_order\t" + ",".join(str(i) for i in rep.chain.order) + "\n")


def emit_property_report(rep: PropertyReport, out: TextIO) -> None:
    for c in rep.checks:
        out.write(f"{c.name}\t{'pass' if c.passed else 'fail'}\t{c.detail}\n")


def emit_region(region: RateRegion | AsymptoticRegion, out: TextIO) -> None:
    for ids in sorted(region.subset_bounds, key=lambda f: (len(f), sorted(f))):
        subset = ",".join(str(i) for i in sorted(ids))
        out.write(f"subset {subset} min_bits {fmt_exact(region.subset_bounds[ids])}\n")
    for r1, r2 in region.corners:
        out.write(f"corner {fmt_exact(r1)} {fmt_exact(r2)}\n")
    out.write(f"cb {fmt_exact(region.c_b)}\n")


def emit_block_table(rep: BlockGainReport, out: TextIO) -> None:
    out.write("k\tcb_k\tcb_k_per_block\tgap\n")
    for row in rep.rows:
        out.write(
            f"{row.k}\t{row.cb_k}\t{fmt_exact(row.per_block)}\t{fmt_exact(row.gap)}\n"
        )
    base_cb = rep.rows[0].cb_k
    asym_gap = base_cb - rep.asymptotic.c_b
    out.write(f"inf\t-\t{fmt_exact(rep.asymptotic.c_b)}\t{fmt_exact(asym_gap)}\n")
    if rep.truncated_at is not None:
        out.write(f"# truncated: k={rep.truncated_at} exceeds the solver caps\n")


def emit_trace(tr: Transcript, out: TextIO) -> None:
    for l, r in enumerate(tr.rounds, start=1):
        queries = ",".join(f"{i}.{local}" for i, local in r.queries)
        responses = ",".join(str(b) for b in r.responses)
        out.write(
            f"round {l} | query {queries} | response {responses} | "
            f"{r.mu_before} -> {r.mu_after} | sink_bits +{r.sink_bits}\n"
        )
    out.write(f"decoded {fmt_vector(tr.decoded)}\n")


def emit_strategy(node: StrategyNode, out: TextIO, indent: int = 0) -> None:
    pad = "  " * indent
    if node.leaf is not None:
        out.write(f"{pad}leaf {fmt_vector(node.leaf)}\n")
        return
    out.write(f"{pad}ask bit {node.bit} (informant {node.informant})\n")
    out.write(f"{pad}0:\n")
    emit_strategy(node.zero, out, indent + 1)
    out.write(f"{pad}1:\n")
    emit_strategy(node.one, out, indent + 1)


def render(emitter, *args) -> str:
    buf = io.StringIO()
    emitter(*args, buf)
    return buf.getvalue()
