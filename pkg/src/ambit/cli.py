"""Command line surface: measure | check-properties | simulate |
compressibility | rate-region | block-compare.

Exit codes: 0 success, 1 usage, 2 input parse error, 3 degenerate input or
cap exceeded, 4 internal invariant violation (tripwire; unreachable unless
a cross-checked contract is broken).
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence, TextIO

from . import compress, protocols, textio
from .ambiguity import measure as measure_support
from .ambiguity import property_suite
from .errors import (
    AmbitError,
    CapExceededError,
    DegenerateSupportError,
    InvariantViolationError,
    MembershipError,
    ParseError,
    UsageError,
)
from .protocols import Responder, TieRule
from .support import SupportSet

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INPUT = 3
EXIT_INVARIANT = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="ambit", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("input", help="support-set file")
        sp.add_argument("--output", help="write the report here instead of stdout")

    sp = sub.add_parser("measure", help="ambiguity measures and chain bound")
    common(sp)

    sp = sub.add_parser("check-properties", help="run the measure-axiom battery")
    common(sp)

    sp = sub.add_parser("simulate", help="run one protocol round trip")
    common(sp)
    sp.add_argument(
        "--protocol",
        choices=[protocols.BIT_SERIAL, protocols.ROUND_PARALLEL],
        default=protocols.BIT_SERIAL,
    )
    sp.add_argument("--x", help="honest data vector, comma-separated; ';' between block samples")
    sp.add_argument("--adversary", action="store_true", help="exact worst-case responder")
    sp.add_argument("--greedy-adversary", action="store_true", help="per-answer ambiguity maximizer")
    sp.add_argument("--k", type=int, default=1, help="block length (bit-serial only)")
    sp.add_argument("--tie", choices=["lowest-index", "seeded-random"], default="lowest-index")
    sp.add_argument("--seed", type=int, help="seed for the seeded-random tie rule")
    sp.add_argument("--trace", action="store_true", help="print one line per round")

    sp = sub.add_parser("compressibility", help="exact worst-case bit-compressibility")
    common(sp)
    sp.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    sp.add_argument("--trace", action="store_true", help="print the optimal strategy tree")

    sp = sub.add_parser("rate-region", help="per-subset minimum bits and corner points")
    common(sp)
    sp.add_argument("--k", type=int, default=1, help="block length; bounds are reported per block")

    sp = sub.add_parser("block-compare", help="per-block compressibility table for k = 1..k_max")
    common(sp)
    sp.add_argument("--k-max", type=int, default=2)
    return p


def _parse_vector(text: str, s: SupportSet, k: int):
    samples = [part.split(",") for part in text.split(";")]
    for sample in samples:
        if len(sample) != s.n:
            raise UsageError(
                f"--x needs {s.n} comma-separated values per sample, got {sample!r}"
            )
    if k == 1:
        if len(samples) != 1:
            raise UsageError("--x holds several ';'-separated samples but --k is 1")
        return tuple(samples[0])
    if len(samples) != k:
        raise UsageError(f"--k {k} needs {k} ';'-separated samples in --x")
    return tuple(tuple(sample[i] for sample in samples) for i in range(s.n))


def _cmd_simulate(args, s: SupportSet, out: TextIO) -> None:
    picked = sum(bool(v) for v in (args.x, args.adversary, args.greedy_adversary))
    if picked != 1:
        raise UsageError("exactly one of --x, --adversary, --greedy-adversary is required")
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    if args.k > 1 and args.protocol != protocols.BIT_SERIAL:
        raise UsageError("--k above 1 applies to the bit-serial protocol only")
    if args.tie == "seeded-random":
        if args.seed is None:
            raise UsageError("--tie seeded-random needs --seed")
        tie = TieRule("seeded-random", args.seed)
    else:
        tie = TieRule()
    if args.adversary:
        responder = Responder.adversarial()
    elif args.greedy_adversary:
        responder = Responder.greedy_adversarial()
    else:
        responder = Responder.honest(_parse_vector(args.x, s, args.k))
    if args.k > 1:
        tr = protocols.run_k_bit_serial(s, args.k, responder, tie)
    elif args.protocol == protocols.BIT_SERIAL:
        tr = protocols.run_bit_serial(s, responder, tie)
    else:
        tr = protocols.run_round_parallel(s, responder, tie)
    if args.trace:
        textio.emit_trace(tr, out)
    else:
        out.write(f"protocol\t{tr.protocol}\n")
        out.write(f"informant_bits\t{tr.informant_bits}\n")
        out.write(f"sink_bits\t{tr.sink_bits}\n")
        out.write(f"rounds\t{tr.round_count}\n")
        out.write(f"decoded\t{textio.fmt_vector(tr.decoded)}\n")


def _cmd_compressibility(args, s: SupportSet, out: TextIO) -> None:
    res = compress.solve_c_b(s)
    out.write(f"cb\t{res.c_b}\n")
    out.write(f"greedy_bits\t{res.greedy_bits}\n")
    out.write(f"certificate_bound\t{res.certificate_bound}\n")
    out.write(f"width_bound\t{res.width_bound}\n")
    out.write(f"bit_incompressible\t{textio.fmt_exact(res.bit_incompressible)}\n")
    if args.oracle:
        from . import oracle

        ts = oracle.exhaustive_tree_search(s)
        out.write(f"oracle_optimum\t{ts.optimum}\n")
        out.write(
            f"oracle_matches_dp\t{textio.fmt_exact(ts.optimum == res.c_b)}\n"
        )
        if ts.optimum != res.c_b:
            raise InvariantViolationError(
                f"oracle optimum {ts.optimum} differs from solver c_b {res.c_b}"
            )
    if args.trace:
        textio.emit_strategy(res.strategy, out)


def _cmd_rate_region(args, s: SupportSet, out: TextIO) -> None:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    if args.k == 1:
        region = compress.rate_region(s)
    else:
        ext = s.k_extension(args.k, max_tuples=compress.DEFAULT_MAX_MU)
        region = compress.normalized_region(compress.rate_region(ext), args.k)
    textio.emit_region(region, out)


def run(argv: Sequence[str], out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    """Dispatch one parsed command; returns the exit code."""
    try:
        args = _build_parser().parse_args(argv)
        s = textio.parse_support_file(args.input)
        sink: TextIO = out
        opened = None
        if args.output:
            opened = open(args.output, "w", encoding="utf-8")
            sink = opened
        try:
            if args.verb == "measure":
                textio.emit_measure_report(ambiguity.measure(s), sink)
            elif args.verb == "check-properties":
                rep = ambiguity.property_suite(s)
                textio.emit_property_report(rep, sink)
                if not rep.all_passed:
                    raise InvariantViolationError("a measure axiom failed")
            elif args.verb == "simulate":
                _cmd_simulate(args, s, sink)
            elif args.verb == "compressibility":
                _cmd_compressibility(args, s, sink)
            elif args.verb == "rate-region":
                _cmd_rate_region(args, s, sink)
            elif args.verb == "block-compare":
                if args.k_max < 1:
                    raise UsageError("--k-max must be >= 1")
                textio.emit_block_table(compress.block_gain_report(s, args.k_max), sink)
        finally:
            if opened is not None:
                opened.close()
        return EXIT_OK
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_PARSE
    except (DegenerateSupportError, CapExceededError, MembershipError, ValueError) as exc:
        err.write(f"unusable input: {exc}\n")
        return EXIT_INPUT
    except InvariantViolationError as exc:
        err.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT
    except AmbitError as exc:  # anything else from the library is an input problem
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
