"""Worst-case interactive data gathering over finite joint support sets.

A sink that knows the joint support of N correlated informants gathers
their jointly drawn values losslessly by querying individual codeword
bits.  The package provides the ambiguity measures behind the worst-case
analysis, executable query protocols with exact bit accounting, exact
solvers for worst-case bit-compressibility and achievable rate regions,
block-coding extensions, and brute-force oracles that certify the solvers
on small instances.
"""

from .ambiguity import (
    AmbiguityReport,
    ChainBound,
    PropertyCheck,
    PropertyReport,
    ambiguity,
    chain_bound,
    conditional_ambiguity,
    conditional_support,
    information_ambiguity,
    max_conditional_ambiguity,
    measure,
    property_suite,
)
from .compress import (
    AsymptoticRegion,
    BlockGainReport,
    BlockRow,
    CompressibilityResult,
    KBlockResult,
    RateRegion,
    StrategyNode,
    asymptotic_bound,
    asymptotic_rate_region,
    block_bound,
    block_gain_report,
    k_block_rate_region,
    k_block_solve,
    normalized_region,
    per_informant_min_bits,
    rate_region,
    solve_c_b,
)
from .errors import (
    AmbitError,
    CapExceededError,
    DegenerateSupportError,
    InvariantViolationError,
    MembershipError,
    ParseError,
    UsageError,
)
from .oracle import (
    Certificate,
    TreeSearchResult,
    certificate_c_b,
    exhaustive_optimum,
    exhaustive_subset_pairs,
    exhaustive_tree_search,
    min_certificate,
)
from .protocols import (
    Responder,
    Round,
    ShrinkDiagnostics,
    SweepReport,
    TieRule,
    Transcript,
    greedy_worst_depth,
    round_shrink_diagnostics,
    run_bit_serial,
    run_k_bit_serial,
    run_round_parallel,
    worst_case_sweep,
)
from .support import (
    BitAssignment,
    BitLayout,
    BitPartition,
    SupportSet,
    build_support_set,
    ceil_log2,
    condition,
    decode,
    defined_bits,
    encode,
    k_extension,
    layout,
    project,
    support_set_from_tuples,
)
from .textio import emit_support_text, parse_support_file, parse_support_text

__version__ = "0.1.0"
