"""Bisimilarity of first-order grammars and a reduction from reset counter machines."""

from .terms import (
    App,
    Nonterminal,
    Term,
    TermError,
    Var,
    format_term,
    is_closed,
    numeral,
    numeral_value,
    parse_term,
    substitute,
    variables,
)
from .grammar import (
    Grammar,
    GrammarError,
    Rule,
    Transition,
    parse_grammar,
    serialize_grammar,
    transitions,
    validate_grammar,
)
from .bisim import (
    ApproxSolver,
    AttackerMove,
    DefenderMove,
    GamePosition,
    PlayOutcome,
    Reason,
    Side,
    Strategy,
    Verdict,
    Winner,
    bisim_approx,
    distinguishing_level,
    enumerate_defender_plays,
    exact_bisim_finite,
    play_game,
    search_attacker_wins,
)
from .rcm import (
    BudgetExceeded,
    Configuration,
    Instruction,
    Op,
    Operation,
    Rcm,
    ReachStatus,
    WitnessRun,
    ackermann,
    ackermann_diagonal,
    parse_rcm,
    rcm_step,
    reachable_final,
    serialize_rcm,
)
from .reduction import (
    ReductionOutput,
    attacker_strategy,
    decode_position,
    defender_strategy,
    encode_position,
    expected_sizes,
    reduce,
    verify_instance,
)

__version__ = "0.1.0"
