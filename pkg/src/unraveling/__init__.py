"""Finite games with taboos: solving, pruning, coverings, and unraveling."""

from .core import (
    GameTree,
    InternalInvariantError,
    Player,
    PlayOutcome,
    Position,
    ResourceLimitError,
    Strategy,
    classify_play,
    consistent_plays,
    evaluate_play,
    is_consistent,
    is_winning_strategy,
    least_strategy,
    random_strategy,
    strategy_from,
    subtree_at,
)
from .payoff import (
    Closed,
    ClosedSpec,
    ClosedUnion,
    Open,
    PayoffSpec,
    closed_spec_from_decided,
    complement_spec,
    decided_by_depth,
    meets_payoff,
    realize,
)
from .solver import PruneResult, Solution, prune, solve, taboo_strategy, transfer_from_pruned
from .covering import (
    CheckResult,
    Covering,
    LiftReport,
    check_position_map,
    check_strategy_locality,
    check_winning_transfer,
    compose,
    identity_covering,
    pullback,
    pullback_closed_spec,
    solve_via_covering,
    verify_lift,
)
from .unravel import (
    Accept,
    BaseCovering,
    Challenge,
    Claim,
    build_base_covering,
    frontier,
    unravel_union,
)

__all__ = [name for name in dir() if not name.startswith("_")]
