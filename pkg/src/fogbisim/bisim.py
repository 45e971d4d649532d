"""Bisimulation games, stratified approximants and a finite-fragment checker.

Positions are pairs of closed terms. Attacker picks a transition on either
side, Defender answers with a same-action transition on the other side. A
player who cannot move loses; plays that run out of rounds go to Defender.
Structurally equal positions are Defender wins straight away, since the
identity relation is a bisimulation.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .grammar import Grammar, Transition, transitions
from .terms import Term, format_term, is_closed

__all__ = [
    "Side",
    "Winner",
    "Reason",
    "GamePosition",
    "AttackerMove",
    "DefenderMove",
    "Strategy",
    "PlayOutcome",
    "IllegalMoveError",
    "MemoBudgetExceeded",
    "play_game",
    "attacker_moves",
    "defender_replies",
    "ApproxSolver",
    "bisim_approx",
    "distinguishing_level",
    "Verdict",
    "ExactResult",
    "exact_bisim_finite",
    "ExhaustiveAttacker",
    "ExhaustiveDefender",
    "search_attacker_wins",
    "enumerate_defender_plays",
    "format_trace",
    "trace_records",
]


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class Winner(str, enum.Enum):
    ATTACKER = "Attacker"
    DEFENDER = "Defender"


class Reason(str, enum.Enum):
    DEFENDER_STUCK = "defender-stuck"
    ATTACKER_STUCK = "attacker-stuck"
    SYNTACTIC_EQUALITY = "syntactic-equality"
    ROUND_LIMIT = "round-limit"
    RESIGNATION = "resignation"


class GamePosition(NamedTuple):
    left: Term
    right: Term
    round: int = 0

    def term(self, side: Side) -> Term:
        return self.left if side is Side.LEFT else self.right


class AttackerMove(NamedTuple):
    side: Side
    action: str
    successor: Term
    rule: int = -1


class DefenderMove(NamedTuple):
    successor: Term
    rule: int = -1


class IllegalMoveError(RuntimeError):
    pass


class MemoBudgetExceeded(RuntimeError):
    pass


class Strategy:
    """One player of the bisimulation game.

    Subclasses override :meth:`attack` and/or :meth:`defend`. Returning None
    means the player resigns (or is stuck).
    """

    def attack(self, g: Grammar, pos: GamePosition) -> AttackerMove | None:
        return None

    def defend(self, g: Grammar, pos: GamePosition, move: AttackerMove) -> DefenderMove | None:
        return None


@dataclass
class PlayOutcome:
    winner: Winner
    reason: Reason
    trace: list[tuple[AttackerMove, DefenderMove | None]] = field(default_factory=list)
    final: GamePosition | None = None


def attacker_moves(g: Grammar, pos: GamePosition) -> list[AttackerMove]:
    """All attacker moves, ordered by (side, rule index)."""
    return [
        AttackerMove(side, tr.action, tr.target, tr.rule)
        for side in (Side.LEFT, Side.RIGHT)
        for tr in g.step(pos.term(side))
    ]


def defender_replies(g: Grammar, pos: GamePosition, move: AttackerMove) -> list[DefenderMove]:
    return [
        DefenderMove(tr.target, tr.rule)
        for tr in g.step(pos.term(move.side.other))
        if tr.action == move.action
    ]


def _after(pos: GamePosition, move: AttackerMove, reply: Term) -> GamePosition:
    if move.side is Side.LEFT:
        return GamePosition(move.successor, reply, pos.round + 1)
    return GamePosition(reply, move.successor, pos.round + 1)


def play_game(
    g: Grammar,
    start: GamePosition,
    attacker: Strategy,
    defender: Strategy,
    max_rounds: int,
) -> PlayOutcome:
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    for t in (start.left, start.right):
        transitions(g, t)  # rejects open terms and foreign symbols
    pos = start
    trace: list[tuple[AttackerMove, DefenderMove | None]] = []

    def done(winner, reason):
        return PlayOutcome(winner, reason, trace, pos)

    while True:
        if pos.left is pos.right:
            return done(Winner.DEFENDER, Reason.SYNTACTIC_EQUALITY)
        if len(trace) >= max_rounds:
            return done(Winner.DEFENDER, Reason.ROUND_LIMIT)
        legal = attacker_moves(g, pos)
        move = attacker.attack(g, pos)
        if move is None:
            reason = Reason.RESIGNATION if legal else Reason.ATTACKER_STUCK
            return done(Winner.DEFENDER, reason)
        if not any(m[:3] == move[:3] for m in legal):
            raise IllegalMoveError(f"attacker move {move} is not a transition at {pos}")
        replies = defender_replies(g, pos, move)
        reply = defender.defend(g, pos, move)
        if reply is None:
            trace.append((move, None))
            reason = Reason.RESIGNATION if replies else Reason.DEFENDER_STUCK
            return done(Winner.ATTACKER, reason)
        if not any(r.successor is reply.successor for r in replies):
            raise IllegalMoveError(f"defender reply {reply} does not match {move}")
        trace.append((move, reply))
        pos = _after(pos, move, reply.successor)


# -- stratified approximants ---------------------------------------------------


class ApproxSolver:
    """Decides ``t ~_k u`` with a per-instance memo table.

    ``~_0`` relates everything; ``t ~_{k+1} u`` when each transition of one
    side is matched by a same-action transition of the other into ``~_k``.
    The memo is bounded by ``budget`` entries; overflowing raises
    MemoBudgetExceeded.
    """

    def __init__(self, g: Grammar, budget: int = 2_000_000):
        self.g = g
        self.budget = budget
        self.memo: dict[tuple[Term, Term, int], bool] = {}

    def holds(self, t: Term, u: Term, k: int) -> bool:
        if k <= 0 or t is u:
            return True
        key = (t, u, k) if id(t) <= id(u) else (u, t, k)
        r = self.memo.get(key)
        if r is None:
            r = self._matched(t, u, k) and self._matched(u, t, k)
            if len(self.memo) >= self.budget:
                raise MemoBudgetExceeded(f"approximant memo exceeded {self.budget} entries")
            self.memo[key] = r
        return r

    def _matched(self, t: Term, u: Term, k: int) -> bool:
        ut = self.g.step(u)
        for tr in self.g.step(t):
            if not any(
                tr2.action == tr.action and self.holds(tr.target, tr2.target, k - 1)
                for tr2 in ut
            ):
                return False
        return True

    def winning_move(self, pos: GamePosition, k: int) -> AttackerMove | None:
        """First attacker move (by side, rule index) that wins within ``k`` rounds."""
        if self.holds(pos.left, pos.right, k):
            return None
        for move in attacker_moves(self.g, pos):
            if all(
                not self.holds(*_after(pos, move, r.successor)[:2], k - 1)
                for r in defender_replies(self.g, pos, move)
            ):
                return move
        raise AssertionError("approximant failed but no winning attacker move")

    def level(self, t: Term, u: Term, k_max: int) -> int | None:
        for k in range(1, k_max + 1):
            if not self.holds(t, u, k):
                return k
        return None


def _check_closed(*terms: Term):
    for t in terms:
        if not is_closed(t):
            raise ValueError(f"term {format_term(t)} is not closed")


def bisim_approx(g: Grammar, t: Term, u: Term, k: int, memo_budget: int = 2_000_000) -> bool:
    _check_closed(t, u)
    return ApproxSolver(g, memo_budget).holds(t, u, k)


def distinguishing_level(
    g: Grammar, t: Term, u: Term, k_max: int, memo_budget: int = 2_000_000
) -> tuple[int, list[tuple[Side, str]]] | None:
    """Smallest ``k <= k_max`` with ``not t ~_k u`` and an attacker action sequence.

    The witness follows the first winning attacker move at each step and,
    among Defender's answers, the one that survives longest; ties go to the
    lowest rule index.
    """
    _check_closed(t, u)
    solver = ApproxSolver(g, memo_budget)
    level = solver.level(t, u, k_max)
    if level is None:
        return None
    witness: list[tuple[Side, str]] = []
    pos, k = GamePosition(t, u), level
    while True:
        move = solver.winning_move(pos, k)
        witness.append((move.side, move.action))
        replies = defender_replies(g, pos, move)
        if not replies:
            break
        best = None
        for r in replies:
            nxt = _after(pos, move, r.successor)
            lvl = solver.level(nxt.left, nxt.right, k - 1)
            if best is None or lvl > best[0]:
                best = (lvl, nxt)
        k, pos = best
    return level, witness


# -- finite fragments ----------------------------------------------------------


class Verdict(str, enum.Enum):
    BISIMILAR = "bisimilar"
    NOT_BISIMILAR = "not_bisimilar"
    UNKNOWN = "unknown"


class ExactResult(NamedTuple):
    verdict: Verdict
    states: int  # reachable terms explored (budget + 1 when exceeded)

    def __bool__(self):
        return self.verdict is Verdict.BISIMILAR


def exact_bisim_finite(g: Grammar, t: Term, u: Term, state_budget: int) -> ExactResult:
    """Full bisimilarity on the reachable fragment, if it has at most ``state_budget`` terms.

    Explores every term reachable from ``t`` and ``u`` and then refines the
    partition of that finite LTS by successor signatures until it is stable.
    """
    _check_closed(t, u)
    index: dict[Term, int] = {t: 0}
    if u not in index:
        index[u] = 1
    order = list(index)
    queue = deque(order)
    edges: list[list[tuple[str, int]]] = []
    while queue:
        s = queue.popleft()
        out = []
        for tr in g.step(s):
            j = index.get(tr.target)
            if j is None:
                if len(index) >= state_budget:
                    return ExactResult(Verdict.UNKNOWN, state_budget + 1)
                j = index[tr.target] = len(order)
                order.append(tr.target)
                queue.append(tr.target)
            out.append((tr.action, j))
        edges.append(out)
    n = len(order)
    block = [0] * n
    nblocks = 1
    while True:
        sigs: dict[tuple, int] = {}
        new = [0] * n
        for s in range(n):
            sig = (block[s], frozenset((a, block[j]) for a, j in edges[s]))
            new[s] = sigs.setdefault(sig, len(sigs))
        block = new
        if len(sigs) == nblocks:
            break
        nblocks = len(sigs)
    same = block[index[t]] == block[index[u]]
    return ExactResult(Verdict.BISIMILAR if same else Verdict.NOT_BISIMILAR, n)


# -- search-backed players and exhaustive exploration ----------------------------


class ExhaustiveAttacker(Strategy):
    """Plays a move that wins within the remaining rounds when one exists.

    Otherwise plays the first legal move, so plays only end early when both
    sides are stuck.
    """

    def __init__(self, max_rounds: int, memo_budget: int = 2_000_000):
        self.max_rounds = max_rounds
        self.solver: ApproxSolver | None = None
        self.memo_budget = memo_budget

    def attack(self, g, pos):
        if self.solver is None or self.solver.g is not g:
            self.solver = ApproxSolver(g, self.memo_budget)
        move = self.solver.winning_move(pos, self.max_rounds - pos.round)
        if move is None:
            moves = attacker_moves(g, pos)
            move = moves[0] if moves else None
        return move


class ExhaustiveDefender(Strategy):
    """Answers so that the new position stays in ``~_r`` for the rounds left."""

    def __init__(self, max_rounds: int, memo_budget: int = 2_000_000):
        self.max_rounds = max_rounds
        self.solver: ApproxSolver | None = None
        self.memo_budget = memo_budget

    def defend(self, g, pos, move):
        if self.solver is None or self.solver.g is not g:
            self.solver = ApproxSolver(g, self.memo_budget)
        replies = defender_replies(g, pos, move)
        left = self.max_rounds - pos.round - 1
        for r in replies:
            if r.successor is move.successor:
                return r
        for r in replies:
            if self.solver.holds(*_after(pos, move, r.successor)[:2], left):
                return r
        return replies[0] if replies else None


def search_attacker_wins(
    g: Grammar,
    start: GamePosition,
    defender: Strategy,
    depth: int,
    node_budget: int = 2_000_000,
) -> list[AttackerMove] | None:
    """Exhaustive OR-search over attacker moves against a fixed defender.

    Returns a winning attacker line (within ``depth`` rounds) or None. Uses a
    transposition table on (left, right, rounds left).
    """
    lost: set[tuple[Term, Term, int]] = set()

    def go(pos: GamePosition, left: int) -> list[AttackerMove] | None:
        if pos.left is pos.right or left <= 0:
            return None
        key = (pos.left, pos.right, left)
        if key in lost:
            return None
        if len(lost) >= node_budget:
            raise MemoBudgetExceeded(f"attacker search exceeded {node_budget} positions")
        for move in attacker_moves(g, pos):
            reply = defender.defend(g, pos, move)
            if reply is None:
                return [move]
            if not any(r.successor is reply.successor for r in defender_replies(g, pos, move)):
                raise IllegalMoveError(f"defender reply {reply} does not match {move}")
            line = go(_after(pos, move, reply.successor), left - 1)
            if line is not None:
                return [move, *line]
        lost.add(key)
        return None

    return go(start, depth)


class PlayCount(NamedTuple):
    attacker_wins: int
    defender_wins: int
    unfinished: int  # plays cut off by the depth limit
    longest: int


def enumerate_defender_plays(
    g: Grammar, start: GamePosition, attacker: Strategy, depth: int
) -> PlayCount:
    """Play a fixed attacker against every possible defender answer sequence.

    Counts maximal plays by outcome. Plays still running after ``depth``
    rounds are reported as unfinished.
    """
    wins = losses = cut = longest = 0
    stack = [start]
    while stack:
        pos = stack.pop()
        if pos.left is pos.right:
            losses += 1
            longest = max(longest, pos.round)
            continue
        if pos.round >= depth:
            cut += 1
            continue
        move = attacker.attack(g, pos)
        if move is None:
            losses += 1
            longest = max(longest, pos.round)
            continue
        if not any(m[:3] == move[:3] for m in attacker_moves(g, pos)):
            raise IllegalMoveError(f"attacker move {move} is not a transition at {pos}")
        replies = defender_replies(g, pos, move)
        if not replies:
            wins += 1
            longest = max(longest, pos.round + 1)
        for r in replies:
            stack.append(_after(pos, move, r.successor))
    return PlayCount(wins, losses, cut, longest)


# -- trace output --------------------------------------------------------------


def trace_records(outcome: PlayOutcome) -> list[dict]:
    recs = []
    for n, (move, reply) in enumerate(outcome.trace, 1):
        recs.append(
            {
                "round": n,
                "side": move.side.value,
                "action": move.action,
                "attacker_term": format_term(move.successor),
                "defender_term": None if reply is None else format_term(reply.successor),
            }
        )
    return recs


def format_trace(outcome: PlayOutcome, machine: bool = False) -> str:
    recs = trace_records(outcome)
    if machine:
        lines = [json.dumps(r) for r in recs]
        lines.append(json.dumps({"winner": outcome.winner.value, "reason": outcome.reason.value}))
        return "\n".join(lines)
    lines = []
    for r in recs:
        att = f"round {r['round']}: ATT {r['side']} -{r['action']}-> {r['attacker_term']}"
        if r["defender_term"] is None:
            lines.append(f"{att} ; DEF stuck")
        else:
            lines.append(f"{att} ; DEF -{r['action']}-> {r['defender_term']}")
    lines.append(f"winner: {outcome.winner.value} ({outcome.reason.value})")
    return "\n".join(lines)
