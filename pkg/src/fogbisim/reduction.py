"""From a reset counter machine to a pair of first-order grammar terms.

``reduce(m, p_init, p_final)`` builds a grammar and two roots
``A_<p_init>(Bot,...,Bot)`` and ``B_<p_init>(Bot,...,Bot)`` that are
non-bisimilar exactly when ``p_final`` is reachable from ``(p_init, 0...0)``.

Each machine counter ``c_i`` is tracked by two game counters stored as
numerals ``I^n Bot`` in argument slots ``2i-1`` (increments since the last
reset) and ``2i`` (decrements since the last reset). Decrements go through
a forcing gadget in which Defender picks between continuing and demanding a
comparison of the two numerals.

Naming: ``A_<p>``, ``B_<p>``, ``Ad_<p>_<i>``, ``B1_<p>_<i>``, ``B2_<p>_<i>``,
plus ``I`` and ``Bot``; instruction ``k`` is the action ``i<k>_<p>_<op><i>_<q>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .bisim import (
    ApproxSolver,
    AttackerMove,
    DefenderMove,
    GamePosition,
    Reason,
    Side,
    Strategy,
    Verdict,
    Winner,
    attacker_moves,
    defender_replies,
    enumerate_defender_plays,
    exact_bisim_finite,
    play_game,
    search_attacker_wins,
)
from .grammar import Grammar, Rule, validate_grammar
from .rcm import (
    Configuration,
    Instruction,
    Op,
    Rcm,
    ReachResult,
    ReachStatus,
    WitnessRun,
    reachable_final,
    rcm_step,
)
from .terms import App, Nonterminal, Term, Var, format_term, numeral, numeral_value

__all__ = [
    "StateSymbols",
    "ReductionOutput",
    "GameCounters",
    "reduce",
    "action_label",
    "encode_position",
    "decode_position",
    "expected_sizes",
    "format_sidecar",
    "StrategyContractError",
    "ReductionAttacker",
    "ReductionDefender",
    "attacker_strategy",
    "defender_strategy",
    "Check",
    "VerifyReport",
    "verify_instance",
]

AUX_A = "a"
AUX_B = "b"

GameCounters = Sequence[tuple[int, int]]


class StateSymbols(NamedTuple):
    A: Nonterminal
    B: Nonterminal
    Ad: tuple[Nonterminal, ...]  # indexed by counter - 1
    B1: tuple[Nonterminal, ...]
    B2: tuple[Nonterminal, ...]

    def all(self) -> list[Nonterminal]:
        out = [self.A, self.B]
        for i in range(len(self.Ad)):
            out += [self.Ad[i], self.B1[i], self.B2[i]]
        return out


class HeadInfo(NamedTuple):
    family: str  # "A", "B", "Ad", "B1" or "B2"
    state: str
    counter: int  # 1-based; 0 for A/B


@dataclass(frozen=True)
class ReductionOutput:
    machine: Rcm
    p_init: str
    p_final: str
    grammar: Grammar
    left_root: Term
    right_root: Term
    succ: Nonterminal
    bottom: Nonterminal
    states: dict[str, StateSymbols]
    labels: tuple[str, ...]  # action label of each instruction, in declaration order
    heads: dict[Nonterminal, HeadInfo] = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.machine.dimension

    def numeral(self, n: int) -> Term:
        return numeral(n, self.succ, self.bottom)

    def info(self, t: Term) -> HeadInfo | None:
        return self.heads.get(t.head) if isinstance(t, App) else None


def action_label(k: int, ins: Instruction) -> str:
    return f"i{k}_{ins.source}_{ins.op.kind.value}{ins.op.counter}_{ins.target}"


def reduce(m: Rcm, p_init: str, p_final: str) -> ReductionOutput:
    for s in (p_init, p_final):
        if s not in m.states:
            raise ValueError(f"unknown state {s!r}")
    d = m.dimension
    arity = 2 * d
    I = Nonterminal("I", 1)
    bot = Nonterminal("Bot", 0)
    states: dict[str, StateSymbols] = {}
    heads: dict[Nonterminal, HeadInfo] = {}
    for p in m.states:
        sym = StateSymbols(
            Nonterminal(f"A_{p}", arity),
            Nonterminal(f"B_{p}", arity),
            tuple(Nonterminal(f"Ad_{p}_{i}", arity) for i in range(1, d + 1)),
            tuple(Nonterminal(f"B1_{p}_{i}", arity) for i in range(1, d + 1)),
            tuple(Nonterminal(f"B2_{p}_{i}", arity) for i in range(1, d + 1)),
        )
        states[p] = sym
        heads[sym.A] = HeadInfo("A", p, 0)
        heads[sym.B] = HeadInfo("B", p, 0)
        for i in range(d):
            heads[sym.Ad[i]] = HeadInfo("Ad", p, i + 1)
            heads[sym.B1[i]] = HeadInfo("B1", p, i + 1)
            heads[sym.B2[i]] = HeadInfo("B2", p, i + 1)

    xs: tuple[Term, ...] = tuple(Var(j) for j in range(1, arity + 1))

    def with_slots(**slots: Term) -> tuple[Term, ...]:
        args = list(xs)
        for key, val in slots.items():
            args[int(key[1:]) - 1] = val
        return tuple(args)

    labels = tuple(action_label(k, ins) for k, ins in enumerate(m.instructions))
    rules = [Rule(I, AUX_A, Var(1))]
    for label, ins in zip(labels, m.instructions):
        src, dst = states[ins.source], states[ins.target]
        i = ins.op.counter
        inc, dec = 2 * i - 1, 2 * i  # slots of c_i^I and c_i^D
        if ins.op.kind is Op.INCR:
            args = with_slots(**{f"x{inc}": I(xs[inc - 1])})
            rules += [Rule(src.A, label, dst.A(*args)), Rule(src.B, label, dst.B(*args))]
        elif ins.op.kind is Op.RESET:
            args = with_slots(**{f"x{inc}": bot(), f"x{dec}": bot()})
            rules += [Rule(src.A, label, dst.A(*args)), Rule(src.B, label, dst.B(*args))]
        else:
            ad, b1, b2 = dst.Ad[i - 1], dst.B1[i - 1], dst.B2[i - 1]
            args = with_slots(**{f"x{dec}": I(xs[dec - 1])})
            rules += [
                Rule(src.A, label, ad(*xs)),
                Rule(src.A, label, b1(*xs)),
                Rule(src.A, label, b2(*xs)),
                Rule(src.B, label, b1(*xs)),
                Rule(src.B, label, b2(*xs)),
                Rule(ad, AUX_A, dst.A(*args)),
                Rule(b1, AUX_A, dst.B(*args)),
                Rule(b2, AUX_A, dst.A(*args)),
                Rule(ad, AUX_B, xs[inc - 1]),
                Rule(b1, AUX_B, xs[inc - 1]),
                Rule(b2, AUX_B, xs[dec - 1]),
            ]
    rules.append(Rule(states[p_final].A, AUX_A, bot()))

    nonterminals = [I, bot]
    for p in m.states:
        nonterminals += states[p].all()
    # Two decrements into the same (q, i) repeat the gadget's a/b rules;
    # they are kept so every instruction contributes its full rule schema.
    g = Grammar(nonterminals, [*labels, AUX_A, AUX_B], rules, dedupe=False)
    zeros = (bot(),) * arity
    return ReductionOutput(
        machine=m,
        p_init=p_init,
        p_final=p_final,
        grammar=g,
        left_root=states[p_init].A(*zeros),
        right_root=states[p_init].B(*zeros),
        succ=I,
        bottom=bot,
        states=states,
        labels=labels,
        heads=heads,
    )


def expected_sizes(m: Rcm) -> tuple[int, int, int]:
    """(|nonterminals|, |actions|, |rules|) the reduction must produce for ``m``."""
    kinds = [ins.op.kind for ins in m.instructions]
    n_incr, n_reset, n_decr = (kinds.count(k) for k in (Op.INCR, Op.RESET, Op.DECR))
    return (
        2 + len(m.states) * (2 + 3 * m.dimension),
        len(m.instructions) + 2,
        2 + 2 * n_incr + 2 * n_reset + 11 * n_decr,
    )


def encode_position(out: ReductionOutput, p: str, gc: GameCounters) -> tuple[Term, Term]:
    """The term pair ``(A_p(...), B_p(...))`` carrying the game counters as numerals."""
    if p not in out.states:
        raise ValueError(f"unknown state {p!r}")
    if len(gc) != out.dimension:
        raise ValueError(f"expected {out.dimension} counter pairs, got {len(gc)}")
    args = []
    for n_inc, n_dec in gc:
        if n_inc < 0 or n_dec < 0:
            raise ValueError("game counters must be nonnegative")
        args += [out.numeral(n_inc), out.numeral(n_dec)]
    sym = out.states[p]
    return sym.A(*args), sym.B(*args)


def _counters_of(out: ReductionOutput, t: App) -> tuple[tuple[int, int], ...] | None:
    vals = [numeral_value(a, out.succ, out.bottom) for a in t.args]
    if any(v is None for v in vals):
        return None
    return tuple(zip(vals[0::2], vals[1::2]))


def decode_position(out: ReductionOutput, t: Term) -> tuple[str, tuple[tuple[int, int], ...]] | None:
    """Inverse of :func:`encode_position` on either side's term; None for other shapes."""
    info = out.info(t)
    if info is None or info.family not in ("A", "B"):
        return None
    gc = _counters_of(out, t)
    return None if gc is None else (info.state, gc)


def format_sidecar(out: ReductionOutput) -> str:
    lines = [f"root left {format_term(out.left_root)}", f"root right {format_term(out.right_root)}"]
    for p, sym in out.states.items():
        lines.append(f"state {p} -> {' '.join(nt.name for nt in sym.all())}")
    for k, label in enumerate(out.labels):
        lines.append(f"ins {k} -> {label}")
    return "\n".join(lines) + "\n"


# -- strategies ------------------------------------------------------------------


class StrategyContractError(RuntimeError):
    """The play left every position the strategy was built to handle."""


class ReductionAttacker(Strategy):
    """Attacker strategy driven by a run of the machine that reaches ``p_final``.

    It replays the run's instructions from the A side, answers Defender's
    forcing choice with ``a`` (continue) or ``b`` (compare numerals), wins
    numeral comparisons by stepping the longer numeral, and finishes with the
    ``a`` move only ``A_<p_final>`` has.
    """

    def __init__(self, out: ReductionOutput, run: WitnessRun):
        m = out.machine
        if run.initial != Configuration(out.p_init, (0,) * m.dimension):
            raise ValueError("witness run must start at the initial configuration")
        conf = run.initial
        for ins, nxt in run.steps:
            if (ins, nxt) not in rcm_step(m, conf):
                raise ValueError(f"witness step {ins} from {conf} is not a machine step")
            conf = nxt
        if conf.state != out.p_final:
            raise ValueError("witness run does not end in the final state")
        self.out = out
        self.plan: dict[int, tuple[Term, Term, int | None]] = {}
        gc = [[0, 0] for _ in range(m.dimension)]
        rnd = 0
        index = {ins: k for k, ins in enumerate(m.instructions)}
        for ins, nxt in run.steps:
            left, right = encode_position(out, ins.source, gc)
            self.plan[rnd] = (left, right, index[ins])
            pair = gc[ins.op.counter - 1]
            if ins.op.kind is Op.INCR:
                pair[0] += 1
                rnd += 1
            elif ins.op.kind is Op.RESET:
                pair[0] = pair[1] = 0
                rnd += 1
            else:
                pair[1] += 1
                rnd += 2
        left, right = encode_position(out, out.p_final, gc)
        self.plan[rnd] = (left, right, None)
        self.rounds_needed = rnd + 1

    def attack(self, g, pos):
        out = self.out
        planned = self.plan.get(pos.round)
        if planned is not None and planned[:2] == (pos.left, pos.right):
            k = planned[2]
            if k is None:
                return self._pick(g, pos, Side.LEFT, "a", out.bottom())
            ins = out.machine.instructions[k]
            label = out.labels[k]
            if ins.op.kind is Op.DECR:
                ad = out.states[ins.target].Ad[ins.op.counter - 1]
                return self._pick(g, pos, Side.LEFT, label, head=ad)
            return self._pick(g, pos, Side.LEFT, label)
        li, ri = out.info(pos.left), out.info(pos.right)
        if li is not None and ri is not None and li.family == "Ad":
            if ri.family == "B1":
                return self._pick(g, pos, Side.LEFT, "a")
            if ri.family == "B2":
                return self._pick(g, pos, Side.LEFT, "b")
        nl = numeral_value(pos.left, out.succ, out.bottom)
        nr = numeral_value(pos.right, out.succ, out.bottom)
        if nl is not None and nr is not None and nl != nr:
            return self._pick(g, pos, Side.LEFT if nl > nr else Side.RIGHT, "a")
        raise StrategyContractError(
            f"round {pos.round}: unexpected position "
            f"({format_term(pos.left)}, {format_term(pos.right)})"
        )

    @staticmethod
    def _pick(g, pos, side, action, target=None, head=None) -> AttackerMove:
        for mv in attacker_moves(g, pos):
            if mv.side is not side or mv.action != action:
                continue
            if target is not None and mv.successor is not target:
                continue
            if head is not None and mv.successor.head != head:
                continue
            return mv
        raise StrategyContractError(f"no {side.value} -{action}-> move at round {pos.round}")


class ReductionDefender(Strategy):
    """Defender strategy that reads the game counters off the current terms.

    It copies the attacker's successor whenever that is possible, which
    answers every deviation from the intended play with syntactically equal
    terms. At a decrement ``A_p -> Ad_(q,i)`` it picks ``B1_(q,i)`` when the
    increments of ``c_i`` outnumber its decrements and ``B2_(q,i)`` (ask for
    the numeral comparison) otherwise. Everywhere else the first matching
    move is as good as any other.
    """

    def __init__(self, out: ReductionOutput):
        self.out = out

    def defend(self, g, pos, move):
        replies = defender_replies(g, pos, move)
        if not replies:
            return None
        for r in replies:
            if r.successor is move.successor:
                return r
        info = self.out.info(move.successor)
        if info is not None and info.family == "Ad":
            gc = _counters_of(self.out, pos.term(move.side.other))
            if gc is not None:
                n_inc, n_dec = gc[info.counter - 1]
                sym = self.out.states[info.state]
                want = sym.B1 if n_inc > n_dec else sym.B2
                want = want[info.counter - 1]
                for r in replies:
                    if r.successor.head == want:
                        return r
        return replies[0]


def attacker_strategy(out: ReductionOutput, run: WitnessRun) -> ReductionAttacker:
    return ReductionAttacker(out, run)


def defender_strategy(out: ReductionOutput) -> ReductionDefender:
    return ReductionDefender(out)


# -- verification harness ----------------------------------------------------------


class Check(NamedTuple):
    name: str
    status: str  # pass, fail or inconclusive
    detail: str = ""

    def __str__(self):
        return f"check {self.name}: {self.status} {self.detail}".rstrip()


@dataclass
class VerifyReport:
    ground_truth: ReachResult
    checks: list[Check]
    verdict: str
    agreement: str  # AGREE, DISAGREE or INCONCLUSIVE

    @property
    def agree(self) -> bool:
        return self.agreement == "AGREE"

    def text(self) -> str:
        lines = [str(c) for c in self.checks]
        lines.append(f"verdict: {self.verdict} {self.agreement}")
        return "\n".join(lines) + "\n"


def verify_instance(
    m: Rcm,
    p_init: str,
    p_final: str,
    depth_budget: int = 25,
    state_budget: int = 100_000,
    step_bound: int | None = None,
) -> VerifyReport:
    """Cross-check machine reachability against the reduction's bisimulation game.

    The ground truth is a bounded BFS on the machine (``step_bound`` defaults
    to ``depth_budget``: longer runs could not be replayed within the game's
    round budget anyway). A reachable final state must give an Attacker win
    both via the synthesized attacker and via approximants. An unreachable one
    must leave the synthesized defender undefeated by exhaustive attack, keep
    ``~_k`` for every ``k <= depth_budget``, and, when the reachable term
    fragment is finite, be confirmed bisimilar outright.
    """
    checks: list[Check] = []
    truth = reachable_final(
        m, p_init, p_final, step_bound if step_bound is not None else depth_budget, state_budget
    )
    if truth.status is ReachStatus.REACHED:
        checks.append(Check("ground-truth", "pass", f"reachable in {len(truth.witness)} steps"))
    elif truth.status is ReachStatus.NOT_WITHIN_BOUNDS and truth.exact:
        checks.append(
            Check("ground-truth", "pass", f"unreachable (exact, {truth.explored} configurations)")
        )
    elif truth.status is ReachStatus.NOT_WITHIN_BOUNDS:
        checks.append(
            Check("ground-truth", "pass", f"unreachable within {truth.depth} steps (not exact)")
        )
    else:
        checks.append(
            Check("ground-truth", "inconclusive", f"configuration budget {state_budget} exceeded")
        )

    out = reduce(m, p_init, p_final)
    g = out.grammar
    problems = validate_grammar(g)
    checks.append(
        Check("grammar-valid", "fail" if problems else "pass", "; ".join(map(str, problems)))
    )
    sizes = (len(g.nonterminals), len(g.actions), len(g.rules))
    want = expected_sizes(m)
    checks.append(
        Check(
            "size-formulas",
            "pass" if sizes == want else "fail",
            f"N={sizes[0]} Sigma={sizes[1]} R={sizes[2]}"
            + ("" if sizes == want else f" expected {want}"),
        )
    )
    start = GamePosition(out.left_root, out.right_root)
    solver = ApproxSolver(g)
    exact_confirmed = False

    if truth.status is ReachStatus.REACHED:
        attacker = attacker_strategy(out, truth.witness)
        plays = enumerate_defender_plays(g, start, attacker, depth_budget)
        if plays.defender_wins:
            checks.append(
                Check("attacker-strategy", "fail", f"{plays.defender_wins} plays won by Defender")
            )
        elif plays.unfinished:
            checks.append(
                Check(
                    "attacker-strategy",
                    "inconclusive",
                    f"{plays.unfinished} plays longer than {depth_budget} rounds",
                )
            )
        else:
            checks.append(
                Check(
                    "attacker-strategy",
                    "pass",
                    f"{plays.attacker_wins} maximal plays, all Attacker wins, longest {plays.longest}",
                )
            )
        level = solver.level(out.left_root, out.right_root, depth_budget)
        if level is not None:
            checks.append(Check("distinguishing-level", "pass", f"level {level}"))
        elif plays.unfinished:
            checks.append(Check("distinguishing-level", "inconclusive", f"none up to {depth_budget}"))
        else:
            checks.append(Check("distinguishing-level", "fail", f"none up to {depth_budget}"))
        outcome = play_game(g, start, attacker, defender_strategy(out), max(depth_budget, 1))
        if outcome.winner is Winner.ATTACKER:
            status = "pass"
        elif outcome.reason is Reason.ROUND_LIMIT:
            status = "inconclusive"
        else:
            status = "fail"
        checks.append(
            Check(
                "strategy-play",
                status,
                f"{outcome.winner.value} ({outcome.reason.value}) after {len(outcome.trace)} rounds",
            )
        )
    else:
        line = search_attacker_wins(g, start, defender_strategy(out), depth_budget)
        if line is None:
            checks.append(
                Check("defender-strategy", "pass", f"undefeated by exhaustive attack to depth {depth_budget}")
            )
        else:
            moves = " ".join(f"{mv.side.value}:{mv.action}" for mv in line)
            checks.append(Check("defender-strategy", "fail", f"beaten by {moves}"))
        level = solver.level(out.left_root, out.right_root, depth_budget)
        if level is None:
            checks.append(Check("approximants", "pass", f"~_k holds for all k <= {depth_budget}"))
        else:
            checks.append(Check("approximants", "fail", f"not ~_{level}"))
        exact = exact_bisim_finite(g, out.left_root, out.right_root, state_budget)
        if exact.verdict is Verdict.BISIMILAR:
            exact_confirmed = True
            checks.append(Check("exact-bisim", "pass", f"bisimilar ({exact.states} terms)"))
        elif exact.verdict is Verdict.NOT_BISIMILAR:
            checks.append(Check("exact-bisim", "fail", f"not bisimilar ({exact.states} terms)"))
        else:
            checks.append(
                Check("exact-bisim", "inconclusive", f"fragment exceeds {state_budget} terms")
            )

    statuses = {c.status for c in checks}
    if truth.status is ReachStatus.BUDGET_EXCEEDED:
        verdict, agreement = "UNKNOWN (reachable: UNKNOWN)", "INCONCLUSIVE"
    else:
        if truth.status is ReachStatus.REACHED:
            verdict = "NOT BISIMILAR (reachable: YES)"
        elif truth.exact and exact_confirmed:
            verdict = "BISIMILAR (reachable: NO)"
        elif truth.exact:
            verdict = f"BISIMILAR up to ~_{depth_budget} (reachable: NO; exactness not established)"
        else:
            verdict = f"BISIMILAR up to ~_{depth_budget} (reachable: NO within bounds)"
        if "fail" in statuses:
            agreement = "DISAGREE"
        elif truth.reached and "inconclusive" in statuses:
            agreement = "INCONCLUSIVE"
        else:
            agreement = "AGREE"
    return VerifyReport(truth, checks, verdict, agreement)
