"""Command-line front end.

Exit status: 0 on success or a positive verdict, 1 on a negative verdict
(not bisimilar, unreachable, disagreement, budget exceeded), 2 on usage or
parse errors, 3 when a check could not reach a verdict within its budget.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bisim import (
    ExhaustiveAttacker,
    ExhaustiveDefender,
    GamePosition,
    Strategy,
    Verdict,
    attacker_moves,
    defender_replies,
    distinguishing_level,
    exact_bisim_finite,
    format_trace,
    play_game,
)
from .grammar import GrammarError, parse_grammar, serialize_grammar, transitions
from .rcm import BudgetExceeded, RcmError, ReachStatus, ackermann, bfs_levels, parse_rcm, reachable_final
from .reduction import format_sidecar, reduce, verify_instance
from .terms import TermError, format_term, parse_term

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class PromptStrategy(Strategy):
    """A human player: lists the legal moves and reads a choice per line."""

    def __init__(self, stdin=None, stdout=None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def _choose(self, options, describe):
        if not options:
            return None
        for n, opt in enumerate(options):
            print(f"  [{n}] {describe(opt)}", file=self.stdout)
        while True:
            print("choice (empty line resigns)> ", end="", file=self.stdout, flush=True)
            line = self.stdin.readline()
            if not line.strip():
                return None
            try:
                return options[int(line)]
            except (ValueError, IndexError):
                print(f"  expected a number in 0..{len(options) - 1}", file=self.stdout)

    def attack(self, g, pos):
        print(f"round {pos.round + 1}: ({format_term(pos.left)}, {format_term(pos.right)})", file=self.stdout)
        return self._choose(
            attacker_moves(g, pos),
            lambda m: f"ATT {m.side.value} -{m.action}-> {format_term(m.successor)}",
        )

    def defend(self, g, pos, move):
        print(f"attacker played {move.side.value} -{move.action}-> {format_term(move.successor)}", file=self.stdout)
        return self._choose(
            defender_replies(g, pos, move),
            lambda r: f"DEF -{move.action}-> {format_term(r.successor)}",
        )


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _grammar(path: str):
    return parse_grammar(_read(path))


def _term(g, text: str):
    t = parse_term(text, g.signature)
    transitions(g, t)
    return t


def cmd_reduce(args) -> int:
    m, p_init, p_final = parse_rcm(_read(args.file))
    out = reduce(m, p_init, p_final)
    header = [f"reduction of {Path(args.file).name}: init {p_init}, final {p_final}"]
    Path(args.output).write_text(serialize_grammar(out.grammar, header))
    if args.map:
        Path(args.map).write_text(format_sidecar(out))
    g = out.grammar
    print(f"nonterminals: {len(g.nonterminals)}")
    print(f"actions: {len(g.actions)}")
    print(f"rules: {len(g.rules)}")
    print(f"left root: {format_term(out.left_root)}")
    print(f"right root: {format_term(out.right_root)}")
    return EXIT_OK


def cmd_rcm_run(args) -> int:
    m, p_init, _ = parse_rcm(_read(args.file))
    for n, level in enumerate(bfs_levels(m, p_init, args.steps)):
        print(f"step {n}: {' '.join(map(str, level))}")
    return EXIT_OK


def cmd_rcm_reach(args) -> int:
    m, p_init, p_final = parse_rcm(_read(args.file))
    res = reachable_final(m, p_init, p_final, args.step_bound, args.config_budget)
    if res.status is ReachStatus.REACHED:
        print(f"reached: {p_final} in {len(res.witness)} steps")
        print(f"  {res.witness.initial}")
        for ins, conf in res.witness.steps:
            print(f"  {ins} -> {conf}")
        return EXIT_OK
    if res.status is ReachStatus.NOT_WITHIN_BOUNDS:
        exact = "exact" if res.exact else f"within {res.depth} steps, not exact"
        print(f"not reached ({exact}; {res.explored} configurations)")
        return EXIT_NEGATIVE
    print(f"budget exceeded ({res.explored} configurations)")
    return EXIT_UNKNOWN


def cmd_lts_step(args) -> int:
    g = _grammar(args.file)
    t = _term(g, args.term)
    for tr in transitions(g, t):
        print(f"-{tr.action}-> {format_term(tr.target)}")
    return EXIT_OK


def cmd_game_play(args) -> int:
    g = _grammar(args.file)
    start = GamePosition(_term(g, args.left), _term(g, args.right))
    attacker = PromptStrategy() if args.attacker == "prompt" else ExhaustiveAttacker(args.max_rounds)
    defender = PromptStrategy() if args.defender == "prompt" else ExhaustiveDefender(args.max_rounds)
    outcome = play_game(g, start, attacker, defender, args.max_rounds)
    print(format_trace(outcome, machine=args.json))
    return EXIT_OK


def cmd_bisim_approx(args) -> int:
    g = _grammar(args.file)
    t, u = _term(g, args.left), _term(g, args.right)
    res = distinguishing_level(g, t, u, args.depth)
    if res is None:
        print(f"~_{args.depth}")
        return EXIT_OK
    level, witness = res
    print(f"not ~_{args.depth} (level {level})")
    print("witness: " + " ".join(f"{side.value}:{action}" for side, action in witness))
    return EXIT_NEGATIVE


def cmd_bisim_exact(args) -> int:
    g = _grammar(args.file)
    t, u = _term(g, args.left), _term(g, args.right)
    res = exact_bisim_finite(g, t, u, args.state_budget)
    if res.verdict is Verdict.BISIMILAR:
        print(f"bisimilar ({res.states} reachable terms)")
        return EXIT_OK
    if res.verdict is Verdict.NOT_BISIMILAR:
        print(f"not bisimilar ({res.states} reachable terms)")
        level = distinguishing_level(g, t, u, res.states + 1)
        if level is not None:
            print(f"distinguishing level {level[0]}")
        return EXIT_NEGATIVE
    print(f"unknown (budget exceeded: more than {args.state_budget} reachable terms)")
    return EXIT_UNKNOWN


def cmd_verify(args) -> int:
    m, p_init, p_final = parse_rcm(_read(args.file))
    report = verify_instance(m, p_init, p_final, args.depth, args.state_budget, args.step_bound)
    sys.stdout.write(report.text())
    return {"AGREE": EXIT_OK, "DISAGREE": EXIT_NEGATIVE}.get(report.agreement, EXIT_UNKNOWN)


def cmd_ack(args) -> int:
    if args.diagonal is not None:
        if args.values:
            raise UsageError("ack -A takes no positional arguments")
        k = n = args.diagonal
    else:
        if len(args.values) != 2:
            raise UsageError("usage: ack <k> <n> | ack -A <n>")
        k, n = args.values
    if k < 0 or n < 0:
        raise UsageError("arguments must be nonnegative")
    try:
        print(ackermann(k, n, args.budget))
    except BudgetExceeded:
        print(f"budget exceeded (more than {args.budget} steps)")
        return EXIT_NEGATIVE
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fogbisim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", help="reduce an RCM instance to a grammar")
    r.add_argument("file")
    r.add_argument("-o", "--output", required=True)
    r.add_argument("--map", help="write the symbol mapping sidecar here")
    r.set_defaults(func=cmd_reduce)

    rcm = sub.add_parser("rcm", help="run or search a reset counter machine")
    rsub = rcm.add_subparsers(dest="rcm_command", required=True, parser_class=_Parser)
    run = rsub.add_parser("run", help="print BFS frontiers")
    run.add_argument("file")
    run.add_argument("--steps", type=int, default=10)
    run.set_defaults(func=cmd_rcm_run)
    reach = rsub.add_parser("reach", help="bounded reachability of the final state")
    reach.add_argument("file")
    reach.add_argument("--step-bound", type=int, default=1000)
    reach.add_argument("--config-budget", type=int, default=100_000)
    reach.set_defaults(func=cmd_rcm_reach)

    lts = sub.add_parser("lts", help="inspect the transition system of a grammar")
    lsub = lts.add_subparsers(dest="lts_command", required=True, parser_class=_Parser)
    step = lsub.add_parser("step", help="list the transitions of a term")
    step.add_argument("file")
    step.add_argument("--term", required=True)
    step.set_defaults(func=cmd_lts_step)

    game = sub.add_parser("game", help="play the bisimulation game")
    gsub = game.add_subparsers(dest="game_command", required=True, parser_class=_Parser)
    play = gsub.add_parser("play")
    play.add_argument("file")
    play.add_argument("--left", required=True)
    play.add_argument("--right", required=True)
    play.add_argument("--attacker", choices=["exhaustive", "prompt"], default="exhaustive")
    play.add_argument("--defender", choices=["exhaustive", "prompt"], default="exhaustive")
    play.add_argument("--max-rounds", type=int, default=20)
    play.add_argument("--json", action="store_true", help="one JSON object per line")
    play.set_defaults(func=cmd_game_play)

    bis = sub.add_parser("bisim", help="bisimilarity checks")
    bsub = bis.add_subparsers(dest="bisim_command", required=True, parser_class=_Parser)
    for name, func in (("approx", cmd_bisim_approx), ("exact", cmd_bisim_exact)):
        b = bsub.add_parser(name)
        b.add_argument("file")
        b.add_argument("--left", required=True)
        b.add_argument("--right", required=True)
        if name == "approx":
            b.add_argument("--depth", type=int, default=10)
        else:
            b.add_argument("--state-budget", type=int, default=100_000)
        b.set_defaults(func=func)

    v = sub.add_parser("verify", help="check the reduction on an RCM instance")
    v.add_argument("file")
    v.add_argument("--depth", type=int, default=25)
    v.add_argument("--state-budget", type=int, default=100_000)
    v.add_argument("--step-bound", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("ack", help="the fast-growing functions f_k(n) and f_A(n)")
    a.add_argument("values", nargs="*", type=int)
    a.add_argument("-A", dest="diagonal", type=int, metavar="N")
    a.add_argument("--budget", type=int, default=1_000_000)
    a.set_defaults(func=cmd_ack)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (GrammarError, RcmError, TermError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
