"""The nine acceptance criteria, one test each, at their stated tolerances.

Each test prints a single ``[PASS]``/``[FAIL] criterion N`` line; the lines are
also gathered into an "acceptance criteria" section of the terminal summary.
"""

import random
import time

import pytest

from conftest import EXAMPLE_GRAMMAR, NUMERALS, fixture_names, load_fixture
from randgen import naive_attacker_wins, random_grammar, random_rcm, random_term
from fogbisim import (
    ApproxSolver,
    BudgetExceeded,
    GamePosition,
    Verdict,
    ackermann,
    ackermann_diagonal,
    enumerate_defender_plays,
    exact_bisim_finite,
    expected_sizes,
    parse_grammar,
    parse_term,
    reachable_final,
    reduce,
    search_attacker_wins,
    transitions,
    validate_grammar,
    verify_instance,
)
from fogbisim.grammar import Grammar
from fogbisim.rcm import Configuration, Op, rcm_step
from fogbisim.reduction import attacker_strategy, defender_strategy
from fogbisim.terms import Nonterminal, Var, format_term, numeral, substitute

DEPTH = 25
STATE_BUDGET = 10**5


def test_criterion_1_reduction_sizes(criterion, seed):
    rng = random.Random(seed)
    t0 = time.perf_counter()
    bad = []
    for n in range(60):
        m, p, q = random_rcm(rng, max_states=6, max_dim=3, max_ins=12)
        out = reduce(m, p, q)
        g = out.grammar
        kinds = [ins.op.kind for ins in m.instructions]
        want = (
            2 + len(m.states) * (2 + 3 * m.dimension),
            len(m.instructions) + 2,
            2 + 2 * kinds.count(Op.INCR) + 2 * kinds.count(Op.RESET) + 11 * kinds.count(Op.DECR),
        )
        got = (len(g.nonterminals), len(g.actions), len(g.rules))
        if got != want or expected_sizes(m) != want or validate_grammar(g):
            bad.append(n)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 5
    criterion(1, ok, f"60 random machines, {len(bad)} failures, {elapsed:.2f}s (limit 5s)")
    assert ok


def test_criterion_2_numeral_bisimilarity(criterion):
    g = parse_grammar(NUMERALS)
    succ, bot = g.signature["I"], g.signature["Bot"]
    t0 = time.perf_counter()
    bad = []
    solver = ApproxSolver(g)
    for n in range(13):
        for n2 in range(13):
            t, u = numeral(n, succ, bot), numeral(n2, succ, bot)
            if (exact_bisim_finite(g, t, u, 1000).verdict is Verdict.BISIMILAR) != (n == n2):
                bad.append(("exact", n, n2))
            for k in range(16):
                expected = n == n2 or k <= min(n, n2)
                if solver.holds(t, u, k) != expected or naive_attacker_wins(g, t, u, k) == expected:
                    bad.append(("approx", n, n2, k))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    criterion(2, ok, f"169 numeral pairs x 16 levels, {len(bad)} mismatches, {elapsed:.2f}s (limit 10s)")
    assert ok


def _classify(rep):
    status = {c.name: c.status for c in rep.checks}
    if rep.ground_truth.reached:
        return "yes"
    return "no-finite" if status.get("exact-bisim") == "pass" else "no-bounded"


def test_criterion_3_end_to_end(criterion):
    counts = {"yes": 0, "no-finite": 0, "no-bounded": 0}
    failures = []
    slowest = 0.0
    names = fixture_names()
    for name in names:
        m, p, q = load_fixture(name)
        t0 = time.perf_counter()
        rep = verify_instance(m, p, q, DEPTH, STATE_BUDGET)
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        counts[_classify(rep)] += 1
        if not rep.agree or elapsed >= 60:
            failures.append(f"{name} ({rep.agreement}, {elapsed:.1f}s)")
    ok = (
        not failures
        and len(names) >= 10
        and counts["yes"] >= 4
        and counts["no-finite"] >= 4
        and counts["no-bounded"] >= 2
    )
    criterion(
        3,
        ok,
        f"{len(names)} fixtures {counts}, failures {failures or 'none'}, slowest {slowest:.2f}s (limit 60s)",
    )
    assert ok


def _game(name):
    m, p, q = load_fixture(name)
    out = reduce(m, p, q)
    return m, p, q, out, GamePosition(out.left_root, out.right_root)


def test_criterion_4_attacker_soundness(criterion):
    summary, bad = [], []
    for name in fixture_names("yes_"):
        m, p, q, out, start = _game(name)
        run = reachable_final(m, p, q, DEPTH, STATE_BUDGET).witness
        plays = enumerate_defender_plays(out.grammar, start, attacker_strategy(out, run), DEPTH)
        summary.append(f"{name}:{plays.attacker_wins}")
        if plays.defender_wins or plays.unfinished or not plays.attacker_wins:
            bad.append(name)
    ok = not bad and len(summary) >= 4
    criterion(4, ok, f"all maximal plays won by Attacker on {len(summary)} YES fixtures ({', '.join(summary)}); failing: {bad or 'none'}")
    assert ok


def test_criterion_5_defender_soundness(criterion):
    names = fixture_names("no_")
    bad = []
    for name in names:
        m, p, q, out, start = _game(name)
        if search_attacker_wins(out.grammar, start, defender_strategy(out), DEPTH) is not None:
            bad.append(name)
    ok = not bad and len(names) >= 6
    criterion(5, ok, f"exhaustive attack to depth {DEPTH} on {len(names)} NO fixtures, defeated: {bad or 'none'}")
    assert ok


def test_criterion_6_lts_semantics(criterion):
    g = parse_grammar(EXAMPLE_GRAMMAR)
    A = g.signature["A"]
    first, second = g.rules_for(A)[0][1], g.rules_for(A)[1][1]
    # Open instances: the rule itself under the identity and a renaming substitution.
    V, U = Nonterminal("V", 0), Nonterminal("U", 0)
    x = [Var(i) for i in range(1, 6)]
    open_cases = [
        (substitute(first.rhs, {x[0]: x[0], x[1]: x[1], x[2]: x[2]}), "C(D(x3,B),x2)"),
        (substitute(first.rhs, {x[0]: V(), x[1]: x[4], x[2]: U()}), "C(D(U,B),x5)"),
    ]
    # Closed instance: U1, U2, U3 as fresh constants.
    us = [Nonterminal(f"U{i}", 0) for i in (1, 2, 3)]
    g_closed = Grammar(g.nonterminals + tuple(us), g.actions, g.rules)
    t = parse_term("A(U1,U2,U3)", g_closed.signature)
    got = [(tr.action, format_term(tr.target)) for tr in transitions(g_closed, t)]
    want = [("b", "C(D(U3,B),U2)"), ("b", "U2")]
    ok = [format_term(v) for v, _ in open_cases] == [s for _, s in open_cases] and got == want
    ok = ok and first.action == second.action == "b"
    criterion(6, ok, f"A(U1,U2,U3) -> {got}; open instances {[format_term(v) for v, _ in open_cases]}")
    assert ok


def _literal_step(instructions, state, counters):
    """Successor configurations written out case by case from the definition."""
    out = []
    for ins in instructions:
        if ins.source != state:
            continue
        i = ins.op.counter - 1
        if ins.op.kind is Op.INCR:
            nxt = [c + 1 if j == i else c for j, c in enumerate(counters)]
        elif ins.op.kind is Op.DECR:
            if counters[i] == 0:
                continue
            nxt = [c - 1 if j == i else c for j, c in enumerate(counters)]
        else:
            nxt = [0 if j == i else c for j, c in enumerate(counters)]
        out.append((ins.target, tuple(nxt)))
    return out


def test_criterion_7_rcm_semantics(criterion, seed):
    rng = random.Random(seed + 7)
    cases = mismatches = 0
    while cases < 12_000:
        m, _, _ = random_rcm(rng)
        for _ in range(20):
            state = rng.choice(m.states)
            counters = tuple(rng.choice([0, 0, 1, rng.randint(0, 50)]) for _ in range(m.dimension))
            got = [(c.state, c.counters) for _, c in rcm_step(m, Configuration(state, counters))]
            if got != _literal_step(m.instructions, state, counters):
                mismatches += 1
            cases += 1
    ok = mismatches == 0
    criterion(7, ok, f"{cases} random configurations, {mismatches} mismatches")
    assert ok


def test_criterion_8_ackermann(criterion):
    values = (ackermann(0, 5), ackermann_diagonal(1), ackermann_diagonal(2))
    try:
        ackermann_diagonal(3, budget=1_000_000)
        over = False
    except BudgetExceeded:
        over = True
    ok = values == (6, 3, 23) and over
    criterion(8, ok, f"f_0(5), f_A(1), f_A(2) = {values}; f_A(3) budget exceeded: {over}")
    assert ok


def test_criterion_9_approximant_consistency(criterion, seed):
    rng = random.Random(seed + 9)
    pairs = violations = decided = 0
    while pairs < 1200:
        g = random_grammar(rng)
        solver = ApproxSolver(g)
        for _ in range(12):
            t = random_term(rng, g.nonterminals, rng.randint(0, 3))
            u = random_term(rng, g.nonterminals, rng.randint(0, 3))
            levels = [solver.holds(t, u, k) for k in range(8)]
            if any(levels[k + 1] and not levels[k] for k in range(7)):
                violations += 1
            exact = exact_bisim_finite(g, t, u, 2000)
            if exact.verdict is not Verdict.UNKNOWN:
                decided += 1
                if exact.verdict is Verdict.BISIMILAR and not all(levels):
                    violations += 1
                if exact.verdict is Verdict.NOT_BISIMILAR and solver.level(t, u, exact.states + 1) is None:
                    violations += 1
            pairs += 1
    ok = violations == 0
    criterion(9, ok, f"{pairs} random pairs ({decided} with exact verdict), {violations} violations")
    assert ok
