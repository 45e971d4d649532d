import random

import pytest

from conftest import fixture_names, load_fixture
from fogbisim.rcm import (
    BudgetExceeded,
    Configuration,
    Instruction,
    Op,
    Operation,
    Rcm,
    RcmError,
    ReachStatus,
    ackermann,
    ackermann_diagonal,
    bfs_levels,
    parse_rcm,
    rcm_step,
    reachable_final,
    serialize_rcm,
)
from randgen import random_rcm

M1_TEXT = "dim 1\ninit p0\nfinal pf\nins p0 incr 1 p1\nins p1 decr 1 pf\n"


def conf(p, *ns):
    return Configuration(p, tuple(ns))


def test_step_examples():
    m = Rcm.build(2, [("p", "decr", 1, "q"), ("p", "reset", 2, "q"), ("p", "incr", 1, "q")])
    assert [c for _, c in rcm_step(m, conf("p", 0, 0))] == [conf("q", 0, 0), conf("q", 1, 0)]
    assert [c for _, c in rcm_step(m, conf("p", 2, 5))] == [
        conf("q", 1, 5),
        conf("q", 2, 0),
        conf("q", 3, 5),
    ]


def test_step_rejects_malformed():
    m = Rcm.build(1, [("p", "incr", 1, "q")])
    with pytest.raises(RcmError):
        rcm_step(m, conf("p", 0, 0))
    with pytest.raises(RcmError):
        rcm_step(m, conf("p", -1))
    with pytest.raises(RcmError):
        rcm_step(m, conf("zz", 0))


def test_reach_m1():
    m, p, f = parse_rcm(M1_TEXT)
    res = reachable_final(m, p, f, 10, 100)
    assert res.status is ReachStatus.REACHED and len(res.witness) == 2
    assert res.witness.configurations() == [conf("p0", 0), conf("p1", 1), conf("pf", 0)]


def test_reach_m2_is_exact_no():
    m = Rcm.build(1, [("p0", "decr", 1, "pf")])
    res = reachable_final(m, "p0", "pf", 10, 100)
    assert res.status is ReachStatus.NOT_WITHIN_BOUNDS and res.exact and res.explored == 1


def test_reach_zero_steps():
    m = Rcm.build(1, [("p0", "decr", 1, "pf")])
    res = reachable_final(m, "p0", "p0", 1, 1)
    assert res.reached and len(res.witness) == 0


def test_reach_bounds():
    m = Rcm.build(2, [("p", "incr", 1, "p"), ("p", "incr", 2, "p"), ("p", "decr", 2, "q")])
    m = Rcm.build(2, m.instructions, extra_states=["f"])
    res = reachable_final(m, "p", "f", 5, 10_000)
    assert res.status is ReachStatus.NOT_WITHIN_BOUNDS and not res.exact and res.depth == 5
    res = reachable_final(m, "p", "f", 1000, 30)
    assert res.status is ReachStatus.BUDGET_EXCEEDED


def replay(m, run):
    c = run.initial
    for ins, nxt in run.steps:
        assert (ins, nxt) in rcm_step(m, c)
        c = nxt
    return c


def test_witnesses_replay_and_bounds_are_monotone(seed):
    rng = random.Random(seed)
    for _ in range(300):
        m, p, f = random_rcm(rng)
        small = reachable_final(m, p, f, 4, 50)
        big = reachable_final(m, p, f, 12, 5000)
        for res in (small, big):
            if res.reached:
                assert res.witness.initial == Configuration(p, (0,) * m.dimension)
                assert replay(m, res.witness).state == f
        if small.reached:
            assert big.reached and len(big.witness) == len(small.witness)
        if small.status is ReachStatus.NOT_WITHIN_BOUNDS and small.exact:
            assert big.status is ReachStatus.NOT_WITHIN_BOUNDS and big.exact


def test_counters_never_negative(seed):
    rng = random.Random(seed + 1)
    for _ in range(100):
        m, p, _ = random_rcm(rng)
        for level in bfs_levels(m, p, 6):
            assert all(n >= 0 for c in level for n in c.counters)


def test_ackermann_values():
    assert ackermann(0, 5) == 6
    assert ackermann_diagonal(1) == 3
    assert ackermann_diagonal(2) == 23
    with pytest.raises(BudgetExceeded):
        ackermann_diagonal(3)


def test_ackermann_first_level_closed_form():
    assert [ackermann(1, n) for n in range(21)] == [2 * n + 1 for n in range(21)]


def test_ackermann_monotone():
    table = {(k, n): ackermann(k, n) for k in range(3) for n in range(5)}
    for (k, n), v in table.items():
        if (k, n + 1) in table:
            assert table[k, n + 1] > v
        if (k + 1, n) in table:
            # f_k(0) = 1 for every k, so strictness in k starts at n = 1
            assert table[k + 1, n] > v if n else table[k + 1, n] == v == 1


def test_parse_m1():
    m, p, f = parse_rcm(M1_TEXT)
    assert (p, f, m.dimension) == ("p0", "pf", 1)
    assert m.instructions == (
        Instruction("p0", Operation(Op.INCR, 1), "p1"),
        Instruction("p1", Operation(Op.DECR, 1), "pf"),
    )
    assert m.states == ("p0", "pf", "p1")


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("", 1, "missing 'dim'"),
        ("dim 1\nins p0 decr 2 pf\n", 2, "out of range"),
        ("dim 1\ninit a\nfinal b\nins a incr 1 b\nins a incr 1 b\n", 5, "duplicate instruction"),
        ("dim 1\nfinal b\n", 2, "missing 'init'"),
        ("dim 1\ninit a\n", 2, "missing 'final'"),
        ("dim 1\ninit a\ninit b\n", 3, "more than one"),
        ("dim 1\nins a zero 1 b\n", 2, "unknown operation"),
        ("dim 1\nins a-b incr 1 b\n", 2, "state name"),
        ("ins a incr 1 b\n", 1, "'dim' must precede"),
        ("dim 0\n", 1, "positive"),
    ],
)
def test_parse_errors(text, line, message):
    with pytest.raises(RcmError) as err:
        parse_rcm(text)
    assert err.value.line == line and message in str(err.value)


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_round_trip(name):
    m, p, f = load_fixture(name)
    text = serialize_rcm(m, p, f)
    assert parse_rcm(text) == (m, p, f)
    assert serialize_rcm(*parse_rcm(text)) == text
