"""Random generators and brute-force oracles shared by the test modules."""

import random

from fogbisim.grammar import Grammar, Rule
from fogbisim.rcm import Instruction, Op, Operation, Rcm
from fogbisim.terms import App, Nonterminal, Var


def random_term(rng, nonterminals, depth, nvars=0):
    leaves = [nt for nt in nonterminals if nt.arity == 0]
    if nvars and rng.random() < 0.4:
        return Var(rng.randint(1, nvars))
    if depth <= 0:
        if nvars:
            return Var(rng.randint(1, nvars))
        return App(rng.choice(leaves))
    nt = rng.choice(nonterminals)
    return App(nt, [random_term(rng, nonterminals, depth - 1, nvars) for _ in range(nt.arity)])


def random_grammar(rng, max_nts=4, max_rules=6, actions=("a", "b")):
    n = rng.randint(2, max_nts)
    nts = [Nonterminal("N0", 0)] + [Nonterminal(f"N{i}", rng.randint(0, 2)) for i in range(1, n)]
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(nts)
        rhs = random_term(rng, nts, rng.randint(0, 2), head.arity)
        rules.append(Rule(head, rng.choice(actions), rhs))
    return Grammar(nts, actions, rules)


def random_rcm(rng, max_states=6, max_dim=3, max_ins=12):
    d = rng.randint(1, max_dim)
    states = [f"q{i}" for i in range(rng.randint(1, max_states))]
    ins = []
    for _ in range(rng.randint(0, max_ins)):
        cand = Instruction(
            rng.choice(states),
            Operation(rng.choice(list(Op)), rng.randint(1, d)),
            rng.choice(states),
        )
        if cand not in ins:
            ins.append(cand)
    return Rcm(d, tuple(states), tuple(ins)), rng.choice(states), rng.choice(states)


def naive_transitions(g, t):
    """Rule-by-rule root rewriting with a hand-rolled substitution."""

    def inst(v, args):
        if isinstance(v, Var):
            return args[v.index - 1]
        return App(v.head, [inst(c, args) for c in v.args])

    return [(r.action, inst(r.rhs, t.args)) for r in g.rules if r.head == t.head]


def naive_attacker_wins(g, t, u, k):
    """Plain game-tree search: can Attacker force a win within k rounds?

    No memo table and no shortcut for equal terms.
    """
    if k == 0:
        return False
    for here, there, swap in ((t, u, False), (u, t, True)):
        opposite = naive_transitions(g, there)
        for a, nxt in naive_transitions(g, here):
            replies = [v for b, v in opposite if b == a]
            if all(
                naive_attacker_wins(g, *((v, nxt) if swap else (nxt, v)), k - 1) for v in replies
            ):
                return True
    return False
