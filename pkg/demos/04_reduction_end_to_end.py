"""From a counter machine to a pair of grammar terms and back.

The final state is reachable exactly when the two root terms are not
bisimilar. This script reduces one instance of each kind and lets the
verification harness cross-check every claim.
"""

from pathlib import Path

from fogbisim import parse_rcm, reduce, verify_instance
from fogbisim.terms import format_term

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

for name in ("yes_m1.rcm", "no_decr_zero.rcm", "no_pump.rcm"):
    text = (FIXTURES / name).read_text()
    m, p_init, p_final = parse_rcm(text)
    out = reduce(m, p_init, p_final)
    g = out.grammar
    print(f"== {name}: {len(m.states)} states, {len(m.instructions)} instructions")
    print(f"   grammar: {len(g.nonterminals)} nonterminals, {len(g.actions)} actions, {len(g.rules)} rules")
    print(f"   roots: {format_term(out.left_root)}  vs  {format_term(out.right_root)}")
    report = verify_instance(m, p_init, p_final, depth_budget=25, state_budget=100_000)
    for line in report.text().splitlines():
        print("   " + line)
    print()
