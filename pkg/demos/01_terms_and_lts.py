"""Terms, grammars and the transition system they induce.

Run with ``python3 demos/01_terms_and_lts.py``.
"""

from fogbisim import format_term, parse_grammar, parse_term, transitions

GRAMMAR = """\
nonterminal A 3
nonterminal B 0
nonterminal C 2
nonterminal D 2
nonterminal U1 0
nonterminal U2 0
nonterminal U3 0
action a
action b
rule A(x1,x2,x3) -b-> C(D(x3,B),x2)
rule A(x1,x2,x3) -b-> x2
rule D(x1,x2) -a-> A(D(x2,x2),x1,B)
"""

g = parse_grammar(GRAMMAR)
print(g)
for r in g.rules:
    print("  ", r)

# A rule rewrites only at the root; the arguments are carried along untouched.
t = parse_term("A(U1,U2,U3)", g.signature)
print(f"\ntransitions of {format_term(t)}:")
for tr in transitions(g, t):
    print(f"  -{tr.action}-> {format_term(tr.target)}   (rule {tr.rule})")

# Follow the first branch from D(U1,U2) until nothing applies.
print("\na short run:")
t = parse_term("D(U1,U2)", g.signature)
for _ in range(4):
    steps = transitions(g, t)
    if not steps:
        print(f"  {format_term(t)} is stuck")
        break
    tr = steps[0]
    print(f"  {format_term(t)} -{tr.action}-> {format_term(tr.target)}")
    t = tr.target

# Terms are shared: building the same term twice gives the same object.
assert parse_term("D(B,B)", g.signature) is parse_term("D(B, B)", g.signature)
