"""The bisimulation game on numerals ``I^n(Bot)``.

Numerals of different height are told apart exactly at the level of the
smaller one plus one; equal numerals are bisimilar.
"""

from fogbisim import GamePosition, distinguishing_level, exact_bisim_finite, parse_grammar, play_game
from fogbisim.bisim import ExhaustiveAttacker, ExhaustiveDefender, format_trace
from fogbisim.terms import numeral

g = parse_grammar("""\
nonterminal I 1
nonterminal Bot 0
action a
rule I(x1) -a-> x1
""")
I, Bot = g.signature["I"], g.signature["Bot"]

print("distinguishing levels (blank = bisimilar up to 10):")
print("     " + " ".join(f"{m:>3}" for m in range(6)))
for n in range(6):
    row = []
    for m in range(6):
        res = distinguishing_level(g, numeral(n, I, Bot), numeral(m, I, Bot), 10)
        row.append("   " if res is None else f"{res[0]:>3}")
    print(f"{n:>3}  " + " ".join(row))

print("\nexact check, 3 vs 3:", exact_bisim_finite(g, numeral(3, I, Bot), numeral(3, I, Bot), 100).verdict.value)
print("exact check, 3 vs 4:", exact_bisim_finite(g, numeral(3, I, Bot), numeral(4, I, Bot), 100).verdict.value)

print("\na play with optimal players on (I^2 Bot, I^3 Bot):")
start = GamePosition(numeral(2, I, Bot), numeral(3, I, Bot))
outcome = play_game(g, start, ExhaustiveAttacker(10), ExhaustiveDefender(10), 10)
print(format_trace(outcome))
