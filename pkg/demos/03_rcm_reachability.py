"""Reset counter machines: stepping, bounded search, and how fast things grow."""

from fogbisim import BudgetExceeded, Rcm, ackermann, reachable_final
from fogbisim.rcm import bfs_levels

# Count counter 1 up to two, move it to counter 2, then finish.
m = Rcm.build(
    2,
    [
        ("p0", "incr", 1, "p1"),
        ("p1", "incr", 1, "p2"),
        ("p2", "decr", 1, "p3"),
        ("p3", "incr", 2, "p2"),
        ("p2", "reset", 2, "p4"),
        ("p3", "decr", 2, "pf"),
    ],
    extra_states=("island",),
)

for n, level in enumerate(bfs_levels(m, "p0", 6)):
    print(f"level {n}: " + " ".join(map(str, level)))

res = reachable_final(m, "p0", "pf", step_bound=50, config_budget=10_000)
print(f"\npf {res.status.value} after exploring {res.explored} configurations")
print(f"  {res.witness.initial}")
for ins, conf in res.witness.steps:
    print(f"  {ins} -> {conf}")

# No instruction enters "island", so the search closes the whole reachable set.
res = reachable_final(m, "p0", "island", step_bound=50, config_budget=10_000)
print(f"\nisland {res.status.value}, exact={res.exact}, {res.explored} configurations")

print("\nf_k(n) by literal unfolding:")
for k in range(4):
    row = []
    for n in range(4):
        try:
            row.append(str(ackermann(k, n, budget=100_000)))
        except BudgetExceeded:
            row.append(">budget")
    print(f"  f_{k}: " + ", ".join(row))
