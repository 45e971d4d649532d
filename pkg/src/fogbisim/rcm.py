"""Reset counter machines: semantics, bounded reachability, and the fast-growing family."""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

__all__ = [
    "RcmError",
    "Op",
    "Operation",
    "Instruction",
    "Rcm",
    "Configuration",
    "WitnessRun",
    "ReachStatus",
    "ReachResult",
    "rcm_step",
    "apply_operation",
    "reachable_final",
    "bfs_levels",
    "BudgetExceeded",
    "ackermann",
    "ackermann_diagonal",
    "parse_rcm",
    "serialize_rcm",
]


class RcmError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Op(str, enum.Enum):
    INCR = "incr"
    DECR = "decr"
    RESET = "reset"


class Operation(NamedTuple):
    kind: Op
    counter: int  # 1-based

    def __str__(self):
        return f"{self.kind.value}({self.counter})"


class Instruction(NamedTuple):
    source: str
    op: Operation
    target: str

    def __str__(self):
        return f"({self.source}, {self.op}, {self.target})"


STATE_RE = re.compile(r"[A-Za-z0-9_]+")


@dataclass(frozen=True)
class Rcm:
    """A machine (d, Q, delta). ``states`` keeps first-mention order."""

    dimension: int
    states: tuple[str, ...]
    instructions: tuple[Instruction, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise RcmError("dimension must be positive")
        known = set(self.states)
        if len(known) != len(self.states):
            raise RcmError("duplicate state")
        for s in self.states:
            if not STATE_RE.fullmatch(s):
                raise RcmError(f"state name {s!r} must match [A-Za-z0-9_]+")
        if len(set(self.instructions)) != len(self.instructions):
            raise RcmError("duplicate instruction")
        for ins in self.instructions:
            if ins.source not in known or ins.target not in known:
                raise RcmError(f"instruction {ins} mentions an unknown state")
            if not 1 <= ins.op.counter <= self.dimension:
                raise RcmError(f"counter index {ins.op.counter} out of range 1..{self.dimension}")

    @classmethod
    def build(cls, dimension: int, instructions: Iterable, extra_states: Iterable[str] = ()) -> "Rcm":
        """Convenience constructor from ``(p, "incr", i, q)`` tuples."""
        ins = []
        for item in instructions:
            if isinstance(item, Instruction):
                ins.append(item)
            else:
                p, kind, i, q = item
                ins.append(Instruction(p, Operation(Op(kind), i), q))
        states = dict.fromkeys(extra_states)
        for x in ins:
            states.setdefault(x.source)
            states.setdefault(x.target)
        return cls(dimension, tuple(states), tuple(ins))


class Configuration(NamedTuple):
    state: str
    counters: tuple[int, ...]

    def __str__(self):
        return f"({self.state}, ({', '.join(map(str, self.counters))}))"


@dataclass(frozen=True)
class WitnessRun:
    initial: Configuration
    steps: tuple[tuple[Instruction, Configuration], ...] = ()

    def __len__(self):
        return len(self.steps)

    @property
    def final(self) -> Configuration:
        return self.steps[-1][1] if self.steps else self.initial

    def configurations(self) -> list[Configuration]:
        return [self.initial] + [c for _, c in self.steps]


def apply_operation(op: Operation, counters: tuple[int, ...]) -> tuple[int, ...] | None:
    i = op.counter - 1
    n = counters[i]
    if op.kind is Op.INCR:
        n += 1
    elif op.kind is Op.DECR:
        if n == 0:
            return None
        n -= 1
    else:
        n = 0
    return counters[:i] + (n,) + counters[i + 1 :]


def rcm_step(m: Rcm, c: Configuration) -> list[tuple[Instruction, Configuration]]:
    """Successors of ``c`` in instruction declaration order."""
    if len(c.counters) != m.dimension or any(
        not isinstance(n, int) or n < 0 for n in c.counters
    ):
        raise RcmError(f"malformed configuration {c} for dimension {m.dimension}")
    if c.state not in m.states:
        raise RcmError(f"unknown state {c.state!r}")
    out = []
    for ins in m.instructions:
        if ins.source != c.state:
            continue
        nxt = apply_operation(ins.op, c.counters)
        if nxt is not None:
            out.append((ins, Configuration(ins.target, nxt)))
    return out


class ReachStatus(str, enum.Enum):
    REACHED = "reached"
    NOT_WITHIN_BOUNDS = "not_within_bounds"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class ReachResult:
    status: ReachStatus
    witness: WitnessRun | None = None
    exact: bool = False  # for NOT_WITHIN_BOUNDS: the whole reachable set was closed
    explored: int = 0
    depth: int = 0  # BFS levels completed

    @property
    def reached(self) -> bool:
        return self.status is ReachStatus.REACHED


def reachable_final(
    m: Rcm, p_init: str, p_final: str, step_bound: int, config_budget: int
) -> ReachResult:
    """Breadth-first search for ``p_final`` from ``(p_init, 0...0)``.

    A hit carries a shortest witness run. Without a hit, ``exact`` tells
    whether the search exhausted all reachable configurations before either
    bound stopped it.
    """
    for s in (p_init, p_final):
        if s not in m.states:
            raise RcmError(f"unknown state {s!r}")
    start = Configuration(p_init, (0,) * m.dimension)
    if p_init == p_final:
        return ReachResult(ReachStatus.REACHED, WitnessRun(start), explored=1)
    parent: dict[Configuration, tuple[Configuration, Instruction] | None] = {start: None}
    frontier = [start]
    depth = 0
    while frontier:
        if depth >= step_bound:
            return ReachResult(ReachStatus.NOT_WITHIN_BOUNDS, explored=len(parent), depth=depth)
        nxt = []
        for c in frontier:
            for ins, d in rcm_step(m, c):
                if d in parent:
                    continue
                parent[d] = (c, ins)
                if d.state == p_final:
                    return ReachResult(
                        ReachStatus.REACHED, _witness(parent, d), explored=len(parent), depth=depth + 1
                    )
                if len(parent) > config_budget:
                    return ReachResult(ReachStatus.BUDGET_EXCEEDED, explored=len(parent), depth=depth)
                nxt.append(d)
        frontier = nxt
        depth += 1
    return ReachResult(ReachStatus.NOT_WITHIN_BOUNDS, exact=True, explored=len(parent), depth=depth)


def _witness(parent, end: Configuration) -> WitnessRun:
    steps = []
    c = end
    while parent[c] is not None:
        prev, ins = parent[c]
        steps.append((ins, c))
        c = prev
    return WitnessRun(c, tuple(reversed(steps)))


def bfs_levels(m: Rcm, p_init: str, steps: int) -> list[list[Configuration]]:
    """The BFS frontiers of new configurations, level by level, for ``steps`` levels."""
    start = Configuration(p_init, (0,) * m.dimension)
    seen = {start}
    levels = [[start]]
    for _ in range(steps):
        nxt = []
        for c in levels[-1]:
            for _, d in rcm_step(m, c):
                if d not in seen:
                    seen.add(d)
                    nxt.append(d)
        if not nxt:
            break
        levels.append(nxt)
    return levels


# -- f_0, f_1, ... ---------------------------------------------------------------


class BudgetExceeded(RuntimeError):
    pass


def ackermann(k: int, n: int, budget: int = 1_000_000) -> int:
    """``f_k(n)`` with ``f_0(n) = n+1`` and ``f_{k+1}(n)`` the (n+1)-fold iterate of ``f_k``.

    Evaluated by literal unfolding; each application of ``f_0`` costs one unit
    of ``budget`` and BudgetExceeded is raised once it runs out.
    """
    if k < 0 or n < 0:
        raise ValueError("arguments must be nonnegative")
    work = 0

    def f(level: int, x: int) -> int:
        nonlocal work
        if level == 0:
            work += 1
            if work > budget:
                raise BudgetExceeded(f"f_{k}({n}) needs more than {budget} steps")
            return x + 1
        y = x
        for _ in range(x + 1):
            y = f(level - 1, y)
        return y

    return f(k, n)


def ackermann_diagonal(n: int, budget: int = 1_000_000) -> int:
    return ackermann(n, n, budget)


# -- .rcm text format ------------------------------------------------------------


def parse_rcm(text: str) -> tuple[Rcm, str, str]:
    """Parse the ``.rcm`` format into ``(machine, p_init, p_final)``."""
    dim = init = final = None
    instructions: list[Instruction] = []
    seen: dict[Instruction, int] = {}
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        last = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "dim":
            if dim is not None:
                raise RcmError("duplicate 'dim' line", lineno)
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise RcmError("expected 'dim <positive integer>'", lineno)
            dim = int(parts[1])
        elif key in ("init", "final"):
            if len(parts) != 2 or not STATE_RE.fullmatch(parts[1]):
                raise RcmError(f"expected '{key} <state>' with state matching [A-Za-z0-9_]+", lineno)
            if key == "init":
                if init is not None:
                    raise RcmError("more than one 'init' line", lineno)
                init = parts[1]
            else:
                if final is not None:
                    raise RcmError("more than one 'final' line", lineno)
                final = parts[1]
        elif key == "ins":
            if dim is None:
                raise RcmError("'dim' must precede instructions", lineno)
            if len(parts) != 5:
                raise RcmError("expected 'ins <p> <incr|decr|reset> <i> <q>'", lineno)
            _, p, kind, idx, q = parts
            for s in (p, q):
                if not STATE_RE.fullmatch(s):
                    raise RcmError(f"state name {s!r} must match [A-Za-z0-9_]+", lineno)
            try:
                op = Op(kind)
            except ValueError:
                raise RcmError(f"unknown operation {kind!r}", lineno) from None
            if not idx.isdigit() or not 1 <= int(idx) <= dim:
                raise RcmError(f"counter index {idx} out of range 1..{dim}", lineno)
            ins = Instruction(p, Operation(op, int(idx)), q)
            if ins in seen:
                raise RcmError(f"duplicate instruction (first on line {seen[ins]})", lineno)
            seen[ins] = lineno
            instructions.append(ins)
        else:
            raise RcmError(f"unknown directive {key!r}", lineno)
    where = max(last, 1)
    if dim is None:
        raise RcmError("missing 'dim' line", where)
    if init is None:
        raise RcmError("missing 'init' line", where)
    if final is None:
        raise RcmError("missing 'final' line", where)
    return Rcm.build(dim, instructions, extra_states=(init, final)), init, final


def serialize_rcm(m: Rcm, p_init: str, p_final: str) -> str:
    lines = [f"dim {m.dimension}", f"init {p_init}", f"final {p_final}"]
    for ins in m.instructions:
        lines.append(f"ins {ins.source} {ins.op.kind.value} {ins.op.counter} {ins.target}")
    return "\n".join(lines) + "\n"
