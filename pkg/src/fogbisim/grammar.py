"""First-order grammars and the labelled transition systems they induce."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .terms import (
    IDENT,
    App,
    Nonterminal,
    Term,
    TermError,
    Var,
    format_term,
    is_variable_name,
    parse_term,
    substitute,
)

__all__ = [
    "GrammarError",
    "Rule",
    "Grammar",
    "Transition",
    "Violation",
    "validate_grammar",
    "transitions",
    "parse_grammar",
    "serialize_grammar",
]

log = logging.getLogger(__name__)


class GrammarError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Rule:
    """``head(x1,...,xm) -action-> rhs``."""

    head: Nonterminal
    action: str
    rhs: Term

    def __str__(self):
        return f"{format_lhs(self.head)} -{self.action}-> {format_term(self.rhs)}"


class Transition(NamedTuple):
    action: str
    target: Term
    rule: int  # index into Grammar.rules


class Violation(NamedTuple):
    rule: int
    reason: str

    def __str__(self):
        return f"rule {self.rule}: {self.reason}"


def format_lhs(head: Nonterminal) -> str:
    if head.arity == 0:
        return head.name
    return f"{head.name}({','.join(f'x{i}' for i in range(1, head.arity + 1))})"


class Grammar:
    """A finite set of ranked nonterminals, actions and root-rewriting rules.

    Rules keep their declaration order; exact duplicates are dropped with a
    warning unless ``dedupe`` is off. Construction does not validate; see
    :func:`validate_grammar`.
    """

    def __init__(
        self,
        nonterminals: Iterable[Nonterminal],
        actions: Iterable[str],
        rules: Iterable[Rule],
        dedupe: bool = True,
    ):
        self.nonterminals: tuple[Nonterminal, ...] = tuple(dict.fromkeys(nonterminals))
        self.actions: tuple[str, ...] = tuple(dict.fromkeys(actions))
        kept: list[Rule] = []
        seen = set()
        for r in rules:
            if dedupe and r in seen:
                log.warning("dropping duplicate rule %s", r)
                continue
            seen.add(r)
            kept.append(r)
        self.rules: tuple[Rule, ...] = tuple(kept)
        self.signature: dict[str, Nonterminal] = {}
        for nt in self.nonterminals:
            self.signature.setdefault(nt.name, nt)
        self._by_head: dict[Nonterminal, list[tuple[int, Rule]]] = {}
        for i, r in enumerate(self.rules):
            self._by_head.setdefault(r.head, []).append((i, r))
        self._step_cache: dict[App, tuple[Transition, ...]] = {}

    def rules_for(self, head: Nonterminal) -> list[tuple[int, Rule]]:
        return self._by_head.get(head, [])

    def step(self, t: App) -> tuple[Transition, ...]:
        """Transitions of a closed term, without re-checking it against the grammar."""
        res = self._step_cache.get(t)
        if res is None:
            sub = {Var(i + 1): u for i, u in enumerate(t.args)}
            res = tuple(
                Transition(r.action, substitute(r.rhs, sub), i)
                for i, r in self._by_head.get(t.head, ())
            )
            self._step_cache[t] = res
        return res

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return (self.nonterminals, self.actions, self.rules) == (
            other.nonterminals,
            other.actions,
            other.rules,
        )

    def __hash__(self):
        return hash((self.nonterminals, self.actions, self.rules))

    def __repr__(self):
        return (
            f"Grammar({len(self.nonterminals)} nonterminals, "
            f"{len(self.actions)} actions, {len(self.rules)} rules)"
        )


def validate_grammar(g: Grammar) -> list[Violation]:
    """Every rule-level problem in ``g``; an empty list means the grammar is valid."""
    out: list[Violation] = []
    names: dict[str, Nonterminal] = {}
    for nt in g.nonterminals:
        if nt.name in names:
            out.append(Violation(-1, f"nonterminal {nt.name} declared twice"))
        names[nt.name] = nt
    actions = set(g.actions)
    for i, r in enumerate(g.rules):
        if names.get(r.head.name) != r.head:
            out.append(Violation(i, _symbol_problem(names, r.head)))
        if r.action not in actions:
            out.append(Violation(i, f"unknown action {r.action!r}"))
        stack = [r.rhs]
        while stack:
            u = stack.pop()
            if isinstance(u, Var):
                if u.index > r.head.arity:
                    out.append(
                        Violation(
                            i,
                            f"variable x{u.index} out of range for {r.head.name} "
                            f"of arity {r.head.arity}",
                        )
                    )
                continue
            if names.get(u.head.name) != u.head:
                out.append(Violation(i, _symbol_problem(names, u.head)))
            stack.extend(u.args)
    return out


def _symbol_problem(names: dict[str, Nonterminal], nt: Nonterminal) -> str:
    declared = names.get(nt.name)
    if declared is None:
        return f"unknown nonterminal {nt.name}"
    return f"arity mismatch: {nt.name} declared with arity {declared.arity}, used with {nt.arity}"


def transitions(g: Grammar, t: Term) -> tuple[Transition, ...]:
    """All transitions ``(action, target)`` of the closed term ``t``, in rule order."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            raise TermError(f"transitions are only defined on closed terms, found x{u.index}")
        if g.signature.get(u.head.name) != u.head:
            raise TermError(f"term uses {u.head.name}/{u.head.arity}, unknown to the grammar")
        stack.extend(u.args)
    return g.step(t)


# -- .fog text format ----------------------------------------------------------

_RULE_RE = re.compile(r"rule\s+(.*?)\s*-\s*(" + IDENT + r")\s*->\s*(.*)")
_LHS_RE = re.compile(r"(" + IDENT + r")\s*(?:\((.*)\))?")


def parse_grammar(text: str) -> Grammar:
    """Parse the line-oriented ``.fog`` format and validate the result.

    Raises GrammarError carrying the offending line number.
    """
    nonterminals: dict[str, Nonterminal] = {}
    actions: dict[str, None] = {}
    rules: list[Rule] = []
    rule_lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword = line.split(None, 1)[0]
        if keyword == "nonterminal":
            parts = line.split()
            if len(parts) != 3 or not re.fullmatch(IDENT, parts[1]) or not parts[2].isdigit():
                raise GrammarError("expected 'nonterminal <name> <arity>'", lineno)
            name = parts[1]
            if is_variable_name(name):
                raise GrammarError(f"{name} is reserved for variables", lineno)
            if name in nonterminals:
                raise GrammarError(f"nonterminal {name} declared twice", lineno)
            nonterminals[name] = Nonterminal(name, int(parts[2]))
        elif keyword == "action":
            parts = line.split()
            if len(parts) != 2 or not re.fullmatch(IDENT, parts[1]):
                raise GrammarError("expected 'action <label>'", lineno)
            if parts[1] in actions:
                raise GrammarError(f"action {parts[1]} declared twice", lineno)
            actions[parts[1]] = None
        elif keyword == "rule":
            rules.append(_parse_rule(line, nonterminals, actions, lineno))
            rule_lines.append(lineno)
        else:
            raise GrammarError(f"unknown directive {keyword!r}", lineno)
    g = Grammar(nonterminals.values(), actions, rules)
    problems = validate_grammar(g)
    if problems:
        v = problems[0]
        line = rule_lines[v.rule] if 0 <= v.rule < len(rule_lines) else None
        raise GrammarError(v.reason, line)
    return g


def _parse_rule(line, nonterminals, actions, lineno) -> Rule:
    m = _RULE_RE.fullmatch(line)
    if m is None:
        raise GrammarError("expected 'rule <Name>(x1,...,xm) -<label>-> <term>'", lineno)
    lhs, action, rhs_text = m.groups()
    lm = _LHS_RE.fullmatch(lhs)
    if lm is None:
        raise GrammarError(f"malformed left-hand side {lhs!r}", lineno)
    name, params = lm.groups()
    head = nonterminals.get(name)
    if head is None:
        raise GrammarError(f"unknown nonterminal {name}", lineno)
    params = [p.strip() for p in params.split(",")] if params is not None else []
    if params != [f"x{i}" for i in range(1, head.arity + 1)]:
        raise GrammarError(
            f"left-hand side must be {format_lhs(head)}, got {lhs.strip()}", lineno
        )
    if action not in actions:
        raise GrammarError(f"unknown action {action!r}", lineno)
    try:
        rhs = parse_term(rhs_text, nonterminals)
    except TermError as e:
        raise GrammarError(str(e), lineno) from None
    return Rule(head, action, rhs)


def serialize_grammar(g: Grammar, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"nonterminal {nt.name} {nt.arity}" for nt in g.nonterminals]
    lines += [f"action {a}" for a in g.actions]
    lines += [f"rule {r}" for r in g.rules]
    return "\n".join(lines) + "\n"
