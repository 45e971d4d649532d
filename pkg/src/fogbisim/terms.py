"""First-order terms over ranked nonterminals, and substitution.

Terms are hash-consed: building the same term twice yields the same object,
so structural equality is identity and hashing is O(1). This matters because
the bisimulation machinery memoizes on pairs of terms constantly.
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

__all__ = [
    "TermError",
    "Var",
    "App",
    "Term",
    "Nonterminal",
    "substitute",
    "variables",
    "is_closed",
    "symbols",
    "numeral",
    "numeral_value",
    "parse_term",
    "format_term",
]


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class Nonterminal:
    """A ranked function symbol. Calling it builds a term: ``D(x1, B())``."""

    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise TermError("nonterminal name must be nonempty")
        if self.arity < 0:
            raise TermError(f"negative arity for {self.name}")

    def __call__(self, *args: "Term") -> "App":
        return App(self, args)

    def __str__(self):
        return self.name


class Var:
    """The variable x_i, identified by its index only."""

    __slots__ = ("index", "__weakref__")
    _table: "weakref.WeakValueDictionary[int, Var]" = weakref.WeakValueDictionary()

    def __new__(cls, index: int) -> "Var":
        if not isinstance(index, int) or index < 1:
            raise TermError(f"variable index must be a positive integer, got {index!r}")
        v = cls._table.get(index)
        if v is None:
            v = object.__new__(cls)
            object.__setattr__(v, "index", index)
            cls._table[index] = v
        return v

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __reduce__(self):
        return (Var, (self.index,))

    def __repr__(self):
        return f"x{self.index}"

    @property
    def depth(self) -> int:
        return 0


class App:
    """A nonterminal applied to exactly ``arity`` children."""

    __slots__ = ("head", "args", "depth", "__weakref__")
    _table: "weakref.WeakValueDictionary[tuple, App]" = weakref.WeakValueDictionary()

    def __new__(cls, head: Nonterminal, args: Iterable["Term"] = ()) -> "App":
        args = tuple(args)
        if len(args) != head.arity:
            raise TermError(
                f"{head.name} has arity {head.arity} but got {len(args)} children"
            )
        for a in args:
            if not isinstance(a, (Var, App)):
                raise TermError(f"not a term: {a!r}")
        key = (head, tuple(map(id, args)))
        t = cls._table.get(key)
        if t is None:
            t = object.__new__(cls)
            object.__setattr__(t, "head", head)
            object.__setattr__(t, "args", args)
            object.__setattr__(t, "depth", 1 + max((a.depth for a in args), default=0))
            cls._table[key] = t
        return t

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __reduce__(self):
        return (App, (self.head, self.args))

    def __repr__(self):
        return format_term(self)


Term = Union[Var, App]
Substitution = Mapping[Var, Term]


def substitute(t: Term, s: Substitution) -> Term:
    """Replace every variable occurrence ``x`` in ``t`` by ``s[x]`` (unmapped ones stay)."""
    if not s:
        return t
    cache: dict[int, Term] = {}

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return s.get(u, u)
        r = cache.get(id(u))
        if r is None:
            r = App(u.head, [go(a) for a in u.args])
            cache[id(u)] = r
        return r

    return go(t)


def _walk(t: Term):
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if id(u) in seen:
            continue
        seen.add(id(u))
        yield u
        if isinstance(u, App):
            stack.extend(u.args)


def variables(t: Term) -> frozenset[Var]:
    return frozenset(u for u in _walk(t) if isinstance(u, Var))


def is_closed(t: Term) -> bool:
    return not any(isinstance(u, Var) for u in _walk(t))


def symbols(t: Term) -> frozenset[Nonterminal]:
    """All nonterminals occurring in ``t``."""
    return frozenset(u.head for u in _walk(t) if isinstance(u, App))


def numeral(n: int, succ: Nonterminal, bottom: Nonterminal) -> Term:
    """``succ`` applied ``n`` times to ``bottom``."""
    if succ.arity != 1:
        raise TermError(f"numeral successor {succ.name} must be unary")
    if bottom.arity != 0:
        raise TermError(f"numeral bottom {bottom.name} must be nullary")
    if n < 0:
        raise TermError("numeral of a negative number")
    t = App(bottom)
    for _ in range(n):
        t = App(succ, (t,))
    return t


def numeral_value(t: Term, succ: Nonterminal | None = None, bottom: Nonterminal | None = None):
    """Inverse of :func:`numeral`; returns None when ``t`` is not a numeral.

    Without explicit symbols, any chain of unary nodes ending in a nullary
    node counts.
    """
    n = 0
    while isinstance(t, App) and t.head.arity == 1:
        if succ is not None and t.head != succ:
            return None
        t = t.args[0]
        n += 1
    if not isinstance(t, App) or t.head.arity != 0:
        return None
    if bottom is not None and t.head != bottom:
        return None
    return n


# -- text syntax -------------------------------------------------------------

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_VAR_RE = re.compile(r"x[0-9]+")
_TOKEN_RE = re.compile(rf"\s*(?:({IDENT})|([(),]))")


def is_variable_name(name: str) -> bool:
    return _VAR_RE.fullmatch(name) is not None


def format_term(t: Term) -> str:
    parts: list[str] = []
    stack: list = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, str):
            parts.append(u)
        elif isinstance(u, Var):
            parts.append(f"x{u.index}")
        elif not u.args:
            parts.append(u.head.name)
        else:
            parts.append(u.head.name + "(")
            stack.append(")")
            for i in range(len(u.args) - 1, -1, -1):
                stack.append(u.args[i])
                if i:
                    stack.append(",")
    return "".join(parts)


def _tokenize(text: str) -> list[str]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TermError(f"unexpected character {text[pos:].lstrip()[:1]!r} at offset {pos}")
        toks.append(m.group(1) or m.group(2))
        pos = m.end()
    return toks


def parse_term(text: str, signature: Mapping[str, Nonterminal] | None = None) -> Term:
    """Parse ``Name(T1,...,Tk)`` / ``Name`` / ``x<digits>`` syntax.

    With a ``signature`` every name must be declared there with the arity it
    is used at. Without one, arities are read off the text and must be used
    consistently.
    """
    toks = _tokenize(text)
    if not toks:
        raise TermError("empty term")
    seen: dict[str, Nonterminal] = {}
    pos = 0

    def lookup(name: str, arity: int) -> Nonterminal:
        if signature is not None:
            nt = signature.get(name)
            if nt is None:
                raise TermError(f"unknown nonterminal {name!r}")
            if nt.arity != arity:
                raise TermError(f"{name} has arity {nt.arity} but is used with {arity} arguments")
            return nt
        nt = seen.setdefault(name, Nonterminal(name, arity))
        if nt.arity != arity:
            raise TermError(f"{name} used with arities {nt.arity} and {arity}")
        return nt

    def parse() -> Term:
        nonlocal pos
        if pos >= len(toks):
            raise TermError("unexpected end of term")
        tok = toks[pos]
        if tok in "(),":
            raise TermError(f"unexpected {tok!r}")
        pos += 1
        if is_variable_name(tok):
            return Var(int(tok[1:]))
        args: list[Term] = []
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            while True:
                args.append(parse())
                if pos >= len(toks):
                    raise TermError("unclosed '('")
                if toks[pos] == ",":
                    pos += 1
                elif toks[pos] == ")":
                    pos += 1
                    break
                else:
                    raise TermError(f"expected ',' or ')' but got {toks[pos]!r}")
        return App(lookup(tok, len(args)), args)

    t = parse()
    if pos != len(toks):
        raise TermError(f"trailing input after term: {' '.join(toks[pos:])!r}")
    return t
