"""Untyped lambda calculus with call-by-value evaluation and Fischer's CPS transform.

Concrete syntax::

    term := ident | "\\" ident "." term | "(" term term ")"

Applications are always parenthesised, so the grammar needs no lookahead.
The parser also accepts ``"(" term ")"`` as plain grouping; the printer never
emits it.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

__all__ = [
    "Var", "Abs", "App", "LambdaTerm", "ParseError", "FreshNameSource",
    "DIVERGED", "parse_term", "print_term", "free_vars", "all_names", "subst",
    "is_value", "eval_cbv", "alpha_eq", "cps_transform", "psi", "random_closed_term",
    "check_simulation",
]

IDENT = re.compile(r"[A-Za-z_'][A-Za-z0-9_']*")


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return print_term(self)

    @cached_property
    def fv(self) -> frozenset:
        return frozenset((self.name,))


@dataclass(frozen=True)
class Abs:
    param: str
    body: "LambdaTerm"

    def __str__(self):
        return print_term(self)

    @cached_property
    def fv(self) -> frozenset:
        return self.body.fv - {self.param}


@dataclass(frozen=True)
class App:
    fun: "LambdaTerm"
    arg: "LambdaTerm"

    def __str__(self):
        return print_term(self)

    @cached_property
    def fv(self) -> frozenset:
        return self.fun.fv | self.arg.fv


LambdaTerm = Union[Var, Abs, App]


class ParseError(ValueError):
    """Malformed input; ``offset`` is the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class _Diverged:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGED"


DIVERGED = _Diverged()


# -- parsing and printing ---------------------------------------------------

def _tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "\\.()":
            yield c, i
            i += 1
        else:
            m = IDENT.match(text, i)
            if m is None:
                raise ParseError(f"unexpected character {c!r}", len(text[:i].encode()))
            yield m.group(), i
            i = m.end()
    yield None, n


def parse_term(text: str) -> LambdaTerm:
    toks = list(_tokens(text))
    pos = 0

    def offset(k):
        return len(text[: toks[k][1]].encode())

    def expect(what):
        nonlocal pos
        tok = toks[pos][0]
        if tok != what:
            raise ParseError(f"expected {what!r}, got {tok!r}", offset(pos))
        pos += 1

    def ident():
        nonlocal pos
        tok = toks[pos][0]
        if tok is None or not IDENT.fullmatch(tok):
            raise ParseError(f"expected identifier, got {tok!r}", offset(pos))
        pos += 1
        return tok

    def term():
        nonlocal pos
        tok = toks[pos][0]
        if tok == "\\":
            pos += 1
            x = ident()
            expect(".")
            return Abs(x, term())
        if tok == "(":
            pos += 1
            f = term()
            if toks[pos][0] == ")":
                pos += 1
                return f
            a = term()
            expect(")")
            return App(f, a)
        return Var(ident())

    result = term()
    if toks[pos][0] is not None:
        raise ParseError(f"trailing input {toks[pos][0]!r}", offset(pos))
    return result


def print_term(m: LambdaTerm) -> str:
    if isinstance(m, Var):
        return m.name
    if isinstance(m, Abs):
        return f"\\{m.param}.{print_term(m.body)}"
    return f"({print_term(m.fun)} {print_term(m.arg)})"


# -- names and substitution -------------------------------------------------

def free_vars(m: LambdaTerm) -> frozenset:
    return m.fv


def all_names(m: LambdaTerm) -> set:
    """Every identifier occurring in ``m``, bound or free."""
    out, stack = set(), [m]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Abs):
            out.add(t.param)
            stack.append(t.body)
        else:
            stack.extend((t.fun, t.arg))
    return out


def _rename_away(name: str, avoid) -> str:
    i = 1
    while f"{name}{i}" in avoid:
        i += 1
    return f"{name}{i}"


def subst(m: LambdaTerm, x: str, n: LambdaTerm) -> LambdaTerm:
    """Capture-avoiding ``m[n/x]``."""
    if x not in m.fv:
        return m
    if isinstance(m, Var):
        return n
    if isinstance(m, App):
        return App(subst(m.fun, x, n), subst(m.arg, x, n))
    y, body = m.param, m.body
    if y in n.fv:
        z = _rename_away(y, n.fv | body.fv | {x})
        body = subst(body, y, Var(z))
        y = z
    return Abs(y, subst(body, x, n))


# -- evaluation -------------------------------------------------------------

def is_value(m: LambdaTerm) -> bool:
    return not isinstance(m, App)


def _step(m: LambdaTerm):
    """One leftmost call-by-value beta step, or None when ``m`` is a value or stuck."""
    if not isinstance(m, App):
        return None
    if not is_value(m.fun):
        f = _step(m.fun)
        return None if f is None else App(f, m.arg)
    if not is_value(m.arg):
        a = _step(m.arg)
        return None if a is None else App(m.fun, a)
    if isinstance(m.fun, Abs):
        return subst(m.fun.body, m.fun.param, m.arg)
    return None


def eval_cbv(m: LambdaTerm, fuel: int):
    """Reduce ``m`` with at most ``fuel`` beta steps.

    Returns the normal form reached (a value, or a stuck open application) or
    ``DIVERGED`` when the fuel runs out first.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    return _normalize(m, fuel)[0]


def _debruijn(m: LambdaTerm, scope: tuple):
    if isinstance(m, Var):
        for i, name in enumerate(reversed(scope)):
            if name == m.name:
                return ("b", i)
        return ("f", m.name)
    if isinstance(m, Abs):
        return ("l", _debruijn(m.body, scope + (m.param,)))
    return ("a", _debruijn(m.fun, scope), _debruijn(m.arg, scope))


def alpha_eq(a: LambdaTerm, b: LambdaTerm) -> bool:
    return _debruijn(a, ()) == _debruijn(b, ())


# -- CPS --------------------------------------------------------------------

@dataclass
class FreshNameSource:
    """Emits ``_k0, _k1, ...`` skipping anything listed in ``avoid``."""

    prefix: str = "_k"
    counter: int = 0
    avoid: set = field(default_factory=set)
    emitted: list = field(default_factory=list)

    def __call__(self) -> str:
        while True:
            name = f"{self.prefix}{self.counter}"
            self.counter += 1
            if name not in self.avoid:
                self.avoid.add(name)
                self.emitted.append(name)
                return name


def cps_transform(m: LambdaTerm, fresh: FreshNameSource | None = None) -> LambdaTerm:
    """Fischer's call-by-value CPS image of ``m``, with no administrative reductions.

    Transformed functions take their continuation first: ``((m k) n)``.
    """
    if fresh is None:
        fresh = FreshNameSource()
    fresh.avoid |= all_names(m)
    return _cps(m, fresh)


def psi(v: LambdaTerm, fresh: FreshNameSource | None = None) -> LambdaTerm:
    """The value translation: ``x -> x`` and ``\\x.M -> \\k.\\x.([[M]] k)``."""
    if fresh is None:
        fresh = FreshNameSource()
    fresh.avoid |= all_names(v)
    return _psi(v, fresh)


def _psi(v, fresh):
    if isinstance(v, Var):
        return v
    k = fresh()
    return Abs(k, Abs(v.param, App(_cps(v.body, fresh), Var(k))))


def _cps(m, fresh):
    k = fresh()
    if is_value(m):
        return Abs(k, App(Var(k), _psi(m, fresh)))
    head = _cps(m.fun, fresh)
    mv = fresh()
    arg = _cps(m.arg, fresh)
    nv = fresh()
    inner = Abs(nv, App(App(Var(mv), Var(k)), Var(nv)))
    return Abs(k, App(head, Abs(mv, App(arg, inner))))


# -- random terms and the simulation check ----------------------------------

def random_closed_term(rng: random.Random, max_size: int = 12, names="xyzuvw") -> LambdaTerm:
    """A random closed term with between 2 and ``max_size`` nodes."""

    def gen(size, scope):
        if size == 1:
            return Var(rng.choice(scope))
        # a closed operand needs a binder, hence at least two nodes per side
        least = 1 if scope else 2
        if size - 1 >= 2 * least and rng.random() < 0.6:
            left = rng.randint(least, size - 1 - least)
            return App(gen(left, scope), gen(size - 1 - left, scope))
        x = rng.choice(names)
        return Abs(x, gen(size - 1, scope + [x]))

    return gen(rng.randint(2, max_size), [])


def _normalize(m, fuel):
    for steps in range(fuel + 1):
        nxt = _step(m)
        if nxt is None:
            return m, steps
        if steps == fuel:
            break
        m = nxt
    return DIVERGED, fuel


def check_simulation(m: LambdaTerm, fuel: int = 1000):
    """Check the CPS simulation property for one closed term.

    Returns None when ``m`` does not normalise within ``fuel`` steps.
    Otherwise, with F the number of steps ``m`` took, reports whether
    ``([[m]] \\z.z)`` normalises within ``20*F + 1000`` steps to a term
    alpha-equal to ``psi`` of the call-by-value result.
    """
    v, steps = _normalize(m, fuel)
    if v is DIVERGED:
        return None
    fresh = FreshNameSource()
    fresh.avoid |= all_names(m) | all_names(v)
    z = fresh()
    image = eval_cbv(App(cps_transform(m, fresh), Abs(z, Var(z))), 20 * steps + 1000)
    if image is DIVERGED:
        return False
    return alpha_eq(image, psi(v, fresh))
