"""The simple NXP goal language and its evaluator over the N-triple.

Grammar (``and`` binds tighter than ``or``, both left-associative)::

    expr := disj
    disj := conj ("or" conj)*
    conj := post ("and" post)*
    post := atom ["post" "(" expr ")"] | "(" expr ")"
"""
from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

from .triples import n_triple

__all__ = [
    "Atom", "And", "Or", "Posting", "Expr", "Environment", "ExprSyntaxError",
    "UnboundAtom", "EvalOutcome", "EpisodeResult", "DEFAULT_BUDGET", "parse_expr",
    "print_expr", "atoms", "depth", "size", "erase_posts", "eval_expr", "evaluate",
    "run_episode", "check_bound", "random_expr", "post_free_exprs",
]

DEFAULT_BUDGET = 10_000
KEYWORDS = frozenset({"and", "or", "post"})
_TOKEN = re.compile(r"\s*(?:([A-Za-z_'][A-Za-z0-9_']*)|([()]))")

Environment = Mapping[str, bool]


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return print_expr(self)


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return print_expr(self)


@dataclass(frozen=True)
class Posting:
    base: Atom
    goal: "Expr"

    def __post_init__(self):
        if not isinstance(self.base, Atom):
            raise TypeError("the posting base must be an Atom")

    def __str__(self):
        return print_expr(self)


Expr = Union[Atom, And, Or, Posting]


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnboundAtom(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unbound atom {self.name!r}"


# -- syntax -----------------------------------------------------------------

def _tokenize(text):
    toks, i = [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[i]!r}", len(text[:i].encode()))
        start = m.start(1) if m.group(1) else m.start(2)
        toks.append((m.group(1) or m.group(2), len(text[:start].encode())))
        i = m.end()
    toks.append((None, len(text.encode())))
    return toks


def parse_expr(text: str) -> Expr:
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos][0]

    def fail(msg):
        raise ExprSyntaxError(msg, toks[pos][1])

    def eat(tok):
        nonlocal pos
        if peek() != tok:
            fail(f"expected {tok!r}, got {peek()!r}")
        pos += 1

    def disj():
        e = conj()
        while peek() == "or":
            eat("or")
            e = Or(e, conj())
        return e

    def conj():
        e = posting()
        while peek() == "and":
            eat("and")
            e = And(e, posting())
        return e

    def posting():
        nonlocal pos
        tok = peek()
        if tok == "(":
            eat("(")
            e = disj()
            eat(")")
            return e
        if tok is None or tok in KEYWORDS or tok == ")":
            fail(f"expected atom, got {tok!r}")
        pos += 1
        if peek() == "post":
            eat("post")
            eat("(")
            goal = disj()
            eat(")")
            return Posting(Atom(tok), goal)
        return Atom(tok)

    e = disj()
    if peek() is not None:
        fail(f"trailing input {peek()!r}")
    return e


def print_expr(e: Expr) -> str:
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Posting):
        return f"{e.base.name} post ({print_expr(e.goal)})"
    if isinstance(e, And):
        left = print_expr(e.left)
        if isinstance(e.left, Or):
            left = f"({left})"
        right = print_expr(e.right)
        if isinstance(e.right, (Or, And)):
            right = f"({right})"
        return f"{left} and {right}"
    right = print_expr(e.right)
    if isinstance(e.right, Or):
        right = f"({right})"
    return f"{print_expr(e.left)} or {right}"


def atoms(e: Expr) -> set:
    if isinstance(e, Atom):
        return {e.name}
    if isinstance(e, Posting):
        return {e.base.name} | atoms(e.goal)
    return atoms(e.left) | atoms(e.right)


def depth(e: Expr) -> int:
    """Height of the tree; an atom has depth 1."""
    if isinstance(e, Atom):
        return 1
    if isinstance(e, Posting):
        return 1 + depth(e.goal)
    return 1 + max(depth(e.left), depth(e.right))


def size(e: Expr) -> int:
    if isinstance(e, Atom):
        return 1
    if isinstance(e, Posting):
        return 1 + size(e.goal)
    return 1 + size(e.left) + size(e.right)


def erase_posts(e: Expr) -> Expr:
    """Replace every ``b post G`` by ``b``."""
    if isinstance(e, Atom):
        return e
    if isinstance(e, Posting):
        return e.base
    return type(e)(erase_posts(e.left), erase_posts(e.right))


# -- evaluation -------------------------------------------------------------

_N = n_triple()


def check_bound(e: Expr, env: Environment) -> None:
    for name in sorted(atoms(e)):
        if name not in env:
            raise UnboundAtom(name)


def _eval(e, env, probe):
    # every call is one eval rule application; probe sees it before the effect runs
    def run(s):
        probe(e)
        if isinstance(e, Atom):
            return _N.unit(env[e.name])(s)
        if isinstance(e, Posting):
            return _N.star(_N.post(e.goal), lambda _: _N.unit(env[e.base.name]))(s)
        op = (lambda x, y: x or y) if isinstance(e, Or) else (lambda x, y: x and y)
        return _N.star(_eval(e.left, env, probe),
                       lambda x: _N.star(_eval(e.right, env, probe),
                                         lambda y: _N.unit(op(x, y))))(s)
    return run


def eval_expr(e: Expr, env: Environment, probe: Callable[[Expr], None] | None = None):
    """The N-triple computation for ``e``.

    Both operands of ``and``/``or`` are always evaluated. Raises
    :class:`UnboundAtom` up front if any atom of ``e`` is missing from ``env``.
    """
    check_bound(e, env)
    return _eval(e, env, probe or (lambda _e: None))


@dataclass(frozen=True)
class EvalOutcome:
    value: bool
    agenda: tuple
    steps: int
    labels: tuple = ()


def _observation(e, env):
    if isinstance(e, Atom):
        return f"{e.name}={'T' if env[e.name] else 'F'}"
    if isinstance(e, Posting):
        return f"{e.base.name}={'T' if env[e.base.name] else 'F'}"
    return None


def evaluate(e: Expr, env: Environment, agenda=()) -> EvalOutcome:
    """Observe ``eval_expr(e, env)`` on ``agenda``, counting rule applications.

    ``labels`` lists the atom observations (``name=T`` / ``name=F``) in
    evaluation order.
    """
    seen = []
    value, final = _N.observe(eval_expr(e, env, seen.append), tuple(agenda))
    labels = tuple(lbl for lbl in (_observation(x, env) for x in seen) if lbl is not None)
    return EvalOutcome(value, final, len(seen), labels)


@dataclass(frozen=True)
class EpisodeResult:
    value: bool
    drained: tuple  # of (Expr, bool), in evaluation order
    steps: int
    budget_exhausted: bool
    labels: tuple = ()
    posts: tuple = ()  # every posted goal, in posting order
    true_atoms: frozenset = field(default_factory=frozenset)

    @property
    def drain_order(self) -> tuple:
        return tuple(g for g, _ in self.drained)


def run_episode(main: Expr, env: Environment, budget: int = DEFAULT_BUDGET,
                agenda=()) -> EpisodeResult:
    """Evaluate ``main``, then drain the agenda oldest-first.

    ``agenda`` seeds the queue ahead of anything ``main`` posts. A goal
    structurally equal to one already evaluated this episode (``main``
    included) is dequeued and skipped. At most ``budget`` evaluations run,
    ``main`` counting as one.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    check_bound(main, env)
    for g in agenda:
        check_bound(g, env)
    first = evaluate(main, env, agenda)
    queue = deque(first.agenda)
    posts = list(first.agenda[len(agenda):])
    labels = list(first.labels)
    steps, evaluations = first.steps, 1
    seen = {main}
    drained = []
    exhausted = False
    while queue:
        goal = queue.popleft()
        if goal in seen:
            continue
        if evaluations >= budget:
            exhausted = True
            break
        seen.add(goal)
        out = evaluate(goal, env)
        evaluations += 1
        steps += out.steps
        labels.extend(out.labels)
        posts.extend(out.agenda)
        queue.extend(out.agenda)
        drained.append((goal, out.value))
    true_atoms = frozenset(lbl[:-2] for lbl in labels if lbl.endswith("=T"))
    return EpisodeResult(first.value, tuple(drained), steps, exhausted, tuple(labels),
                         tuple(posts), true_atoms)


# -- generators -------------------------------------------------------------

def random_expr(rng: random.Random, names=("a", "b", "c", "d"), max_depth: int = 4,
                post_rate: float = 0.25) -> Expr:
    """A random expression; ``post_rate`` is the chance a leaf becomes a posting."""

    def gen(d):
        if d == 1 or rng.random() < 0.3:
            base = Atom(rng.choice(names))
            if d > 1 and rng.random() < post_rate:
                return Posting(base, gen(d - 1))
            return base
        cls = And if rng.random() < 0.5 else Or
        return cls(gen(d - 1), gen(d - 1))

    return gen(max_depth)


def post_free_exprs(names, max_depth: int):
    """Every post-free expression over ``names`` with depth at most ``max_depth``."""
    levels = [[Atom(n) for n in names]]
    for _ in range(max_depth - 1):
        upto = [e for lvl in levels for e in lvl]
        prev = levels[-1]
        new = []
        for cls in (And, Or):
            for l in upto:
                for r in upto:
                    if l in prev or r in prev:
                        new.append(cls(l, r))
        levels.append(new)
    for lvl in levels:
        yield from lvl
