"""Generators for checking the triple laws on the four built-in instances."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .nxp_lang import Atom, random_expr
from .triples import (LawReport, Triple, broken_state_triple, check_laws, continuation_triple,
                      identity_triple, n_triple, state_triple)

__all__ = ["Arrow", "LawSuite", "law_suites", "run_law_suites", "MUTANTS"]


class Arrow:
    """A Kleisli arrow with a readable repr, so counterexamples can be printed."""

    def __init__(self, label: str, fn: Callable):
        self.label = label
        self.fn = fn

    def __call__(self, v):
        return self.fn(v)

    def __repr__(self):
        return self.label


@dataclass(frozen=True)
class LawSuite:
    triple: Triple
    values: Callable
    arrows: Callable
    contexts: Callable

    def check(self, trials: int, rng: random.Random) -> LawReport:
        return check_laws(self.triple, self.values, self.arrows, trials, self.contexts, rng)


def _identity_suite(t):
    def arrows(rng):
        a, b = rng.randint(-5, 5), rng.randint(-5, 5)
        return Arrow(f"v -> {a}*v + {b}", lambda v: t.unit(a * v + b))
    return LawSuite(t, lambda rng: rng.randint(-50, 50), arrows, lambda rng: None)


def _state_suite(t):
    # memory is an integer register
    def arrows(rng):
        kind, a = rng.randrange(3), rng.randint(-3, 3)
        if kind == 0:
            return Arrow(f"v -> put(s+{a}); v", lambda v: (lambda s: (v, s + a)))
        if kind == 1:
            return Arrow(f"v -> get; v*s+{a}", lambda v: (lambda s: (v * s + a, s)))
        return Arrow(f"v -> put(v); s-{a}", lambda v: (lambda s: (s - a, v)))
    return LawSuite(t, lambda rng: rng.randint(-9, 9), arrows, lambda rng: rng.randint(-9, 9))


def _continuation_suite(t):
    def arrows(rng):
        kind, a = rng.randrange(3), rng.randint(-3, 3)
        if kind == 0:
            return Arrow(f"v -> unit(v+{a})", lambda v: t.unit(v + a))
        if kind == 1:
            # escape: discard the continuation
            return Arrow(f"v -> abort({a})", lambda v: (lambda c: ("abort", v, a)))
        return Arrow(f"v -> c(v)+c({a})", lambda v: (lambda c: (c(v), c(a))))

    def contexts(rng):
        a = rng.randint(-3, 3)
        return Arrow(f"c(v) = ('k', v*{a})", lambda v: ("k", v * a))

    return LawSuite(t, lambda rng: rng.randint(-9, 9), arrows, contexts)


def _n_suite(t):
    names = ("g1", "g2", "g3")

    def arrows(rng):
        kind = rng.randrange(3)
        goal = random_expr(rng, names, max_depth=2)
        flip = rng.random() < 0.5
        if kind == 0:
            # a primitive effect, built without star so a faulty star cannot hide it
            return Arrow(f"v -> post({goal}); unit(v xor {flip})",
                         lambda v: (lambda s: (v != flip, tuple(s) + (goal,))))
        if kind == 1:
            return Arrow(f"v -> unit(v and {flip})", lambda v: t.unit(v and flip))
        return Arrow(f"v -> post({goal}) if v; unit(not v)",
                     lambda v: t.star(t.post(goal) if v else t.unit(()), lambda _: t.unit(not v)))

    def contexts(rng):
        return tuple(Atom(rng.choice(names)) for _ in range(rng.randint(0, 3)))

    return LawSuite(t, lambda rng: rng.random() < 0.5, arrows, contexts)


MUTANTS = ("drop-state",)


def law_suites(mutate: str | None = None) -> list:
    state, n = state_triple(), n_triple()
    if mutate == "drop-state":
        state, n = broken_state_triple(state), broken_state_triple(n)
    elif mutate is not None:
        raise ValueError(f"unknown mutant {mutate!r}")
    return [_identity_suite(identity_triple()), _state_suite(state),
            _continuation_suite(continuation_triple()), _n_suite(n)]


def run_law_suites(trials: int = 1000, seed: int = 0, mutate: str | None = None) -> list:
    rng = random.Random(seed)
    return [suite.check(trials, rng) for suite in law_suites(mutate)]
