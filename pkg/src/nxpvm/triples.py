"""Triples (monads) in Kleisli form, and a generic law-checking harness.

A :class:`Triple` is plain data: ``unit``, ``star`` and an ``observe``
function that turns a computation into something comparable by ``==`` given
an initial context (a state, a continuation, or nothing).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Any, Callable

__all__ = [
    "Triple", "LawResult", "LawReport", "LAWS", "identity_triple", "state_triple",
    "continuation_triple", "n_triple", "post", "broken_state_triple", "check_laws",
]

LAWS = ("left_unit", "right_unit", "associativity")


@dataclass(frozen=True)
class Triple:
    name: str
    unit: Callable[[Any], Any]
    star: Callable[[Any, Callable[[Any], Any]], Any]
    observe: Callable[[Any, Any], Any]
    post: Callable[[Any], Any] | None = None

    def bind(self, m, *arrows):
        """``m * f1 * f2 ...`` left to right."""
        for f in arrows:
            m = self.star(m, f)
        return m


def identity_triple() -> Triple:
    return Triple("identity", unit=lambda x: x, star=lambda m, k: k(m), observe=lambda m, _ctx: m)


def _state_unit(x):
    return lambda s: (x, s)


def _state_star(m, k):
    def run(s):
        y, a = m(s)
        return k(y)(a)
    return run


def state_triple() -> Triple:
    """``T x = Mem -> (x, Mem)``; observe runs a computation on an initial memory."""
    return Triple("state", unit=_state_unit, star=_state_star, observe=lambda m, s: m(s))


def continuation_triple() -> Triple:
    """``T x = (x -> Answer) -> Answer``; observe applies the computation to a continuation."""

    def star(m, k):
        return lambda c: m(lambda v: k(v)(c))

    return Triple("continuation", unit=lambda x: (lambda c: c(x)), star=star,
                  observe=lambda m, c: m(c))


def post(e):
    """Goal evocation: yield ``()`` and append ``e`` at the tail of the agenda."""
    return lambda agenda: ((), tuple(agenda) + (e,))


def n_triple() -> Triple:
    """The state triple over goal agendas (tuples of expressions), with ``post``."""
    return replace(state_triple(), name="N", post=post)


def broken_state_triple(base: Triple | None = None) -> Triple:
    """Mutant whose star forgets the memory produced by the first computation."""
    base = base or n_triple()

    def star(m, k):
        def run(s):
            y, _ = m(s)
            return k(y)(s)
        return run

    return replace(base, name=f"{base.name}[drop-state]", star=star)


@dataclass
class LawResult:
    law: str
    trials: int = 0
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


@dataclass
class LawReport:
    triple: str
    results: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_json(self) -> dict:
        return {
            "triple": self.triple,
            "passed": self.passed,
            "laws": {
                name: {"trials": r.trials, "passed": r.passed, "counterexample": r.counterexample}
                for name, r in self.results.items()
            },
        }


def check_laws(t: Triple, value_gen, kleisli_gen, trials: int, context_gen=None,
               rng: random.Random | None = None) -> LawReport:
    """Sample the unit and associativity laws of ``t`` under observational equality.

    ``value_gen(rng)`` yields a value, ``kleisli_gen(rng)`` a Kleisli arrow
    (value -> computation), ``context_gen(rng)`` an initial context for
    ``t.observe``. Every law runs ``trials`` times; the first counterexample
    for each law is kept and that law stops early.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = rng or random.Random(0)
    context_gen = context_gen or (lambda _r: None)
    report = LawReport(t.name, {law: LawResult(law) for law in LAWS})

    def computation():
        # both pure and effectful computations, so right unit sees real effects
        x = value_gen(rng)
        if rng.random() < 0.25:
            return t.unit(x), f"unit({x!r})"
        f = kleisli_gen(rng)
        return f(x), f"({f!r})({x!r})"

    def record(law, lhs, rhs, ctx, **witness):
        res = report.results[law]
        res.trials += 1
        a, b = t.observe(lhs, ctx), t.observe(rhs, ctx)
        if a != b:
            res.counterexample = {**witness, "context": repr(ctx), "lhs": repr(a), "rhs": repr(b)}

    for _ in range(trials):
        if report.results["left_unit"].passed:
            x, f, ctx = value_gen(rng), kleisli_gen(rng), context_gen(rng)
            record("left_unit", t.star(t.unit(x), f), f(x), ctx, value=repr(x), arrow=repr(f))
        if report.results["right_unit"].passed:
            (m, desc), ctx = computation(), context_gen(rng)
            record("right_unit", t.star(m, t.unit), m, ctx, computation=desc)
        if report.results["associativity"].passed:
            (m, desc), f, g = computation(), kleisli_gen(rng), kleisli_gen(rng)
            ctx = context_gen(rng)
            record("associativity", t.star(m, lambda y: t.star(f(y), g)), t.star(t.star(m, f), g),
                   ctx, computation=desc, arrows=[repr(f), repr(g)])
    return report
