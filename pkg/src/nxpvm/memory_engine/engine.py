"""Bi-continuation execution of tasks, and composition with learning in between.

A task's meaning takes an environment, an expected continuation, an
unexpected continuation and a state, and produces a lifted state. Sequencing
``t1`` then ``t2`` hands ``t1`` the expected continuation "run ``t2``" and the
unexpected continuation "run the weak method, then ``t2``". Only the branch
actually taken runs ``t2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Union

from ..nxp_lang import DEFAULT_BUDGET, Environment, Expr, atoms, print_expr, run_episode
from .state import (FUEL_EXHAUSTED, Bottom, Defined, EpisodeRecord, LiftedState, Sigma,
                    TraceEvent)
from .strategies import LearningStrategy

__all__ = [
    "Task", "Program", "Executor", "execute", "run_task", "task_program", "then", "compose",
    "terminal", "finish", "apply_phi", "perform", "extended_env", "run_sequence",
    "SequenceResult", "episode_metrics",
]

Continuation = Callable[[Sigma], LiftedState]


@dataclass(frozen=True)
class Task:
    id: str
    features: frozenset
    goal: Expr
    # overrides the strategy's detector when set
    signal_unexpected: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "features", frozenset(self.features))
        if not self.features:
            raise ValueError("a task needs at least one feature")


def extended_env(task: Task, env: Environment, expectation=()) -> dict:
    """``env`` plus task features (present, so true) and any unbound first-look atoms."""
    ext = {f: True for f in task.features}
    ext.update(env)
    for goal in expectation:
        for name in atoms(goal):
            ext.setdefault(name, name in task.features)
    return ext


def perform(task: Task, env: Environment, memory, episode: int, strategy: LearningStrategy,
            budget: int = DEFAULT_BUDGET):
    """Run one task against long-term memory.

    Returns ``(record, events, exhausted)``; ``record`` is None when the
    episode ran out of budget.
    """
    expectation = tuple(strategy.expectation(memory, task))
    events = [TraceEvent(episode, "task", {"id": task.id, "features": sorted(task.features)}),
              TraceEvent(episode, "expect", {"goals": [print_expr(g) for g in expectation]})]
    cached = strategy.recall(memory, task)
    if cached is not None:
        events.append(TraceEvent(episode, "cache_hit", {"answer": cached}))
        record = EpisodeRecord(task, cached, 1, (), frozenset(task.features), expectation, (),
                               True)
        return record, events, False

    result = run_episode(task.goal, extended_env(task, env, expectation), budget, expectation)
    events.extend(TraceEvent(episode, "eval", {"label": lbl}) for lbl in result.labels)
    events.extend(TraceEvent(episode, "post", {"goal": print_expr(g)}) for g in result.posts)
    events.extend(TraceEvent(episode, "drain", {"goal": print_expr(g), "value": v})
                  for g, v in result.drained)
    if result.budget_exhausted:
        events.append(TraceEvent(episode, "budget_exhausted", {}))
        return None, events, True
    record = EpisodeRecord(task, result.value, result.steps, result.labels,
                           frozenset(task.features) | result.true_atoms, expectation,
                           result.drained, False)
    return record, events, False


def apply_phi(sigma: Sigma, strategy: LearningStrategy, via: str = "unexpected") -> Sigma:
    """Run the weak method on the last episode and log it."""
    memory = strategy.phi(sigma.last, sigma.memory)
    event = TraceEvent(sigma.episode - 1, "phi", {"via": via})
    return replace(sigma, memory=memory, trace=sigma.trace + (event,))


def terminal(sigma: Sigma) -> LiftedState:
    return Defined(sigma.answer, sigma.trace, sigma.memory)


def finish(strategy: LearningStrategy) -> Continuation:
    """The outermost unexpected continuation: learn, then stop."""
    return lambda sigma: terminal(apply_phi(sigma, strategy))


def run_task(task: Task, env: Environment, exp: Continuation, unexp: Continuation, sigma: Sigma,
             strategy: LearningStrategy, budget: int = DEFAULT_BUDGET) -> LiftedState:
    if sigma.fuel <= 0:
        return Bottom(FUEL_EXHAUSTED, sigma.trace)
    record, events, exhausted = perform(task, env, sigma.memory, sigma.episode, strategy, budget)
    if exhausted:
        return Bottom(FUEL_EXHAUSTED, sigma.trace + tuple(events))
    detect = task.signal_unexpected or strategy.detect_unexpected
    unexpected = bool(detect(record, sigma.memory, task))
    events.append(TraceEvent(sigma.episode, "unexpected", {"value": unexpected,
                                                           "answer": record.answer,
                                                           "steps": record.steps}))
    nxt = Sigma(sigma.memory, sigma.fuel - 1, record.answer, sigma.trace + tuple(events),
                sigma.episode + 1, record)
    if unexpected:
        return unexp(nxt)
    if strategy.learns_every_episode:
        nxt = apply_phi(nxt, strategy, via="episode-end")
    return exp(nxt)


def execute(task: Task, env: Environment, exp: Continuation, unexp: Continuation, mem, fuel: int,
            *, strategy: LearningStrategy, budget: int = DEFAULT_BUDGET) -> LiftedState:
    """Execute one task from long-term memory ``mem`` with ``fuel`` tasks' worth of fuel."""
    return run_task(task, env, exp, unexp, Sigma(mem, fuel), strategy, budget)


# -- composition ------------------------------------------------------------

Program = Callable[[Environment, Continuation, Continuation, Sigma], LiftedState]


def task_program(task: Task, strategy: LearningStrategy, budget: int = DEFAULT_BUDGET,
                 env: Environment | None = None) -> Program:
    """Lift a task to a program; a fixed ``env`` overrides the one supplied at run time."""

    def program(run_env, exp, unexp, sigma):
        return run_task(task, run_env if env is None else env, exp, unexp, sigma, strategy,
                        budget)

    return program


def then(first: Program, second: Program, strategy: LearningStrategy) -> Program:
    """``first`` followed by ``second``, learning on the unexpected branch in between."""

    def program(env, exp, unexp, sigma):
        after = lambda s: second(env, exp, unexp, s)  # noqa: E731
        learn_then_after = lambda s: after(apply_phi(s, strategy))  # noqa: E731
        return first(env, after, learn_then_after, sigma)

    return program


@dataclass(frozen=True)
class Executor:
    program: Program

    def __call__(self, env: Environment, exp: Continuation, unexp: Continuation, mem,
                 fuel: int) -> LiftedState:
        return self.program(env, exp, unexp, Sigma(mem, fuel))


def compose(t1: Union[Task, Executor], t2: Union[Task, Executor], strategy: LearningStrategy,
            budget: int = DEFAULT_BUDGET) -> Executor:
    def lift(t):
        return t.program if isinstance(t, Executor) else task_program(t, strategy, budget)

    return Executor(then(lift(t1), lift(t2), strategy))


# -- the operational runner -------------------------------------------------

@dataclass(frozen=True)
class SequenceResult:
    state: LiftedState
    snapshots: tuple  # long-term memory before each episode that started


def run_sequence(episodes, strategy: LearningStrategy, mem=None, fuel: int | None = None,
                 budget: int = DEFAULT_BUDGET, first_episode: int = 0) -> SequenceResult:
    """Run ``(task, env)`` pairs one after another with an explicit memory register.

    This is the loop the continuation semantics unfolds to; it is stack-safe
    for long scenarios.
    """
    episodes = list(episodes)
    memory = strategy.empty_memory() if mem is None else mem
    fuel = len(episodes) if fuel is None else fuel
    trace, answer, snapshots = [], None, []
    for i, (task, env) in enumerate(episodes, start=first_episode):
        if fuel <= 0:
            return SequenceResult(Bottom(FUEL_EXHAUSTED, tuple(trace)), tuple(snapshots))
        snapshots.append(memory)
        record, events, exhausted = perform(task, env, memory, i, strategy, budget)
        trace.extend(events)
        if exhausted:
            return SequenceResult(Bottom(FUEL_EXHAUSTED, tuple(trace)), tuple(snapshots))
        fuel -= 1
        detect = task.signal_unexpected or strategy.detect_unexpected
        unexpected = bool(detect(record, memory, task))
        trace.append(TraceEvent(i, "unexpected", {"value": unexpected, "answer": record.answer,
                                                  "steps": record.steps}))
        answer = record.answer
        if unexpected or strategy.learns_every_episode:
            memory = strategy.phi(record, memory)
            trace.append(TraceEvent(i, "phi", {"via": "unexpected" if unexpected
                                               else "episode-end"}))
    return SequenceResult(Defined(answer, tuple(trace), memory), tuple(snapshots))


def episode_metrics(trace) -> list:
    """Per-episode ``{episode, answer, steps, unexpected, phi_invoked}`` from a trace."""
    out = {}
    for ev in trace:
        m = out.setdefault(ev.episode, {"episode": ev.episode, "answer": None, "steps": None,
                                        "unexpected": False, "phi_invoked": False})
        if ev.kind == "unexpected":
            m.update(answer=ev.payload["answer"], steps=ev.payload["steps"],
                     unexpected=ev.payload["value"])
        elif ev.kind == "phi":
            m["phi_invoked"] = True
    return [out[k] for k in sorted(out)]
