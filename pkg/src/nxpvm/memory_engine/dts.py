"""Deterministic transition systems and their unfolding."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping

from ..nxp_lang import DEFAULT_BUDGET
from .engine import perform
from .state import FUEL_EXHAUSTED, REACHED_OMEGA, Bottom, Defined, LiftedState

__all__ = ["TransitionSystem", "Unfolding", "unfold", "engine_system"]


@dataclass(frozen=True)
class TransitionSystem:
    """``configs`` is the disjoint union of the non-final configs, ``final`` and ``{omega}``.

    ``initial`` holds the initial-or-intermediate configurations; ``step`` is
    defined only on those.
    """

    initial: frozenset
    final: frozenset
    omega: Hashable
    valuation: Mapping
    step: Mapping

    def __post_init__(self):
        for name in ("initial", "final"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.initial & self.final:
            raise ValueError("initial and final configurations overlap")
        if self.omega in self.initial or self.omega in self.final:
            raise ValueError("omega must be distinct from every other configuration")
        if set(self.valuation) != set(self.final):
            raise ValueError("the valuation must be defined exactly on the final configurations")
        if not set(self.step) <= self.initial:
            raise ValueError("step is defined outside the initial configurations")
        if not set(self.step.values()) <= self.configs:
            raise ValueError("step leaves the configuration set")

    @property
    def configs(self) -> frozenset:
        return self.initial | self.final | {self.omega}


@dataclass(frozen=True)
class Unfolding:
    visited: tuple
    result: LiftedState


def unfold(ts: TransitionSystem, start, fuel: int) -> Unfolding:
    """Follow ``step`` from ``start``, visiting at most ``fuel`` configurations.

    A final configuration yields its valuation. Reaching omega, or a
    configuration where ``step`` is undefined, yields ``reached-omega``.
    """
    if start not in ts.configs:
        raise ValueError(f"{start!r} is not a configuration")
    visited = []
    c = start
    while len(visited) < fuel:
        visited.append(c)
        if c in ts.final:
            return Unfolding(tuple(visited), Defined(ts.valuation[c], tuple(visited)))
        if c == ts.omega or c not in ts.step:
            return Unfolding(tuple(visited), Bottom(REACHED_OMEGA, tuple(visited)))
        c = ts.step[c]
    return Unfolding(tuple(visited), Bottom(FUEL_EXHAUSTED, tuple(visited)))


@dataclass(frozen=True)
class EngineSystem:
    system: TransitionSystem
    memories: Mapping = field(default_factory=dict)  # config -> long-term memory on entry
    events: Mapping = field(default_factory=dict)    # config -> trace of the task run there


def engine_system(episodes, strategy, mem, budget: int = DEFAULT_BUDGET,
                  first_episode: int = 0) -> EngineSystem:
    """The transition system one long-term memory induces over a task sequence.

    Configuration ``i`` means "about to run episode ``i``"; one step is one
    task. The system is materialised by running each task once, so it is the
    image of the engine under the memory it starts from.
    """
    episodes = list(episodes)
    last = first_episode + len(episodes)
    step, memories, events = {}, {}, {}
    memory, answer = mem, None
    for i, (task, env) in enumerate(episodes, start=first_episode):
        memories[i] = memory
        record, evs, exhausted = perform(task, env, memory, i, strategy, budget)
        if exhausted:
            step[i] = "omega"
            events[i] = tuple(evs)
            break
        detect = task.signal_unexpected or strategy.detect_unexpected
        if detect(record, memory, task) or strategy.learns_every_episode:
            memory = strategy.phi(record, memory)
        events[i] = tuple(evs)
        answer = record.answer
        step[i] = i + 1
    initial = frozenset(range(first_episode, last))
    final = frozenset() if "omega" in step.values() else frozenset({last})
    memories.setdefault(last, memory)
    ts = TransitionSystem(initial, final, "omega", {last: answer} if final else {}, step)
    return EngineSystem(ts, memories, events)
