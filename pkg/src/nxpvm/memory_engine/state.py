"""Answers, traces and the flat lattice of outcomes shared by the engine and DTS code."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Union

FUEL_EXHAUSTED = "fuel-exhausted"
REACHED_OMEGA = "reached-omega"


@dataclass(frozen=True)
class TraceEvent:
    episode: int
    kind: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"episode": self.episode, "kind": self.kind, "payload": self.payload}


@dataclass(frozen=True)
class Defined:
    answer: Any
    trace: tuple = ()
    memory: Any = None


@dataclass(frozen=True)
class Bottom:
    reason: str
    trace: tuple = ()

    def __post_init__(self):
        if self.reason not in (FUEL_EXHAUSTED, REACHED_OMEGA):
            raise ValueError(f"unknown bottom reason {self.reason!r}")


LiftedState = Union[Defined, Bottom]


@dataclass(frozen=True)
class EpisodeRecord:
    """What one task execution leaves behind for detection and for the weak method."""

    task: Any
    answer: bool
    steps: int
    labels: tuple
    features: frozenset
    expectation: tuple
    drained: tuple
    cache_hit: bool


@dataclass(frozen=True)
class Sigma:
    """The state threaded through continuations."""

    memory: Any
    fuel: int
    answer: Any = None
    trace: tuple = ()
    episode: int = 0
    last: EpisodeRecord | None = None

    def log(self, *events: TraceEvent) -> "Sigma":
        return replace(self, trace=self.trace + events)
