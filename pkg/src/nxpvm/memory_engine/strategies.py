"""Three weak methods: script deviations, chunking, and feature clustering.

Each strategy owns an immutable long-term memory type. Updates return a new
value, so a run can be forked at any point.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Mapping

from ..nxp_lang import Atom, atoms
from .state import EpisodeRecord

__all__ = [
    "ScriptMemory", "Rule", "RuleMemory", "Cluster", "ClusterMemory", "LearningStrategy",
    "ScriptStrategy", "ChunkStrategy", "ClusterStrategy", "phi_script", "phi_chunk",
    "phi_cluster", "script_mismatches", "jaccard", "nearest_cluster", "make_strategy",
    "STRATEGIES",
]

MISSING = "-"


# -- scripts ----------------------------------------------------------------

@dataclass(frozen=True)
class ScriptMemory:
    scripts: Mapping = field(default_factory=dict)      # signature -> tuple of event labels
    deviations: Mapping = field(default_factory=dict)   # (position, expected, observed) -> count


def script_mismatches(script, observed) -> list:
    out = []
    for i in range(max(len(script), len(observed))):
        expected = script[i] if i < len(script) else MISSING
        seen = observed[i] if i < len(observed) else MISSING
        if expected != seen:
            out.append((i, expected, seen))
    return out


def phi_script(record: EpisodeRecord, mem: ScriptMemory) -> ScriptMemory:
    """Install a first script, or count every positional difference from it.

    The base script is never rewritten.
    """
    sig = record.task.id
    if sig not in mem.scripts:
        return replace(mem, scripts={**mem.scripts, sig: tuple(record.labels)})
    deviations = dict(mem.deviations)
    for key in script_mismatches(mem.scripts[sig], record.labels):
        deviations[key] = deviations.get(key, 0) + 1
    return replace(mem, deviations=deviations)


# -- chunks -----------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    condition: frozenset
    answer: bool


@dataclass(frozen=True)
class RuleMemory:
    rules: tuple = ()

    def __post_init__(self):
        conditions = [r.condition for r in self.rules]
        if len(set(conditions)) != len(conditions):
            raise ValueError("two rules share a condition")

    def match(self, features) -> Rule | None:
        """The most specific rule whose condition is a subset of ``features``."""
        hits = [r for r in self.rules if r.condition <= features]
        if not hits:
            return None
        return max(hits, key=lambda r: (len(r.condition), sorted(r.condition)))


def phi_chunk(record: EpisodeRecord, mem: RuleMemory) -> RuleMemory:
    condition = frozenset(record.task.features)
    if any(r.condition == condition for r in mem.rules):
        return mem
    return RuleMemory(mem.rules + (Rule(condition, record.answer),))


# -- clusters ---------------------------------------------------------------

def jaccard(a, b) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _centroid(members) -> frozenset:
    counts = Counter(f for m in members for f in m)
    return frozenset(f for f, c in counts.items() if 2 * c > len(members))


@dataclass(frozen=True)
class Cluster:
    members: tuple  # of frozenset
    centroid: frozenset

    @classmethod
    def of(cls, members) -> "Cluster":
        members = tuple(members)
        return cls(members, _centroid(members))


@dataclass(frozen=True)
class ClusterMemory:
    """A two-level hierarchy: an implicit root whose children are the leaf clusters."""

    leaves: tuple = ()


def nearest_cluster(mem: ClusterMemory, features) -> tuple:
    """``(index, similarity)`` of the leaf whose centroid is most similar; ties go to the oldest."""
    best, best_sim = None, -1.0
    for i, leaf in enumerate(mem.leaves):
        sim = jaccard(leaf.centroid, features)
        if sim > best_sim:
            best, best_sim = i, sim
    return best, best_sim


def phi_cluster(record: EpisodeRecord, mem: ClusterMemory, threshold: float = 0.5) -> ClusterMemory:
    episode = frozenset(record.features)
    idx, sim = nearest_cluster(mem, episode)
    if idx is None or sim < threshold:
        return ClusterMemory(mem.leaves + (Cluster.of([episode]),))
    leaves = list(mem.leaves)
    leaves[idx] = Cluster.of(leaves[idx].members + (episode,))
    return ClusterMemory(tuple(leaves))


# -- strategies -------------------------------------------------------------

class LearningStrategy:
    """A weak method plus the expectation and impasse tests that go with it.

    ``learns_every_episode`` strategies also run ``phi`` at the end of an
    expected episode; the others learn only through the unexpected
    continuation.
    """

    name = "none"
    learns_every_episode = False

    def empty_memory(self):
        raise NotImplementedError

    def expectation(self, mem, task) -> tuple:
        return ()

    def recall(self, mem, task):
        """A cached answer for ``task``, or None when it must be solved."""
        return None

    def detect_unexpected(self, outcome: EpisodeRecord, mem, task) -> bool:
        raise NotImplementedError

    def phi(self, outcome: EpisodeRecord, mem):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class ScriptStrategy(LearningStrategy):
    name = "script"
    learns_every_episode = True

    def empty_memory(self):
        return ScriptMemory()

    def detect_unexpected(self, outcome, mem, task):
        script = mem.scripts.get(task.id)
        if script is None:
            return False
        return any(key not in mem.deviations for key in script_mismatches(script, outcome.labels))

    def phi(self, outcome, mem):
        return phi_script(outcome, mem)


class ChunkStrategy(LearningStrategy):
    name = "chunk"

    def empty_memory(self):
        return RuleMemory()

    def recall(self, mem, task):
        rule = mem.match(task.features)
        return None if rule is None else rule.answer

    def detect_unexpected(self, outcome, mem, task):
        # an impasse: nothing in long-term memory recognises the situation
        return mem.match(task.features) is None

    def phi(self, outcome, mem):
        return phi_chunk(outcome, mem)


class ClusterStrategy(LearningStrategy):
    name = "cluster"
    learns_every_episode = True

    def __init__(self, threshold: float = 0.5, first_look_k: int = 3):
        if not 0 < threshold <= 1:
            raise ValueError("threshold must lie in (0, 1]")
        if first_look_k < 1:
            raise ValueError("first_look_k must be positive")
        self.threshold = threshold
        self.first_look_k = first_look_k

    def empty_memory(self):
        return ClusterMemory()

    def expectation(self, mem, task):
        idx, sim = nearest_cluster(mem, frozenset(task.features))
        if idx is None or sim <= 0:
            return ()
        leaf = mem.leaves[idx]
        counts = Counter(f for m in leaf.members for f in m if f in leaf.centroid)
        ranked = sorted(counts, key=lambda f: (-counts[f], f))
        return tuple(Atom(f) for f in ranked[: self.first_look_k])

    def detect_unexpected(self, outcome, mem, task):
        expected = set()
        for g in self.expectation(mem, task):
            expected |= atoms(g)
        return bool(expected) and not (expected & outcome.features)

    def phi(self, outcome, mem):
        return phi_cluster(outcome, mem, self.threshold)

    def __repr__(self):
        return f"ClusterStrategy(threshold={self.threshold}, first_look_k={self.first_look_k})"


STRATEGIES = ("script", "chunk", "cluster")


def make_strategy(name: str, threshold: float = 0.5, first_look_k: int = 3) -> LearningStrategy:
    if name == "script":
        return ScriptStrategy()
    if name == "chunk":
        return ChunkStrategy()
    if name == "cluster":
        return ClusterStrategy(threshold, first_look_k)
    raise ValueError(f"unknown strategy {name!r}")
