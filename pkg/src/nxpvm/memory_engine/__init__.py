"""Problem solving with expected and unexpected continuations, and pluggable learning."""
from .dts import EngineSystem, TransitionSystem, Unfolding, engine_system, unfold
from .engine import (Executor, SequenceResult, Task, apply_phi, compose, episode_metrics, execute,
                     extended_env, finish, perform, run_sequence, run_task, task_program,
                     terminal, then)
from .state import (FUEL_EXHAUSTED, REACHED_OMEGA, Bottom, Defined, EpisodeRecord, LiftedState,
                    Sigma, TraceEvent)
from .strategies import (STRATEGIES, ChunkStrategy, Cluster, ClusterMemory, ClusterStrategy,
                         LearningStrategy, Rule, RuleMemory, ScriptMemory, ScriptStrategy, jaccard,
                         make_strategy, nearest_cluster, phi_chunk, phi_cluster, phi_script,
                         script_mismatches)

__all__ = [
    "EngineSystem", "TransitionSystem", "Unfolding", "engine_system", "unfold", "Executor",
    "SequenceResult", "Task", "apply_phi", "compose", "episode_metrics", "execute",
    "extended_env", "finish", "perform", "run_sequence", "run_task", "task_program", "terminal",
    "then", "FUEL_EXHAUSTED", "REACHED_OMEGA", "Bottom", "Defined", "EpisodeRecord",
    "LiftedState", "Sigma", "TraceEvent", "STRATEGIES", "ChunkStrategy", "Cluster",
    "ClusterMemory", "ClusterStrategy", "LearningStrategy", "Rule", "RuleMemory", "ScriptMemory",
    "ScriptStrategy", "jaccard", "make_strategy", "nearest_cluster", "phi_chunk", "phi_cluster",
    "phi_script", "script_mismatches",
]
