"""Stack machines for NXP episodes, with skill acquisition on a second stack.

The dual-stack machine keeps a problem-solving stack and a skill stack. A
``learn`` function rewrites the skill stack, either after every step or once
at the end of the episode. The single-stack machine holds both in one list,
separated by a boundary marker, and behaves identically.

Stacks are Python lists with the top at the end.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Callable

from .nxp_lang import DEFAULT_BUDGET, And, Atom, Environment, Expr, Or, Posting, check_bound, print_expr

__all__ = [
    "Goal", "Combine", "Chunk", "MARKER", "PER_STEP", "PER_EPISODE", "VmResult",
    "DualStackMachine", "SingleStackMachine", "vm_run", "reduce_to_single", "identity_learn",
    "empty_learn", "chunk_learn", "LEARN_FUNCTIONS",
]

PER_STEP = "per-step"
PER_EPISODE = "per-episode"


@dataclass(frozen=True)
class Goal:
    expr: Expr
    root: bool = False  # main, or a goal evoked by post


@dataclass(frozen=True)
class Combine:
    """Pending ``and``/``or``; ``left`` is filled once the left operand is known."""

    expr: Expr
    left: bool | None = None


@dataclass(frozen=True)
class Chunk:
    """A skill-stack entry caching the value of a resolved compound goal."""

    goal: Expr
    value: bool


class _Marker:
    def __repr__(self):
        return "MARKER"


MARKER = _Marker()
_UNSET = object()


def _label(item) -> str:
    if isinstance(item, Goal):
        return f"goal {print_expr(item.expr)}" + (" [root]" if item.root else "")
    if isinstance(item, Combine):
        return f"combine {type(item.expr).__name__.lower()} {print_expr(item.expr)} left={item.left}"
    if isinstance(item, Chunk):
        return f"chunk {print_expr(item.goal)} = {item.value}"
    if item is MARKER:
        return "marker"
    return f"expect {print_expr(item)}"


# -- learn functions: (solve snapshot, skill snapshot, resolved) -> skill stack

def identity_learn(solve, skill, resolved):
    return list(skill)


def empty_learn(solve, skill, resolved):
    return []


def chunk_learn(solve, skill, resolved):
    """Cache every compound goal resolved since the last call."""
    out = list(skill)
    known = {item.goal for item in out if isinstance(item, Chunk)}
    for goal, value in resolved:
        if goal not in known:
            out.append(Chunk(goal, value))
            known.add(goal)
    return out


LEARN_FUNCTIONS = {"identity": identity_learn, "empty": empty_learn, "chunk": chunk_learn}


@dataclass(frozen=True)
class VmResult:
    value: bool | None
    drained: tuple
    skill_stack: tuple
    step_count: int
    budget_exhausted: bool
    events: tuple

    @property
    def drain_order(self) -> tuple:
        return tuple(g for g, _ in self.drained)


class _Machine:
    """Shared stepping logic; subclasses decide where the two stacks live."""

    def __init__(self, env: Environment, learn: Callable, mode: str, budget: int):
        if mode not in (PER_STEP, PER_EPISODE):
            raise ValueError(f"unknown mode {mode!r}")
        if budget < 1:
            raise ValueError("budget must be positive")
        self.env = dict(env)
        self.learn = learn
        self.mode = mode
        self.budget = budget
        self.step_count = 0
        self.evaluations = 0
        self.seen = set()
        self.current_root = None
        self.main_value = _UNSET
        self.drained = []
        self.resolved = []
        self.exhausted = False
        self.done = False
        self.events = []

    # stack primitives, implemented per layout
    def _pop(self): raise NotImplementedError
    def _push(self, item): raise NotImplementedError
    def _add_bottom(self, item): raise NotImplementedError
    def _top(self): raise NotImplementedError
    def skill(self) -> list: raise NotImplementedError
    def _set_skill(self, items): raise NotImplementedError

    def _emit(self, kind, item=None):
        self.events.append((kind, "" if item is None else _label(item)))

    def pop(self):
        item = self._pop()
        self.step_count += 1
        self._emit("pop", item)
        return item

    def push(self, item):
        self._push(item)
        self._emit("push", item)

    def add_bottom(self, item):
        self._add_bottom(item)
        self._emit("add_bottom", item)

    def _chunk_for(self, expr):
        for item in reversed(self.skill()):
            if isinstance(item, Chunk) and item.goal == expr:
                return item
        return None

    def _learn(self):
        solve, skill = self.solve_snapshot(), tuple(self.skill())
        resolved, self.resolved = tuple(self.resolved), []
        self._set_skill(list(self.learn(solve, skill, resolved)))
        self._emit("learn")

    def _deliver(self, value):
        while True:
            top = self._top()
            if not isinstance(top, Combine):
                if self.main_value is _UNSET:
                    self.main_value = value
                else:
                    self.drained.append((self.current_root, value))
                return
            self.pop()
            if top.left is None:
                self.push(Combine(top.expr, value))
                self.push(Goal(top.expr.right))
                return
            value = (top.left or value) if isinstance(top.expr, Or) else (top.left and value)
            self.resolved.append((top.expr, value))

    def _finish(self):
        self.done = True
        if self.mode == PER_EPISODE:
            self._learn()

    def step(self) -> bool:
        """Process one item from the top of the solve stack; False once the episode is over."""
        if self.done:
            return False
        if self._top() is None:
            self._finish()
            return False
        item = self.pop()
        expr = item.expr
        if item.root:
            if expr in self.seen:
                return self._after_step()
            if self.evaluations >= self.budget:
                self.exhausted = True
                self._finish()
                return False
            self.seen.add(expr)
            self.evaluations += 1
            self.current_root = expr
        if isinstance(expr, (And, Or)):
            chunk = self._chunk_for(expr)
            if chunk is not None:
                self._deliver(chunk.value)
            else:
                # impasse: decompose into subgoals
                self.push(Combine(expr))
                self.push(Goal(expr.left))
        elif isinstance(expr, Posting):
            self.add_bottom(Goal(expr.goal, root=True))
            self._deliver(self.env[expr.base.name])
        else:
            self._deliver(self.env[expr.name])
        return self._after_step()

    def _after_step(self):
        if self.mode == PER_STEP:
            self._learn()
        return True

    def run(self) -> VmResult:
        while self.step():
            pass
        return self.result()

    def result(self) -> VmResult:
        value = None if self.main_value is _UNSET else self.main_value
        return VmResult(value, tuple(self.drained), tuple(self.skill()), self.step_count,
                        self.exhausted, tuple(self.events))

    def clone(self):
        # stack items are immutable, so copying the containers is enough;
        # deepcopy would also duplicate the sentinels
        twin = copy.copy(self)
        for name, value in vars(self).items():
            if isinstance(value, (list, set, dict)):
                setattr(twin, name, copy.copy(value))
        return twin


class DualStackMachine(_Machine):
    def __init__(self, env, learn=identity_learn, mode=PER_EPISODE, budget=DEFAULT_BUDGET,
                 solve_stack=(), skill_stack=()):
        super().__init__(env, learn, mode, budget)
        self.solve_stack = list(solve_stack)
        self.skill_stack = list(skill_stack)

    def _pop(self):
        return self.solve_stack.pop()

    def _push(self, item):
        self.solve_stack.append(item)

    def _add_bottom(self, item):
        self.solve_stack.insert(0, item)

    def _top(self):
        return self.solve_stack[-1] if self.solve_stack else None

    def skill(self):
        return self.skill_stack

    def _set_skill(self, items):
        self.skill_stack = list(items)

    def solve_snapshot(self):
        return tuple(self.solve_stack)


class SingleStackMachine(_Machine):
    """One list: skill entries, then ``MARKER``, then the solve entries on top."""

    def __init__(self, env, learn=identity_learn, mode=PER_EPISODE, budget=DEFAULT_BUDGET,
                 stack=(MARKER,)):
        super().__init__(env, learn, mode, budget)
        self.stack = list(stack)
        if self.stack.count(MARKER) != 1:
            raise ValueError("the single stack needs exactly one boundary marker")

    @property
    def _boundary(self):
        return self.stack.index(MARKER)

    def _pop(self):
        return self.stack.pop()

    def _push(self, item):
        self.stack.append(item)

    def _add_bottom(self, item):
        self.stack.insert(self._boundary + 1, item)

    def _top(self):
        top = self.stack[-1]
        return None if top is MARKER else top

    def skill(self):
        return self.stack[: self._boundary]

    def _set_skill(self, items):
        self.stack[: self._boundary] = list(items)

    def solve_snapshot(self):
        return tuple(self.stack[self._boundary + 1:])

    def merge_at_top(self, items):
        """Concatenate ``items`` (bottom first) onto the top of the stack."""
        self.stack.extend(items)
        self._emit("merge", None)

    def merge_at_bottom(self, items):
        """Concatenate ``items`` (bottom first) underneath the whole stack."""
        self.stack[:0] = list(items)
        self._emit("merge", None)

    def top_to_bottom(self) -> list:
        return list(reversed(self.stack))


def _registers(src, dst):
    for name in ("step_count", "evaluations", "current_root", "main_value", "exhausted", "done"):
        setattr(dst, name, getattr(src, name))
    dst.seen = set(src.seen)
    dst.drained = list(src.drained)
    dst.resolved = list(src.resolved)
    dst.events = list(src.events)


def reduce_to_single(dual: DualStackMachine) -> SingleStackMachine:
    """Merge the solve stack on top of the skill stack, with a marker between them."""
    single = SingleStackMachine(dual.env, dual.learn, dual.mode, dual.budget, stack=(MARKER,))
    _registers(dual, single)
    single.merge_at_bottom(dual.skill_stack)
    single.merge_at_top(dual.solve_stack)
    return single


def vm_run(main: Expr, env: Environment, learn: Callable = identity_learn, mode: str = PER_EPISODE,
           budget: int = DEFAULT_BUDGET, skill_stack=()) -> VmResult:
    """Run one episode on a fresh dual-stack machine.

    Bare expressions on the incoming skill stack are first-look goals: they
    are evoked (added at the bottom) before ``main`` starts, in stack order
    from the bottom up. Chunks answer matching compound goals in one pop.
    """
    check_bound(main, env)
    expectations = [item for item in skill_stack if not isinstance(item, Chunk)]
    for goal in expectations:
        check_bound(goal, env)
    vm = DualStackMachine(env, learn, mode, budget, skill_stack=skill_stack)
    vm.push(Goal(main, root=True))
    for goal in expectations:
        vm.add_bottom(Goal(goal, root=True))
    return vm.run()
