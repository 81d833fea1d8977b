import random

import pytest

from nxpvm.nxp_lang import Atom, UnboundAtom, parse_expr, random_expr, run_episode
from nxpvm.stack_vm import (MARKER, PER_EPISODE, PER_STEP, Chunk, DualStackMachine, Goal,
                            SingleStackMachine, chunk_learn, empty_learn, identity_learn,
                            reduce_to_single, vm_run)

NAMES = "abcd"


def rand_case(rng, depth=4):
    e = random_expr(rng, max_depth=depth, post_rate=0.35)
    env = {n: rng.random() < 0.5 for n in NAMES}
    return e, env


def test_single_atom():
    res = vm_run(Atom("a"), {"a": True}, identity_learn)
    assert res.value is True and res.skill_stack == () and res.step_count == 1


def test_identity_learn_keeps_skill_stack():
    skill = (Chunk(parse_expr("c or d"), True),)
    res = vm_run(Atom("a"), {"a": True}, identity_learn, skill_stack=skill)
    assert res.skill_stack == skill


def test_empty_learn_does_not_change_solving():
    rng = random.Random(0)
    for _ in range(200):
        e, env = rand_case(rng)
        kept = vm_run(e, env, identity_learn)
        wiped = vm_run(e, env, empty_learn)
        assert wiped.skill_stack == ()
        assert (kept.value, kept.drained, kept.step_count) == \
            (wiped.value, wiped.drained, wiped.step_count)


@pytest.mark.parametrize("mode", [PER_EPISODE, PER_STEP])
def test_matches_run_episode(mode):
    rng = random.Random(1)
    for _ in range(300):
        e, env = rand_case(rng, depth=5)
        budget = rng.randint(1, 6)
        vm = vm_run(e, env, chunk_learn, mode, budget)
        ref = run_episode(e, env, budget)
        assert (vm.value, vm.drain_order, vm.budget_exhausted) == \
            (ref.value, ref.drain_order, ref.budget_exhausted)


def test_expectations_are_evoked_first():
    rng = random.Random(2)
    for _ in range(200):
        e, env = rand_case(rng)
        expect = tuple(random_expr(rng, max_depth=2, post_rate=0.3) for _ in range(rng.randint(0, 3)))
        vm = vm_run(e, env, identity_learn, skill_stack=expect)
        ref = run_episode(e, env, agenda=expect)
        assert (vm.value, vm.drained) == (ref.value, ref.drained)


def test_step_count_is_pop_count():
    rng = random.Random(3)
    for _ in range(200):
        e, env = rand_case(rng)
        res = vm_run(e, env, chunk_learn, rng.choice([PER_STEP, PER_EPISODE]))
        assert res.step_count == sum(1 for kind, _ in res.events if kind == "pop")


def test_learn_called_per_mode():
    e = parse_expr("a and b post (c)")
    env = dict.fromkeys("abc", True)
    per_ep = vm_run(e, env, chunk_learn, PER_EPISODE)
    per_step = vm_run(e, env, chunk_learn, PER_STEP)
    assert [k for k, _ in per_ep.events].count("learn") == 1
    assert [k for k, _ in per_step.events].count("learn") > 1


def test_unbound_atom():
    with pytest.raises(UnboundAtom):
        vm_run(parse_expr("a and z"), {"a": True})


def test_power_law():
    e = parse_expr("(a and b) or c post (a or d) and b")
    env = {"a": True, "b": False, "c": True, "d": False}
    skill, steps = (), []
    for _ in range(10):
        res = vm_run(e, env, chunk_learn, PER_EPISODE, skill_stack=skill)
        steps.append(res.step_count)
        skill = res.skill_stack
    assert all(x >= y for x, y in zip(steps, steps[1:]))
    assert steps[0] > steps[1] == 1


# -- the single-stack machine

def test_reduce_examples():
    empty = reduce_to_single(DualStackMachine({}))
    assert empty.stack == [MARKER] and empty.skill() == [] and empty.solve_snapshot() == ()
    g1, e1 = Goal(Atom("g1"), root=True), Atom("e1")
    single = reduce_to_single(DualStackMachine({}, solve_stack=[g1], skill_stack=[e1]))
    assert single.top_to_bottom() == [g1, MARKER, e1]


def test_single_stack_needs_one_marker():
    with pytest.raises(ValueError):
        SingleStackMachine({}, stack=())
    with pytest.raises(ValueError):
        SingleStackMachine({}, stack=(MARKER, MARKER))


def test_merge_operations():
    m = SingleStackMachine({})
    m.merge_at_bottom([Atom("s1"), Atom("s2")])
    m.merge_at_top([Goal(Atom("g"))])
    assert m.top_to_bottom() == [Goal(Atom("g")), MARKER, Atom("s2"), Atom("s1")]
    m.add_bottom(Goal(Atom("h")))
    assert m.solve_snapshot() == (Goal(Atom("h")), Goal(Atom("g")))
    assert [k for k, _ in m.events] == ["merge", "merge", "add_bottom"]


def test_reduction_preserves_observables():
    rng = random.Random(4)
    for _ in range(300):
        e, env = rand_case(rng, depth=5)
        mode = rng.choice([PER_STEP, PER_EPISODE])
        vm = DualStackMachine(env, chunk_learn, mode, rng.randint(1, 8))
        vm.push(Goal(e, root=True))
        for _ in range(rng.randint(0, 12)):
            vm.step()
        dual = vm.clone().run()
        single = reduce_to_single(vm.clone()).run()
        events = tuple(ev for ev in single.events if ev[0] != "merge")
        assert dual.events == events
        assert (dual.value, dual.drained, dual.skill_stack, dual.step_count,
                dual.budget_exhausted) == (single.value, single.drained, single.skill_stack,
                                           single.step_count, single.budget_exhausted)


def test_clone_is_independent():
    vm = DualStackMachine({"a": True})
    vm.push(Goal(Atom("a"), root=True))
    twin = vm.clone()
    twin.run()
    assert vm.solve_stack and vm.step_count == 0
    assert vm.run().value is True
