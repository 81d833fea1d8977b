import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from nxpvm.nxp_lang import (And, Atom, ExprSyntaxError, Or, Posting, UnboundAtom, atoms, depth,
                            erase_posts, eval_expr, evaluate, n_triple, parse_expr, post_free_exprs,
                            print_expr, random_expr, run_episode, size)

a, b, c = Atom("a"), Atom("b"), Atom("c")


def truth(e, env):
    """Plain recursive boolean meaning, ignoring posts."""
    if isinstance(e, Atom):
        return env[e.name]
    if isinstance(e, Posting):
        return env[e.base.name]
    l, r = truth(e.left, env), truth(e.right, env)
    return (l and r) if isinstance(e, And) else (l or r)


def postings(e):
    if isinstance(e, Atom):
        return []
    if isinstance(e, Posting):
        return [e.goal]
    return postings(e.left) + postings(e.right)


# -- syntax

def test_parse_examples():
    assert parse_expr("a") == a
    assert parse_expr("a and b or c") == Or(And(a, b), c)
    assert parse_expr("a post (b or c)") == Posting(a, Or(b, c))


def test_and_or_left_associative():
    assert parse_expr("a or b or c") == Or(Or(a, b), c)
    assert parse_expr("a and b and c") == And(And(a, b), c)
    assert parse_expr("a or b and c") == Or(a, And(b, c))


@pytest.mark.parametrize("text", ["", "a and", "(a", "a post b", "and", "a b", "a post (b", "a $"])
def test_parse_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse_expr(text)


def test_posting_requires_atom_base():
    with pytest.raises((TypeError, ValueError)):
        Posting(And(a, b), c)


@given(st.integers(0, 100_000))
@settings(max_examples=300, deadline=None)
def test_print_parse_round_trip(seed):
    e = random_expr(random.Random(seed), max_depth=5, post_rate=0.4)
    assert parse_expr(print_expr(e)) == e


def test_measures():
    e = parse_expr("a and b post (c or a)")
    assert atoms(e) == {"a", "b", "c"}
    assert depth(a) == 1 and depth(e) == 4
    assert size(e) == 6


# -- evaluation

def test_eval_examples():
    assert evaluate(a, {"a": True}) == evaluate(a, {"a": True})
    out = evaluate(a, {"a": True})
    assert (out.value, out.agenda, out.steps) == (True, (), 1)
    out = evaluate(Or(a, b), {"a": True, "b": False})
    assert (out.value, out.agenda) == (True, ())
    g = Or(b, c)
    out = evaluate(And(a, Posting(b, g)), {"a": True, "b": True, "c": False})
    assert (out.value, out.agenda) == (True, (g,))


def test_eval_is_an_n_triple_computation():
    t = n_triple()
    assert t.observe(eval_expr(Posting(a, b), {"a": False, "b": True}), (c,)) == (False, (c, b))


def test_no_short_circuit():
    # the right operand still posts even though the left decides the value
    e = Or(a, Posting(b, c))
    assert evaluate(e, {"a": True, "b": False, "c": True}).agenda == (c,)
    e = And(a, Posting(b, c))
    assert evaluate(e, {"a": False, "b": True, "c": True}).agenda == (c,)


def test_post_comes_before_the_value():
    out = evaluate(Posting(a, b), {"a": True, "b": True}, agenda=(c,))
    assert out.agenda == (c, b)


def test_unbound_atom_raised_before_evaluation():
    seen = []
    with pytest.raises(UnboundAtom) as info:
        eval_expr(And(a, b), {"a": True}, seen.append)
    assert info.value.name == "b" and seen == []


def test_truth_table_small():
    exprs = list(post_free_exprs("ab", 3))
    for e in exprs:
        for va, vb in itertools.product([False, True], repeat=2):
            env = {"a": va, "b": vb}
            assert evaluate(e, env).value == truth(e, env)


def test_exhaustive_count():
    assert sum(1 for _ in post_free_exprs("ab", 2)) == 2 + 2 * 4
    assert sum(1 for _ in post_free_exprs("ab", 4)) == 81610


def test_steps_bound_node_count():
    rng = random.Random(4)
    for _ in range(300):
        e = random_expr(rng, post_rate=0.4)
        env = {n: rng.random() < 0.5 for n in "abcd"}
        assert evaluate(e, env).steps >= size(erase_posts(e))


def test_posting_transparency_and_agenda_order():
    rng = random.Random(8)
    for _ in range(500):
        e = random_expr(rng, max_depth=5, post_rate=0.4)
        env = {n: rng.random() < 0.5 for n in "abcd"}
        out = evaluate(e, env)
        assert out.value == evaluate(erase_posts(e), env).value == truth(e, env)
        assert list(out.agenda) == postings(e)


def test_labels_record_atom_observations():
    out = evaluate(parse_expr("a or b post (c)"), {"a": False, "b": True, "c": True})
    assert out.labels == ("a=F", "b=T")


# -- episodes

def test_episode_without_posts():
    res = run_episode(a, {"a": True}, budget=3)
    assert res.value is True and res.drained == () and not res.budget_exhausted


def test_episode_fifo_drain():
    g2 = c
    g1 = Posting(b, g2)
    res = run_episode(Posting(a, g1), {"a": True, "b": True, "c": True}, budget=10)
    assert res.drain_order == (g1, g2)
    assert [v for _, v in res.drained] == [True, True]


def test_episode_self_reposting_terminates():
    # G = b post (G) cannot be written finitely, so build a two-cycle instead
    g = Posting(b, Posting(a, Atom("a")))
    loop = Posting(a, Posting(b, Atom("b")))
    res = run_episode(loop, {"a": True, "b": True}, budget=10)
    assert not res.budget_exhausted
    assert res.drain_order == (Posting(b, Atom("b")), Atom("b"))
    res = run_episode(Posting(a, g), {"a": True, "b": True}, budget=10)
    assert res.drain_order == (g, Posting(a, Atom("a")), Atom("a"))


def test_self_posting_goal_evaluated_once():
    g = Posting(b, c)
    main = Posting(a, g)
    res = run_episode(main, {"a": True, "b": True, "c": True}, agenda=(g,))
    assert res.drain_order == (g, c)


def test_main_is_not_redrained():
    main = Posting(a, b)
    res = run_episode(main, {"a": True, "b": True}, agenda=(main,))
    assert res.drain_order == (b,)


def test_budget_counts_main():
    chain = Atom("x3")
    for name in ("x2", "x1", "x0"):
        chain = Posting(Atom(name), chain)
    env = {f"x{i}": True for i in range(4)}
    assert run_episode(chain, env, budget=4).budget_exhausted is False
    res = run_episode(chain, env, budget=2)
    assert res.budget_exhausted and len(res.drained) == 1


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        run_episode(a, {"a": True}, budget=0)
