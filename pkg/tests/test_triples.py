import json
import random

import pytest

from nxpvm.laws import law_suites, run_law_suites
from nxpvm.nxp_lang import Atom, Or
from nxpvm.triples import (LAWS, broken_state_triple, check_laws, continuation_triple,
                           identity_triple, n_triple, post, state_triple)

G, G1, G2 = Or(Atom("a"), Atom("b")), Atom("g1"), Atom("g2")


def test_state_examples():
    t = n_triple()
    assert t.observe(t.unit(True), ()) == (True, ())
    assert t.observe(t.star(t.unit(1), lambda v: t.unit(v + 1)), ()) == (2, ())
    assert t.observe(t.star(post(G), lambda _: t.unit(False)), ()) == (False, (G,))


def test_post_examples():
    t = n_triple()
    assert t.observe(post(G), ()) == ((), (G,))
    assert t.observe(post(G2), (G1,)) == ((), (G1, G2))
    assert t.observe(t.star(post(G1), lambda _: post(G2)), ()) == ((), (G1, G2))


def test_posts_land_in_composition_order():
    t = n_triple()
    goals = [Atom(f"g{i}") for i in range(6)]
    m = t.bind(t.unit(None), *[(lambda _, g=g: post(g)) for g in goals])
    assert t.observe(m, ())[1] == tuple(goals)


def test_continuation_unit_applies_continuation():
    t = continuation_triple()
    for v in range(-3, 4):
        assert t.observe(t.unit(v), lambda x: ("k", x)) == ("k", v)


def test_identity_laws_with_any_generators():
    rep = check_laws(identity_triple(), lambda r: r.random(), lambda r: (lambda v: v * 2), 1000)
    assert rep.passed
    assert all(r.trials == 1000 and r.counterexample is None for r in rep.results.values())


def test_all_twelve_pairs_pass():
    reports = run_law_suites(trials=1000, seed=3)
    assert [r.triple for r in reports] == ["identity", "state", "continuation", "N"]
    for rep in reports:
        for law in LAWS:
            assert rep.results[law].passed, (rep.triple, law, rep.results[law].counterexample)


def test_drop_state_mutant_fails_right_unit():
    reports = {r.triple: r for r in run_law_suites(trials=1000, mutate="drop-state")}
    for name in ("state[drop-state]", "N[drop-state]"):
        res = reports[name].results["right_unit"]
        assert not res.passed
        assert res.counterexample["lhs"] != res.counterexample["rhs"]


def test_broken_star_on_agenda_is_caught_directly():
    t = broken_state_triple(n_triple())
    m = t.star(post(G1), t.unit)
    assert t.observe(m, ()) != n_triple().observe(post(G1), ())


def test_report_serialises():
    rep = run_law_suites(trials=20)[3]
    data = json.loads(json.dumps(rep.to_json()))
    assert data["triple"] == "N" and set(data["laws"]) == set(LAWS)


def test_zero_trials_rejected():
    with pytest.raises(ValueError):
        check_laws(state_triple(), lambda r: 0, lambda r: state_triple().unit, 0)


def test_unknown_mutant_rejected():
    with pytest.raises(ValueError):
        law_suites("nope")


def test_seed_reproducible():
    a = [r.to_json() for r in run_law_suites(trials=50, seed=9, mutate="drop-state")]
    b = [r.to_json() for r in run_law_suites(trials=50, seed=9, mutate="drop-state")]
    assert a == b
