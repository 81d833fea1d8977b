import sys
import random

from nxpvm.memory_engine import Task
from nxpvm.nxp_lang import random_expr

FEATURES = tuple(f"f{i}" for i in range(6))
WORLD = ("x", "y")


def random_task(rng: random.Random, tid=None, post_rate=0.3) -> Task:
    feats = frozenset(rng.sample(FEATURES, rng.randint(1, 4)))
    goal = random_expr(rng, tuple(sorted(feats)) + WORLD, max_depth=4, post_rate=post_rate)
    return Task(tid or f"t{rng.randrange(4)}", feats, goal)


def random_env(rng: random.Random) -> dict:
    return {n: rng.random() < 0.5 for n in WORLD}


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[n])
