"""Command-line front end.

Every machine-readable line is one JSON object. Trace lines have the shape
``{"seq", "episode", "kind", "payload"}`` with ``seq`` counting from 0 over
the whole invocation. Exit codes: 0 success, 1 a property or episode failed,
2 bad usage or unparsable input.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .lambda_cps import ParseError, check_simulation, cps_transform, parse_term, print_term, random_closed_term
from .laws import MUTANTS, run_law_suites
from .memory_engine import (FUEL_EXHAUSTED, Bottom, Task, episode_metrics, make_strategy,
                            run_sequence)
from .nxp_lang import DEFAULT_BUDGET, ExprSyntaxError, UnboundAtom, parse_expr, print_expr, run_episode
from .stack_vm import LEARN_FUNCTIONS, PER_EPISODE, PER_STEP, vm_run

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    strategy: str = "chunk"
    mode: str = PER_EPISODE
    budget: int = DEFAULT_BUDGET
    cluster_threshold: float = 0.5
    first_look_k: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise UsageError("--budget must be positive")
        if not 0 < self.cluster_threshold <= 1:
            raise UsageError("--threshold must lie in (0, 1]")
        if self.first_look_k < 1:
            raise UsageError("--first-look-k must be positive")
        if self.seed < 0:
            raise UsageError("--seed must be nonnegative")


def _config(args) -> RunConfig:
    seed = args.seed
    if os.environ.get("NXPVM_SEED"):
        try:
            seed = int(os.environ["NXPVM_SEED"])
        except ValueError:
            raise UsageError("NXPVM_SEED must be an integer") from None
    return RunConfig(getattr(args, "strategy", "chunk"), getattr(args, "mode", PER_EPISODE),
                     args.budget, args.threshold, args.first_look_k, seed)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class _Writer:
    """Numbers trace lines and sends everything to one stream."""

    def __init__(self, stream):
        self.stream = stream
        self.seq = 0

    def event(self, episode, kind, payload):
        self.line({"seq": self.seq, "episode": episode, "kind": kind, "payload": payload})
        self.seq += 1

    def line(self, obj):
        self.stream.write(_dump(obj) + "\n")

    def text(self, s):
        self.stream.write(s + "\n")


# -- cps ----------------------------------------------------------------------

def cmd_cps(args, cfg, out) -> int:
    if args.check_sim is not None:
        if args.check_sim < 1:
            raise UsageError("--check-sim needs a positive count")
        passed, failed = _check_sim(args.check_sim, cfg.seed)
        out.line({"trials": passed + failed, "passed": passed, "failed": failed})
        return EXIT_FAILED if failed else EXIT_OK
    if args.term is None:
        raise UsageError("cps needs a term or --check-sim")
    out.text(print_term(cps_transform(parse_term(args.term))))
    return EXIT_OK


def _check_sim(trials, seed, max_size=12):
    """Test ``trials`` random normalising terms; non-normalising draws are skipped."""
    rng = random.Random(seed)
    passed = failed = 0
    while passed + failed < trials:
        ok = check_simulation(random_closed_term(rng, max_size))
        if ok is None:
            continue
        if ok:
            passed += 1
        else:
            failed += 1
    return passed, failed


# -- eval ---------------------------------------------------------------------

def _env(text) -> dict:
    try:
        env = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--env is not JSON: {exc}") from None
    if not isinstance(env, dict) or not all(isinstance(v, bool) for v in env.values()):
        raise UsageError("--env must be a JSON object of booleans")
    return env


def cmd_eval(args, cfg, out) -> int:
    result = run_episode(parse_expr(args.expr), _env(args.env), cfg.budget)
    out.line({
        "value": result.value,
        "drained": [[print_expr(g), v] for g, v in result.drained],
        "posts": [print_expr(g) for g in result.posts],
        "steps": result.steps,
        "budget_exhausted": result.budget_exhausted,
    })
    return EXIT_FAILED if result.budget_exhausted else EXIT_OK


# -- run ----------------------------------------------------------------------

def load_scenario(lines, source="<scenario>") -> list:
    """Parse JSON-lines episodes into ``(Task, env)`` pairs; blank lines are skipped."""
    episodes = []
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where = f"{source}:{n}"
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{where}: {exc}") from None
        if not isinstance(rec, dict) or not {"task", "features", "goal"} <= set(rec):
            raise UsageError(f"{where}: need task, features and goal")
        env = rec.get("env", {})
        if not isinstance(env, dict) or not all(isinstance(v, bool) for v in env.values()):
            raise UsageError(f"{where}: env must map names to booleans")
        feats = rec["features"]
        if not isinstance(feats, list) or not all(isinstance(f, str) for f in feats):
            raise UsageError(f"{where}: features must be a list of strings")
        try:
            task = Task(str(rec["task"]), frozenset(feats), parse_expr(rec["goal"]))
        except ExprSyntaxError as exc:
            raise UsageError(f"{where}: {exc}") from None
        except ValueError as exc:
            raise UsageError(f"{where}: {exc}") from None
        episodes.append((task, env))
    return episodes


def run_scenario(episodes, cfg: RunConfig):
    """Events and metrics for one scenario, plus whether it ended in a bottom."""
    strategy = make_strategy(cfg.strategy, cfg.cluster_threshold, cfg.first_look_k)
    state = run_sequence(episodes, strategy, budget=cfg.budget).state
    events = [ev.to_json() for ev in state.trace]
    metrics = episode_metrics(state.trace)
    bottom = isinstance(state, Bottom) and state.reason == FUEL_EXHAUSTED
    return events, metrics, bottom


def _run_job(job):
    episodes, cfg = job
    try:
        return run_scenario(episodes, cfg)
    except UnboundAtom as exc:
        return exc.name


def cmd_run(args, cfg, out) -> int:
    if args.parallel is not None and args.parallel < 1:
        raise UsageError("--parallel needs a positive worker count")
    jobs = []
    for path in args.scenario:
        try:
            with open(path, encoding="utf-8") as fh:
                jobs.append((load_scenario(fh, path), cfg))
        except OSError as exc:
            raise UsageError(str(exc)) from None
    if args.parallel and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            results = list(pool.map(_run_job, jobs))  # map keeps input order
    else:
        results = [_run_job(j) for j in jobs]

    status = EXIT_OK
    for path, res in zip(args.scenario, results):
        if isinstance(res, str):
            raise UsageError(f"{path}: unbound atom {res!r}")
        events, metrics, bottom = res
        for ev in events:
            out.event(ev["episode"], ev["kind"], ev["payload"])
        for m in metrics:
            out.event(m["episode"], "metrics", m)
        if bottom:
            status = EXIT_FAILED
    return status


# -- vm -----------------------------------------------------------------------

def cmd_vm(args, cfg, out) -> int:
    main, env = parse_expr(args.expr), _env(args.env)
    if args.repeat < 1:
        raise UsageError("--repeat must be positive")
    skill, status = (), EXIT_OK
    for rep in range(args.repeat):
        res = vm_run(main, env, LEARN_FUNCTIONS[args.learn], cfg.mode, cfg.budget, skill)
        for kind, label in res.events:
            out.event(rep, kind, {"item": label} if label else {})
        out.event(rep, "metrics", {
            "episode": rep,
            "answer": res.value,
            "steps": res.step_count,
            "drained": [[print_expr(g), v] for g, v in res.drained],
            "skill_size": len(res.skill_stack),
        })
        if res.budget_exhausted:
            status = EXIT_FAILED
            break
        skill = res.skill_stack
    return status


# -- laws ---------------------------------------------------------------------

def cmd_laws(args, cfg, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    reports = run_law_suites(args.trials, cfg.seed, args.mutate)
    for rep in reports:
        for law, r in rep.results.items():
            line = f"{rep.triple:<13} {law:<14} {'pass' if r.passed else 'FAIL'} ({r.trials} trials)"
            if not r.passed:
                line += f"  counterexample: {_dump(r.counterexample)}"
            out.text(line)
    out.line({"reports": [rep.to_json() for rep in reports]})
    return EXIT_OK if all(rep.passed for rep in reports) else EXIT_FAILED


# -- wiring -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="evaluations allowed per episode")
    common.add_argument("--threshold", type=float, default=0.5, help="new-cluster threshold")
    common.add_argument("--first-look-k", type=int, default=3, help="expectation goals per episode")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised suites")
    common.add_argument("--output", help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="nxpvm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cps", parents=[common], help="CPS-transform a lambda term")
    c.add_argument("term", nargs="?")
    c.add_argument("--check-sim", type=int, metavar="N", help="run N simulation trials instead")
    c.set_defaults(func=cmd_cps)

    e = sub.add_parser("eval", parents=[common], help="run one NXP episode")
    e.add_argument("expr")
    e.add_argument("--env", default="{}", help="JSON object of atom values")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("run", parents=[common], help="run scenario files through the engine")
    r.add_argument("scenario", nargs="+")
    r.add_argument("--strategy", choices=["script", "chunk", "cluster"], default="chunk")
    r.add_argument("--parallel", type=int, metavar="N", help="worker processes for several files")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("vm", parents=[common], help="run an episode on the dual-stack machine")
    v.add_argument("expr")
    v.add_argument("--env", default="{}", help="JSON object of atom values")
    v.add_argument("--learn", choices=sorted(LEARN_FUNCTIONS), default="chunk")
    v.add_argument("--mode", choices=[PER_STEP, PER_EPISODE], default=PER_EPISODE)
    v.add_argument("--repeat", type=int, default=1, help="repetitions sharing the skill stack")
    v.set_defaults(func=cmd_vm)

    law = sub.add_parser("laws", parents=[common], help="check the triple laws")
    law.add_argument("--trials", type=int, default=1000)
    law.add_argument("--mutate", choices=MUTANTS)
    law.set_defaults(func=cmd_laws)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    stream = None
    try:
        cfg = _config(args)
        stream = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
        return args.func(args, cfg, _Writer(stream))
    except (UsageError, ParseError, ExprSyntaxError, UnboundAtom, OSError) as exc:
        print(f"nxpvm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if stream is not None and stream is not sys.stdout:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
