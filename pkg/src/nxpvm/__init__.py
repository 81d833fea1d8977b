"""Dynamic memory as a control construct.

A lambda calculus with a CPS pass, Kleisli triples with law checks, the NXP
goal language, a problem-solving engine with expected and unexpected
continuations, and a dual-stack machine that learns while it solves.
"""
from .lambda_cps import cps_transform, eval_cbv, parse_term, print_term
from .memory_engine import Task, compose, execute, make_strategy, run_sequence
from .nxp_lang import eval_expr, parse_expr, print_expr, run_episode
from .stack_vm import reduce_to_single, vm_run
from .triples import check_laws, continuation_triple, identity_triple, n_triple, state_triple

__version__ = "0.1.0"
