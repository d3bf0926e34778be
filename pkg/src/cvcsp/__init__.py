"""Exact toolkit for conservative valued constraint languages: multimorphism
certificates, pair-graph analysis, dichotomy classification, reductions, and
a brute-force oracle, all over exact rational costs."""

from .classify import Budgets, NPHard, Tractable, UnknownAtBudget, certificate, classify, replay_certificate
from .core import (
    INF,
    CapabilityError,
    Cost,
    CostFunction,
    Instance,
    Language,
    StructuralError,
    Term,
    as_cost,
    cost_function,
    cost_str,
    crisp_relation,
    crisp_unary,
    effective_domain,
    evaluate,
    instance_from_json,
    instance_to_json,
    language_from_json,
    language_sha256,
    language_to_json,
    penalty_unary,
    unary,
)
from .express import BinaryClosure, Gadget, binary_closure, express_gadget, min_compose, pin_project
from .graph import PairGraph, build_pair_graph, check_graph_consistency, edge_witness, find_soft_self_loop
from .mjn import MinorityConflictError, MinorityMap, compute_minority_map, construct_mjn, verify_mjn
from .ops import (
    BinaryOp,
    MmReport,
    OpPair,
    OpTriple,
    TernaryOp,
    binary_from_fn,
    check_mjn_on,
    check_multimorphism,
    check_stp_on,
    op_properties,
    search_majority,
    search_stp,
    ternary_from_fn,
)
from .reduce import binary_decompose, cap_reduce, derive_language, minhom_reduce
from .solver import Solution, brute_force_solve, fuse_improve

__version__ = "0.1.0"
