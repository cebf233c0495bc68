"""submax: maximization of non-negative (symmetric) submodular set functions.

Fractional maximization over down-monotone polytopes via measured continuous
greedy, equality-cardinality maximization via a coupled double ascent,
deterministic unconstrained two-sided greedy, random-assignment submodular
welfare, multilinear-extension machinery, pipage rounding, and brute-force
oracles that make every guarantee checkable at desk scale.
"""

from .dmcg import DmcgConfig, dual_trajectory_csv, reduction2, run_dmcg, solve_direction
from .mcg import McgConfig, check_feasibility_invariants, run_mcg, trajectory_csv
from .reports import CheckReport
from .multilinear import (
    Estimator,
    MultilinearEvaluator,
    Point,
    eval_exact,
    evaluate,
    partial_derivative,
    sample_set,
)
from .oracle import brute_cardinality, brute_polytope_integral, brute_unconstrained
from .pipage import pipage_round
from .polytope import (
    CardinalityPolytope,
    KnapsackPolytope,
    PartitionPolytope,
    Polytope,
    horizon,
    preprocess_reduction1,
)
from .setfn import (
    CoverageInstance,
    GraphCutInstance,
    GroundSet,
    HypergraphCutInstance,
    SetFunction,
    audit_nonnegativity,
    audit_submodularity,
    audit_symmetry,
    complement_function,
    cut_eval,
    graph_cut_function,
    hardness_instance,
    restrict_function,
)
from .twosided import check_loss_gain, run_two_sided, trace_csv
from .welfare import (
    Allocation,
    WelfareInstance,
    brute_force_welfare,
    random_assign,
    tight_instance,
    welfare_ratio,
)

__version__ = "0.1.0"
