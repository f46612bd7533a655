"""Deciding polytope inscribability, one-sidedly, through structured
rank minimization over bordered Gram matrices.

A combinatorial polytope (given by its vertex-facet incidence) is
inscribable in the sphere exactly when a PSD matrix with all-ones
border, constant A diagonal, and a slack block supported on the
incidence pattern exists with rank d+1.  This package relaxes the rank
objective to a penalized trace, solves the resulting SDP with a
dependency-free splitting solver, refines with alternating projections,
and verifies candidate inscriptions combinatorially.  Closed-form
certificates for four classical families double as a test oracle.
"""

from .core import (
    EPS_SIDE,
    EPS_ZERO,
    RANK_TOL,
    TOL_FIT,
    TOL_SIDE,
    FacetIncidence,
    GramBorderMatrix,
    Inscription,
    PolytopeVRep,
    SlackMatrix,
    VerifyReport,
    count_types,
    extract_vertices,
    facet_enumeration,
    load_polytope,
    normalize_inscription,
    random_inscribed,
    save_polytope,
    slack_from_reps,
    verify_inscription,
    zero_pattern,
)
from .errors import InscribeError
from .families import FAMILY_KINDS, FamilyCertificate, FamilySpec, build_family, family_lambda_max_numeric
from .numerics import SymEig, numeric_rank, psd_project, rank_truncate, sym_eig
from .pipeline import (
    PipelineOptions,
    PipelineReport,
    alternating_projection,
    continue_with,
    project_onto_constraints,
    run_procedure,
    simplified_ap,
    solve_with_constant_weights,
    solve_with_tuned_weights,
    tune_lambda_heuristic,
)
from .sdp import (
    DualCertificate,
    SdpInstance,
    SdpSolution,
    SolverOptions,
    WeightMatrix,
    build_cost,
    check_dual_feasible,
    check_simplified_conditions,
    dual_feasibility_margin,
    dual_matrix,
    dual_objective,
    duality_gap,
    primal_objective,
    solve_sdp,
    tune_lambda_star,
)

__version__ = "0.1.0"
