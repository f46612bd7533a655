"""End-to-end inscribability procedures.

Weight strategies (constant, heuristic tuning loop, gap-minimizing),
alternating projection between the rank-(d+1) set and the constraint
set, its simplified variant that only resets fixed entries, and the
recommended three-step procedure: heuristic SDP first, then simplified
alternating projection, then full alternating projection, each started
from the SDP solution.

Everything here is one-sided: a verified extraction proves
inscribability, a failure proves nothing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    EPS_ZERO,
    RANK_TOL,
    TOL_FIT,
    TOL_SIDE,
    FacetIncidence,
    GramBorderMatrix,
    Inscription,
    PolytopeVRep,
    extract_vertices,
    facet_enumeration,
    normalize_inscription,
    verify_inscription,
)
from .errors import BorderViolation, InscribeError, ZeroVertex
from .numerics import numeric_rank, psd_project, rank_truncate
from .sdp import (
    SdpInstance,
    SdpSolution,
    SolverOptions,
    WeightMatrix,
    _fixed_entries,
    solve_sdp,
    tune_lambda_star,
)

HEURISTIC_ROUNDS = 10


@dataclass(frozen=True)
class PipelineOptions:
    """Tolerances and caps shared by the pipeline stages."""

    solver: SolverOptions = field(default_factory=SolverOptions)
    eps_stop: float = 1e-7
    ap_max_iter: int = 5000
    sap_max_iter: int = 5000
    projection_tol: float = 1e-8  # inner Dykstra, 10x tighter than eps_stop
    projection_max_iter: int = 1000
    eps_pos: float = 0.0
    eps_zero: float = EPS_ZERO
    rank_tol: float = RANK_TOL
    tol_fit: float = TOL_FIT
    tol_side: float = TOL_SIDE
    extract_tol: float = 1e-6


@dataclass(frozen=True)
class PipelineReport:
    """Outcome of one pipeline stage (or of the whole procedure).

    ``inscribed`` implies ``vertices`` is present and verified against
    the target incidence.  ``iterations`` counts outer iterations for
    the projection methods and SDP solves for the weight-tuning loop.
    ``solution`` keeps the final bordered matrix so later stages can
    start from it; ``steps`` is filled by the three-step procedure.
    """

    method: str
    inscribed: bool
    vertices: PolytopeVRep | None
    rank_at_tol: int
    iterations: int
    wall_time: float
    f_bad_history: tuple[tuple[int, ...], ...]
    solution: GramBorderMatrix | None = None
    steps: tuple["PipelineReport", ...] = ()


def _verdict(
    X: np.ndarray,
    incidence: FacetIncidence,
    d: int,
    opts: PipelineOptions,
) -> tuple[bool, PolytopeVRep | None, tuple[int, ...], int]:
    """Extract vertices from a solution matrix and verify them; returns
    (inscribed, vertices, bad facets, rank)."""
    n, m = incidence.n, incidence.m
    rank = numeric_rank(X, opts.rank_tol)
    try:
        poly = extract_vertices(GramBorderMatrix(n=n, m=m, data=X), d, tol=opts.extract_tol)
    except (BorderViolation, ZeroVertex):
        return False, None, tuple(range(m)), rank
    report = verify_inscription(poly, incidence, tol_fit=opts.tol_fit, tol_side=opts.tol_side)
    return report.ok, poly, report.bad_facets, rank


def project_onto_constraints(
    X: GramBorderMatrix,
    incidence: FacetIncidence,
    eps_pos: float = 0.0,
    tol: float = 1e-8,
    max_iter: int = 1000,
) -> tuple[GramBorderMatrix, bool]:
    """Frobenius projection onto the closed constraint set.

    Dykstra alternation between the PSD cone and the coordinatewise set
    {border = 1, A_ii = 2, S = 0 on the pattern, S >= eps_pos off it};
    converges to the exact projection of the input.  Returns the last
    coordinatewise-feasible iterate (fixed entries exact, PSD up to the
    achieved gap) and a convergence flag.
    """
    x, converged, _ = _project_array(X.data, incidence, eps_pos, tol, max_iter)
    return GramBorderMatrix(n=incidence.n, m=incidence.m, data=x), converged


def _project_array(
    X0: np.ndarray,
    incidence: FacetIncidence,
    eps_pos: float,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, bool, int]:
    n, m = incidence.n, incidence.m
    mask, vals = _fixed_entries(incidence)
    off = ~incidence.on_facet
    x = (X0 + X0.T) / 2
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for it in range(1, max_iter + 1):
        y = psd_project(x + p)
        p = x + p - y
        x = y + q
        x[mask] = vals[mask]
        s_block = x[1:1 + n, 1 + n:]
        s_block[off] = np.maximum(s_block[off], eps_pos)
        x[1 + n:, 1:1 + n] = s_block.T
        q = y + q - x
        if np.linalg.norm(x - y) <= tol:
            return x, True, it
    return x, False, max_iter


def _stage_report(
    method: str,
    X: np.ndarray,
    incidence: FacetIncidence,
    d: int,
    opts: PipelineOptions,
    iterations: int,
    t0: float,
    history: tuple[tuple[int, ...], ...] = (),
) -> PipelineReport:
    inscribed, poly, bad, rank = _verdict(X, incidence, d, opts)
    return PipelineReport(
        method=method,
        inscribed=inscribed,
        vertices=poly if inscribed else None,
        rank_at_tol=rank,
        iterations=iterations,
        wall_time=time.perf_counter() - t0,
        f_bad_history=history + ((() if inscribed else tuple(bad)),),
        solution=GramBorderMatrix(n=incidence.n, m=incidence.m, data=X),
    )


def alternating_projection(
    X0: GramBorderMatrix,
    incidence: FacetIncidence,
    d: int,
    eps_stop: float = 1e-7,
    max_iter: int = 5000,
    opts: PipelineOptions | None = None,
    method: str = "AP-λ",
) -> PipelineReport:
    """Alternate rank-(d+1) truncation with projection onto the constraints.

    Stops when the distance between the two projections drops below
    ``eps_stop``.  The rank set is non-convex, so only local convergence
    can be expected and running out of iterations is a normal outcome,
    reported through the flags rather than an error.
    """
    opts = opts or PipelineOptions()
    t0 = time.perf_counter()
    X = np.array(X0.data)
    it = 0
    for it in range(1, max_iter + 1):
        Y = rank_truncate(X, d + 1)
        X, _, _ = _project_array(Y, incidence, opts.eps_pos, opts.projection_tol, opts.projection_max_iter)
        if np.linalg.norm(X - Y) <= eps_stop:
            break
    return _stage_report(method, X, incidence, d, opts, it, t0)


def simplified_ap(
    X0: GramBorderMatrix,
    incidence: FacetIncidence,
    d: int,
    eps_stop: float = 1e-7,
    max_iter: int = 5000,
    opts: PipelineOptions | None = None,
    method: str = "SAP-λ",
) -> PipelineReport:
    """Alternating projection with the cheap constraint step.

    Instead of the true projection, fixed entries (border, A diagonal,
    pattern zeros of S) are overwritten and everything else, including
    the whole B block, is left as truncated; the result need not be PSD,
    which is the point of the simplification.
    """
    opts = opts or PipelineOptions()
    t0 = time.perf_counter()
    mask, vals = _fixed_entries(incidence)
    X = np.array(X0.data)
    it = 0
    for it in range(1, max_iter + 1):
        Y = rank_truncate(X, d + 1)
        X = Y.copy()
        X[mask] = vals[mask]
        if np.linalg.norm(X - Y) <= eps_stop:
            break
    return _stage_report(method, X, incidence, d, opts, it, t0)


def tune_lambda_heuristic(
    incidence: FacetIncidence,
    d: int,
    opts: PipelineOptions | None = None,
    method: str = "SDP-λh",
) -> PipelineReport:
    """Solve the SDP repeatedly, raising weights on facets that fail to match.

    Starts from the uniform weight 2d/n.  After each solve the vertices
    are extracted, normalized to the sphere and verified; weights of all
    entries in non-matching facet columns are multiplied by n/d, capped
    at (2d/n)(n/d)^10.  At most ten SDP solves are performed, warm
    starting each from the previous iterate.
    """
    opts = opts or PipelineOptions()
    t0 = time.perf_counter()
    n, m = incidence.n, incidence.m
    lam_init = 2.0 * d / n
    lam_cap = lam_init * (n / d) ** HEURISTIC_ROUNDS
    lam = np.where(incidence.on_facet, 0.0, lam_init)
    history: tuple[tuple[int, ...], ...] = ()
    state = None
    sol: SdpSolution | None = None
    inscribed, poly, bad, rank = False, None, tuple(range(m)), 0
    for _ in range(HEURISTIC_ROUNDS):
        inst = SdpInstance(incidence=incidence, weights=WeightMatrix(lam), d=d)
        sol = solve_sdp(inst, opts.solver, start=state)
        state = sol.state
        inscribed, poly, bad, rank = _verdict(sol.X.data, incidence, d, opts)
        history += (() if inscribed else tuple(bad),)
        if inscribed:
            break
        grow = np.zeros(m, dtype=bool)
        grow[list(bad)] = True
        lam = np.where(~incidence.on_facet & grow[None, :], np.minimum(lam * (n / d), lam_cap), lam)
    return PipelineReport(
        method=method,
        inscribed=inscribed,
        vertices=poly if inscribed else None,
        rank_at_tol=rank,
        iterations=len(history),
        wall_time=time.perf_counter() - t0,
        f_bad_history=history,
        solution=sol.X,
    )


def solve_with_constant_weights(
    incidence: FacetIncidence,
    d: int,
    opts: PipelineOptions | None = None,
    method: str = "SDP-λc",
) -> PipelineReport:
    """Single SDP solve with the observation-based constant weight 2d/n."""
    opts = opts or PipelineOptions()
    t0 = time.perf_counter()
    weights = WeightMatrix.uniform(incidence, 2.0 * d / incidence.n)
    sol = solve_sdp(SdpInstance(incidence=incidence, weights=weights, d=d), opts.solver)
    return _stage_report(method, np.array(sol.X.data), incidence, d, opts, sol.iterations, t0)


def solve_with_tuned_weights(
    poly: PolytopeVRep,
    incidence: FacetIncidence,
    opts: PipelineOptions | None = None,
    method: str = "SDP-λ*",
) -> PipelineReport:
    """SDP with weights minimizing the duality gap at a known inscription.

    The inscription is preprocessed first (centroid to the origin) and
    its facet normals are refitted, as the gap tuner needs the origin
    interior and the slack matrix of the normalized realization.
    """
    opts = opts or PipelineOptions()
    t0 = time.perf_counter()
    d = poly.dim
    centered = normalize_inscription(poly, incidence)
    fitted = verify_inscription(centered, incidence, tol_fit=opts.tol_fit, tol_side=opts.tol_side)
    if not fitted.ok:
        raise InscribeError(f"input realization does not match its incidence on facets {sorted(fitted.bad_facets)}")
    insc = Inscription(polytope=centered, facet_normals=fitted.facet_normals)
    weights, _, _ = tune_lambda_star(insc, opts.solver, eps_zero=opts.eps_zero)
    sol = solve_sdp(SdpInstance(incidence=incidence, weights=weights, d=d), opts.solver)
    return _stage_report(method, np.array(sol.X.data), incidence, d, opts, sol.iterations, t0)


def continue_with(
    sdp_report: PipelineReport,
    incidence: FacetIncidence,
    d: int,
    refine: str,
    opts: PipelineOptions | None = None,
    method: str | None = None,
) -> PipelineReport:
    """SAP or AP started from an SDP report's solution.

    When the SDP already found an inscription the projections would not
    move away from it, so the report is passed through relabeled; this
    is what makes the refined methods at least as accurate as the SDP.
    """
    opts = opts or PipelineOptions()
    label = method or ("SAP-λ" if refine == "sap" else "AP-λ")
    if sdp_report.inscribed or sdp_report.solution is None:
        return replace(sdp_report, method=label)
    if refine == "sap":
        return simplified_ap(sdp_report.solution, incidence, d, opts.eps_stop, opts.sap_max_iter, opts, method=label)
    if refine == "ap":
        return alternating_projection(sdp_report.solution, incidence, d, opts.eps_stop, opts.ap_max_iter, opts, method=label)
    raise ValueError(f"unknown refinement {refine!r}, expected 'sap' or 'ap'")


def run_procedure(
    subject: PolytopeVRep | FacetIncidence,
    d: int | None = None,
    opts: PipelineOptions | None = None,
) -> PipelineReport:
    """The recommended three-step decision procedure.

    Step 1 solves the SDP with heuristic weight tuning; if that fails to
    produce an inscription, step 2 runs the simplified alternating
    projection from the SDP solution, and step 3 the full alternating
    projection from the same start.  Returns the first inscribed report
    (with all executed steps attached and the total wall time); a
    non-inscribed final report never claims non-inscribability.
    """
    opts = opts or PipelineOptions()
    if isinstance(subject, PolytopeVRep):
        incidence = facet_enumeration(subject)
        d = subject.dim
    else:
        incidence = subject
        if d is None:
            raise ValueError("d is required when only an incidence is given")
        incidence.validate(d)
    t0 = time.perf_counter()
    steps = [tune_lambda_heuristic(incidence, d, opts)]
    if not steps[-1].inscribed:
        steps.append(continue_with(steps[0], incidence, d, "sap", opts))
    if not steps[-1].inscribed:
        steps.append(continue_with(steps[0], incidence, d, "ap", opts))
    final = steps[-1]
    return replace(final, steps=tuple(steps), wall_time=time.perf_counter() - t0)
