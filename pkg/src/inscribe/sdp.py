"""The penalized-trace SDP over bordered Gram matrices, and its dual.

The primal problem minimizes ``tr(X) - sum(lambda_ij * S_ij)`` over PSD
matrices with all-ones border, ``A_ii = 2`` and ``S_ij = 0`` on the
incidence pattern.  The dual lives on ``(u, w)`` with the single PSD
block ``[[I_n + diag(u), M/2], [M^T/2, I_m]]`` where M carries ``-lambda``
off-pattern and ``w`` on-pattern.  A zero duality gap at a rank-(d+1)
primal point certifies inscribability.

Both solves here (the penalized SDP and the gap-minimizing weight
tuner) use the same two-set consensus splitting: the affine constraints
fix individual entries, so their projection is coordinatewise, the
linear cost folds into the affine step as a ``-C/rho`` shift, and the
other step is the PSD cone projection with a scaled running dual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EPS_ZERO, FacetIncidence, GramBorderMatrix, Inscription
from .errors import (
    DimensionMismatch,
    InfeasiblePoint,
    LengthMismatch,
    NonFinite,
    NotConverged,
)
from .numerics import psd_project, sym_eig


@dataclass(frozen=True)
class SolverOptions:
    """Splitting-solver parameters (shared by the SDP and the tuner)."""

    rho: float = 1.0
    tol: float = 1e-7
    max_iter: int = 50_000


@dataclass(frozen=True)
class WeightMatrix:
    """Penalty weights lambda_ij >= 0, zero on the incidence pattern."""

    values: np.ndarray  # (n, m)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def validate(self, incidence: FacetIncidence) -> None:
        if self.values.shape != incidence.on_facet.shape:
            raise DimensionMismatch(f"weights {self.values.shape} vs incidence {incidence.on_facet.shape}")
        if self.values.size and self.values.min() < 0:
            raise ValueError("weights must be nonnegative")
        if np.any(self.values[incidence.on_facet] != 0.0):
            raise ValueError("weights must vanish on the incidence pattern")

    @classmethod
    def uniform(cls, incidence: FacetIncidence, value: float) -> "WeightMatrix":
        if value < 0:
            raise ValueError("weights must be nonnegative")
        return cls(np.where(incidence.on_facet, 0.0, float(value)))


@dataclass(frozen=True)
class SdpInstance:
    """Incidence pattern, penalty weights, and the target dimension."""

    incidence: FacetIncidence
    weights: WeightMatrix
    d: int

    def __post_init__(self):
        self.weights.validate(self.incidence)
        if self.d < 2:
            raise ValueError(f"dimension must be at least 2, got {self.d}")

    @property
    def n(self) -> int:
        return self.incidence.n

    @property
    def m(self) -> int:
        return self.incidence.m


@dataclass(frozen=True)
class SdpSolution:
    """Converged (or capped) iterate of the splitting solver.

    ``X`` satisfies the fixed entries exactly and is PSD up to the
    primal residual.  ``state`` holds the (Z, U) pair for warm starts
    on the same incidence.
    """

    X: GramBorderMatrix
    objective: float
    primal_residual: float
    dual_residual: float
    iterations: int
    converged: bool
    state: tuple[np.ndarray, np.ndarray] | None = None


@dataclass(frozen=True)
class DualCertificate:
    """Multipliers (u, w) for the dual problem, with the weights they answer."""

    u: np.ndarray
    w: np.ndarray
    weights: WeightMatrix

    def __post_init__(self):
        u = np.ascontiguousarray(self.u, dtype=float)
        w = np.ascontiguousarray(self.w, dtype=float)
        u.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "w", w)


def build_cost(inst: SdpInstance) -> np.ndarray:
    """Cost matrix C with <C, X> = tr(X) - sum(lambda_ij S_ij) for symmetric X.

    The weight on each slack entry is halved across the two symmetric
    positions of the S block.
    """
    n, m = inst.n, inst.m
    size = 1 + n + m
    C = np.eye(size)
    C[1:1 + n, 1 + n:] = -inst.weights.values / 2.0
    C[1 + n:, 1:1 + n] = C[1:1 + n, 1 + n:].T
    return C


def _fixed_entries(incidence: FacetIncidence) -> tuple[np.ndarray, np.ndarray]:
    """Mask and values of the entries pinned by the affine constraint set:
    all-ones border, A_ii = 2, S_ij = 0 on the pattern."""
    n, m = incidence.n, incidence.m
    size = 1 + n + m
    mask = np.zeros((size, size), dtype=bool)
    vals = np.zeros((size, size))
    mask[0, :] = mask[:, 0] = True
    vals[0, :] = vals[:, 0] = 1.0
    diag = np.arange(1, 1 + n)
    mask[diag, diag] = True
    vals[diag, diag] = 2.0
    zi, zj = np.nonzero(incidence.on_facet)
    mask[1 + zi, 1 + n + zj] = True
    mask[1 + n + zj, 1 + zi] = True
    return mask, vals


def solve_sdp(
    inst: SdpInstance,
    opts: SolverOptions = SolverOptions(),
    start: tuple[np.ndarray, np.ndarray] | None = None,
) -> SdpSolution:
    """Minimize <C, X> over PSD matrices with the instance's fixed entries.

    Two-set consensus splitting: the affine step resets the fixed
    entries after shifting by ``-C/rho``, the cone step is the nearest
    PSD projection, and a scaled dual accumulates the gap between the
    two copies.  Stops when the primal residual ``|X - Z|_F`` and dual
    residual ``rho |Z - Z_prev|_F`` both fall below ``opts.tol``; a
    capped run returns the best iterate flagged ``converged=False``.
    Deterministic; ``start`` may carry the (Z, U) state of a previous
    solve on the same incidence.
    """
    C = build_cost(inst)
    mask, vals = _fixed_entries(inst.incidence)
    shift = C / opts.rho
    if start is not None:
        Z, U = start[0].copy(), start[1].copy()
    else:
        Z = np.ones_like(C)
        Z[mask] = vals[mask]
        U = np.zeros_like(C)
    X = Z
    r = s = np.inf
    it = 0
    for it in range(1, opts.max_iter + 1):
        X = Z - U - shift
        X[mask] = vals[mask]
        Znew = psd_project(X + U)
        r = float(np.linalg.norm(X - Znew))
        s = float(opts.rho * np.linalg.norm(Znew - Z))
        U += X - Znew
        Z = Znew
        if r <= opts.tol and s <= opts.tol:
            break
    if not np.all(np.isfinite(X)):
        raise NonFinite("solver iterate diverged to NaN/Inf")
    n, m = inst.n, inst.m
    return SdpSolution(
        X=GramBorderMatrix(n=n, m=m, data=X),
        objective=float(np.sum(C * X)),
        primal_residual=r,
        dual_residual=s,
        iterations=it,
        converged=bool(r <= opts.tol and s <= opts.tol),
        state=(Z, U),
    )


def dual_matrix(cert: DualCertificate, incidence: FacetIncidence) -> np.ndarray:
    """The matrix M: ``-lambda_ij`` off the pattern, ``w_k`` on it.

    Zero positions are indexed in row-major order over (i, j).
    """
    pos = incidence.zero_positions()
    if cert.w.shape != (len(pos),):
        raise LengthMismatch(f"w has length {cert.w.shape}, pattern has {len(pos)} zeros")
    cert.weights.validate(incidence)
    M = -cert.weights.values.copy()
    M[pos[:, 0], pos[:, 1]] = cert.w
    return M


def dual_feasibility_margin(cert: DualCertificate, incidence: FacetIncidence) -> float:
    """Smallest eigenvalue of the Schur form ``I + diag(u) - M M^T / 4``.

    Nonnegative exactly when (u, w) is feasible for the dual problem.
    """
    M = dual_matrix(cert, incidence)
    n = incidence.n
    if cert.u.shape != (n,):
        raise LengthMismatch(f"u has shape {cert.u.shape}, expected ({n},)")
    K = np.eye(n) + np.diag(cert.u) - (M @ M.T) / 4.0
    return float(sym_eig(K).values[-1])


def check_dual_feasible(cert: DualCertificate, incidence: FacetIncidence, tol: float = 1e-9) -> bool:
    return dual_feasibility_margin(cert, incidence) >= -tol


def primal_objective(A, B, S, weights: WeightMatrix) -> float:
    """f_p = tr(A) + tr(B) - sum(lambda_ij S_ij) + 1."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    S = np.asarray(S, dtype=float)
    if weights.values.shape != S.shape:
        raise DimensionMismatch(f"weights {weights.values.shape} vs S {S.shape}")
    return float(np.trace(A) + np.trace(B) - np.sum(weights.values * S) + 1.0)


def dual_objective(cert: DualCertificate, incidence: FacetIncidence) -> float:
    """f_d = m + n + sum(M) - sum(u) + 1."""
    M = dual_matrix(cert, incidence)
    return float(incidence.m + incidence.n + M.sum() - cert.u.sum() + 1.0)


def duality_gap(
    X: GramBorderMatrix,
    cert: DualCertificate,
    incidence: FacetIncidence,
    tol: float = 1e-7,
) -> float:
    """f_p - f_d for a feasible primal point and a feasible certificate.

    Raises ``InfeasiblePoint`` naming the failing side; by weak duality
    the returned gap is bounded below by roughly ``-tol``.
    """
    if (X.n, X.m) != (incidence.n, incidence.m):
        raise DimensionMismatch(f"matrix blocks ({X.n}, {X.m}) vs incidence ({incidence.n}, {incidence.m})")
    if np.abs(np.diag(X.A) - 2.0).max() > tol:
        raise InfeasiblePoint("primal", "A_ii deviates from 2")
    if incidence.on_facet.any() and np.abs(X.S[incidence.on_facet]).max() > tol:
        raise InfeasiblePoint("primal", "S is nonzero on the incidence pattern")
    n, m = X.n, X.m
    core = X.data[1:, 1:] - np.ones((n + m, n + m))
    if sym_eig(core).values[-1] < -tol:
        raise InfeasiblePoint("primal", "Schur block is not PSD")
    if not check_dual_feasible(cert, incidence, tol):
        raise InfeasiblePoint("dual", "certificate violates the PSD constraint")
    f_p = primal_objective(X.A, X.B, X.S, cert.weights)
    f_d = dual_objective(cert, incidence)
    return f_p - f_d


def check_simplified_conditions(
    incidence: FacetIncidence,
    k: int,
    h_norm_sq: float,
    u_bar: float,
    w_bar: float,
    lambda_bar: float,
    tol: float = 1e-8,
) -> tuple[bool, bool]:
    """The two scalar conditions of the facet-transitive setting.

    Returns ``(lambda_max(M M^T) <= 4 + 4*u_bar,
    n(1+u_bar) + m |h_1|^2 == (lambda_bar + w_bar) k m)`` with M built
    from the uniform scalars on the given pattern.  The caller is
    responsible for only using this in the facet-transitive symmetric
    setting where it is meaningful.
    """
    n, m = incidence.n, incidence.m
    M = np.where(incidence.on_facet, w_bar, -lambda_bar)
    lam_max = float(sym_eig(M @ M.T).values[0])
    cond1 = lam_max <= 4.0 + 4.0 * u_bar + tol
    cond2 = abs(n * (1.0 + u_bar) + m * h_norm_sq - (lambda_bar + w_bar) * k * m) <= tol
    return cond1, cond2


def tune_lambda_star(
    insc: Inscription,
    opts: SolverOptions = SolverOptions(),
    eps_zero: float = EPS_ZERO,
    lambda_cap: float | None = None,
) -> tuple[WeightMatrix, DualCertificate, float]:
    """Weights minimizing the duality gap at a known inscription.

    The gap ``f_p(lambda) - f_d(u, w, lambda)`` is linear in all
    variables and the dual PSD block is affine in them, so this is one
    more structured SDP, solved with the same splitting machinery on
    the block matrix G = [[I + diag(u), M/2], [M^T/2, I_m]]: the
    off-diagonal of the u-block and the I_m block are fixed entries,
    the pattern positions of M are free (w), the remaining positions
    are box-constrained to [-lambda_cap/2, 0] (lambda >= 0 plus a cap
    keeping early iterates bounded; with the cap inactive at the
    solution, removing it changes nothing).  The inscription must be
    normalized: origin interior, vertices on the unit sphere.

    Returns the weights, the certificate, and the achieved gap (which
    by weak duality cannot be meaningfully negative).
    """
    slack = insc.slack(eps_zero)
    incidence = slack.zero_set
    on = incidence.on_facet
    S = slack.entries
    n, m = incidence.n, incidence.m
    d = insc.polytope.dim
    if lambda_cap is None:
        lambda_cap = 100.0 * (2.0 * d / n)

    size = n + m
    # gap(G) = sum|h_i|^2 + <Cp, G>: u-block diagonal carries +1 each,
    # pattern entries carry -w, off-pattern carry lambda*(1 - S).
    Cp = np.zeros((size, size))
    Cp[:n, :n] = np.eye(n)
    blk = np.where(on, -1.0, -(1.0 - S))
    Cp[:n, n:] = blk
    Cp[n:, :n] = blk.T

    mask = np.zeros((size, size), dtype=bool)
    vals = np.zeros((size, size))
    offdiag = ~np.eye(n, dtype=bool)
    mask[:n, :n] = offdiag
    mask[n:, n:] = True
    vals[n:, n:] = np.eye(m)
    clamp = np.zeros((size, size), dtype=bool)
    clamp[:n, n:] = ~on
    clamp[n:, :n] = ~on.T

    lo, hi = -lambda_cap / 2.0, 0.0
    shift = Cp / opts.rho
    Z = np.eye(size)
    U = np.zeros((size, size))
    G = Z
    r = s = np.inf
    it = 0
    for it in range(1, opts.max_iter + 1):
        G = Z - U - shift
        G[mask] = vals[mask]
        G[clamp] = np.clip(G[clamp], lo, hi)
        Znew = psd_project(G + U)
        r = float(np.linalg.norm(G - Znew))
        s = float(opts.rho * np.linalg.norm(Znew - Z))
        U += G - Znew
        Z = Znew
        if r <= opts.tol and s <= opts.tol:
            break
    if not (r <= opts.tol and s <= opts.tol):
        raise NotConverged(f"gap tuner stopped at residuals ({r:.3e}, {s:.3e}) after {it} iterations")

    lam = np.where(on, 0.0, np.maximum(-2.0 * G[:n, n:], 0.0))
    weights = WeightMatrix(lam)
    u = np.diag(G)[:n] - 1.0
    w = 2.0 * G[:n, n:][on]
    cert = DualCertificate(u=u, w=w, weights=weights)
    f_p = primal_objective(
        insc.polytope.vertices @ insc.polytope.vertices.T + 1.0,
        insc.facet_normals @ insc.facet_normals.T + 1.0,
        S,
        weights,
    )
    gap = f_p - dual_objective(cert, incidence)
    return weights, cert, float(gap)
