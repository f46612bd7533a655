"""Polytope data model.

Slack matrices, brute-force facet enumeration, random inscribed
generation, projective normalization onto the unit sphere, vertex
extraction from bordered PSD matrices, and combinatorial verification
of candidate inscriptions.

Conventions: vertices are rows of an (n, d) array; facet j is the
inequality ``1 - h_j . x >= 0`` with the origin in the interior, so the
slack matrix is ``S = 1 - V H^T`` with S >= 0 and S_ij = 0 exactly when
vertex i lies on facet j.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import sqrt
from pathlib import Path

import numpy as np

from .errors import (
    BorderViolation,
    CentroidOnSphere,
    DegenerateIncidence,
    DimensionMismatch,
    InteriorPoint,
    NegativeSlack,
    NotFullDimensional,
    NotSimplicial,
    RetryLimit,
    Unsupported,
    ZeroVertex,
)
from .numerics import numeric_rank, sym_eig

# relative threshold classifying a slack entry as zero
EPS_ZERO = 1e-7
# absolute side tolerance for facet enumeration on exact inputs
EPS_SIDE = 1e-9
# default tolerances for verifying noisy (solver-produced) inscriptions
TOL_FIT = 1e-6
TOL_SIDE = 1e-6
# rank tolerance used when reporting the rank of solution matrices
RANK_TOL = 1e-6

_GENERATION_RETRIES = 100


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PolytopeVRep:
    """An n-vertex point configuration affinely spanning dimension ``dim``."""

    dim: int
    vertices: np.ndarray  # (n, dim), one vertex per row

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.dim:
            raise DimensionMismatch(f"vertex array has shape {v.shape}, expected (n, {self.dim})")
        if self.dim < 2:
            raise ValueError(f"dimension must be at least 2, got {self.dim}")
        if v.shape[0] < self.dim + 1:
            raise ValueError(f"need at least {self.dim + 1} vertices in dimension {self.dim}, got {v.shape[0]}")
        lifted = np.hstack([np.ones((v.shape[0], 1)), v])
        if numeric_rank(lifted, 1e-9) != self.dim + 1:
            raise NotFullDimensional(f"{v.shape[0]} vertices do not affinely span dimension {self.dim}")
        object.__setattr__(self, "vertices", _readonly(v))

    @property
    def n(self) -> int:
        return self.vertices.shape[0]


@dataclass(frozen=True)
class FacetIncidence:
    """Vertex-facet incidence: ``on_facet[i, j]`` iff vertex i lies on facet j.

    Equivalently the zero set of a slack matrix.  Structural invariants
    that depend on the dimension are checked by :meth:`validate`, not at
    construction, so that degenerate patterns can be built and reported.
    """

    on_facet: np.ndarray  # (n, m) bool

    def __post_init__(self):
        a = np.asarray(self.on_facet, dtype=bool)
        if a.ndim != 2:
            raise DimensionMismatch(f"incidence must be a 2-d boolean array, got shape {a.shape}")
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        object.__setattr__(self, "on_facet", a)

    @property
    def n(self) -> int:
        return self.on_facet.shape[0]

    @property
    def m(self) -> int:
        return self.on_facet.shape[1]

    def zero_positions(self) -> np.ndarray:
        """Index pairs (i, j) of the zero set in row-major order."""
        return np.argwhere(self.on_facet)

    def validate(self, d: int | None = None) -> None:
        """Raise DegenerateIncidence unless every facet has >= d vertices,
        every vertex lies on >= d facets, and no two facet columns coincide."""
        need = 1 if d is None else d
        on = self.on_facet
        if self.m:
            col = on.sum(axis=0)
            if col.min() < need:
                j = int(col.argmin())
                raise DegenerateIncidence(f"facet {j} has {col[j]} incident vertices, needs >= {need}")
            row = on.sum(axis=1)
            if row.min() < need:
                i = int(row.argmin())
                raise DegenerateIncidence(f"vertex {i} lies on {row[i]} facets, needs >= {need}")
            _, counts = np.unique(on, axis=1, return_counts=True)
            if counts.max() > 1:
                raise DegenerateIncidence("two facet columns have identical vertex sets")


@dataclass(frozen=True)
class SlackMatrix:
    """Nonnegative n x m matrix with exact zeros on its declared pattern."""

    entries: np.ndarray
    zero_set: FacetIncidence

    def __post_init__(self):
        s = np.asarray(self.entries, dtype=float)
        on = self.zero_set.on_facet
        if s.shape != on.shape:
            raise DimensionMismatch(f"entries {s.shape} vs zero set {on.shape}")
        if s.size:
            if s.min() < 0:
                raise ValueError("slack entries must be nonnegative")
            if np.any(s[on] != 0.0):
                raise ValueError("entries on the zero set must be exactly 0")
            if np.any(s[~on] <= 0.0):
                raise ValueError("entries off the zero set must be positive")
        object.__setattr__(self, "entries", _readonly(s))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class Inscription:
    """A polytope on the unit sphere together with its facet normals.

    Facet j is ``1 - h_j . x >= 0``; the rows of ``facet_normals`` are the
    h_j, i.e. the vertices of the polar polytope.
    """

    polytope: PolytopeVRep
    facet_normals: np.ndarray  # (m, d)

    def __post_init__(self):
        h = np.asarray(self.facet_normals, dtype=float)
        if h.ndim != 2 or h.shape[1] != self.polytope.dim:
            raise DimensionMismatch(f"facet normals have shape {h.shape}, expected (m, {self.polytope.dim})")
        norms = np.linalg.norm(self.polytope.vertices, axis=1)
        if np.abs(norms - 1.0).max() > 1e-9:
            raise ValueError("inscription vertices must lie on the unit sphere (within 1e-9)")
        object.__setattr__(self, "facet_normals", _readonly(h))

    @property
    def n(self) -> int:
        return self.polytope.n

    @property
    def m(self) -> int:
        return self.facet_normals.shape[0]

    def slack(self, eps_zero: float = EPS_ZERO) -> SlackMatrix:
        return slack_from_reps(self.polytope, self.facet_normals, eps_zero=eps_zero)

    def incidence(self, eps_zero: float = EPS_ZERO) -> FacetIncidence:
        return self.slack(eps_zero).zero_set


@dataclass(frozen=True)
class GramBorderMatrix:
    """The (1+n+m)^2 symmetric matrix with all-ones border and blocks A, S, B.

    Layout: ``[[1, 1_n^T, 1_m^T], [1_n, A, S], [1_m, S^T, B]]``.  The
    constructor symmetrizes and rewrites the border exactly; it refuses
    inputs whose border is off by more than 1e-6 or whose asymmetry
    exceeds 1e-8.
    """

    n: int
    m: int
    data: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.data, dtype=float)
        size = 1 + self.n + self.m
        if x.shape != (size, size):
            raise DimensionMismatch(f"data has shape {x.shape}, expected ({size}, {size})")
        if not np.all(np.isfinite(x)):
            raise ValueError("matrix contains NaN or Inf entries")
        scale = 1.0 + np.abs(x).max()
        if np.abs(x - x.T).max() > 1e-8 * scale:
            raise ValueError("matrix is asymmetric beyond tolerance")
        if np.abs(x[0, :] - 1.0).max() > 1e-6 or np.abs(x[:, 0] - 1.0).max() > 1e-6:
            raise ValueError("border row/column deviates from all-ones by more than 1e-6")
        x = (x + x.T) / 2
        x[0, :] = 1.0
        x[:, 0] = 1.0
        object.__setattr__(self, "data", _readonly(x))

    @property
    def size(self) -> int:
        return 1 + self.n + self.m

    @property
    def A(self) -> np.ndarray:
        return self.data[1:1 + self.n, 1:1 + self.n]

    @property
    def S(self) -> np.ndarray:
        return self.data[1:1 + self.n, 1 + self.n:]

    @property
    def B(self) -> np.ndarray:
        return self.data[1 + self.n:, 1 + self.n:]

    @classmethod
    def from_blocks(cls, A, S, B) -> "GramBorderMatrix":
        A = np.asarray(A, dtype=float)
        S = np.asarray(S, dtype=float)
        B = np.asarray(B, dtype=float)
        n, m = S.shape
        if A.shape != (n, n) or B.shape != (m, m):
            raise DimensionMismatch(f"blocks A{A.shape}, S{S.shape}, B{B.shape} are inconsistent")
        size = 1 + n + m
        x = np.ones((size, size))
        x[1:1 + n, 1:1 + n] = A
        x[1:1 + n, 1 + n:] = S
        x[1 + n:, 1:1 + n] = S.T
        x[1 + n:, 1 + n:] = B
        return cls(n=n, m=m, data=x)

    @classmethod
    def from_inscription(cls, insc: Inscription) -> "GramBorderMatrix":
        """Rank-(d+1) bordered Gram matrix W W^T of an exact inscription,
        with W = [[1, 0], [1_n, V], [1_m, -H]]."""
        V = insc.polytope.vertices
        H = insc.facet_normals
        S = 1.0 - V @ H.T
        return cls.from_blocks(V @ V.T + 1.0, S, H @ H.T + 1.0)


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of checking candidate vertices against a target incidence."""

    ok: bool
    bad_facets: tuple[int, ...]
    facet_normals: np.ndarray  # (m, d) fitted normals, reusable by callers

    def __post_init__(self):
        object.__setattr__(self, "facet_normals", _readonly(self.facet_normals))


def slack_from_reps(poly: PolytopeVRep, facet_normals, eps_zero: float = EPS_ZERO) -> SlackMatrix:
    """Slack matrix ``S_ij = 1 - h_j . v_i`` of a V/H representation pair.

    Entries within ``eps_zero * (1 + max|S|)`` of zero are snapped to
    exactly zero and become the zero set; an entry below ``-eps_zero``
    (relative) means the representations are inconsistent.
    """
    H = np.asarray(facet_normals, dtype=float)
    if H.size == 0:
        H = H.reshape(0, poly.dim)
    if H.ndim != 2 or H.shape[1] != poly.dim:
        raise DimensionMismatch(f"facet normals have shape {H.shape}, expected (m, {poly.dim})")
    S = 1.0 - poly.vertices @ H.T
    if S.size == 0:
        return SlackMatrix(S, FacetIncidence(np.zeros(S.shape, dtype=bool)))
    thresh = eps_zero * (1.0 + np.abs(S).max())
    if S.min() < -thresh:
        i, j = np.unravel_index(int(S.argmin()), S.shape)
        raise NegativeSlack(int(i), int(j), float(S[i, j]))
    on = np.abs(S) <= thresh
    S = S.copy()
    S[on] = 0.0
    return SlackMatrix(S, FacetIncidence(on))


def zero_pattern(S, eps_zero: float = EPS_ZERO, d: int | None = None) -> FacetIncidence:
    """Zero set of a matrix at the relative threshold ``eps_zero``.

    Checks the incidence invariants (at least ``d`` entries per facet and
    vertex when ``d`` is given, otherwise at least one; no duplicate
    facets) and raises instead of silently fixing violations.
    """
    if eps_zero <= 0:
        raise ValueError("eps_zero must be positive")
    S = np.asarray(S, dtype=float)
    thresh = eps_zero * (1.0 + (np.abs(S).max() if S.size else 0.0))
    inc = FacetIncidence(np.abs(S) <= thresh)
    inc.validate(d)
    return inc


def facet_enumeration(poly: PolytopeVRep, eps_side: float = EPS_SIDE) -> FacetIncidence:
    """Brute-force facets of a simplicial polytope with the origin interior.

    Fits the hyperplane ``h . x = 1`` through every d-subset of vertices;
    a subset is a facet iff every other vertex has positive slack
    ``1 - h . v_k > eps_side``.  Subsets whose hyperplane passes through
    the origin admit no such fit and are skipped.  A vertex within
    ``eps_side`` of a fitted hyperplane it does not belong to makes the
    configuration non-simplicial.  A vertex on no facet is interior
    (equivalently, the origin is not in the interior of the hull).
    """
    V = poly.vertices
    n, d = V.shape
    facets = []
    for sub in combinations(range(n), d):
        A = V[list(sub)]
        try:
            h = np.linalg.solve(A, np.ones(d))
        except np.linalg.LinAlgError:
            continue  # hyperplane through the origin (or degenerate): not representable
        if np.abs(A @ h - 1.0).max() > 1e-8 * (1.0 + np.abs(h).max()):
            continue
        others = np.setdiff1d(np.arange(n), sub, assume_unique=True)
        s = 1.0 - V[others] @ h
        close = np.abs(s) <= eps_side
        if np.any(close):
            extra = int(others[np.argmax(close)])
            raise NotSimplicial(f"vertex {extra} lies on the hyperplane through vertices {sub}")
        if np.all(s > eps_side):
            facets.append(sub)
    on = np.zeros((n, len(facets)), dtype=bool)
    for j, sub in enumerate(facets):
        on[list(sub), j] = True
    rows = on.sum(axis=1)
    if not facets or rows.min() < 1:
        raise InteriorPoint(int(rows.argmin()))
    inc = FacetIncidence(on)
    inc.validate(d)
    return inc


def random_inscribed(n: int, d: int, rng_seed: int) -> tuple[PolytopeVRep, FacetIncidence]:
    """Uniform random points on the unit (d-1)-sphere with their facets.

    Samples i.i.d. Gaussian directions and normalizes; the whole sample
    is redrawn whenever the configuration is degenerate (non-simplicial,
    origin not interior, or numerically flat), which preserves the
    uniform distribution.  Deterministic for a fixed seed.
    """
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if n < d + 1:
        raise ValueError(f"need at least {d + 1} points in dimension {d}, got {n}")
    rng = np.random.default_rng(rng_seed)
    for _ in range(_GENERATION_RETRIES):
        g = rng.standard_normal((n, d))
        norms = np.linalg.norm(g, axis=1)
        if norms.min() < 1e-12:
            continue
        v = g / norms[:, None]
        try:
            poly = PolytopeVRep(dim=d, vertices=v)
            inc = facet_enumeration(poly)
        except (NotFullDimensional, NotSimplicial, InteriorPoint, DegenerateIncidence):
            continue
        return poly, inc
    raise RetryLimit(f"no valid configuration after {_GENERATION_RETRIES} resamples (n={n}, d={d})")


def _householder_to_e1(u: np.ndarray) -> np.ndarray:
    """Orthogonal (symmetric) Q with Q u = e_1 for a unit vector u."""
    d = u.shape[0]
    v = u - np.eye(d)[0]
    vv = v @ v
    if vv < 1e-28:
        return np.eye(d)
    return np.eye(d) - 2.0 * np.outer(v, v) / vv


def normalize_inscription(poly: PolytopeVRep, incidence: FacetIncidence | None = None) -> PolytopeVRep:
    """Projective sphere map carrying the vertex centroid to the origin.

    Rotates the centroid onto the first axis and applies the Mobius-type
    transformation that maps the ball onto itself, so the output vertices
    are again unit and the origin is strictly inside the hull.  The
    incidence pattern is preserved; when ``incidence`` is passed, this is
    re-verified numerically via facet fits.
    """
    V = poly.vertices
    norms = np.linalg.norm(V, axis=1)
    if np.abs(norms - 1.0).max() > 1e-9:
        raise ValueError("vertices must lie on the unit sphere (within 1e-9)")
    vc = V.mean(axis=0)
    alpha = float(np.linalg.norm(vc))
    if alpha >= 1.0 - 1e-9:
        raise CentroidOnSphere(f"vertex centroid has norm {alpha:.12f}")
    if alpha < 1e-14:
        out = poly
    else:
        Q = _householder_to_e1(vc / alpha)
        W = V @ Q.T
        den = 1.0 - alpha * W[:, 0]
        mapped = np.empty_like(W)
        mapped[:, 0] = (W[:, 0] - alpha) / den
        mapped[:, 1:] = sqrt(1.0 - alpha * alpha) * W[:, 1:] / den[:, None]
        mapped /= np.linalg.norm(mapped, axis=1)[:, None]
        out = PolytopeVRep(dim=poly.dim, vertices=mapped)
    if incidence is not None:
        report = verify_inscription(out, incidence)
        if not report.ok:
            raise ValueError(f"normalization failed to preserve facets {sorted(report.bad_facets)}")
    return out


def extract_vertices(X: GramBorderMatrix, d: int, tol: float = 1e-6) -> PolytopeVRep:
    """Read vertices off a (near) rank-(d+1) bordered Gram matrix.

    Keeps the top d+1 eigenpairs (negatives clamped), forms a factor,
    rotates its first row onto e_1 by a Householder reflection, reads
    rows 2..n+1 as ``[1, v_i]``, and rescales each v_i to the unit
    sphere.  Raises ``BorderViolation`` when the rotated first row is
    not within ``tol`` of e_1 (the matrix does not carry the certificate
    structure) and ``ZeroVertex`` when a vertex cannot be rescaled.
    """
    if d + 1 > X.size:
        raise DimensionMismatch(f"d+1 = {d + 1} exceeds matrix order {X.size}")
    eig = sym_eig(X.data)
    values = np.clip(eig.values[:d + 1], 0.0, None)
    F = eig.vectors[:, :d + 1] * np.sqrt(values)
    r0 = F[0]
    nr0 = float(np.linalg.norm(r0))
    if nr0 < tol:
        raise BorderViolation(f"first factor row has norm {nr0:.3e}")
    F = F @ _householder_to_e1(r0 / nr0).T
    dev = float(np.abs(F[0] - np.eye(d + 1)[0]).max())
    if dev > tol:
        raise BorderViolation(f"rotated first row deviates from e_1 by {dev:.3e}")
    Vraw = F[1:1 + X.n, 1:]
    norms = np.linalg.norm(Vraw, axis=1)
    if norms.min() < tol:
        raise ZeroVertex(int(norms.argmin()), float(norms.min()))
    return PolytopeVRep(dim=d, vertices=Vraw / norms[:, None])


def verify_inscription(
    poly: PolytopeVRep,
    target: FacetIncidence,
    tol_fit: float = TOL_FIT,
    tol_side: float = TOL_SIDE,
) -> VerifyReport:
    """Check whether unit vertices realize a target incidence pattern.

    For each facet, least-squares fits ``h . v_i = 1`` over the incident
    vertices; the facet matches iff the fit residual stays within
    ``tol_fit`` and every non-incident vertex keeps slack >= ``tol_side``.
    Degenerate fits count the facet as bad rather than raising.
    """
    V = poly.vertices
    n, d = V.shape
    if target.n != n:
        raise DimensionMismatch(f"incidence is for {target.n} vertices, polytope has {n}")
    if np.abs(np.linalg.norm(V, axis=1) - 1.0).max() > 1e-6:
        raise ValueError("vertices must be normalized to the unit sphere before verification")
    m = target.m
    bad = []
    H = np.zeros((m, d))
    for j in range(m):
        idx = np.flatnonzero(target.on_facet[:, j])
        if idx.size == 0:
            bad.append(j)
            continue
        h, *_ = np.linalg.lstsq(V[idx], np.ones(idx.size), rcond=None)
        if not np.all(np.isfinite(h)):
            bad.append(j)
            continue
        H[j] = h
        if np.abs(V[idx] @ h - 1.0).max() > tol_fit:
            bad.append(j)
            continue
        others = np.flatnonzero(~target.on_facet[:, j])
        if others.size and (1.0 - V[others] @ h).min() < tol_side:
            bad.append(j)
    return VerifyReport(ok=not bad, bad_facets=tuple(bad), facet_normals=H)


def _totient(k: int) -> int:
    result, p, rem = k, 2, k
    while p * p <= rem:
        if rem % p == 0:
            while rem % p == 0:
                rem //= p
            result -= result // p
        p += 1
    if rem > 1:
        result -= result // rem
    return result


def count_types(n: int, d: int) -> int:
    """Number of combinatorial types of simplicial d-polytopes with n vertices.

    Closed forms exist for n = d+2 (floor(d/2)) and n = d+3 (a cyclic
    Burnside count involving Euler's totient over the odd divisors of
    d+3); other cases are unsupported.
    """
    if n == d + 2:
        return d // 2
    if n == d + 3:
        k = d + 3
        total = Fraction(2 ** (d // 2) - (d + 4) // 2)
        acc = sum(_totient(h) * 2 ** (k // h) for h in range(1, k + 1, 2) if k % h == 0)
        total += Fraction(acc, 4 * k)
        if total.denominator != 1:
            raise ArithmeticError(f"type count for n={n}, d={d} is not an integer: {total}")
        return int(total)
    raise Unsupported(n, d)


def save_polytope(path, poly: PolytopeVRep, incidence: FacetIncidence | None = None) -> None:
    """Write the polytope JSON: {"dim", "vertices", optional "facets"}."""
    doc: dict = {"dim": poly.dim, "vertices": poly.vertices.tolist()}
    if incidence is not None:
        doc["facets"] = [np.flatnonzero(incidence.on_facet[:, j]).tolist() for j in range(incidence.m)]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_polytope(path) -> tuple[PolytopeVRep, FacetIncidence | None]:
    """Read the polytope JSON; facets are optional (0-based vertex indices)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "dim" not in doc or "vertices" not in doc:
        raise ValueError("polytope JSON must be an object with 'dim' and 'vertices'")
    d = int(doc["dim"])
    poly = PolytopeVRep(dim=d, vertices=np.asarray(doc["vertices"], dtype=float))
    if "facets" not in doc or doc["facets"] is None:
        return poly, None
    facets = doc["facets"]
    on = np.zeros((poly.n, len(facets)), dtype=bool)
    for j, idx in enumerate(facets):
        idx = np.asarray(idx, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= poly.n):
            raise ValueError(f"facet {j} has vertex indices outside 0..{poly.n - 1}")
        on[idx, j] = True
    return poly, FacetIncidence(on)
