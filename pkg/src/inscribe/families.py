"""Closed-form inscriptions and dual certificates for four polytope families.

Each family (regular n-gon, regular simplex, cube, cross-polytope) is
facet transitive, so its certificate collapses to three scalars
(lambda_bar, u_bar, w_bar) and the largest eigenvalue of M M^T has a
closed form.  The numeric eigenvalue route is kept separate so it can
serve as an independent oracle for the closed forms.

Orderings are fixed so the dual matrix M matches the circulant /
sign-vector structure used to derive the eigenvalues: n-gon facet i
holds vertices {i, i+1 mod n}; simplex vertex i lies opposite facet i
(the circulant form of M forces this, and the triangle then agrees with
the 3-gon); cube vertices and cross-polytope facets enumerate sign
vectors in binary-counter order with the first coordinate flipping
slowest.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sqrt, tan

import numpy as np

from .core import (
    FacetIncidence,
    GramBorderMatrix,
    Inscription,
    PolytopeVRep,
    slack_from_reps,
)
from .errors import InvalidParam
from .numerics import sym_eig
from .sdp import DualCertificate, SdpInstance, WeightMatrix, dual_matrix

FAMILY_KINDS = ("ngon", "simplex", "cube", "cross_polytope")


@dataclass(frozen=True)
class FamilySpec:
    """One of the four canonical families: kind plus its size parameter
    (n for the n-gon, the dimension d for the others)."""

    kind: str
    param: int

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise InvalidParam(f"unknown family kind {self.kind!r}, expected one of {FAMILY_KINDS}")
        if self.kind == "ngon" and self.param < 3:
            raise InvalidParam(f"an n-gon needs n >= 3, got {self.param}")
        if self.kind != "ngon" and self.param < 2:
            raise InvalidParam(f"{self.kind} needs dimension >= 2, got {self.param}")


@dataclass(frozen=True)
class FamilyCertificate:
    """Canonical inscription with its scalar dual certificate.

    ``lambda_max_closed_form`` is the analytic largest eigenvalue of
    M M^T; it always equals ``4 + 4 u_bar`` (the dual feasibility bound
    binds with equality for these families).
    """

    spec: FamilySpec
    lambda_bar: float
    u_bar: float
    w_bar: float
    lambda_max_closed_form: float
    inscription: Inscription
    incidence: FacetIncidence

    @property
    def dim(self) -> int:
        return self.inscription.polytope.dim

    @property
    def n(self) -> int:
        return self.incidence.n

    @property
    def m(self) -> int:
        return self.incidence.m

    @property
    def vertices_per_facet(self) -> int:
        return int(self.incidence.on_facet[:, 0].sum())

    @property
    def h_norm_sq(self) -> float:
        h0 = self.inscription.facet_normals[0]
        return float(h0 @ h0)

    def weight_matrix(self) -> WeightMatrix:
        return WeightMatrix.uniform(self.incidence, self.lambda_bar)

    def dual_certificate(self) -> DualCertificate:
        zeros = int(self.incidence.on_facet.sum())
        return DualCertificate(
            u=np.full(self.n, self.u_bar),
            w=np.full(zeros, self.w_bar),
            weights=self.weight_matrix(),
        )

    def sdp_instance(self) -> SdpInstance:
        return SdpInstance(incidence=self.incidence, weights=self.weight_matrix(), d=self.dim)

    def gram_matrix(self) -> GramBorderMatrix:
        return GramBorderMatrix.from_inscription(self.inscription)


def _sign_grid(d: int) -> np.ndarray:
    """All 2^d sign vectors, binary-counter order, first coordinate slowest."""
    out = np.empty((2 ** d, d))
    for j in range(2 ** d):
        for i in range(d):
            out[j, i] = 1.0 if ((j >> (d - 1 - i)) & 1) == 0 else -1.0
    return out


def _build_ngon(n: int) -> tuple[Inscription, FacetIncidence, dict]:
    ang = 2.0 * pi * np.arange(n) / n
    V = np.column_stack([np.cos(ang), np.sin(ang)])
    mid = (2.0 * np.arange(n) + 1.0) * pi / n
    H = np.column_stack([np.cos(mid), np.sin(mid)]) / cos(pi / n)
    on = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    on[idx, idx] = True
    on[(idx + 1) % n, idx] = True
    c2 = cos(pi / n) ** 2
    scalars = dict(
        lambda_bar=2.0 / (n * c2),
        u_bar=tan(pi / n) ** 2,
        w_bar=(n - 2.0) / (n * c2),
        lambda_max=4.0 / c2,
    )
    return Inscription(PolytopeVRep(2, V), H), FacetIncidence(on), scalars


def _build_simplex(d: int) -> tuple[Inscription, FacetIncidence, dict]:
    n = d + 1
    Y = np.eye(n) - np.full((n, n), 1.0 / n)
    Y *= sqrt(n / d)  # unit rows, pairwise inner product -1/d
    ones_dir = np.full(n, 1.0 / sqrt(n))
    v = ones_dir - np.eye(n)[0]
    Q = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    V = (Y @ Q.T)[:, 1:]  # rotate the all-ones direction onto e_1, drop it
    H = -d * V  # vertex i lies opposite facet i
    on = ~np.eye(n, dtype=bool)
    scalars = dict(
        lambda_bar=2.0 * d * d / (d + 1.0),
        u_bar=d * d - 1.0,
        w_bar=2.0 * d / (d + 1.0),
        lambda_max=4.0 * d * d,
    )
    return Inscription(PolytopeVRep(d, V), H), FacetIncidence(on), scalars


def _build_cube(d: int) -> tuple[Inscription, FacetIncidence, dict]:
    signs = _sign_grid(d)
    V = signs / sqrt(d)
    H = np.vstack([np.eye(d), -np.eye(d)]) * sqrt(d)
    on = np.hstack([signs > 0, signs < 0])
    scalars = dict(
        lambda_bar=d * 2.0 ** (1 - d),
        u_bar=-1.0 + d * d * 2.0 ** (1 - d),
        w_bar=d * 2.0 ** (1 - d),
        lambda_max=d * d * 2.0 ** (3 - d),
    )
    return Inscription(PolytopeVRep(d, V), H), FacetIncidence(on), scalars


def _build_cross_polytope(d: int) -> tuple[Inscription, FacetIncidence, dict]:
    V = np.vstack([np.eye(d), -np.eye(d)])
    H = _sign_grid(d)
    on = np.vstack([H.T > 0, H.T < 0])
    scalars = dict(
        lambda_bar=1.0,
        u_bar=-1.0 + 2.0 ** (d - 1),
        w_bar=1.0,
        lambda_max=2.0 ** (d + 1),
    )
    return Inscription(PolytopeVRep(d, V), H), FacetIncidence(on), scalars


_BUILDERS = {
    "ngon": _build_ngon,
    "simplex": _build_simplex,
    "cube": _build_cube,
    "cross_polytope": _build_cross_polytope,
}


def build_family(spec: FamilySpec) -> FamilyCertificate:
    """Canonical inscription, incidence, and scalar certificate of a family."""
    insc, incidence, scalars = _BUILDERS[spec.kind](spec.param)
    computed = slack_from_reps(insc.polytope, insc.facet_normals).zero_set
    if not np.array_equal(computed.on_facet, incidence.on_facet):
        raise InvalidParam(f"constructed {spec.kind}({spec.param}) slack pattern disagrees with its incidence")
    return FamilyCertificate(
        spec=spec,
        lambda_bar=scalars["lambda_bar"],
        u_bar=scalars["u_bar"],
        w_bar=scalars["w_bar"],
        lambda_max_closed_form=scalars["lambda_max"],
        inscription=insc,
        incidence=incidence,
    )


def family_lambda_max_numeric(cert: FamilyCertificate) -> float:
    """Numeric largest eigenvalue of M M^T for the family certificate.

    Builds M from the scalars and the incidence and eigensolves, staying
    independent of the closed forms it cross-checks.
    """
    M = dual_matrix(cert.dual_certificate(), cert.incidence)
    return float(sym_eig(M @ M.T).values[0])
