"""Exception hierarchy shared by all modules."""


class InscribeError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatch(InscribeError):
    """Inputs have inconsistent shapes or dimensions."""


class NegativeSlack(InscribeError):
    """A slack entry is negative beyond tolerance (V/H inconsistent)."""

    def __init__(self, i: int, j: int, value: float):
        super().__init__(f"slack entry ({i}, {j}) = {value:.3e} is negative beyond tolerance")
        self.i = i
        self.j = j
        self.value = value


class DegenerateIncidence(InscribeError):
    """A vertex-facet incidence violates its structural invariants."""


class NotSimplicial(InscribeError):
    """A fitted facet hyperplane contains an extra vertex."""


class NotFullDimensional(InscribeError):
    """The vertices do not affinely span the claimed dimension."""


class InteriorPoint(InscribeError):
    """A vertex lies on no facet (it is interior to the hull)."""

    def __init__(self, k: int):
        super().__init__(f"vertex {k} lies on no facet")
        self.k = k


class RetryLimit(InscribeError):
    """Random generation exhausted its resampling budget."""


class CentroidOnSphere(InscribeError):
    """The vertex centroid is (numerically) on the sphere; the projective map is singular."""


class BorderViolation(InscribeError):
    """A factor of a PSD matrix does not carry the expected all-ones border."""


class ZeroVertex(InscribeError):
    """An extracted vertex has vanishing norm and cannot be scaled to the sphere."""

    def __init__(self, i: int, norm: float):
        super().__init__(f"extracted vertex {i} has norm {norm:.3e}")
        self.i = i
        self.norm = norm


class Unsupported(InscribeError):
    """Parameters outside the supported (n, d) cases."""

    def __init__(self, n: int, d: int):
        super().__init__(f"no combinatorial-type count available for n={n}, d={d}")
        self.n = n
        self.d = d


class NonFinite(InscribeError):
    """A matrix contains NaN or Inf entries."""


class LengthMismatch(InscribeError):
    """A vector does not match the number of zero positions it indexes."""


class NotConverged(InscribeError):
    """An iterative solve stopped at its iteration cap before reaching tolerance."""


class InvalidParam(InscribeError):
    """A family specification is outside its valid parameter range."""


class InfeasiblePoint(InscribeError):
    """A point fails the feasibility check required for a duality-gap evaluation."""

    def __init__(self, side: str, detail: str = ""):
        msg = f"{side} point is infeasible"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.side = side
