"""Exception types raised by the library.

Every failure mode that callers are expected to handle gets its own class;
all of them derive from SecondKindError so a bare ``except SecondKindError``
catches any library-level problem without swallowing genuine bugs.
"""

from __future__ import annotations


class SecondKindError(Exception):
    """Base class for all library errors."""


# curve construction and point handling

class DegenerateCurve(SecondKindError):
    """Two branch points coincide (or nearly coincide) at the working tolerance."""


class RootFindingFailure(SecondKindError):
    """Polynomial root polishing did not reach the required residual."""


class InvalidPair(SecondKindError):
    """(n, s) is not a valid curve signature: needs 2 <= n < s, gcd(n, s) = 1."""


class AtBranchPoint(SecondKindError):
    """Operation undefined at a Weierstrass point (y = 0)."""


class UnsupportedDegree(SecondKindError):
    """Projective connection term only implemented for n <= 5."""


# periods and path integration

class HomologyConstructionFailure(SecondKindError):
    """No chain orientation produced a certified canonical homology basis."""


class QuadratureNonConvergence(SecondKindError):
    """Adaptive quadrature hit the subdivision depth cap before converging."""


class PathThroughBranchPoint(SecondKindError):
    """Requested integration path cannot be routed around the branch points."""


# theta

class NotSiegelPoint(SecondKindError):
    """Imaginary part of the period matrix is not positive definite."""


# branch point / characteristic correspondence

class AmbiguousMatching(SecondKindError):
    """Theta-ratio matching of odd characteristics to branch points failed."""


class NoGamma(SecondKindError):
    """No (or more than one) odd characteristic annihilates the second winding derivative."""


class GammaCharacteristic(SecondKindError):
    """The distinguished characteristic of the point at infinity is not admissible here."""


# series engine

class ZeroLeadingCoefficient(SecondKindError):
    """Series division or root requires a nonzero declared leading coefficient."""


class OrderUnderflow(SecondKindError):
    """Truncation bookkeeping left an empty window of known coefficients."""


class IncompatibleSystem(SecondKindError):
    """Least-squares recovery residual exceeded its tolerance."""


# identity checks

class StencilDegenerate(SecondKindError):
    """Finite-difference stencil would collide with a branch point or theta zero."""
