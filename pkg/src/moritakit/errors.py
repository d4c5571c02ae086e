"""Error types shared across the package.

``DomainError`` subclasses mean the inputs were well-formed but violate a
mathematical precondition (not principal, mismatched middle algebra, ...).
``SchemaError`` means an input document could not even be decoded.
"""

from __future__ import annotations


class SchemaError(ValueError):
    """Malformed input document: missing keys, wrong shapes, bad types."""


class DomainError(ValueError):
    """Well-formed input that violates a mathematical precondition."""


class NotPSD(DomainError):
    """A Gram matrix has an eigendirection below -tol."""


class MismatchedMiddle(DomainError):
    """Tensor factors do not share the middle groupoid/algebra."""


class NotPrincipal(DomainError):
    """Bundle operation that needs (right) principality got a non-principal bundle."""


class NotBiprincipal(DomainError):
    """Bundle inversion needs a biprincipal bundle."""


class NotStarHom(DomainError):
    """Claimed algebra map is not a unital *-homomorphism."""


class NotEquivalence(DomainError):
    """Conjugation needs an equivalence bimodule/correspondence."""


class NonIntegral(DomainError):
    """A dimension count that must be a nonnegative integer is not."""


class NotTracial(DomainError):
    """Standard forms need a tracial faithful state."""


class NotProjection(DomainError):
    """The averaging operator failed to be an orthogonal projection."""


class MultiplierMismatch(DomainError):
    """Representation multipliers are not conjugate to each other."""


class GroupMismatch(DomainError):
    """Two representations do not live over the same group."""


class BadCocycle(DomainError):
    """Phase table violates the 2-cocycle identity or normalization."""
