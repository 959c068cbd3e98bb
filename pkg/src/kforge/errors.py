"""Shared exception types.

Exit-code mapping for the CLI lives in kforge.cli: validation-type errors
map to 1, parse errors to 2, bound errors to 3.
"""


class KforgeError(Exception):
    """Base class for all package errors."""


class ValidationError(KforgeError):
    """A structural invariant failed (bad morphism, bad witness, ...)."""


class BoundExceeded(KforgeError):
    """An exhaustive operation was asked to run past its configured bound."""


class StageExplosion(BoundExceeded):
    """A universal-model stage would exceed the configured point cap."""


class NotParallel(ValidationError):
    """Two morphisms were expected to share domain and codomain."""


class NotPreorder(ValidationError):
    """A frame was expected to be reflexive and transitive."""

    def __init__(self, witness, message="relation is not a preorder"):
        super().__init__(f"{message}: witness {witness}")
        self.witness = witness


class NotS4(ValidationError):
    """An algebra was expected to satisfy the S4 equations."""


class NotAtomTarget(ValidationError):
    """An adjoint image of an atom failed to be an atom."""


class NotIrreducible(ValidationError):
    """A model was expected to be irreducible."""


class InvalidWitness(ValidationError):
    """A reduction witness failed re-checking against its model."""


class NoStage(ValidationError):
    """Stage factorization exhausted the chain (malformed input cocone)."""


class ParseError(KforgeError):
    """Malformed input file or config."""
