"""Exception hierarchy for normlift.

Library code raises these; only the command line catches them.
"""


class NormLiftError(Exception):
    """Base class for every error raised by normlift."""


# --- Field construction ---

class NotPrimeError(NormLiftError):
    """The residue characteristic is not a prime."""


class NotIrreducibleModPError(NormLiftError):
    """The unramified polynomial is not monic irreducible of degree f modulo p."""


class NotEisensteinError(NormLiftError):
    """The ramified polynomial is not Eisenstein over the unramified ring."""


class FieldMismatchError(NormLiftError):
    """Operands live over different field descriptors."""


# --- Element arithmetic ---

class NotAUnitError(NormLiftError):
    """An inverse was requested for something that is not a unit at precision."""


class InexactDivisionError(NormLiftError):
    """The dividend is not divisible by the divisor."""


class PrecisionExhaustedError(NormLiftError):
    """Too few certified digits remain to finish the computation."""


class PrecisionAmbiguousError(NormLiftError):
    """A result depends on digits that are not known at the current precision."""


# --- Series ---

class ConstantTermNotSmallError(NormLiftError):
    """Composition with a series whose constant term is a unit."""


class NotInvertibleError(NormLiftError):
    """Compositional inverse requested for a series whose linear term is not a unit."""


class ShiftNotSmallError(NormLiftError):
    """Taylor shift by an element outside the maximal ideal."""


class NoSmallFixedPointError(NormLiftError):
    """The series has no certified fixed point in the maximal ideal."""


class NotDistinguishedError(NormLiftError):
    """A Frobenius series does not have the required shape (reduction T^q, small linear term)."""


class NotAUnitTailError(NormLiftError):
    """The norm of T is not T times a unit, so Laurent inputs cannot be handled."""


class LinearCoefficientZeroError(NormLiftError):
    """P'(0) vanishes at the working precision."""


class MalformedGroupDataError(NormLiftError):
    """Labels, product table or constant terms of a lift candidate are inconsistent."""


# --- Weights ---

class DNotPrimeError(NormLiftError):
    """The classifier needs a prime order."""


# --- Wire format and settings ---

class SchemaError(NormLiftError):
    """Input JSON does not match the schema."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


class SettingsError(NormLiftError):
    """The settings file holds an invalid value."""
