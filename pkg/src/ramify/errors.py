"""Exception hierarchy.

Every error carries an optional ``hint`` naming the mathematical meaning of the
failure, which the CLI echoes in its JSON error payload.  ``exit_code`` groups
errors for the CLI: 2 for bad input, 3 for precision or internal failures.
"""

from __future__ import annotations


class RamifyError(Exception):
    exit_code = 2
    hint = ""

    def __init__(self, message: str = "", *, hint: str | None = None, step: int | None = None):
        super().__init__(message)
        if hint is not None:
            self.hint = hint
        self.step = step

    def at_step(self, step: int) -> "RamifyError":
        self.step = step
        return self

    def __str__(self) -> str:
        msg = super().__str__()
        if self.step is not None:
            return f"step {self.step}: {msg}"
        return msg


# finite fields
class NotPrime(RamifyError):
    hint = "the residue characteristic must be prime"


class ReducibleModulus(RamifyError):
    hint = "the residue field modulus must be irreducible over F_p"


class DivisionByZero(RamifyError, ZeroDivisionError):
    hint = "division by zero in the residue field"


class NoSuchRoot(RamifyError):
    hint = "no primitive m-th root of unity in the residue field: the tame C_m step needs m | q-1"


class NotCoprime(RamifyError):
    hint = "tame degree must be prime to p"


class FieldMismatch(RamifyError):
    hint = "operands live over different residue fields"


# series
class PrecisionExhausted(RamifyError):
    exit_code = 3
    hint = "working precision too small; rebuild at higher precision"

    def __init__(self, message: str = "", *, need: int | None = None, **kw):
        super().__init__(message, **kw)
        self.need = need


class ValuationIndeterminate(PrecisionExhausted):
    hint = "series is zero to its known precision; valuation undetermined"


class CompositionDomain(RamifyError):
    hint = "substituted series must have positive valuation"


class NotAUniformizerSeries(RamifyError):
    hint = "compositional inverse needs a series of valuation exactly 1"


class NotAPthPower(RamifyError):
    hint = "series is not a p-th power"


class NoNthRoot(RamifyError):
    hint = "series has no m-th root over this residue field"


# tower
class ExprSyntaxError(RamifyError):
    hint = "tower-spec expression does not parse"

    def __init__(self, message: str, offset: int, **kw):
        super().__init__(f"{message} at offset {offset}", **kw)
        self.offset = offset


class UnknownSymbol(RamifyError):
    hint = "expressions may use t, w and generators g1..gk built by earlier steps"


class NotWildTotallyRamified(RamifyError):
    hint = "Artin-Schreier step is unramified: reduced constant term lies outside wp(F_q)"


class TrivialStep(RamifyError):
    hint = "Artin-Schreier equation splits: right-hand side lies in wp(E)"


class SingularLeadingSystem(RamifyError):
    exit_code = 3
    hint = "leading system for the new uniformizer is singular"


class SpecError(RamifyError):
    hint = "malformed tower specification"


# galois
class ExtensionNotGalois(RamifyError):
    hint = "fewer automorphisms than the degree survived the residual filter"


class AmbiguousCorrection(RamifyError):
    exit_code = 3
    hint = "two corrections agree to working precision; raise precision"


class ClosureFailure(RamifyError):
    exit_code = 3
    hint = "automorphism composition does not close; enumeration or precision bug"


# ramification / groups
class NonFiltration(RamifyError):
    exit_code = 3
    hint = "lower ramification sets are not subgroups"


class NotNormal(RamifyError):
    hint = "subgroup is not normal"


class NotPGroup(RamifyError):
    hint = "operation is defined for p-groups only"


class NotAnAutomorphism(RamifyError):
    hint = "action permutation is not a group automorphism of the right order"


# witnesses
class InvalidBreak(RamifyError):
    hint = "an Artin-Schreier break must be prime to p"


class ConstraintViolation(RamifyError):
    hint = "H(1,1) witness needs p > 2, p does not divide b, a > b, a != 0 and a != -b mod p"


class BreaksNotDisjoint(RamifyError):
    exit_code = 1
    hint = "composite law needs disjoint non-log break multisets for the factors"
