"""Error taxonomy shared across the package.

Everything raised on purpose derives from MwkError so callers (and the CLI)
can separate domain failures from genuine bugs.
"""


class MwkError(Exception):
    pass


class ZeroInput(MwkError):
    "an operation received 0 where a nonzero rational is required"


class ZeroEntry(MwkError):
    "a symbol entry was 0"


class FactorizationOverflow(MwkError):
    "integer exceeds the configured factorization digit cap"


class NotPrime(MwkError):
    pass


class NotOddPrime(NotPrime):
    pass


class PlaceMismatch(MwkError):
    "operands live over different places"


class DegreeMismatch(MwkError):
    "operands have incompatible degrees"


class UnsupportedDegree(MwkError):
    "the operation is only defined in certain degrees"


class InconsistentInvariants(MwkError):
    "a hand-built normal form violates the pullback compatibility conditions"


class NotInKernel(MwkError):
    "parity is only defined on kernel elements (all coordinates 1)"


class DyadicUnsupported(MwkError):
    "splitting data at p = 2 is refused"


class InvariantViolation(MwkError):
    "internal consistency assertion failed; indicates a bug, not bad input"


class ParseError(MwkError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
