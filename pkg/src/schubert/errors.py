"""Exception hierarchy.

The CLI maps the three base classes onto exit codes: ``InputError`` -> 2,
``InvariantFailure`` -> 3, ``PreconditionError`` -> 4.
"""


class SchubertError(Exception):
    pass


class InputError(SchubertError, ValueError):
    pass


class InvariantFailure(SchubertError, RuntimeError):
    """An internal consistency check failed; this indicates a bug."""


class PreconditionError(SchubertError, ValueError):
    pass


# parsing
class ParseError(InputError):
    pass


class NonBinaryEntry(ParseError):
    pass


class DuplicateOneInRow(ParseError):
    pass


class DuplicateOneInColumn(ParseError):
    pass


class RaggedRows(ParseError):
    pass


# linear algebra
class NotSquare(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class SingularGram(InvariantFailure):
    pass


# varieties
class NotRegularPoint(PreconditionError):
    pass


class FrameDegenerate(InvariantFailure):
    pass


class SamplingFailure(InvariantFailure):
    pass


# witnesses
class IdentityPermutation(PreconditionError):
    pass


class ZeroParameter(InputError):
    pass


class VexillaryInput(PreconditionError):
    pass


class StructureViolation(InvariantFailure):
    pass


# decompositions / symmetry
class NotVexillary(PreconditionError):
    pass


class TopLeftNotInDiagram(PreconditionError):
    pass


class NotGr2(PreconditionError):
    pass


class ShapeViolation(InputError):
    pass


class DegenerateRowSpace(InvariantFailure):
    pass


class InternalDisagreement(InvariantFailure):
    pass
