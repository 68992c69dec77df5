"""Exception hierarchy shared by every module of the engine."""


class BivariantError(Exception):
    """Base class for all engine errors."""


class SchemaError(BivariantError):
    """A category document does not conform to the document schema."""


class NotComposable(BivariantError):
    pass


class PullbackUnavailable(BivariantError):
    """The cospan has no entry in the category's pullback table."""

    def __init__(self, left, right):
        super().__init__(f"no fiber product declared for cospan ({left}, {right})")
        self.left = left
        self.right = right


class UnknownLabel(BivariantError):
    pass


class NotSpecialized(BivariantError):
    pass


class NotConfined(BivariantError):
    pass


class NotIndependent(BivariantError):
    pass


class MissingOrientationData(BivariantError):
    pass


class NotApplicable(BivariantError):
    pass


class MembershipViolation(BivariantError):
    """An operation produced a generator outside the group it must land in."""


class ParseError(BivariantError):
    def __init__(self, message, position=None, expected=()):
        where = f" at offset {position}" if position is not None else ""
        exp = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message}{where}{exp}")
        self.position = position
        self.expected = tuple(expected)


class ResolveError(BivariantError):
    pass


class ContextError(BivariantError):
    pass
