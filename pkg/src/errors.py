class StairtileError(Exception):
    """Base class for all library errors."""


# --- geometry ---

class GeometryError(StairtileError):
    pass


class NonCubeAlignedError(GeometryError):
    def __init__(self, tile):
        super().__init__(f"Tile {tile} does not lie on whole unit cubes with integer centers")
        self.tile = tile


class EmptyUnionError(GeometryError):
    def __init__(self):
        super().__init__("Cube union is empty")


# --- rules ---

class RuleError(StairtileError):
    pass


class UnknownRuleError(RuleError):
    def __init__(self, name: str):
        super().__init__(f"Unknown rule: {name}")
        self.name = name


class RuleValidationError(RuleError):
    """Raised by validate_rule; pinpoints the first violation."""

    def __init__(self, message: str, prototile: str):
        super().__init__(f"{prototile}: {message}")
        self.prototile = prototile


class OverlapError(RuleValidationError):
    def __init__(self, prototile: str, first: int, second: int):
        super().__init__(f"tiles {first} and {second} overlap", prototile)
        self.tiles = (first, second)


class OutOfBoundsError(RuleValidationError):
    def __init__(self, prototile: str, index: int):
        super().__init__(f"tile {index} leaves the inflated prototile", prototile)
        self.index = index


class AreaGapError(RuleValidationError):
    def __init__(self, prototile: str, deficit):
        super().__init__(f"image area falls short by {deficit}", prototile)
        self.deficit = deficit


class NotFoundError(RuleError):
    def __init__(self, m_max: int, word=None, prototile: str | None = None):
        detail = f" (word {word} on {prototile})" if word is not None else ""
        super().__init__(f"No uniform primitivity exponent up to {m_max}{detail}")
        self.m_max = m_max
        self.word = word
        self.prototile = prototile


class NotASuffixError(RuleError):
    def __init__(self, u, v):
        super().__init__(f"{u} is not a suffix of {v}")


# --- spectral ---

class SpectralError(StairtileError):
    pass


class NotPrimitiveError(SpectralError):
    def __init__(self):
        super().__init__("Matrix is not primitive")


class NoConvergenceError(SpectralError):
    def __init__(self, iterations: int):
        super().__init__(f"Power iteration did not converge after {iterations} iterations")
        self.iterations = iterations


# --- words ---

class WordError(StairtileError):
    pass


class GammaOutOfRangeError(WordError):
    def __init__(self, gamma):
        super().__init__(f"gamma must lie in [-1, 1], got {gamma}")
        self.gamma = gamma


class BadParametersError(WordError):
    pass


class WordTooLongError(WordError):
    def __init__(self, length: int, tiles: int, budget: int):
        super().__init__(
            f"Word of length {length} needs about {tiles} tiles, over the budget of {budget}"
        )
        self.length = length
        self.budget = budget


# --- matching ---

class MatchingError(StairtileError):
    pass


class UnboundedError(MatchingError):
    def __init__(self, left: int, right: int):
        super().__init__(f"No radius matches {left} points against {right} points")
        self.sizes = (left, right)


# --- report ---

class ReportError(StairtileError):
    pass


class ConfigParseError(ReportError):
    def __init__(self, path: str, line: int | None, problem: str):
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {problem}")
        self.line = line


class ScenarioUnknownError(ReportError):
    def __init__(self, name: str):
        super().__init__(f"Unknown scenario: {name}")
        self.name = name


class AssertionFailedError(ReportError):
    def __init__(self, failures: list[str]):
        super().__init__(f"{len(failures)} assertion(s) failed: " + "; ".join(failures))
        self.failures = failures
