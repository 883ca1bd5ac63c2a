"""Exception hierarchy shared across the package."""


class CoverError(ValueError):
    """Invalid s-cover input."""


class NonUniformMultiplicity(CoverError):
    def __init__(self, j1: int, j2: int, counts: tuple[int, int]):
        self.j1, self.j2, self.counts = j1, j2, counts
        super().__init__(
            f"elements {j1} and {j2} are covered {counts[0]} and {counts[1]} times"
        )


class EmptyMember(CoverError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"member {i} is empty")


class NotSubset(CoverError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"member {i} is not contained in the base set")


class MemberEqualsBase(CoverError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"member {i} equals the base set; its complement is empty")


class NotReducible(CoverError):
    """The cover (or its complement) admits no decomposition into 1-covers."""


class InvalidCover(CoverError):
    """Cover does not fit the hypotheses of the requested inequality."""


class GenerationFailed(RuntimeError):
    """Random generation exhausted its retry budget."""


class OriginOutside(ValueError):
    """A section-based inequality needs the origin inside the body."""


class NotUnconditional(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class HeightExceedsOne(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class UnsupportedDim(ValueError):
    pass


class UnsupportedId(KeyError):
    pass


class DominationViolated(AssertionError):
    def __init__(self, z, lhs, rhs):
        self.z, self.lhs, self.rhs = z, lhs, rhs
        super().__init__(f"sup-convolution {lhs} exceeds dominating value {rhs} at {z}")


class LogConcavityViolated(AssertionError):
    def __init__(self, x, y, lam):
        self.x, self.y, self.lam = x, y, lam
        super().__init__(f"log-concavity fails at x={x}, y={y}, lambda={lam}")
