"""Exception hierarchy shared by all leafcausal modules."""


class LeafCausalError(Exception):
    """Base class for all errors raised by this package."""


class PointOutsideChart(LeafCausalError):
    pass


class NonFiniteCoefficient(LeafCausalError):
    pass


class BasePointMismatch(LeafCausalError):
    pass


class InvalidCurve(LeafCausalError):
    pass


class IndexMismatch(LeafCausalError):
    pass


class NotSameLeaf(LeafCausalError):
    pass


class ChartChainNotFound(LeafCausalError):
    pass


class NotAnIsometry(LeafCausalError):
    pass


class SingularMetric(LeafCausalError):
    pass


class ZeroWarping(LeafCausalError):
    pass


class NoTimelikeDirections(LeafCausalError):
    pass


class LeftAtlas(LeafCausalError):
    pass


class StepUnderflow(LeafCausalError):
    pass


class NotNormal(LeafCausalError):
    pass


class NotTimelike(LeafCausalError):
    pass


class EmptyGrid(LeafCausalError):
    pass


class ResolutionTooCoarse(LeafCausalError):
    pass


class GraphHasCycle(LeafCausalError):
    """Longest-path diameter is undefined; the graph carries a closed
    transversely timelike loop, so the estimate is +inf at graph scale."""

    def __init__(self, msg, cycle=None):
        super().__init__(msg)
        self.cycle = cycle


class UnknownExample(LeafCausalError):
    pass


class ScenarioError(LeafCausalError):
    """Raised for malformed scenario files; carries the offending line."""

    def __init__(self, msg, line_no=None):
        super().__init__(msg if line_no is None else f"line {line_no}: {msg}")
        self.line_no = line_no


class ParseError(ScenarioError):
    pass


class UnknownKey(ScenarioError):
    pass


class MissingKey(ScenarioError):
    pass


class IoError(LeafCausalError):
    pass
