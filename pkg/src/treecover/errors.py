"""Exception hierarchy shared by every stage of the pipeline."""


class TreeCoverError(Exception):
    """Base class for all errors raised by treecover."""


class InvalidEdge(TreeCoverError, ValueError):
    pass


class InvalidVertex(TreeCoverError, ValueError):
    pass


class NotAnEdge(TreeCoverError, ValueError):
    pass


class NotAcyclic(TreeCoverError, ValueError):
    pass


class InvalidMass(TreeCoverError, ValueError):
    pass


class EmptyFolnerSet(TreeCoverError, ValueError):
    pass


class NotASubrelation(TreeCoverError, ValueError):
    pass


class IncompletePartition(TreeCoverError, ValueError):
    pass


class DegreeBound(TreeCoverError, ValueError):
    pass


class NotFunctionalGraph(TreeCoverError, ValueError):
    pass


class NotNested(TreeCoverError, ValueError):
    pass


class AnchorConflict(TreeCoverError, RuntimeError):
    def __init__(self, component, vertices):
        self.component = component
        self.vertices = tuple(vertices)
        super().__init__(
            f"component containing {component} has several out-degree-1 "
            f"vertices: {list(self.vertices)}"
        )


class DichotomyViolation(TreeCoverError, RuntimeError):
    def __init__(self, edge, theta0, theta1):
        self.edge = edge
        self.theta0 = theta0
        self.theta1 = theta1
        super().__init__(
            f"edge {edge} lies outside [5/12, 7/12] but is not oriented: "
            f"theta0={theta0}, theta1={theta1}"
        )


class InsufficientInvariance(TreeCoverError, RuntimeError):
    def __init__(self, measured, required, radius):
        self.measured = measured
        self.required = required
        self.radius = radius
        super().__init__(
            f"invariance defect {measured} over pairs at distance < {radius} "
            f"is not below {required}"
        )


class ConditionFailure(TreeCoverError, RuntimeError):
    def __init__(self, report):
        self.report = report
        failed = [k for k, v in report.items() if isinstance(v, dict) and not v.get("ok", True)]
        super().__init__(f"orientation conditions failed: {failed}")
