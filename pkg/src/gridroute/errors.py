"""Exception types raised by the routing pipeline."""


class GridRouteError(Exception):
    """Base class for all package errors."""


class DuplicatePoint(GridRouteError):
    pass


class Disconnected(GridRouteError):
    pass


class Unreachable(GridRouteError):
    pass


class NonIncidentComposition(GridRouteError):
    pass


class BudgetExceeded(GridRouteError):
    pass


class DegreeTooHigh(GridRouteError):
    pass


class NotATree(GridRouteError):
    pass


class NotOnPortal(GridRouteError):
    pass


class NotOnHoleBoundary(GridRouteError):
    pass


class ProfileNotUnimodal(GridRouteError):
    pass


class ClosestPointNotLandmark(GridRouteError):
    pass


class NoPath(GridRouteError):
    pass


class HopBudgetExceeded(GridRouteError):
    pass


class GenerationFailed(GridRouteError):
    pass


class InfeasibleParams(GridRouteError):
    pass
