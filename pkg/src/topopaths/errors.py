"""Exception types raised by the planning pipeline."""


class PlanningError(Exception):
    """Base class; ``stage`` names the pipeline stage that failed."""

    stage = "planner"

    def __init__(self, message, stage=None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage

    def __str__(self):
        return f"{type(self).__name__} [{self.stage}]: {self.args[0]}"


class InvalidQuery(PlanningError):
    stage = "query"


class SamplingExhausted(PlanningError):
    stage = "sampling"


class StartGoalDisconnected(PlanningError):
    stage = "roadmap"


class EndpointMismatch(ValueError):
    pass


class TooLarge(RuntimeError):
    pass


class BadSpec(ValueError):
    pass
