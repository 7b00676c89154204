"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Raised when a scenario configuration is malformed or violates an invariant."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SimulationDiverged(RuntimeError):
    """Raised when the plant integrator trips the frequency sanity limit."""

    def __init__(self, time_s: float, message: str, state_snapshot=None):
        self.time_s = time_s
        self.state_snapshot = state_snapshot
        super().__init__(f"t={time_s:.3f}s: {message}")
