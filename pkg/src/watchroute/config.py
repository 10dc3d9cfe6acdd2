"""Global tolerance configuration.

All geometric predicates are evaluated in double precision with tolerances
relative to the instance's bounding-box scale.  A single config object is
threaded through (or defaulted) everywhere; exact arithmetic is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances: coordinates (tau), areas (tau_area), lengths (tau_len).

    Absolute thresholds are obtained by multiplying with the instance scale
    (bounding-box diagonal) or its square for areas.
    """

    tau: float = 1e-9
    tau_area: float = 1e-9
    tau_len: float = 1e-9

    def __post_init__(self):
        for name in ("tau", "tau_area", "tau_len"):
            v = getattr(self, name)
            if not (0.0 < v <= 1e-6):
                raise ValueError(f"{name} must be in (0, 1e-6], got {v}")

    def abs_coord(self, scale: float) -> float:
        return self.tau * max(scale, 1e-300)

    def abs_area(self, scale: float) -> float:
        return self.tau_area * max(scale, 1e-300) ** 2

    def abs_len(self, scale: float) -> float:
        return self.tau_len * max(scale, 1e-300)


DEFAULT_TOL = ToleranceConfig()
