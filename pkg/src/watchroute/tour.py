"""Closed polygonal tours with cached length and seen-region summaries."""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import ToleranceConfig
from .geom import Domain, Point, seg_len, shoelace
import numpy as np


@dataclass
class Tour:
    """A closed route.  `vertices` does not repeat the first point; a
    single-vertex tour is the degenerate stand-still route."""

    vertices: list[Point]
    depot: Point | None = None
    seen: object = None  # VisibilityRegion, set lazily
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = [(float(x), float(y)) for x, y in self.vertices]
        if not self.vertices:
            raise ValueError("tour needs at least one vertex")

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) == 1

    @property
    def length(self) -> float:
        vs = self.vertices
        if len(vs) == 1:
            return 0.0
        return sum(seg_len(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))

    def closed_chain(self) -> list[Point]:
        if self.degenerate:
            return list(self.vertices)
        return self.vertices + [self.vertices[0]]

    def signed_area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        return shoelace(np.asarray(self.vertices))

    def oriented_cw(self) -> "Tour":
        """Same tour traversed clockwise (reverses when counterclockwise)."""
        if self.signed_area() > 0:
            vs = [self.vertices[0]] + self.vertices[:0:-1]
            return Tour(vs, self.depot, self.seen, dict(self.metadata))
        return self

    def measure_seen(self, domain: Domain, tol: ToleranceConfig | None = None):
        """Recompute the seen region from scratch (visibility of the cycle)."""
        from .visibility import visibility_of_chain

        vr = visibility_of_chain(domain, self.closed_chain(), tol)
        self.seen = vr
        return vr
