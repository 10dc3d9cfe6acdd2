"""Shared fixtures and independent test oracles.

The oracles here deliberately use different machinery than the library:
dense ray casting for visibility, Monte-Carlo sampling for areas and
memberships, and shapely+scipy for geodesics.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
import shapely
from shapely.geometry import Polygon as ShPolygon

from watchroute import SimplePolygon, l_shape


@pytest.fixture
def unit_square():
    return SimplePolygon([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def lshape():
    return l_shape()


class RayOracle:
    """3600-ray visibility oracle: radial distance table around a viewpoint.

    Membership probes compare against the hit distances of the two bracketing
    rays conservatively; probes falling between the brackets are classified
    by the nearer bracket, which is what the agreement-rate tolerance absorbs.
    """

    def __init__(self, domain, x, n_rays: int = 3600, offset: float = 0.0):
        self.x = (float(x[0]), float(x[1]))
        self.n = n_rays
        segs = domain.boundary_segments()
        p, q = segs[:, 0, :], segs[:, 1, :]
        r = q - p
        ang = np.linspace(0, 2 * math.pi, n_rays, endpoint=False) + offset
        d = np.stack([np.cos(ang), np.sin(ang)], 1)
        px = p[:, 0] - self.x[0]
        py = p[:, 1] - self.x[1]
        den = d[:, 0][:, None] * r[:, 1][None, :] - d[:, 1][:, None] * r[:, 0][None, :]
        ok = np.abs(den) > 1e-14
        den_s = np.where(ok, den, 1.0)
        t = (px[None, :] * r[:, 1][None, :] - py[None, :] * r[:, 0][None, :]) / den_s
        u = (px[None, :] * d[:, 1][:, None] - py[None, :] * d[:, 0][:, None]) / den_s
        valid = ok & (t > 1e-12) & (u >= -1e-12) & (u <= 1 + 1e-12)
        t = np.where(valid, t, np.inf)
        self.radius = t.min(axis=1)
        self.radius = np.where(np.isfinite(self.radius), self.radius, 0.0)

    def area(self) -> float:
        return float(0.5 * np.sum(self.radius ** 2) * (2 * math.pi / self.n))

    def sees(self, pts: np.ndarray) -> np.ndarray:
        d = pts - np.asarray(self.x)
        ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2 * math.pi)
        dist = np.hypot(d[:, 0], d[:, 1])
        idx = np.floor(ang / (2 * math.pi / self.n)).astype(int) % self.n
        r_lo = self.radius[idx]
        r_hi = self.radius[(idx + 1) % self.n]
        return dist <= np.maximum(r_lo, r_hi) + 1e-9

    def classify(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(visible, confident): probes between the bracketing rays' radii are
        inside the oracle's own discretization band, where it abstains."""
        d = pts - np.asarray(self.x)
        ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2 * math.pi)
        dist = np.hypot(d[:, 0], d[:, 1])
        idx = np.floor(ang / (2 * math.pi / self.n)).astype(int) % self.n
        r_lo = self.radius[idx]
        r_hi = self.radius[(idx + 1) % self.n]
        near = np.minimum(r_lo, r_hi)
        far = np.maximum(r_lo, r_hi)
        visible = dist <= far + 1e-9
        confident = (dist <= near * (1 - 1e-6)) | (dist > far * (1 + 1e-6) + 1e-9)
        return visible, confident


def region_membership(region, pts: np.ndarray) -> np.ndarray:
    geoms = shapely.points(pts[:, 0], pts[:, 1])
    return shapely.covers(region.shapely(), geoms)


def monte_carlo_area(region, bbox, n: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = bbox
    pts = np.column_stack([rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)])
    frac = float(np.mean(region_membership(region, pts)))
    return frac * (x1 - x0) * (y1 - y0)


def shapely_geodesic_oracle(poly, pairs):
    """Independent geodesic lengths via shapely covers + scipy Dijkstra over
    the visibility graph of the polygon vertices and the query points."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path as sp

    sh = ShPolygon(poly.vertices)
    nodes = list(poly.vertices)
    offsets = []
    for a, b in pairs:
        for p in (a, b):
            nodes.append(p)
    m = len(nodes)
    rows, cols, data = [], [], []
    for i in range(m):
        for j in range(i + 1, m):
            seg = shapely.linestrings([nodes[i], nodes[j]])
            if shapely.covers(sh, seg):
                d = math.hypot(nodes[i][0] - nodes[j][0], nodes[i][1] - nodes[j][1])
                rows += [i, j]
                cols += [j, i]
                data += [d, d]
    g = csr_matrix((data, (rows, cols)), shape=(m, m))
    dist = sp(g, method="D", directed=False)
    out = []
    base = len(poly.vertices)
    for k in range(len(pairs)):
        out.append(float(dist[base + 2 * k, base + 2 * k + 1]))
    return out
