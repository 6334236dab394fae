"""Seeded k-means on the non-port route endpoints, great-circle distance."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..models.route import RouteProfile
from ..utils.geo import haversine_m

MAX_ITER = 100


def _centroid(lat: np.ndarray, lon: np.ndarray) -> tuple[float, float]:
    """Spherical mean via unit vectors."""
    phi, lmb = np.radians(lat), np.radians(lon)
    x = np.mean(np.cos(phi) * np.cos(lmb))
    y = np.mean(np.cos(phi) * np.sin(lmb))
    z = np.mean(np.sin(phi))
    return float(np.degrees(np.arctan2(z, np.hypot(x, y)))), float(np.degrees(np.arctan2(y, x)))


def _kmeans(lat: np.ndarray, lon: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    n = len(lat)
    rng = np.random.default_rng(seed)
    # k-means++ seeding
    first = int(rng.integers(n))
    centers = [(lat[first], lon[first])]
    for _ in range(1, k):
        d = np.min([haversine_m(lat, lon, c[0], c[1]) for c in centers], axis=0)
        w = d * d
        idx = int(rng.choice(n, p=w / w.sum())) if w.sum() > 0 else int(rng.integers(n))
        centers.append((lat[idx], lon[idx]))
    centers_arr = np.array(centers, dtype=float)

    labels = np.full(n, -1)
    for _ in range(MAX_ITER):
        dist = np.stack([haversine_m(lat, lon, c[0], c[1]) for c in centers_arr])
        new = np.argmin(dist, axis=0)
        if np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            members = labels == j
            if members.any():
                centers_arr[j] = _centroid(lat[members], lon[members])
    return labels, centers_arr


def group_routes(
    routes: Sequence[RouteProfile],
    k: int,
    seed: int,
    port: tuple[float, float] | None = None,
) -> dict[str, int]:
    """Route id -> group number (1 = centre closest to the port)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(routes):
        raise ValueError(f"k={k} exceeds the {len(routes)} routes available")
    ends = [r.far_endpoint for r in routes]
    lat = np.array([p.lat for p in ends])
    lon = np.array([p.lon for p in ends])
    if port is None:
        port_pts = [r.port_endpoint for r in routes]
        port = _centroid(np.array([p.lat for p in port_pts]), np.array([p.lon for p in port_pts]))
    if k == len(routes):
        labels, centers = np.arange(k), np.column_stack([lat, lon])
    else:
        labels, centers = _kmeans(lat, lon, k, seed)
    from_port = haversine_m(centers[:, 0], centers[:, 1], port[0], port[1])
    order = np.argsort(from_port, kind="stable")
    rank = np.empty(k, dtype=int)
    rank[order] = np.arange(1, k + 1)
    return {r.id: int(rank[labels[i]]) for i, r in enumerate(routes)}
