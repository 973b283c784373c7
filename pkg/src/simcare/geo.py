"""Geography: great-circle distances with a road detour factor, travel times.

Distances are haversine great-circle kilometres scaled by a constant detour
factor to approximate road network length. Travel happens at a flat 60 km/h,
expressed in days to match the simulation clock.
"""

from __future__ import annotations

import math

EARTH_RADIUS_KM = 6371.0
DETOUR_FACTOR = 1.417
SPEED_KM_PER_DAY = 60.0 * 24.0


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in km between two WGS84 points."""
    p1 = math.radians(lat1)
    p2 = math.radians(lat2)
    dp = math.radians(lat2 - lat1)
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


def road_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Road distance estimate: haversine times the detour factor."""
    return DETOUR_FACTOR * haversine_km(lat1, lon1, lat2, lon2)


def travel_days(distance_km: float) -> float:
    """Travel time in days for a road distance at 60 km/h."""
    return distance_km / SPEED_KM_PER_DAY


def pairwise_road_km(lats_a, lons_a, lats_b, lons_b):
    """Road distance matrix, shape (len(a), len(b)), as a float array."""
    import numpy as np

    pa = np.radians(np.asarray(lats_a, dtype=float))[:, None]
    pb = np.radians(np.asarray(lats_b, dtype=float))[None, :]
    la = np.radians(np.asarray(lons_a, dtype=float))[:, None]
    lb = np.radians(np.asarray(lons_b, dtype=float))[None, :]
    h = np.sin((pb - pa) / 2.0) ** 2 + np.cos(pa) * np.cos(pb) * np.sin((lb - la) / 2.0) ** 2
    return DETOUR_FACTOR * 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(h))
