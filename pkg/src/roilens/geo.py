"""Two-layer data model: interaction-layer pixels and spatial-layer coordinates.

The interaction layer is a center-origin pixel plane (x right, y up); the
spatial layer is plain lat/lon in degrees. An equirectangular transform maps
between them relative to a viewport whose center pins the two layers together.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)


class RoilensError(Exception):
    """Base class for engine errors."""


class DegenerateViewportError(RoilensError):
    """Viewport whose center latitude makes the longitude transform blow up."""


@dataclass(frozen=True)
class ScreenPoint:
    """Interaction-layer point: pixel offsets from the layer center plus a timestamp.

    x grows to the right, y grows upward; t is milliseconds since session start.
    (0, 0) is the layer center at any t.
    """

    x: float
    y: float
    t: int = 0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"timestamp must be >= 0, got {self.t}")


@dataclass(frozen=True)
class GeoPoint:
    """Spatial-layer point in degrees: lat in [-90, 90], lon in [-180, 180]."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"lat out of range: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"lon out of range: {self.lon}")


@dataclass(frozen=True)
class Viewport:
    """Mapping between the two layers.

    gamma/theta are the lat/lon of the point shown at the screen center;
    scale is degrees per pixel (1.0 keeps pixel offsets and degrees identical).
    """

    gamma: float
    theta: float
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if abs(self.gamma) >= 90.0:
            raise DegenerateViewportError(
                f"viewport center latitude {self.gamma} makes cos(gamma) vanish"
            )

    @property
    def cos_gamma(self) -> float:
        return math.cos(math.radians(self.gamma))


@dataclass(frozen=True)
class POI:
    """Spatial item with categorical attribute facets."""

    id: str
    location: GeoPoint
    attributes: dict = field(default_factory=dict)


def project_to_geo(m: ScreenPoint, v: Viewport) -> GeoPoint:
    """Equirectangular pixel -> lat/lon projection relative to the viewport.

    lat = y * scale + gamma, lon = x * scale / cos(gamma) + theta. Outputs are
    clamped to valid geographic ranges (with a warning) so extreme mouse
    positions at low zoom never crash the pipeline.
    """
    lat = m.y * v.scale + v.gamma
    lon = m.x * v.scale / v.cos_gamma + v.theta
    clamped_lat = min(90.0, max(-90.0, lat))
    clamped_lon = min(180.0, max(-180.0, lon))
    if clamped_lat != lat or clamped_lon != lon:
        logger.warning(
            "projected point (%.3f, %.3f) outside valid ranges, clamped", lat, lon
        )
    return GeoPoint(clamped_lat, clamped_lon)


def project_to_screen(p: GeoPoint, v: Viewport) -> ScreenPoint:
    """Inverse projection: lat/lon -> pixel offsets. Timestamp is left at zero."""
    x = (p.lon - v.theta) * v.cos_gamma / v.scale
    y = (p.lat - v.gamma) / v.scale
    return ScreenPoint(x, y, 0)


def geo_to_screen_xy(lats, lons, v: Viewport):
    """Vectorized inverse projection for numpy arrays of coordinates."""
    x = (lons - v.theta) * v.cos_gamma / v.scale
    y = (lats - v.gamma) / v.scale
    return x, y


def screen_bbox_to_geo(x_min: float, y_min: float, x_max: float, y_max: float,
                       v: Viewport) -> tuple[float, float, float, float]:
    """Map a pixel-space bounding box to the covering lat/lon box.

    Both projection axes are monotone, so the box maps corner-to-corner.
    Returns (lat_min, lon_min, lat_max, lon_max), unclamped.
    """
    lat_min = y_min * v.scale + v.gamma
    lat_max = y_max * v.scale + v.gamma
    lon_min = x_min * v.scale / v.cos_gamma + v.theta
    lon_max = x_max * v.scale / v.cos_gamma + v.theta
    return lat_min, lon_min, lat_max, lon_max
