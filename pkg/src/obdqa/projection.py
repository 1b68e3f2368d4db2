"""Transverse Mercator (UTM) projection using the 6th-order Krueger series.

Accurate to well under a millimetre within a UTM zone. Only WGS84-style
ellipsoids given by semi-major axis and inverse flattening are supported.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

from .errors import OutOfZoneError, UnsupportedLatitudeError, UsageError
from .geometry import Point2

WGS84_A = 6378137.0
WGS84_INV_F = 298.257223563

MAX_LON_OFFSET = 10.0


@dataclass(frozen=True)
class TmZoneSpec:
    central_meridian: float
    scale_factor: float = 0.9996
    false_easting: float = 500000.0
    false_northing: float = 0.0
    hemisphere: str = "north"
    semi_major_axis: float = WGS84_A
    inverse_flattening: float = WGS84_INV_F
    zone_number: int | None = None

    def __post_init__(self):
        if not -180.0 <= self.central_meridian <= 180.0:
            raise ValueError(f"central meridian out of range: {self.central_meridian}")
        if not 0.9 < self.scale_factor < 1.1:
            raise ValueError(f"scale factor out of range: {self.scale_factor}")
        if self.hemisphere not in ("north", "south"):
            raise ValueError(f"hemisphere must be 'north' or 'south', got {self.hemisphere!r}")

    @classmethod
    def utm(cls, zone: int, hemisphere: str = "north") -> "TmZoneSpec":
        if not 1 <= zone <= 60:
            raise ValueError(f"UTM zone must be in 1..60, got {zone}")
        return cls(central_meridian=zone * 6.0 - 183.0,
                   false_northing=10000000.0 if hemisphere == "south" else 0.0,
                   hemisphere=hemisphere, zone_number=zone)

    @property
    def token(self) -> str:
        if self.zone_number is None:
            return f"TM{self.central_meridian:g}{self.hemisphere[0].upper()}"
        return f"{self.zone_number}{self.hemisphere[0].upper()}"

    @cached_property
    def _series(self):
        return _KruegerSeries(self.semi_major_axis, self.inverse_flattening)


def parse_zone(token: str) -> TmZoneSpec:
    """Parse a ``"37S"``-style zone token (number plus hemisphere letter)."""
    m = re.fullmatch(r"\s*(\d{1,2})\s*([NnSs])\s*", token or "")
    if not m:
        raise UsageError(f"bad UTM zone token {token!r}; expected e.g. '31N' or '37S'")
    return TmZoneSpec.utm(int(m.group(1)), "north" if m.group(2).upper() == "N" else "south")


def utm_zone_for(lon: float, lat: float) -> TmZoneSpec:
    if not -80.0 < lat < 84.0:
        raise UnsupportedLatitudeError(f"latitude {lat} outside UTM coverage (-80, 84)")
    if not -180.0 <= lon < 180.0:
        raise ValueError(f"longitude {lon} outside [-180, 180)")
    zone = int(math.floor((lon + 180.0) / 6.0)) + 1
    return TmZoneSpec.utm(zone, "south" if lat < 0 else "north")


class _KruegerSeries:
    def __init__(self, a: float, inv_f: float):
        f = 1.0 / inv_f
        self.e2 = f * (2.0 - f)
        self.e = math.sqrt(self.e2)
        n = f / (2.0 - f)
        n2, n3, n4, n5, n6 = n ** 2, n ** 3, n ** 4, n ** 5, n ** 6
        self.A = a / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0)
        self.alpha = (
            n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
            13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
            61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
            49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
            34729 * n5 / 80640 - 3418889 * n6 / 1995840,
            212378941 * n6 / 319334400,
        )
        self.beta = (
            n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
            n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
            17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
            4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
            4583 * n5 / 161280 - 108847 * n6 / 3991680,
            20648693 * n6 / 638668800,
        )

    def conformal_tan(self, tau: float) -> float:
        sigma = math.sinh(self.e * math.atanh(self.e * tau / math.hypot(1.0, tau)))
        return tau * math.hypot(1.0, sigma) - sigma * math.hypot(1.0, tau)

    def geodetic_tan(self, tau_p: float) -> float:
        # Newton iteration on tau' (tau); converges in 2-3 steps
        tau = tau_p
        for _ in range(10):
            tp_i = self.conformal_tan(tau)
            d = ((tau_p - tp_i) / math.hypot(1.0, tp_i)
                 * (1.0 + (1.0 - self.e2) * tau * tau)
                 / ((1.0 - self.e2) * math.hypot(1.0, tau)))
            tau += d
            if abs(d) <= 1e-14 * max(1.0, abs(tau)):
                break
        return tau


def forward(lon: float, lat: float, zone: TmZoneSpec) -> Point2:
    """Geographic degrees to projected easting/northing in metres."""
    dlon = (lon - zone.central_meridian + 180.0) % 360.0 - 180.0
    if abs(dlon) >= MAX_LON_OFFSET:
        raise OutOfZoneError(f"longitude {lon} is {abs(dlon):.3f} deg from central meridian")
    if not -90.0 <= lat <= 90.0:
        raise UnsupportedLatitudeError(f"latitude {lat} out of range")
    s = zone._series
    lam = math.radians(dlon)
    phi = math.radians(lat)
    tau_p = s.conformal_tan(math.tan(phi)) if abs(lat) < 90.0 else math.copysign(math.inf, lat)
    coslam = math.cos(lam)
    xi_p = math.atan2(tau_p, coslam)
    eta_p = math.asinh(math.sin(lam) / math.hypot(tau_p, coslam))
    xi, eta = xi_p, eta_p
    for j, a_j in enumerate(s.alpha, start=1):
        xi += a_j * math.sin(2 * j * xi_p) * math.cosh(2 * j * eta_p)
        eta += a_j * math.cos(2 * j * xi_p) * math.sinh(2 * j * eta_p)
    k0A = zone.scale_factor * s.A
    return Point2(zone.false_easting + k0A * eta, zone.false_northing + k0A * xi)


def inverse(easting: float, northing: float, zone: TmZoneSpec) -> tuple[float, float]:
    """Projected metres back to ``(lon, lat)`` degrees (rendering/debug only)."""
    s = zone._series
    k0A = zone.scale_factor * s.A
    xi = (northing - zone.false_northing) / k0A
    eta = (easting - zone.false_easting) / k0A
    xi_p, eta_p = xi, eta
    for j, b_j in enumerate(s.beta, start=1):
        xi_p -= b_j * math.sin(2 * j * xi) * math.cosh(2 * j * eta)
        eta_p -= b_j * math.cos(2 * j * xi) * math.sinh(2 * j * eta)
    sinh_eta = math.sinh(eta_p)
    cos_xi = math.cos(xi_p)
    tau_p = math.sin(xi_p) / math.hypot(sinh_eta, cos_xi)
    lam = math.atan2(sinh_eta, cos_xi)
    lat = math.degrees(math.atan(s.geodetic_tan(tau_p)))
    lon = zone.central_meridian + math.degrees(lam)
    lon = (lon + 180.0) % 360.0 - 180.0
    return lon, lat
