"""Two-state air-to-ground channel model and per-UAV-position link tables.

Each UAV-GBS link is line-of-sight (LoS) with an elevation-dependent
probability and non-line-of-sight (NLoS) otherwise; conditioned on the
state the power channel gain is a deterministic function of distance.
The default parametric model combines

  * a logistic LoS probability  p_L(theta) = 1 / (1 + a * exp(-b*(theta - theta0)))
    in the elevation angle theta (degrees), the widely used urban
    air-to-ground fit (defaults a = 9.6, b = 0.28 per degree, theta0 = a);

  * log-distance pathloss  h = beta * d^(-alpha)  on the 3D distance, with
    the reference gains beta anchored to free space at the carrier
    frequency plus a constant excess loss per state (defaults 1 dB LoS,
    20 dB NLoS, alpha = 2 for both).

Any object with the same ``evaluate(elevation_deg, distance_m)`` method can
replace the parametric model.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from typing import NamedTuple, Protocol, Sequence, runtime_checkable

import numpy as np

from .antenna import UavAntenna
from .geometry import NetworkLayout, distance_3d, elevation_angle_deg, horizontal_distance

SPEED_OF_LIGHT = 299792458.0


@runtime_checkable
class ChannelModel(Protocol):
    def evaluate(self, elevation_deg: float, distance_m: float) -> tuple[float, float, float]:
        """Return (h_los, h_nlos, p_los) for one link."""
        ...


def free_space_gain(carrier_hz: float) -> float:
    """Free-space power gain at 1 m, (lambda / 4 pi)^2."""
    if carrier_hz <= 0:
        raise ValueError(f"carrier frequency must be positive, got {carrier_hz}")
    wavelength = SPEED_OF_LIGHT / carrier_hz
    return (wavelength / (4.0 * math.pi)) ** 2


@dataclass(frozen=True)
class ParametricAirGroundModel:
    """Logistic LoS probability plus per-state log-distance pathloss.

    ``ref_gain_*`` are the linear power gains at 1 m; the constructor
    enforces alpha_nlos >= alpha_los > 0 and ref_gain_nlos < ref_gain_los
    so the LoS gain strictly dominates at every distance >= 1 m.
    """

    alpha_los: float
    alpha_nlos: float
    ref_gain_los: float
    ref_gain_nlos: float
    los_a: float
    los_b_per_deg: float
    los_midpoint_deg: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha_los <= self.alpha_nlos:
            raise ValueError(
                "pathloss exponents must satisfy 0 < alpha_los <= alpha_nlos, got "
                f"{self.alpha_los}, {self.alpha_nlos}"
            )
        if not 0.0 < self.ref_gain_nlos < self.ref_gain_los:
            raise ValueError(
                "reference gains must satisfy 0 < ref_gain_nlos < ref_gain_los, got "
                f"{self.ref_gain_nlos}, {self.ref_gain_los}"
            )
        if self.los_a <= 0 or self.los_b_per_deg <= 0:
            raise ValueError(
                f"logistic parameters must be positive, got a={self.los_a}, b={self.los_b_per_deg}"
            )

    def los_probability(self, elevation_deg: float) -> float:
        z = -self.los_b_per_deg * (elevation_deg - self.los_midpoint_deg)
        return 1.0 / (1.0 + self.los_a * math.exp(z))

    def evaluate(self, elevation_deg: float, distance_m: float) -> tuple[float, float, float]:
        if distance_m < 1.0:
            raise ValueError(f"3D distance must be >= 1 m, got {distance_m}")
        h_los = self.ref_gain_los * distance_m ** (-self.alpha_los)
        h_nlos = self.ref_gain_nlos * distance_m ** (-self.alpha_nlos)
        return h_los, h_nlos, self.los_probability(elevation_deg)


def default_channel(
    carrier_hz: float,
    alpha_los: float = 2.0,
    alpha_nlos: float = 2.0,
    excess_loss_los_db: float = 1.0,
    excess_loss_nlos_db: float = 20.0,
    los_a: float = 9.6,
    los_b_per_deg: float = 0.28,
    los_midpoint_deg: float | None = None,
) -> ParametricAirGroundModel:
    """Urban default: free-space reference minus the per-state excess loss."""
    fs = free_space_gain(carrier_hz)
    if los_midpoint_deg is None:
        los_midpoint_deg = los_a
    return ParametricAirGroundModel(
        alpha_los=alpha_los,
        alpha_nlos=alpha_nlos,
        ref_gain_los=fs * 10.0 ** (-excess_loss_los_db / 10.0),
        ref_gain_nlos=fs * 10.0 ** (-excess_loss_nlos_db / 10.0),
        los_a=los_a,
        los_b_per_deg=los_b_per_deg,
        los_midpoint_deg=los_midpoint_deg,
    )


_COEFF_SECTIONS = {
    "pathloss": ("alpha_los", "alpha_nlos", "ref_gain_los", "ref_gain_nlos"),
    "los_probability": ("a", "b_per_deg", "midpoint_deg"),
}


def load_channel_coefficients(path) -> ParametricAirGroundModel:
    """Read a channel coefficient file (INI sections ``[pathloss]`` and
    ``[los_probability]``); every key is required and unknown keys are
    rejected, so published coefficient sets can be dropped in verbatim."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValueError(f"cannot read channel coefficient file {path}")
    values: dict[str, float] = {}
    for section, keys in _COEFF_SECTIONS.items():
        if not parser.has_section(section):
            raise ValueError(f"{path}: missing [{section}] section")
        seen = set(parser.options(section))
        unknown = seen - set(keys)
        if unknown:
            raise ValueError(f"{path}: unknown keys in [{section}]: {sorted(unknown)}")
        for key in keys:
            if key not in seen:
                raise ValueError(f"{path}: [{section}] is missing key '{key}'")
            try:
                values[f"{section}.{key}"] = float(parser.get(section, key))
            except ValueError as exc:
                raise ValueError(f"{path}: [{section}] {key} is not a number") from exc
    return ParametricAirGroundModel(
        alpha_los=values["pathloss.alpha_los"],
        alpha_nlos=values["pathloss.alpha_nlos"],
        ref_gain_los=values["pathloss.ref_gain_los"],
        ref_gain_nlos=values["pathloss.ref_gain_nlos"],
        los_a=values["los_probability.a"],
        los_b_per_deg=values["los_probability.b_per_deg"],
        los_midpoint_deg=values["los_probability.midpoint_deg"],
    )


# ---------------------------------------------------------------------------
# Link tables
# ---------------------------------------------------------------------------

class LinkRow(NamedTuple):
    gbs_id: int
    band: int
    c_los: float
    c_nlos: float
    p_los: float


@dataclass(frozen=True)
class LinkTable:
    """Combined channel gains of every GBS for one UAV position.

    Rows carry the combined power gains C = G_uav * G_gbs * h for both
    channel states, sorted by descending LoS gain (ties by ascending id),
    which is the order the association walk consumes.  GBSs outside the
    UAV mainlobe with zero backlobe gain have both gains 0 and sit at the
    tail.
    """

    rows: tuple[LinkRow, ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if not 0.0 <= row.p_los <= 1.0:
                raise ValueError(f"LoS probability out of [0, 1] for GBS {row.gbs_id}")
            if row.c_los < 0 or row.c_nlos < 0:
                raise ValueError(f"negative gain for GBS {row.gbs_id}")
            if row.c_los == 0.0 and row.c_nlos != 0.0:
                raise ValueError(f"NLoS gain without LoS gain for GBS {row.gbs_id}")
        key = [(-r.c_los, r.gbs_id) for r in self.rows]
        if key != sorted(key):
            raise ValueError("link table rows must be sorted by descending c_los, then id")

    def __len__(self) -> int:
        return len(self.rows)

    def c_los_array(self) -> np.ndarray:
        return np.array([r.c_los for r in self.rows])

    def c_nlos_array(self) -> np.ndarray:
        return np.array([r.c_nlos for r in self.rows])

    def p_los_array(self) -> np.ndarray:
        return np.array([r.p_los for r in self.rows])

    def row_for(self, gbs_id: int) -> LinkRow:
        for row in self.rows:
            if row.gbs_id == gbs_id:
                return row
        raise KeyError(f"GBS {gbs_id} not in link table")

    def band_members(self, band: int) -> set[int]:
        return {r.gbs_id for r in self.rows if r.band == band}


def build_link_table(
    layout: NetworkLayout,
    gbs_pattern,
    uav_antenna: UavAntenna,
    channel: ChannelModel,
    uav_xyz: Sequence[float],
    gbs_height: float,
) -> LinkTable:
    """Evaluate geometry, antennas and channel for every site.

    ``gbs_pattern`` is any callable mapping an elevation angle in degrees
    to a linear power gain (a :class:`~uavcov.antenna.UlaPattern` works).
    """
    if uav_xyz[2] <= gbs_height:
        raise ValueError(
            f"UAV altitude {uav_xyz[2]} must exceed the GBS antenna height {gbs_height}"
        )
    rows = []
    for site in layout.sites:
        r_h = horizontal_distance(uav_xyz, site)
        d3 = distance_3d(uav_xyz, site, gbs_height)
        theta = elevation_angle_deg(uav_xyz, site, gbs_height)
        g_u = uav_antenna.gain_at(r_h, uav_xyz[2], gbs_height)
        h_los, h_nlos, p_los = channel.evaluate(theta, d3)
        if g_u == 0.0:
            rows.append(LinkRow(site.gbs_id, site.band, 0.0, 0.0, p_los))
            continue
        g_b = float(gbs_pattern(theta))
        combined = g_u * g_b
        rows.append(
            LinkRow(site.gbs_id, site.band, combined * h_los, combined * h_nlos, p_los)
        )
    rows.sort(key=lambda r: (-r.c_los, r.gbs_id))
    return LinkTable(tuple(rows))
