"""System description: geometry, radio links, compute, energy.

Scenarios round-trip through plain dicts so they can live in JSON files.
Defaults follow the simulation table (Table 1) and setup text of the
original study; values the study leaves open are marked below.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
EARTH_RADIUS_M = 6_371_000.0
EARTH_MU = 3.986004418e14


def dbm_per_hz_to_w(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.z < 0:
            raise ValueError(f"z must be >= 0, got {self.z}")

    def distance(self, other: "Position3D") -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))


@dataclass(frozen=True)
class UavKinematics:
    center: Position3D = Position3D(1000.0, 0.0, 100.0)
    radius_m: float = 1000.0
    altitude_m: float = 100.0
    speed_mps: float = 1000.0 / 60.0
    slot_duration_s: float = 60.0
    angle0_rad: float = 0.0

    def __post_init__(self):
        if self.radius_m <= 0 or self.speed_mps <= 0 or self.slot_duration_s <= 0:
            raise ValueError("radius, speed and slot duration must be positive")


@dataclass(frozen=True)
class LinkBudgetParams:
    bandwidth_hz: float
    tx_power_up_w: float
    tx_power_down_w: float
    noise_psd_w_per_hz: float = dbm_per_hz_to_w(-174.0)
    antenna_gain_linear: float = 1.0
    rician_factor: float = 0.0
    pathloss_exp_los: float = 2.0
    pathloss_exp_nlos: float = 2.2
    wavelength_m: float = SPEED_OF_LIGHT / 28e9
    shadow_fading_linear: float = 1.0
    carrier_freq_hz: float = 5e9

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "rician_factor":
                if v < 0:
                    raise ValueError("rician_factor must be >= 0")
            elif not v > 0:
                raise ValueError(f"{f.name} must be positive, got {v}")


def c_band_link() -> LinkBudgetParams:
    return LinkBudgetParams(bandwidth_hz=20e6, tx_power_up_w=1.6, tx_power_down_w=1.6, carrier_freq_hz=5e9)


def ka_band_link() -> LinkBudgetParams:
    return LinkBudgetParams(
        bandwidth_hz=400e6, tx_power_up_w=5.0, tx_power_down_w=5.0,
        antenna_gain_linear=db_to_linear(43.3), rician_factor=7.0,
        pathloss_exp_los=2.0, pathloss_exp_nlos=2.2,
        wavelength_m=SPEED_OF_LIGHT / 28e9, carrier_freq_hz=28e9,
    )


@dataclass(frozen=True)
class UavCompute:
    cpu_hz: float = 3e8
    capacity_bps: float = 3e6


@dataclass(frozen=True)
class BaseStation:
    position: Position3D
    cpu_hz: float = 5e9
    capacity_bps: float = 25e6
    link: LinkBudgetParams = field(default_factory=c_band_link)


@dataclass(frozen=True)
class Satellite:
    positions: tuple[Position3D, ...]
    cpu_hz: float = 10e9  # cloud server behind the satellite
    capacity_bps: float = 150e6
    link: LinkBudgetParams = field(default_factory=ka_band_link)
    backhaul_bps: float = 20e6
    relay_power_w: float = 5.0


@dataclass(frozen=True)
class Workload:
    cycles_per_bit: float = 25.0
    return_ratio: float = 1e-3


@dataclass(frozen=True)
class Propulsion:
    c1: float = 9.26e-4
    c2: float = 2250.0
    g: float = 9.8


@dataclass(frozen=True)
class Scenario:
    T: int
    kinematics: UavKinematics
    uav: UavCompute
    bs_list: tuple[BaseStation, ...]
    sat_list: tuple[Satellite, ...]
    workload: Workload = Workload()
    propulsion: Propulsion = Propulsion()
    e_max_j: float | None = None  # None -> 2 * propulsion energy + 50 J
    retransmission_penalty_s: float = 60.0

    @property
    def N(self) -> int:
        return len(self.bs_list)

    @property
    def M(self) -> int:
        return len(self.sat_list)

    @property
    def tau(self) -> float:
        return self.kinematics.slot_duration_s

    @property
    def cap_uav(self) -> float:
        return self.uav.capacity_bps * self.tau

    @property
    def cap_bs(self) -> np.ndarray:
        return np.array([b.capacity_bps * self.tau for b in self.bs_list])

    @property
    def cap_sat(self) -> np.ndarray:
        return np.array([s.capacity_bps * self.tau for s in self.sat_list])

    def energy_budget(self) -> float:
        from .model import energy_fly

        if self.e_max_j is not None:
            return self.e_max_j
        return 2.0 * energy_fly(self.propulsion, self.kinematics, self.T) + 50.0

    def validate(self) -> list[str]:
        """Problems found in the scenario; an empty list means it is usable."""
        issues = []
        if self.T < 1:
            issues.append("T must be >= 1")
        if self.N + self.M < 1:
            issues.append("need at least one base station or satellite")
        if self.workload.cycles_per_bit <= 0:
            issues.append("cycles_per_bit must be positive")
        if not 0.0 <= self.workload.return_ratio <= 1.0:
            issues.append("return_ratio must lie in [0, 1]")
        if self.e_max_j is not None and self.e_max_j <= 0:
            issues.append("e_max_j must be positive")
        if self.uav.cpu_hz <= 0:
            issues.append("UAV cpu_hz must be positive")
        for i, b in enumerate(self.bs_list):
            if b.cpu_hz <= 0 or b.capacity_bps < 0:
                issues.append(f"bs[{i}]: cpu_hz must be positive and capacity non-negative")
        for i, s in enumerate(self.sat_list):
            if len(s.positions) < self.T:
                issues.append(f"sat[{i}]: {len(s.positions)} positions for {self.T} slots")
            if s.cpu_hz <= 0 or s.backhaul_bps <= 0 or s.capacity_bps < 0:
                issues.append(f"sat[{i}]: cpu_hz and backhaul_bps must be positive")
        if self.e_max_j is None and self.energy_budget() <= 0:
            issues.append("energy budget must be positive")
        return issues

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        def pos(p):
            return Position3D(**p) if isinstance(p, dict) else Position3D(*p)

        def link(l, default):
            return replace(default(), **l) if l is not None else default()

        kin = dict(d.get("kinematics", {}))
        if "center" in kin:
            kin["center"] = pos(kin["center"])
        bs = tuple(
            BaseStation(position=pos(b["position"]), link=link(b.get("link"), c_band_link),
                        **{k: v for k, v in b.items() if k not in ("position", "link")})
            for b in d.get("bs_list", [])
        )
        sats = tuple(
            Satellite(positions=tuple(pos(p) for p in s["positions"]), link=link(s.get("link"), ka_band_link),
                      **{k: v for k, v in s.items() if k not in ("positions", "link")})
            for s in d.get("sat_list", [])
        )
        return cls(
            T=int(d["T"]),
            kinematics=UavKinematics(**kin),
            uav=UavCompute(**d.get("uav", {})),
            bs_list=bs,
            sat_list=sats,
            workload=Workload(**d.get("workload", {})),
            propulsion=Propulsion(**d.get("propulsion", {})),
            e_max_j=d.get("e_max_j"),
            retransmission_penalty_s=d.get("retransmission_penalty_s", 60.0),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.from_dict(json.loads(Path(path).read_text()))


def circular_orbit_table(
    altitude_m: float, T: int, slot_s: float, phase_rad: float = 0.0, azimuth_rad: float = 0.0,
) -> tuple[Position3D, ...]:
    """Positions of a satellite on a circular orbit passing over the origin.

    Local frame: ground origin at (0, 0, 0), Earth's centre at (0, 0, -R_E).
    `phase_rad` is the orbital angle from zenith at slot 0; positions are
    taken at the end of each slot, like the UAV's.
    """
    R = EARTH_RADIUS_M + altitude_m
    omega = math.sqrt(EARTH_MU / R**3)
    out = []
    for t in range(1, T + 1):
        phi = phase_rad + omega * slot_s * t
        h = R * math.sin(phi)
        out.append(Position3D(h * math.cos(azimuth_rad), h * math.sin(azimuth_rad),
                              max(R * math.cos(phi) - EARTH_RADIUS_M, 0.0)))
    return tuple(out)


DEFAULT_BS_POSITIONS = (
    (500.0, -1000.0, 100.0),
    (2000.0, -1000.0, 100.0),
    (2000.0, 1000.0, 100.0),
    (500.0, 1000.0, 100.0),
    (1250.0, 0.0, 100.0),
)


def default_scenario(T: int = 2, n_bs: int = 5, n_sat: int = 3) -> Scenario:
    """Five BSs on the deployment rectangle, three LEO satellites at 780-800 km."""
    kin = UavKinematics()
    bs = tuple(BaseStation(position=Position3D(*DEFAULT_BS_POSITIONS[i % len(DEFAULT_BS_POSITIONS)]))
               for i in range(n_bs))
    sats = []
    for s in range(n_sat):
        alt = 780e3 + (20e3 * s / max(n_sat - 1, 1))
        # two orbital planes, satellites spread in phase
        sats.append(Satellite(positions=circular_orbit_table(
            alt, T, kin.slot_duration_s, phase_rad=-0.05 + 0.04 * s, azimuth_rad=(s % 2) * math.pi / 2)))
    return Scenario(T=T, kinematics=kin, uav=UavCompute(), bs_list=bs, sat_list=tuple(sats))
