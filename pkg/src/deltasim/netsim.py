"""Network cost model: transaction time/energy per medium, app feasibility.

A transaction is one application-layer message over a given access medium.
Its cost decomposes into a fixed setup part, serialization of the payload at
the medium's throughput, the first-hop round trip and a core-network round
trip to the cloud:

    time_ms   = setup_ms + payload_bytes * 8 / throughput_kbps
                + first_hop_rtt_ms + core_rtt_ms
    energy_mj = energy_setup_mj + payload_bytes * energy_per_byte_mj

Throughput in kbit/s is bits per millisecond, so the units line up without
conversion factors.  The bundled profiles (ethernet, wifi, 3g, 2g) order the
media from fastest to slowest in every component; ``instant`` is a
zero-cost medium for simulation experiments that should isolate learning
behavior from transport behavior.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources

_PROFILE_FIELDS = (
    "first_hop_rtt_ms",
    "setup_ms",
    "throughput_kbps",
    "energy_setup_mj",
    "energy_per_byte_mj",
    "core_rtt_ms",
)


@dataclass(frozen=True)
class MediumProfile:
    """Access-medium parameters for the transaction cost model."""

    name: str
    first_hop_rtt_ms: float
    setup_ms: float
    throughput_kbps: float
    energy_setup_mj: float
    energy_per_byte_mj: float
    core_rtt_ms: float

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("profile name must be non-empty")
        if not self.throughput_kbps > 0:
            raise ValueError(f"{self.name}: throughput_kbps must be > 0")
        for attr in _PROFILE_FIELDS:
            if attr == "throughput_kbps":
                continue
            if getattr(self, attr) < 0:
                raise ValueError(f"{self.name}: {attr} must be >= 0")


@dataclass(frozen=True)
class AppClass:
    """Application class with a latency budget per prediction."""

    name: str
    max_latency_ms: float

    def __post_init__(self) -> None:
        if not self.max_latency_ms > 0:
            raise ValueError("max_latency_ms must be > 0")


@dataclass(frozen=True)
class MessageSizes:
    """Payload sizes (bytes) of the three message kinds a pattern can use."""

    s_bytes: int
    d_bytes: int
    m_bytes: int


@dataclass(frozen=True)
class TransactionReport:
    medium: str
    payload_bytes: int
    time_ms: float
    energy_mj: float


@dataclass(frozen=True)
class Recommendation:
    """Feasibility of one pattern/medium combination for one app class."""

    app_class: str
    pattern: str
    medium: str
    latency_ms: float
    feasible: bool


def transaction_time(profile: MediumProfile, payload_bytes: int) -> float:
    """Milliseconds to complete one transaction of ``payload_bytes``."""
    if payload_bytes < 0:
        raise ValueError("payload_bytes must be >= 0")
    return (
        profile.setup_ms
        + payload_bytes * 8.0 / profile.throughput_kbps
        + profile.first_hop_rtt_ms
        + profile.core_rtt_ms
    )


def transaction_energy(profile: MediumProfile, payload_bytes: int) -> float:
    """Millijoules spent by the edge device on one transaction."""
    if payload_bytes < 0:
        raise ValueError("payload_bytes must be >= 0")
    return profile.energy_setup_mj + payload_bytes * profile.energy_per_byte_mj


def transaction_report(profile: MediumProfile, payload_bytes: int) -> TransactionReport:
    return TransactionReport(
        medium=profile.name,
        payload_bytes=payload_bytes,
        time_ms=transaction_time(profile, payload_bytes),
        energy_mj=transaction_energy(profile, payload_bytes),
    )


def pattern_latency(
    pattern: str,
    profile: MediumProfile,
    sizes: MessageSizes,
    *,
    edge_ms: float = 1.0,
    cloud_ms: float = 1.0,
) -> float:
    """Per-prediction latency of a pattern over a medium.

    P0 and P1 classify locally, so their prediction path never touches the
    network: model pushes (P0) ride in the background.  P2 pays a full
    round trip: sensor data up, cloud inference, decision down.
    """
    if pattern in ("P0", "P1"):
        return edge_ms
    if pattern == "P2":
        return (
            transaction_time(profile, sizes.s_bytes)
            + cloud_ms
            + transaction_time(profile, sizes.d_bytes)
        )
    raise ValueError(f"unknown pattern {pattern!r}")


def recommend(
    app_classes: tuple[AppClass, ...],
    patterns: tuple[str, ...],
    profiles: tuple[MediumProfile, ...],
    sizes: MessageSizes,
    *,
    edge_ms: float = 1.0,
    cloud_ms: float = 1.0,
) -> list[Recommendation]:
    """Cross every app class with every pattern/medium and judge feasibility.

    A combination is feasible when its per-prediction latency fits inside
    the app class's budget.  One row per combination, in input order.
    """
    rows = []
    for app in app_classes:
        for pattern in patterns:
            for profile in profiles:
                latency = pattern_latency(
                    pattern, profile, sizes, edge_ms=edge_ms, cloud_ms=cloud_ms
                )
                rows.append(
                    Recommendation(
                        app_class=app.name,
                        pattern=pattern,
                        medium=profile.name,
                        latency_ms=latency,
                        feasible=latency <= app.max_latency_ms,
                    )
                )
    return rows


def load_profiles(path: str) -> dict[str, MediumProfile]:
    """Read medium profiles from an INI file, one section per medium.

    Every section must define exactly the six cost-model keys; unknown or
    missing keys are errors so typos cannot silently zero a parameter.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"profile file not found: {path}")
    profiles: dict[str, MediumProfile] = {}
    for section in parser.sections():
        keys = set(parser[section])
        unknown = keys - set(_PROFILE_FIELDS)
        if unknown:
            raise ValueError(f"[{section}] unknown keys: {', '.join(sorted(unknown))}")
        missing = set(_PROFILE_FIELDS) - keys
        if missing:
            raise ValueError(f"[{section}] missing keys: {', '.join(sorted(missing))}")
        try:
            values = {k: float(parser[section][k]) for k in _PROFILE_FIELDS}
        except ValueError as exc:
            raise ValueError(f"[{section}] non-numeric value: {exc}") from None
        profiles[section] = MediumProfile(name=section, **values)
    if not profiles:
        raise ValueError(f"no profile sections in {path}")
    return profiles


def default_profiles() -> dict[str, MediumProfile]:
    """Profiles bundled with the package (ethernet, wifi, 3g, 2g, instant)."""
    ref = resources.files("deltasim") / "data" / "profiles.ini"
    with resources.as_file(ref) as path:
        return load_profiles(str(path))


MOTION_CONTROL = AppClass("motion_control", max_latency_ms=10.0)
PROCESS_AUTOMATION = AppClass("process_automation", max_latency_ms=100.0)
APP_CLASSES = (MOTION_CONTROL, PROCESS_AUTOMATION)

DEFAULT_MEDIA_ORDER = ("ethernet", "wifi", "3g", "2g")
