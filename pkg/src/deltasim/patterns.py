"""Event-loop simulator for the three edge/cloud learning patterns.

* ``P0`` -- the cloud learns, the edges predict.  Every point is classified
  locally with the last model pushed by the cloud, its sensor reading rides
  up as a background S message, and every ``push_interval`` arrivals the
  cloud trains a fresh model on its global frame and broadcasts it as an M
  message.  A push initiates when the triggering step ends, travels for one
  transaction time, and activates at each site's first step that begins
  strictly after delivery, so prediction latency stays local.
* ``P1`` -- each edge learns and predicts on its own moving frame; no
  messages at all.
* ``P2`` -- edges hold nothing: each point is sent up (S), classified by the
  cloud's global model, trained into the global frame, and the decision
  comes back down (D); prediction latency includes both transactions.

Sites advance in order of their points' global iteration index (ties broken
by site id), so cloud arrivals reconstruct the original stream order for any
division that conserves points.  Scoring is prequential: classify first,
then train.  A step with no model yet abstains and scores 0.  When a site
has a withheld category (without-one evaluation), those points are still
classified and scored but never enter a training frame.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field

from .learners import (
    ABSTAIN,
    LEARNER_KINDS,
    ModelSnapshot,
    MovingFrame,
    ScoreTracker,
    fit,
    predict,
    score_update,
)
from .netsim import MediumProfile, transaction_time
from .streams import SiteStreams

PATTERNS = ("P0", "P1", "P2")

STEP_LOG_HEADER = (
    "pattern,site,iteration,predicted,actual,score_avg,latency_ms,"
    "bytes_up,bytes_down,model_size"
)


def encode_s(features: tuple[float, ...]) -> bytes:
    """S message payload: sensor reading (kind byte, count, float64 values)."""
    return struct.pack("<BI", 1, len(features)) + struct.pack(
        f"<{len(features)}d", *features
    )


def encode_sd(features: tuple[float, ...], predicted: int) -> bytes:
    """S+D message payload: sensor reading plus the local decision."""
    return struct.pack("<BI", 2, len(features)) + struct.pack(
        f"<{len(features)}di", *features, predicted
    )


def encode_m(model: ModelSnapshot) -> bytes:
    """M message payload: kind byte plus the serialized model."""
    return struct.pack("<B", 3) + model.blob


def encode_d(predicted: int) -> bytes:
    """D message payload: kind byte plus the decision."""
    return struct.pack("<Bi", 4, predicted)


@dataclass(frozen=True)
class Message:
    """One simulated transfer; ``size_bytes`` is the payload encoding length."""

    kind: str  # "S", "SD", "M" or "D"
    src: str
    dst: str
    size_bytes: int
    sent_iteration: int


@dataclass
class SiteState:
    """One edge environment's mutable state during a run."""

    site_id: int
    frame: MovingFrame | None
    model: ModelSnapshot | None = None
    tracker: ScoreTracker = field(default_factory=ScoreTracker)
    clock: float = 0.0
    excluded_category: int | None = None
    pending: list[tuple[float, ModelSnapshot]] = field(default_factory=list)
    steps: int = 0


@dataclass
class CloudState:
    """Cloud-side frame, model and push bookkeeping."""

    global_frame: MovingFrame
    global_model: ModelSnapshot | None = None
    push_interval: int = 150
    arrivals: int = 0
    pushes: int = 0


class StepLog:
    """Columnar per-step record of a pattern run."""

    __slots__ = (
        "site", "iteration", "predicted", "actual", "score_avg",
        "latency_ms", "bytes_up", "bytes_down", "model_size",
    )

    def __init__(self) -> None:
        self.site: list[int] = []
        self.iteration: list[int] = []
        self.predicted: list[int] = []
        self.actual: list[int] = []
        self.score_avg: list[float] = []
        self.latency_ms: list[float] = []
        self.bytes_up: list[int] = []
        self.bytes_down: list[int] = []
        self.model_size: list[int] = []

    def append(self, site: int, iteration: int, predicted: int, actual: int,
               score_avg: float, latency_ms: float, bytes_up: int,
               bytes_down: int, model_size: int) -> None:
        self.site.append(site)
        self.iteration.append(iteration)
        self.predicted.append(predicted)
        self.actual.append(actual)
        self.score_avg.append(score_avg)
        self.latency_ms.append(latency_ms)
        self.bytes_up.append(bytes_up)
        self.bytes_down.append(bytes_down)
        self.model_size.append(model_size)

    def __len__(self) -> int:
        return len(self.site)


@dataclass
class PatternRun:
    """Finished run: configuration echo, step log and message counters."""

    pattern: str
    learner: str
    medium_name: str
    n_sites: int
    frame_capacity: int
    push_interval: int
    log: StepLog
    counters: dict[str, int]
    sites: list[SiteState]
    cloud: CloudState | None

    @property
    def n_steps(self) -> int:
        return len(self.log)

    def mean_score(self) -> float:
        if not len(self.log):
            return 0.0
        hits = sum(
            1 for p, a in zip(self.log.predicted, self.log.actual) if p == a
        )
        return hits / len(self.log)

    def mean_latency_ms(self) -> float:
        if not len(self.log):
            return 0.0
        return sum(self.log.latency_ms) / len(self.log)

    def mean_model_size(self) -> float:
        if not len(self.log):
            return 0.0
        return sum(self.log.model_size) / len(self.log)

    def total_bytes_up(self) -> int:
        return sum(self.log.bytes_up)

    def total_bytes_down(self) -> int:
        return sum(self.log.bytes_down)


def write_step_log(run: PatternRun, path: str) -> None:
    """Dump the per-step log as CSV (one row per processed point)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STEP_LOG_HEADER.split(","))
        log = run.log
        for i in range(len(log)):
            writer.writerow([
                run.pattern, log.site[i], log.iteration[i], log.predicted[i],
                log.actual[i], repr(log.score_avg[i]), repr(log.latency_ms[i]),
                log.bytes_up[i], log.bytes_down[i], log.model_size[i],
            ])


def _activate_delivered(site: SiteState) -> int:
    """Adopt the newest model delivered strictly before this step began.

    Returns the M-message byte count consumed now (0 if none).  A step that
    begins exactly at the delivery instant does not see the model yet.
    """
    delivered = [(t, m) for t, m in site.pending if t < site.clock]
    if not delivered:
        return 0
    site.pending = [(t, m) for t, m in site.pending if not t < site.clock]
    t, model = delivered[-1]  # chronologically last push wins
    site.model = model
    return 1 + model.serialized_size


def run_pattern(
    pattern: str,
    streams: SiteStreams,
    *,
    learner: str = "gaussian_nb",
    frame_capacity: int = 150,
    medium: MediumProfile,
    push_interval: int = 150,
    edge_ms: float = 1.0,
    cloud_ms: float = 1.0,
    max_depth: int | None = 10,
) -> PatternRun:
    """Play every site's stream through one pattern and return the run."""
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if learner not in LEARNER_KINDS:
        raise ValueError(f"unknown learner kind {learner!r}")
    if frame_capacity < 1:
        raise ValueError("frame_capacity must be >= 1")
    if push_interval < 1:
        raise ValueError("push_interval must be >= 1")
    if not edge_ms > 0 or not cloud_ms > 0:
        raise ValueError("compute costs must be > 0 (clocks must advance)")
    dims = {len(p.features) for s in streams.per_site for p in s[:1]}
    if len(dims) > 1:
        raise ValueError(f"mismatched feature dimensions across sites: {sorted(dims)}")

    excluded = streams.missing_category or {}
    sites = [
        SiteState(
            site_id=i,
            frame=MovingFrame(frame_capacity) if pattern == "P1" else None,
            excluded_category=excluded.get(i),
        )
        for i in range(streams.n_sites)
    ]
    cloud = (
        CloudState(global_frame=MovingFrame(frame_capacity), push_interval=push_interval)
        if pattern in ("P0", "P2")
        else None
    )
    log = StepLog()
    counters = {"S": 0, "SD": 0, "M": 0, "D": 0, "S_received": 0}

    events = [
        (point.iteration, site_id, point)
        for site_id, stream in enumerate(streams.per_site)
        for point in stream
    ]
    events.sort(key=lambda e: (e[0], e[1]))

    for iteration, site_id, point in events:
        site = sites[site_id]
        trains = site.excluded_category != point.label
        bytes_up = 0
        bytes_down = 0

        if pattern == "P1":
            model = site.model
            predicted = predict(model, point.features) if model else ABSTAIN
            used_size = model.serialized_size if model else 0
            score_update(site.tracker, predicted, point.label)
            assert site.frame is not None
            if trains:
                site.frame.insert(point)
                site.model = fit(learner, site.frame, max_depth=max_depth)
            latency = edge_ms

        elif pattern == "P2":
            assert cloud is not None
            model = cloud.global_model
            predicted = predict(model, point.features) if model else ABSTAIN
            used_size = model.serialized_size if model else 0
            score_update(site.tracker, predicted, point.label)
            s_bytes = len(encode_s(point.features))
            d_bytes = len(encode_d(predicted))
            bytes_up = s_bytes
            bytes_down = d_bytes
            counters["S"] += 1
            counters["S_received"] += 1
            counters["D"] += 1
            cloud.arrivals += 1
            if trains:
                cloud.global_frame.insert(point)
                cloud.global_model = fit(learner, cloud.global_frame, max_depth=max_depth)
            latency = (
                transaction_time(medium, s_bytes)
                + cloud_ms
                + transaction_time(medium, d_bytes)
            )

        else:  # P0
            assert cloud is not None
            bytes_down = _activate_delivered(site)
            model = site.model
            predicted = predict(model, point.features) if model else ABSTAIN
            used_size = model.serialized_size if model else 0
            score_update(site.tracker, predicted, point.label)
            bytes_up = len(encode_s(point.features))
            counters["S"] += 1
            counters["S_received"] += 1
            cloud.arrivals += 1
            if trains:
                # the cloud's model is only observable at push boundaries,
                # so retraining happens lazily there
                cloud.global_frame.insert(point)
            latency = edge_ms
            end_time = site.clock + latency
            if cloud.arrivals % cloud.push_interval == 0 and len(cloud.global_frame):
                snapshot = fit(learner, cloud.global_frame, max_depth=max_depth)
                cloud.global_model = snapshot
                cloud.pushes += 1
                delivery = end_time + transaction_time(medium, 1 + snapshot.serialized_size)
                for target in sites:
                    target.pending.append((delivery, snapshot))
                counters["M"] += len(sites)

        site.clock += latency
        site.steps += 1
        log.append(
            site=site_id, iteration=iteration, predicted=predicted,
            actual=point.label, score_avg=site.tracker.average,
            latency_ms=latency, bytes_up=bytes_up, bytes_down=bytes_down,
            model_size=used_size,
        )

    return PatternRun(
        pattern=pattern, learner=learner, medium_name=medium.name,
        n_sites=streams.n_sites, frame_capacity=frame_capacity,
        push_interval=push_interval, log=log, counters=counters,
        sites=sites, cloud=cloud,
    )
