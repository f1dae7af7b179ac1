"""Experiment harness: scenario configs, run matrices, trend verdicts.

A scenario names one (dataset, pattern, division, learner, frame, sites,
medium) combination plus the seeds to repeat it over.  ``run_matrix`` plays
every scenario, averages per-seed metrics into one result row each, and
never lets a failing scenario abort the rest: the failure lands in that
row's ``status``/``error`` fields.

``without_one`` evaluation keeps the routing of the equal division and
withholds each site's excluded category from training only, so every site
is still scored on all categories.  (``streams.divide_without_one`` instead
re-routes the excluded points; that variant stays available for callers who
want no site to even observe its category.)

``trend_checks`` turns a result table into pass/fail verdicts for the
qualitative claims the simulator is meant to reproduce; rows are found by
their configuration, and a claim whose rows are missing or ambiguous gets
``not_evaluable`` rather than a silent pass.
"""

from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field, replace
from statistics import fmean
from typing import Callable

from .learners import LEARNER_KINDS
from .netsim import (
    APP_CLASSES,
    AppClass,
    MediumProfile,
    MessageSizes,
    Recommendation,
    default_profiles,
    recommend,
)
from .patterns import PATTERNS, PatternRun, run_pattern
from .streams import (
    CirclesConfig,
    LabeledPoint,
    RandomTreeConfig,
    SiteStreams,
    divide_equal,
    generate_circles,
    generate_random_tree_stream,
)

DATASETS = ("circles", "random_tree")
DIVISIONS = ("equal", "without_one")

RESULTS_HEADER = (
    "name,dataset,pattern,division,learner,frame_capacity,n_sites,"
    "n_iterations,push_interval,medium,n_seeds,status,mean_score,"
    "mean_latency_ms,mean_model_size,mean_bytes_up,mean_bytes_down,"
    "offset_w1,offset_w2,offset_w3,error"
)

# Staleness windows (iterations since the active model's activation) that
# the offset report buckets P0 samples into.
OFFSET_WINDOWS = ((0, 50), (50, 100), (100, 150))


@dataclass(frozen=True)
class ScenarioConfig:
    """One named experiment: dataset, pattern and division under fixed knobs."""

    name: str
    dataset: str
    pattern: str
    division: str = "equal"
    learner: str = "gaussian_nb"
    frame_capacity: int = 150
    n_sites: int = 5
    n_iterations: int | None = None
    push_interval: int = 150
    medium: str = "instant"
    seeds: tuple[int, ...] = tuple(range(10))
    edge_ms: float = 1.0
    cloud_ms: float = 1.0
    max_depth: int | None = 10
    circles: CirclesConfig = field(default_factory=CirclesConfig)
    random_tree: RandomTreeConfig = field(default_factory=RandomTreeConfig)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("scenario name must be non-empty")
        if self.dataset not in DATASETS:
            raise ValueError(f"unknown dataset {self.dataset!r}")
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.division not in DIVISIONS:
            raise ValueError(f"unknown division {self.division!r}")
        if self.learner not in LEARNER_KINDS:
            raise ValueError(f"unknown learner {self.learner!r}")
        if self.division == "without_one" and self.n_sites < 2:
            raise ValueError("without_one evaluation needs at least 2 sites")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")

    @property
    def n_categories(self) -> int:
        if self.dataset == "circles":
            return self.circles.n_categories
        return self.random_tree.n_categories


def build_points(config: ScenarioConfig, seed: int) -> list[LabeledPoint]:
    """Generate the scenario's stream for one seed."""
    if config.dataset == "circles":
        cfg = replace(config.circles, seed=seed)
        return generate_circles(cfg, n_iterations=config.n_iterations)
    cfg = replace(
        config.random_tree,
        seed_a=2 * seed + 1,
        seed_b=2 * seed + 2,
    )
    if config.n_iterations is not None:
        cfg = replace(cfg, n_points=config.n_iterations)
    return generate_random_tree_stream(cfg)


def build_site_streams(config: ScenarioConfig, points: list[LabeledPoint]) -> SiteStreams:
    """Route the stream to sites according to the scenario's division.

    ``without_one`` routes like ``equal`` and marks category ``i mod C`` as
    withheld from site ``i``'s training; the pattern engine skips frame
    insertion for those points while still scoring them.
    """
    divided = divide_equal(points, config.n_sites)
    if config.division == "equal":
        return divided
    missing = {i: i % config.n_categories for i in range(config.n_sites)}
    return SiteStreams(per_site=divided.per_site, missing_category=missing)


def run_scenario(
    config: ScenarioConfig,
    seed: int,
    profiles: dict[str, MediumProfile] | None = None,
) -> PatternRun:
    """Play one (scenario, seed) pair and return the finished run."""
    if profiles is None:
        profiles = default_profiles()
    if config.medium not in profiles:
        raise ValueError(f"unknown medium {config.medium!r}")
    points = build_points(config, seed)
    streams = build_site_streams(config, points)
    return run_pattern(
        config.pattern,
        streams,
        learner=config.learner,
        frame_capacity=config.frame_capacity,
        medium=profiles[config.medium],
        push_interval=config.push_interval,
        edge_ms=config.edge_ms,
        cloud_ms=config.cloud_ms,
        max_depth=config.max_depth,
    )


@dataclass
class OffsetReport:
    """P0 scores bucketed by how stale the predicting model was.

    A sample's offset is its global iteration minus the iteration at which
    its site last activated a pushed model (stream start before the first
    activation).  Offsets beyond the last window are dropped.
    """

    window_scores: tuple[float | None, float | None, float | None]
    window_counts: tuple[int, int, int]
    n_dropped: int


def p0_offset_report(run: PatternRun) -> OffsetReport:
    if run.pattern != "P0":
        raise ValueError("offset report only applies to P0 runs")
    last_activation: dict[int, int] = {}
    hits = [0, 0, 0]
    counts = [0, 0, 0]
    dropped = 0
    log = run.log
    for i in range(len(log)):
        site = log.site[i]
        iteration = log.iteration[i]
        if log.bytes_down[i] > 0:
            last_activation[site] = iteration
        offset = iteration - last_activation.get(site, 0)
        for w, (lo, hi) in enumerate(OFFSET_WINDOWS):
            if lo <= offset < hi:
                counts[w] += 1
                hits[w] += int(log.predicted[i] == log.actual[i])
                break
        else:
            dropped += 1
    scores = tuple(
        hits[w] / counts[w] if counts[w] else None for w in range(3)
    )
    return OffsetReport(
        window_scores=scores,  # type: ignore[arg-type]
        window_counts=(counts[0], counts[1], counts[2]),
        n_dropped=dropped,
    )


@dataclass
class ResultRow:
    """One scenario's metrics averaged over its seeds."""

    name: str
    dataset: str
    pattern: str
    division: str
    learner: str
    frame_capacity: int
    n_sites: int
    n_iterations: int | None
    push_interval: int
    medium: str
    n_seeds: int
    status: str = "ok"
    mean_score: float | None = None
    mean_latency_ms: float | None = None
    mean_model_size: float | None = None
    mean_bytes_up: float | None = None
    mean_bytes_down: float | None = None
    offset_w1: float | None = None
    offset_w2: float | None = None
    offset_w3: float | None = None
    error: str = ""


def run_matrix(
    configs: list[ScenarioConfig],
    profiles: dict[str, MediumProfile] | None = None,
    *,
    on_run: Callable[[ScenarioConfig, int, PatternRun], None] | None = None,
) -> list[ResultRow]:
    """Run every scenario over its seeds; one averaged row per scenario.

    A scenario that raises is recorded as an error row and the matrix keeps
    going.  ``on_run`` sees every finished run (step-log dumps, figures).
    """
    if profiles is None:
        profiles = default_profiles()
    rows: list[ResultRow] = []
    for config in configs:
        row = ResultRow(
            name=config.name, dataset=config.dataset, pattern=config.pattern,
            division=config.division, learner=config.learner,
            frame_capacity=config.frame_capacity, n_sites=config.n_sites,
            n_iterations=config.n_iterations, push_interval=config.push_interval,
            medium=config.medium, n_seeds=len(config.seeds),
        )
        scores, latencies, sizes, ups, downs = [], [], [], [], []
        offsets: list[OffsetReport] = []
        try:
            for seed in config.seeds:
                run = run_scenario(config, seed, profiles)
                scores.append(run.mean_score())
                latencies.append(run.mean_latency_ms())
                sizes.append(run.mean_model_size())
                ups.append(float(run.total_bytes_up()))
                downs.append(float(run.total_bytes_down()))
                if config.pattern == "P0":
                    offsets.append(p0_offset_report(run))
                if on_run is not None:
                    on_run(config, seed, run)
        except Exception as exc:  # noqa: BLE001 - isolate scenario failures
            row.status = "error"
            row.error = f"{type(exc).__name__}: {exc}"
            rows.append(row)
            continue
        row.mean_score = fmean(scores)
        row.mean_latency_ms = fmean(latencies)
        row.mean_model_size = fmean(sizes)
        row.mean_bytes_up = fmean(ups)
        row.mean_bytes_down = fmean(downs)
        if offsets:
            for w in range(3):
                values = [r.window_scores[w] for r in offsets if r.window_scores[w] is not None]
                if values:
                    setattr(row, f"offset_w{w + 1}", fmean(values))
        rows.append(row)
    return rows


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results_csv(rows: list[ResultRow], path: str) -> None:
    header = RESULTS_HEADER.split(",")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(getattr(row, col)) for col in header])


def load_results_csv(path: str) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RESULTS_HEADER.split(","):
            raise ValueError(f"unexpected results header in {path}")
        rows = []
        for record in reader:
            data = dict(zip(header, record))
            rows.append(ResultRow(
                name=data["name"], dataset=data["dataset"],
                pattern=data["pattern"], division=data["division"],
                learner=data["learner"],
                frame_capacity=int(data["frame_capacity"]),
                n_sites=int(data["n_sites"]),
                n_iterations=int(data["n_iterations"]) if data["n_iterations"] else None,
                push_interval=int(data["push_interval"]),
                medium=data["medium"], n_seeds=int(data["n_seeds"]),
                status=data["status"],
                mean_score=float(data["mean_score"]) if data["mean_score"] else None,
                mean_latency_ms=float(data["mean_latency_ms"]) if data["mean_latency_ms"] else None,
                mean_model_size=float(data["mean_model_size"]) if data["mean_model_size"] else None,
                mean_bytes_up=float(data["mean_bytes_up"]) if data["mean_bytes_up"] else None,
                mean_bytes_down=float(data["mean_bytes_down"]) if data["mean_bytes_down"] else None,
                offset_w1=float(data["offset_w1"]) if data["offset_w1"] else None,
                offset_w2=float(data["offset_w2"]) if data["offset_w2"] else None,
                offset_w3=float(data["offset_w3"]) if data["offset_w3"] else None,
                error=data["error"],
            ))
    return rows


def _match(rows: list[ResultRow], **fields: object) -> list[ResultRow]:
    out = []
    for row in rows:
        if row.status != "ok":
            continue
        if all(getattr(row, k) == v for k, v in fields.items()):
            out.append(row)
    return out


def _claim(verdict: str, detail: str, **values: object) -> dict:
    return {"verdict": verdict, "detail": detail, "values": values}


def trend_checks(
    rows: list[ResultRow],
    *,
    division_margin: float = 0.05,
    frame_margin: float = 0.02,
    offset_margin: float = 0.03,
    offset_flat_margin: float = 0.05,
    order_margin: float = 0.02,
) -> dict:
    """Judge the qualitative claims a result table is expected to show.

    Claims:
      * ``division_gap_p1``        -- isolated learners suffer from a
        withheld category: P1 equal beats P1 without-one by more than
        ``division_margin`` on circles at frame 150.
      * ``division_insensitive_p2`` -- the centralized learner does not:
        the same comparison for P2 stays inside ``division_margin``.
      * ``frame_sweet_spot``       -- under drift a frame can be too small
        and too large: 150 scores at least as well as both 50 and 300, up
        to ``frame_margin`` (P1, circles, equal routing, matching site
        counts).
      * ``offset_decay_circles`` / ``offset_flat_random_tree`` -- P0 scores
        decay with model staleness under continuous drift and stay flat
        without it.
      * ``pattern_order_without_one`` -- with withheld categories the
        centralized patterns hold up: P2 >= P0 >= P1 up to ``order_margin``.
    """
    claims: dict[str, dict] = {}

    def unique(tag: str, **fields: object) -> ResultRow | None:
        found = _match(rows, **fields)
        if len(found) == 1:
            return found[0]
        claims[tag] = _claim(
            "not_evaluable",
            f"expected exactly one ok row matching {fields}, found {len(found)}",
        )
        return None

    # division gap under P1 / insensitivity under P2
    for tag, pattern, check_gap in (
        ("division_gap_p1", "P1", True),
        ("division_insensitive_p2", "P2", False),
    ):
        wo = unique(tag, pattern=pattern, dataset="circles",
                    division="without_one", frame_capacity=150)
        if wo is None:
            continue
        eq = unique(tag, pattern=pattern, dataset="circles", division="equal",
                    frame_capacity=150, n_sites=wo.n_sites)
        if eq is None:
            continue
        assert eq.mean_score is not None and wo.mean_score is not None
        gap = eq.mean_score - wo.mean_score
        if check_gap:
            ok = gap > division_margin
            detail = f"equal - without_one = {gap:.4f} (need > {division_margin})"
        else:
            ok = abs(gap) < division_margin
            detail = f"|equal - without_one| = {abs(gap):.4f} (need < {division_margin})"
        claims[tag] = _claim(
            "pass" if ok else "fail", detail,
            equal=eq.mean_score, without_one=wo.mean_score, gap=gap,
        )

    # frame size sweet spot
    tag = "frame_sweet_spot"
    candidates = _match(rows, pattern="P1", dataset="circles", division="equal")
    groups: dict[int, dict[int, list[ResultRow]]] = {}
    for row in candidates:
        groups.setdefault(row.n_sites, {}).setdefault(row.frame_capacity, []).append(row)
    qualifying = {
        sites: frames
        for sites, frames in groups.items()
        if all(len(frames.get(f, [])) == 1 for f in (50, 150, 300))
    }
    if len(qualifying) != 1:
        claims[tag] = _claim(
            "not_evaluable",
            "need exactly one site-count with one P1/circles/equal row per "
            f"frame in (50, 150, 300); found {len(qualifying)} candidates",
        )
    else:
        frames = next(iter(qualifying.values()))
        s50 = frames[50][0].mean_score
        s150 = frames[150][0].mean_score
        s300 = frames[300][0].mean_score
        assert s50 is not None and s150 is not None and s300 is not None
        ok = s150 >= s50 - frame_margin and s150 >= s300 - frame_margin
        claims[tag] = _claim(
            "pass" if ok else "fail",
            f"frame 150 = {s150:.4f} vs 50 = {s50:.4f}, 300 = {s300:.4f} "
            f"(need 150 >= both within {frame_margin})",
            frame_50=s50, frame_150=s150, frame_300=s300,
        )

    # staleness decay under drift, flat without
    for tag, dataset, decays in (
        ("offset_decay_circles", "circles", True),
        ("offset_flat_random_tree", "random_tree", False),
    ):
        row = unique(tag, pattern="P0", dataset=dataset, division="equal")
        if row is None:
            continue
        if row.offset_w1 is None or row.offset_w3 is None:
            claims[tag] = _claim("not_evaluable", "offset windows missing from row")
            continue
        gap = row.offset_w1 - row.offset_w3
        if decays:
            ok = gap > offset_margin
            detail = f"w1 - w3 = {gap:.4f} (need > {offset_margin})"
        else:
            ok = abs(gap) < offset_flat_margin
            detail = f"|w1 - w3| = {abs(gap):.4f} (need < {offset_flat_margin})"
        claims[tag] = _claim(
            "pass" if ok else "fail", detail,
            w1=row.offset_w1, w2=row.offset_w2, w3=row.offset_w3,
        )

    # pattern ordering under withheld categories
    tag = "pattern_order_without_one"
    per_pattern: dict[str, ResultRow] = {}
    for pattern in PATTERNS:
        found = _match(rows, pattern=pattern, dataset="circles",
                       division="without_one", frame_capacity=150)
        if len(found) != 1:
            claims[tag] = _claim(
                "not_evaluable",
                f"expected one {pattern}/circles/without_one row at frame "
                f"150, found {len(found)}",
            )
            break
        per_pattern[pattern] = found[0]
    else:
        if len({r.n_sites for r in per_pattern.values()}) != 1:
            claims[tag] = _claim(
                "not_evaluable", "without_one rows disagree on n_sites",
            )
        else:
            s0 = per_pattern["P0"].mean_score
            s1 = per_pattern["P1"].mean_score
            s2 = per_pattern["P2"].mean_score
            assert s0 is not None and s1 is not None and s2 is not None
            ok = s2 >= s0 - order_margin and s0 >= s1 - order_margin
            claims[tag] = _claim(
                "pass" if ok else "fail",
                f"P2 = {s2:.4f} >= P0 = {s0:.4f} >= P1 = {s1:.4f} "
                f"(slack {order_margin})",
                p0=s0, p1=s1, p2=s2,
            )

    n_pass = sum(1 for c in claims.values() if c["verdict"] == "pass")
    n_fail = sum(1 for c in claims.values() if c["verdict"] == "fail")
    n_ne = sum(1 for c in claims.values() if c["verdict"] == "not_evaluable")
    overall = "fail" if n_fail else ("not_evaluable" if n_ne else "pass")
    return {
        "claims": claims,
        "n_pass": n_pass,
        "n_fail": n_fail,
        "n_not_evaluable": n_ne,
        "verdict": overall,
    }


RECOMMENDATION_HEADER = "app_class,pattern,medium,latency_ms,feasible"

DEFAULT_MESSAGE_SIZES = MessageSizes(s_bytes=21, d_bytes=5, m_bytes=330)


def emit_recommendation_table(
    profiles: dict[str, MediumProfile],
    *,
    app_classes: tuple[AppClass, ...] = APP_CLASSES,
    patterns: tuple[str, ...] = PATTERNS,
    sizes: MessageSizes = DEFAULT_MESSAGE_SIZES,
    edge_ms: float = 1.0,
    cloud_ms: float = 1.0,
) -> list[Recommendation]:
    """Feasibility rows for every app class x pattern x medium combination."""
    media = tuple(profiles[name] for name in sorted(profiles))
    return recommend(
        app_classes, patterns, media, sizes, edge_ms=edge_ms, cloud_ms=cloud_ms
    )


def write_recommendation_csv(rows: list[Recommendation], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECOMMENDATION_HEADER.split(","))
        for row in rows:
            writer.writerow([
                row.app_class, row.pattern, row.medium,
                repr(row.latency_ms), "true" if row.feasible else "false",
            ])


# -- presets ---------------------------------------------------------------

# Multi-site circles runs scale the rotation so that drift per site step
# matches the single-site default; otherwise each site's frame spans so much
# rotation that neighboring categories blur together.
def _per_site_circles(n_sites: int) -> CirclesConfig:
    base = CirclesConfig()
    return replace(base, angular_increment=base.angular_increment / n_sites)


def trend_grid(*, seeds: tuple[int, ...] = tuple(range(10))) -> list[ScenarioConfig]:
    """The scenario grid whose results exercise every trend claim."""
    shared = dict(dataset="circles", learner="gaussian_nb", medium="instant",
                  seeds=seeds)
    scaled = _per_site_circles(5)
    grid = [
        ScenarioConfig(name="p1-equal-f150", pattern="P1", division="equal",
                       frame_capacity=150, n_sites=5, circles=scaled, **shared),
        ScenarioConfig(name="p1-wo-f150", pattern="P1", division="without_one",
                       frame_capacity=150, n_sites=5, circles=scaled, **shared),
        ScenarioConfig(name="p2-equal-f150", pattern="P2", division="equal",
                       frame_capacity=150, n_sites=5, circles=scaled, **shared),
        ScenarioConfig(name="p2-wo-f150", pattern="P2", division="without_one",
                       frame_capacity=150, n_sites=5, circles=scaled, **shared),
        ScenarioConfig(name="p0-wo-f150", pattern="P0", division="without_one",
                       frame_capacity=150, n_sites=5, push_interval=150,
                       circles=scaled, **shared),
        ScenarioConfig(name="p1-frame-50", pattern="P1", division="equal",
                       frame_capacity=50, n_sites=1, **shared),
        ScenarioConfig(name="p1-frame-150", pattern="P1", division="equal",
                       frame_capacity=150, n_sites=1, **shared),
        ScenarioConfig(name="p1-frame-300", pattern="P1", division="equal",
                       frame_capacity=300, n_sites=1, **shared),
        ScenarioConfig(name="p0-offset-circles", pattern="P0", division="equal",
                       frame_capacity=150, n_sites=5, push_interval=150,
                       **shared),
        # one mid-stream concept switch: drift slow and weak enough that
        # model staleness should not show up in the offset windows
        ScenarioConfig(name="p0-offset-random-tree", dataset="random_tree",
                       pattern="P0", division="equal", frame_capacity=150,
                       n_sites=5, push_interval=150, learner="gaussian_nb",
                       medium="instant", seeds=seeds,
                       random_tree=RandomTreeConfig(alternation_period=1750)),
    ]
    return grid


def full_grid(*, seeds: tuple[int, ...] = tuple(range(10))) -> list[ScenarioConfig]:
    """Full sweep: both datasets and divisions, three frames, P1 and P2."""
    configs = []
    scaled = _per_site_circles(5)
    for dataset in DATASETS:
        for division in DIVISIONS:
            for frame in (50, 150, 300):
                for pattern in ("P1", "P2"):
                    kwargs = dict(
                        name=f"{pattern.lower()}-{dataset.replace('_', '-')}-"
                             f"{division.replace('_', '-')}-f{frame}",
                        dataset=dataset, pattern=pattern, division=division,
                        learner="gaussian_nb", frame_capacity=frame,
                        n_sites=5, medium="instant", seeds=seeds,
                    )
                    if dataset == "circles":
                        kwargs["circles"] = scaled
                    configs.append(ScenarioConfig(**kwargs))
    return configs


def case_presets() -> dict[str, ScenarioConfig]:
    """Single-scenario presets for typical deployment shapes.

    c1: wired factory, cloud-trained models pushed to edge (P0, ethernet).
    c2: remote site on a thin uplink; pushes are rare so P0 still works (2g).
    c3: autonomous cell learning locally over wifi (P1).
    c4: thin edge, wired: every decision from the cloud (P2, ethernet).
    """
    base = dict(dataset="circles", learner="gaussian_nb", frame_capacity=150,
                n_sites=5, seeds=(0,), circles=_per_site_circles(5))
    return {
        "c1": ScenarioConfig(name="c1-wired-cloud-learn", pattern="P0",
                             division="equal", medium="ethernet",
                             push_interval=150, **base),
        "c2": ScenarioConfig(name="c2-remote-thin-uplink", pattern="P0",
                             division="equal", medium="2g",
                             push_interval=150, **base),
        "c3": ScenarioConfig(name="c3-autonomous-cell", pattern="P1",
                             division="equal", medium="wifi", **base),
        "c4": ScenarioConfig(name="c4-thin-edge-wired", pattern="P2",
                             division="equal", medium="ethernet", **base),
    }


def preset(name: str, *, seeds: tuple[int, ...] | None = None) -> list[ScenarioConfig]:
    """Look up a named scenario preset for the command line."""
    if name == "trends":
        return trend_grid(**({"seeds": seeds} if seeds is not None else {}))
    if name == "full-grid":
        return full_grid(**({"seeds": seeds} if seeds is not None else {}))
    cases = case_presets()
    if name in cases:
        config = cases[name]
        if seeds is not None:
            config = replace(config, seeds=seeds)
        return [config]
    known = ["trends", "full-grid", *sorted(cases)]
    raise ValueError(f"unknown preset {name!r} (known: {', '.join(known)})")


# -- INI scenario files ----------------------------------------------------

_SCENARIO_KEYS = {
    "dataset", "pattern", "division", "learner", "frame_capacity", "n_sites",
    "n_iterations", "push_interval", "medium", "seeds", "edge_ms", "cloud_ms",
    "max_depth", "circles_n_categories", "circles_points_per_category",
    "circles_angular_increment", "circles_center_radius", "circles_radius",
    "circles_noise_std", "rt_n_features", "rt_n_categories", "rt_max_depth",
    "rt_alternation_period",
}


def _parse_seeds(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("seeds must list at least one integer")
    return tuple(int(p) for p in parts)


def _parse_optional_int(text: str) -> int | None:
    return None if text.strip().lower() == "none" else int(text)


def load_scenarios(path: str) -> list[ScenarioConfig]:
    """Read scenarios from an INI file: one section per scenario.

    A ``[defaults]`` section applies to all scenarios; any other section
    name becomes the scenario name.  Unknown keys are errors.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"scenario file not found: {path}")
    defaults = dict(parser["defaults"]) if parser.has_section("defaults") else {}
    for key in defaults:
        if key not in _SCENARIO_KEYS:
            raise ValueError(f"[defaults] unknown key: {key}")
    configs = []
    for section in parser.sections():
        if section == "defaults":
            continue
        raw = dict(defaults)
        raw.update(parser[section])
        unknown = set(raw) - _SCENARIO_KEYS
        if unknown:
            raise ValueError(f"[{section}] unknown keys: {', '.join(sorted(unknown))}")
        if "dataset" not in raw or "pattern" not in raw:
            raise ValueError(f"[{section}] needs at least dataset and pattern")
        circles = CirclesConfig(
            n_categories=int(raw.get("circles_n_categories", CirclesConfig.n_categories)),
            points_per_category=int(raw.get(
                "circles_points_per_category", CirclesConfig.points_per_category)),
            angular_increment=float(raw.get(
                "circles_angular_increment", CirclesConfig.angular_increment)),
            cluster_center_radius=float(raw.get(
                "circles_center_radius", CirclesConfig.cluster_center_radius)),
            cluster_radius=float(raw.get("circles_radius", CirclesConfig.cluster_radius)),
            noise_std=float(raw.get("circles_noise_std", CirclesConfig.noise_std)),
        )
        random_tree = RandomTreeConfig(
            n_features=int(raw.get("rt_n_features", RandomTreeConfig.n_features)),
            n_categories=int(raw.get("rt_n_categories", RandomTreeConfig.n_categories)),
            max_depth=int(raw.get("rt_max_depth", RandomTreeConfig.max_depth)),
            alternation_period=int(raw.get(
                "rt_alternation_period", RandomTreeConfig.alternation_period)),
        )
        configs.append(ScenarioConfig(
            name=section,
            dataset=raw["dataset"],
            pattern=raw["pattern"],
            division=raw.get("division", "equal"),
            learner=raw.get("learner", "gaussian_nb"),
            frame_capacity=int(raw.get("frame_capacity", 150)),
            n_sites=int(raw.get("n_sites", 5)),
            n_iterations=_parse_optional_int(raw.get("n_iterations", "none")),
            push_interval=int(raw.get("push_interval", 150)),
            medium=raw.get("medium", "instant"),
            seeds=_parse_seeds(raw.get("seeds", "0,1,2,3,4,5,6,7,8,9")),
            edge_ms=float(raw.get("edge_ms", 1.0)),
            cloud_ms=float(raw.get("cloud_ms", 1.0)),
            max_depth=_parse_optional_int(raw.get("max_depth", "10")),
            circles=circles,
            random_tree=random_tree,
        ))
    if not configs:
        raise ValueError(f"no scenario sections in {path}")
    return configs


def mean_offset_gap(report: OffsetReport) -> float | None:
    """Convenience: first-window minus last-window score, None if either missing."""
    w1, _, w3 = report.window_scores
    if w1 is None or w3 is None:
        return None
    return w1 - w3
