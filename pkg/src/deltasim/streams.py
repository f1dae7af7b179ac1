"""Synthetic concept-drift streams and their division across edge sites.

Two stream families are provided:

* ``generate_circles`` -- labelled 2-D points emitted from category clusters
  whose centers sit equally spaced on a circle and rotate at constant speed,
  so the class regions drift smoothly over time.
* ``generate_random_tree_stream`` -- uniform feature vectors labelled by one
  of two randomly built decision trees, with the active tree alternating
  every fixed number of points, so the concept changes abruptly but weakly.

A full stream can then be dealt out to ``n_sites`` edge environments either
evenly per category (``divide_equal``) or with one category withheld from
each site and re-dealt to the others (``divide_without_one``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LabeledPoint:
    """One stream sample: feature vector, category label, global position."""

    features: tuple[float, ...]
    label: int
    iteration: int

    def __post_init__(self) -> None:
        if len(self.features) == 0:
            raise ValueError("features must be non-empty")
        if self.label < 0:
            raise ValueError("label must be >= 0")
        if self.iteration < 0:
            raise ValueError("iteration must be >= 0")


@dataclass(frozen=True)
class CirclesConfig:
    """Rotating-clusters stream parameters.

    Cluster centers start equally spaced on a circle of radius
    ``cluster_center_radius`` and every emitted point advances all centers
    by ``angular_increment`` radians.  Each iteration emits one point for
    the next category in round-robin order: the rotated center plus
    isotropic Gaussian noise of standard deviation ``noise_std``.
    """

    n_categories: int = 7
    points_per_category: int = 500
    angular_increment: float = math.pi / (720 * 3)
    cluster_center_radius: float = 1.0
    cluster_radius: float = 0.1
    noise_std: float = 0.1
    seed: int = 0

    def validate(self) -> None:
        if self.n_categories < 2:
            raise ValueError("n_categories must be >= 2")
        if self.points_per_category < 1:
            raise ValueError("points_per_category must be >= 1")
        if not self.angular_increment > 0:
            raise ValueError("angular_increment must be > 0")
        if not self.cluster_center_radius > 0:
            raise ValueError("cluster_center_radius must be > 0")
        if not self.cluster_radius > 0:
            raise ValueError("cluster_radius must be > 0")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")


@dataclass(frozen=True)
class RandomTreeConfig:
    """Alternating random-tree stream parameters.

    Features are uniform in [0, 1]^n_features.  Two labelling trees are
    built from ``seed_a`` and ``seed_b``; the tree in force alternates
    every ``alternation_period`` points, starting with tree A.
    """

    n_features: int = 2
    n_categories: int = 7
    max_depth: int = 5
    alternation_period: int = 500
    seed_a: int = 1
    seed_b: int = 2
    n_points: int = 3500

    def validate(self) -> None:
        if self.n_features < 1:
            raise ValueError("n_features must be >= 1")
        if self.n_categories < 2:
            raise ValueError("n_categories must be >= 2")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.alternation_period < 1:
            raise ValueError("alternation_period must be >= 1")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.seed_a == self.seed_b:
            raise ValueError("seed_a and seed_b must differ")


@dataclass
class SiteStreams:
    """Per-site sub-streams produced by a division policy.

    ``missing_category`` maps site id -> category withheld from that site's
    training set; it is None for the equal division.
    """

    per_site: list[list[LabeledPoint]]
    missing_category: dict[int, int] | None = None

    def __post_init__(self) -> None:
        if not self.per_site:
            raise ValueError("per_site must list at least one site")
        if self.missing_category is not None:
            for site in self.missing_category:
                if not 0 <= site < len(self.per_site):
                    raise ValueError(f"missing_category names unknown site {site}")

    @property
    def n_sites(self) -> int:
        return len(self.per_site)

    def total_points(self) -> int:
        return sum(len(s) for s in self.per_site)


def generate_circles(config: CirclesConfig, n_iterations: int | None = None) -> list[LabeledPoint]:
    """Emit the rotating-clusters stream.

    Iteration k emits one point of category ``k % n_categories`` at that
    category's initial center rotated by ``k * angular_increment``, plus
    isotropic noise.  Default length is one full pass of
    ``points_per_category`` rounds over the categories.
    """
    config.validate()
    if n_iterations is None:
        n_iterations = config.n_categories * config.points_per_category
    if n_iterations < 0:
        raise ValueError("n_iterations must be >= 0")
    rng = np.random.default_rng(config.seed)
    k = np.arange(n_iterations)
    labels = k % config.n_categories
    base_angle = 2.0 * np.pi * labels / config.n_categories
    angle = base_angle + k * config.angular_increment
    xy = config.cluster_center_radius * np.stack([np.cos(angle), np.sin(angle)], axis=1)
    if config.noise_std > 0:
        xy = xy + rng.normal(0.0, config.noise_std, size=xy.shape)
    return [
        LabeledPoint((float(xy[i, 0]), float(xy[i, 1])), int(labels[i]), int(i))
        for i in range(n_iterations)
    ]


@dataclass
class _RTNode:
    # Labelling-tree node; leaf iff feature < 0.
    feature: int = -1
    threshold: float = 0.0
    left: "_RTNode | None" = None
    right: "_RTNode | None" = None
    label: int = -1


def _build_random_tree(rng: np.random.Generator, config: RandomTreeConfig) -> _RTNode:
    # Thresholds are drawn inside the box inherited from ancestor splits so
    # no branch is dead.
    def build(depth: int, lo: np.ndarray, hi: np.ndarray) -> _RTNode:
        if depth >= config.max_depth:
            return _RTNode(label=int(rng.integers(config.n_categories)))
        f = int(rng.integers(config.n_features))
        t = float(rng.uniform(lo[f], hi[f]))
        left_hi = hi.copy()
        left_hi[f] = t
        right_lo = lo.copy()
        right_lo[f] = t
        return _RTNode(
            feature=f,
            threshold=t,
            left=build(depth + 1, lo, left_hi),
            right=build(depth + 1, right_lo, hi),
        )

    return build(0, np.zeros(config.n_features), np.ones(config.n_features))


def _walk(node: _RTNode, x: np.ndarray) -> int:
    while node.feature >= 0:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


def generate_random_tree_stream(
    config: RandomTreeConfig, n_points: int | None = None
) -> list[LabeledPoint]:
    """Emit the alternating random-tree stream.

    Point j is labelled by tree A when ``(j // alternation_period)`` is even
    and by tree B otherwise.
    """
    config.validate()
    if n_points is None:
        n_points = config.n_points
    if n_points < 0:
        raise ValueError("n_points must be >= 0")
    tree_a = _build_random_tree(np.random.default_rng(config.seed_a), config)
    tree_b = _build_random_tree(np.random.default_rng(config.seed_b), config)
    feature_rng = np.random.default_rng([config.seed_a, config.seed_b])
    feats = feature_rng.random((n_points, config.n_features))
    points = []
    for j in range(n_points):
        tree = tree_a if (j // config.alternation_period) % 2 == 0 else tree_b
        label = _walk(tree, feats[j])
        points.append(LabeledPoint(tuple(float(v) for v in feats[j]), label, j))
    return points


def divide_equal(stream: list[LabeledPoint], n_sites: int) -> SiteStreams:
    """Deal each category's points round-robin over the sites.

    Stream order is preserved within every site, so per-site per-category
    counts differ by at most one and the union over sites is the original
    stream.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if not stream:
        raise ValueError("cannot divide an empty stream")
    per_site: list[list[LabeledPoint]] = [[] for _ in range(n_sites)]
    counter: dict[int, int] = {}
    for point in stream:
        seen = counter.get(point.label, 0)
        per_site[seen % n_sites].append(point)
        counter[point.label] = seen + 1
    return SiteStreams(per_site=per_site, missing_category=None)


def divide_without_one(
    stream: list[LabeledPoint], n_sites: int, assignment: dict[int, int]
) -> SiteStreams:
    """Deal points round-robin but never give site i its assigned category.

    ``assignment`` maps every site id to the category withheld from it;
    the withheld points are dealt over the remaining sites instead, so the
    total point count is conserved.  Rejected if any site id is missing,
    if an assigned category never occurs in the stream, or if an exclusion
    would orphan a category entirely.
    """
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2 for without-one division")
    if not stream:
        raise ValueError("cannot divide an empty stream")
    if sorted(assignment) != list(range(n_sites)):
        raise ValueError("assignment must cover exactly the site ids 0..n_sites-1")
    present = {p.label for p in stream}
    for site, category in assignment.items():
        if category not in present:
            raise ValueError(f"assigned category {category} for site {site} not in stream")
    eligible: dict[int, list[int]] = {}
    for category in sorted(present):
        sites = [s for s in range(n_sites) if assignment[s] != category]
        if not sites:
            raise ValueError(f"category {category} is excluded from every site")
        eligible[category] = sites
    per_site: list[list[LabeledPoint]] = [[] for _ in range(n_sites)]
    counter: dict[int, int] = {}
    for point in stream:
        seen = counter.get(point.label, 0)
        sites = eligible[point.label]
        per_site[sites[seen % len(sites)]].append(point)
        counter[point.label] = seen + 1
    return SiteStreams(per_site=per_site, missing_category=dict(assignment))


def dump_stream_csv(points: list[LabeledPoint], path: str) -> None:
    """Write a stream as CSV with header ``iteration,label,f0,f1,...``."""
    if not points:
        raise ValueError("cannot dump an empty stream")
    dim = len(points[0].features)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "label"] + [f"f{i}" for i in range(dim)])
        for p in points:
            writer.writerow([p.iteration, p.label] + [repr(v) for v in p.features])


def load_stream_csv(path: str) -> list[LabeledPoint]:
    """Read a stream written by :func:`dump_stream_csv`."""
    points = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if (
            header is None
            or header[:2] != ["iteration", "label"]
            or header[2:] != [f"f{i}" for i in range(len(header) - 2)]
            or len(header) < 3
        ):
            raise ValueError(f"{path}: not a stream CSV (bad header)")
        for row in reader:
            points.append(
                LabeledPoint(tuple(float(v) for v in row[2:]), int(row[1]), int(row[0]))
            )
    return points
