"""Online classifiers over a bounded moving frame, with binary serialization.

The frame is a FIFO window of recent labelled points.  Training is always a
full refit of the window content: ``partial_fit`` inserts one point (evicting
the oldest when full) and retrains, which keeps every learner's behaviour
identical to batch-fitting the current window.

Two learners are implemented from scratch:

* ``decision_tree`` -- CART with Gini impurity.  Candidate thresholds are the
  midpoints between consecutive distinct sorted feature values; ties between
  equally good splits resolve to the lowest feature index, then the lowest
  threshold, so training is fully deterministic.
* ``gaussian_nb`` -- Gaussian naive Bayes choosing the class with the highest
  log prior plus summed log Gaussian density, with every per-class variance
  smoothed by 1e-9 times the largest per-feature variance of the window.

Models serialize to a little-endian, length-prefixed binary format whose
first byte is a format version; decoding failures raise :class:`DecodeError`
carrying the byte offset of the problem.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .streams import LabeledPoint

LEARNER_KINDS = ("decision_tree", "gaussian_nb")

_FORMAT_VERSION = 1
_KIND_CODES = {"decision_tree": 1, "gaussian_nb": 2}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}

ABSTAIN = -1  # prediction emitted when no model is available yet


class EmptyFrameError(ValueError):
    """Raised when fitting is requested on an empty moving frame."""


class DecodeError(ValueError):
    """Malformed serialized model; ``offset`` is where decoding failed."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"decode error at byte {offset}: {message}")
        self.offset = offset


class MovingFrame:
    """Bounded FIFO window of labelled points backed by ring arrays."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._points: deque[LabeledPoint] = deque()
        self._feat: np.ndarray | None = None
        self._labels = np.empty(capacity, dtype=np.int64)
        self._next = 0
        self._size = 0
        self._last_iteration = -1

    def __len__(self) -> int:
        return self._size

    @property
    def points(self) -> list[LabeledPoint]:
        """Window content in insertion order, oldest first."""
        return list(self._points)

    @property
    def last_iteration(self) -> int:
        return self._last_iteration

    def insert(self, point: LabeledPoint) -> None:
        if self._feat is None:
            self._feat = np.empty((self.capacity, len(point.features)), dtype=np.float64)
        elif self._feat.shape[1] != len(point.features):
            raise ValueError(
                f"point has {len(point.features)} features, frame holds "
                f"{self._feat.shape[1]}-dimensional points"
            )
        self._feat[self._next] = point.features
        self._labels[self._next] = point.label
        self._next = (self._next + 1) % self.capacity
        if self._size < self.capacity:
            self._size += 1
        else:
            self._points.popleft()
        self._points.append(point)
        self._last_iteration = point.iteration

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(features, labels) in insertion order, oldest row first."""
        if self._size == 0 or self._feat is None:
            raise EmptyFrameError("moving frame is empty")
        if self._size < self.capacity or self._next == 0:
            return self._feat[: self._size], self._labels[: self._size]
        return (
            np.concatenate((self._feat[self._next :], self._feat[: self._next])),
            np.concatenate((self._labels[self._next :], self._labels[: self._next])),
        )


@dataclass
class ScoreTracker:
    """Trailing mean of 0/1 prediction outcomes over the last ``capacity``."""

    capacity: int = 50
    _window: deque = field(default_factory=deque)
    _total: int = 0

    def push(self, outcome: int) -> None:
        if outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")
        self._window.append(outcome)
        self._total += outcome
        if len(self._window) > self.capacity:
            self._total -= self._window.popleft()

    @property
    def average(self) -> float:
        # Cold start: mean over whatever history exists; empty tracker is 0.
        if not self._window:
            return 0.0
        return self._total / len(self._window)


def score_update(tracker: ScoreTracker, predicted: int, actual: int) -> ScoreTracker:
    """Record one test-then-train outcome (1 iff the prediction was right)."""
    tracker.push(1 if predicted == actual else 0)
    return tracker


@dataclass
class TreeParams:
    """CART tree in preorder arrays; ``feature < 0`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray
    n_features: int
    max_depth: int | None

    @property
    def n_nodes(self) -> int:
        return len(self.feature)


@dataclass
class GnbParams:
    """Per-class Gaussian statistics; variances already smoothed."""

    classes: np.ndarray
    counts: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_priors: np.ndarray
    log_norm: np.ndarray  # per-class sum of log(2*pi*var)
    n_features: int


@dataclass
class ModelSnapshot:
    """A trained model: kind tag, parameters, provenance, serialized bytes."""

    kind: str
    params: TreeParams | GnbParams
    trained_at: int
    blob: bytes

    @property
    def serialized_size(self) -> int:
        return len(self.blob)

    def predict(self, features) -> int:
        return predict(self, features)


def _majority_label(counts: np.ndarray, classes: np.ndarray) -> int:
    # argmax takes the first maximum, i.e. the lowest class id on ties
    return int(classes[int(np.argmax(counts))])


def _best_split(X: np.ndarray, y_enc: np.ndarray, n_classes: int):
    """Return (weighted_gini, feature, threshold) of the best cut, or None."""
    n = len(y_enc)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y_enc] = 1.0
    best: tuple[float, int, float] | None = None
    for f in range(X.shape[1]):
        xs = X[:, f]
        order = np.argsort(xs, kind="stable")
        sx = xs[order]
        cuts = np.nonzero(sx[:-1] < sx[1:])[0]
        if len(cuts) == 0:
            continue
        cum = np.cumsum(onehot[order], axis=0)
        left_counts = cum[cuts]
        total = cum[-1]
        left_n = (cuts + 1).astype(np.float64)
        right_n = n - left_n
        gini_left = 1.0 - np.sum((left_counts / left_n[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum(
            ((total - left_counts) / right_n[:, None]) ** 2, axis=1
        )
        weighted = (left_n * gini_left + right_n * gini_right) / n
        i = int(np.argmin(weighted))
        candidate = (float(weighted[i]), f, float((sx[cuts[i]] + sx[cuts[i] + 1]) / 2.0))
        # strict < keeps the earlier (lower feature, lower threshold) on ties
        if best is None or candidate[0] < best[0]:
            best = candidate
    return best


def _fit_tree(X: np.ndarray, y: np.ndarray, max_depth: int | None) -> TreeParams:
    classes = np.unique(y)
    y_enc = np.searchsorted(classes, y)
    depth_limit = np.inf if max_depth is None else max_depth

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    label: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        label.append(-1)
        return len(feature) - 1

    def build(rows: np.ndarray, depth: int) -> int:
        node = new_node()
        counts = np.bincount(y_enc[rows], minlength=len(classes))
        n_present = int(np.count_nonzero(counts))
        parent_gini = 1.0 - np.sum((counts / len(rows)) ** 2)
        split = None
        if n_present > 1 and depth < depth_limit:
            split = _best_split(X[rows], y_enc[rows], len(classes))
            if split is not None and not split[0] < parent_gini:
                split = None  # no impurity reduction: stop
        if split is None:
            label[node] = _majority_label(counts, classes)
            return node
        _, f, t = split
        feature[node] = f
        threshold[node] = t
        mask = X[rows, f] <= t
        left[node] = build(rows[mask], depth + 1)
        right[node] = build(rows[~mask], depth + 1)
        return node

    build(np.arange(len(y)), 0)
    return TreeParams(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        label=np.array(label, dtype=np.int32),
        n_features=X.shape[1],
        max_depth=max_depth,
    )


def tree_predict_batch(params: TreeParams, X: np.ndarray) -> np.ndarray:
    """Vectorized root-to-leaf walk for a whole probe matrix."""
    X = np.asarray(X, dtype=np.float64)
    node = np.zeros(len(X), dtype=np.int32)
    while True:
        f = params.feature[node]
        active = np.nonzero(f >= 0)[0]
        if len(active) == 0:
            return params.label[node].copy()
        cur = node[active]
        go_left = X[active, f[active]] <= params.threshold[cur]
        node[active] = np.where(go_left, params.left[cur], params.right[cur])


def _fit_gnb(X: np.ndarray, y: np.ndarray) -> GnbParams:
    classes = np.unique(y)
    k = len(classes)
    d = X.shape[1]
    counts = np.empty(k, dtype=np.int64)
    means = np.empty((k, d))
    variances = np.empty((k, d))
    for i, c in enumerate(classes):
        rows = X[y == c]
        counts[i] = len(rows)
        means[i] = rows.mean(axis=0)
        variances[i] = rows.var(axis=0)
    # smoothing keeps near-constant features finite; floor covers an
    # all-constant window where the max feature variance is exactly 0
    smoothing = max(1e-9 * float(np.max(X.var(axis=0))), 1e-12)
    variances += smoothing
    log_priors = np.log(counts / len(y))
    log_norm = np.sum(np.log(2.0 * np.pi * variances), axis=1)
    return GnbParams(
        classes=classes.astype(np.int64),
        counts=counts,
        means=means,
        variances=variances,
        log_priors=log_priors,
        log_norm=log_norm,
        n_features=d,
    )


def gnb_log_posterior(params: GnbParams, X: np.ndarray) -> np.ndarray:
    """Unnormalized per-class log posterior, shape (n, n_classes)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    diff = X[:, None, :] - params.means[None, :, :]
    mahal = np.sum(diff * diff / params.variances[None, :, :], axis=2)
    return params.log_priors[None, :] - 0.5 * (params.log_norm[None, :] + mahal)


def gnb_predict_batch(params: GnbParams, X: np.ndarray) -> np.ndarray:
    scores = gnb_log_posterior(params, X)
    # first maximum wins: ties resolve to the lowest class id
    return params.classes[np.argmax(scores, axis=1)]


def fit(kind: str, frame: MovingFrame, *, max_depth: int | None = 10) -> ModelSnapshot:
    """Train a fresh model of ``kind`` on the frame's current content."""
    if kind not in LEARNER_KINDS:
        raise ValueError(f"unknown learner kind {kind!r}")
    X, y = frame.arrays()
    if kind == "decision_tree":
        params: TreeParams | GnbParams = _fit_tree(X, y, max_depth)
    else:
        params = _fit_gnb(X, y)
    snapshot = ModelSnapshot(kind=kind, params=params, trained_at=frame.last_iteration, blob=b"")
    snapshot.blob = _encode(snapshot)
    return snapshot


def partial_fit(model: ModelSnapshot, frame: MovingFrame, point: LabeledPoint) -> ModelSnapshot:
    """Insert one point (evicting the oldest if full) and retrain."""
    frame.insert(point)
    if model.kind == "decision_tree":
        assert isinstance(model.params, TreeParams)
        return fit(model.kind, frame, max_depth=model.params.max_depth)
    return fit(model.kind, frame)


def predict(model: ModelSnapshot, features) -> int:
    """Classify one feature vector with a trained snapshot."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("predict takes a single feature vector")
    if model.kind == "decision_tree":
        assert isinstance(model.params, TreeParams)
        if len(x) != model.params.n_features:
            raise ValueError(
                f"expected {model.params.n_features} features, got {len(x)}"
            )
        return int(tree_predict_batch(model.params, x[None, :])[0])
    assert isinstance(model.params, GnbParams)
    if len(x) != model.params.n_features:
        raise ValueError(f"expected {model.params.n_features} features, got {len(x)}")
    return int(gnb_predict_batch(model.params, x[None, :])[0])


# --- binary model format -------------------------------------------------
#
# byte 0      format version (currently 1)
# byte 1      learner kind: 1 = decision_tree, 2 = gaussian_nb
# u32         trained_at iteration
# u32         n_features
# tree:  u32 max_depth (0 = unlimited); u32 n_nodes; nodes in preorder,
#        each u8 tag (0 internal, 1 leaf); internal: u32 feature,
#        f64 threshold, u32 left, u32 right; leaf: i32 label
# gnb:   u32 n_classes; per class i32 label, u64 count; then row-major
#        f64 means [k*d] and f64 smoothed variances [k*d]
#
# All integers and floats are little-endian.


def _encode(model: ModelSnapshot) -> bytes:
    out = bytearray()
    out += struct.pack("<BBII", _FORMAT_VERSION, _KIND_CODES[model.kind],
                       max(model.trained_at, 0), model.params.n_features)
    if isinstance(model.params, TreeParams):
        tp = model.params
        depth_code = 0 if tp.max_depth is None else tp.max_depth
        out += struct.pack("<II", depth_code, tp.n_nodes)
        for i in range(tp.n_nodes):
            if tp.feature[i] >= 0:
                out += struct.pack(
                    "<BIdII", 0, int(tp.feature[i]), float(tp.threshold[i]),
                    int(tp.left[i]), int(tp.right[i]),
                )
            else:
                out += struct.pack("<Bi", 1, int(tp.label[i]))
    else:
        gp = model.params
        out += struct.pack("<I", len(gp.classes))
        for i in range(len(gp.classes)):
            out += struct.pack("<iQ", int(gp.classes[i]), int(gp.counts[i]))
        out += gp.means.astype("<f8").tobytes()
        out += gp.variances.astype("<f8").tobytes()
    return bytes(out)


def serialize(model: ModelSnapshot) -> bytes:
    """Serialized form of the snapshot; its length is ``serialized_size``."""
    return model.blob


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.offset + size > len(self.data):
            raise DecodeError(self.offset, "truncated input")
        values = struct.unpack_from(fmt, self.data, self.offset)
        self.offset += size
        return values


def deserialize(data: bytes) -> ModelSnapshot:
    """Parse serialized bytes back into a snapshot (prediction-equivalent)."""
    r = _Reader(data)
    version, kind_code, trained_at, n_features = r.take("<BBII")
    if version != _FORMAT_VERSION:
        raise DecodeError(0, f"unsupported format version {version}")
    if kind_code not in _CODE_KINDS:
        raise DecodeError(1, f"unknown learner kind code {kind_code}")
    if n_features < 1:
        raise DecodeError(6, "n_features must be >= 1")
    kind = _CODE_KINDS[kind_code]
    if kind == "decision_tree":
        depth_code, n_nodes = r.take("<II")
        if n_nodes < 1:
            raise DecodeError(r.offset - 4, "tree must have at least one node")
        feature = np.empty(n_nodes, dtype=np.int32)
        threshold = np.zeros(n_nodes, dtype=np.float64)
        left = np.full(n_nodes, -1, dtype=np.int32)
        right = np.full(n_nodes, -1, dtype=np.int32)
        label = np.full(n_nodes, -1, dtype=np.int32)
        for i in range(n_nodes):
            tag_at = r.offset
            (tag,) = r.take("<B")
            if tag == 0:
                f, t, lo, hi = r.take("<IdII")
                if f >= n_features:
                    raise DecodeError(tag_at + 1, f"feature index {f} out of range")
                if lo >= n_nodes or hi >= n_nodes:
                    raise DecodeError(tag_at, "child node id out of range")
                feature[i], threshold[i], left[i], right[i] = f, t, lo, hi
            elif tag == 1:
                (lab,) = r.take("<i")
                if lab < 0:
                    raise DecodeError(tag_at + 1, "leaf label must be >= 0")
                feature[i] = -1
                label[i] = lab
            else:
                raise DecodeError(tag_at, f"unknown node tag {tag}")
        params: TreeParams | GnbParams = TreeParams(
            feature=feature, threshold=threshold, left=left, right=right,
            label=label, n_features=n_features,
            max_depth=None if depth_code == 0 else depth_code,
        )
    else:
        (n_classes,) = r.take("<I")
        if n_classes < 1:
            raise DecodeError(r.offset - 4, "gnb must have at least one class")
        classes = np.empty(n_classes, dtype=np.int64)
        counts = np.empty(n_classes, dtype=np.int64)
        for i in range(n_classes):
            at = r.offset
            c, n = r.take("<iQ")
            if c < 0:
                raise DecodeError(at, "class label must be >= 0")
            classes[i], counts[i] = c, n
        means = np.array(r.take(f"<{n_classes * n_features}d")).reshape(
            n_classes, n_features
        )
        variances = np.array(r.take(f"<{n_classes * n_features}d")).reshape(
            n_classes, n_features
        )
        if np.any(variances <= 0):
            raise DecodeError(r.offset, "variances must be positive")
        params = GnbParams(
            classes=classes, counts=counts, means=means, variances=variances,
            log_priors=np.log(counts / counts.sum()),
            log_norm=np.sum(np.log(2.0 * np.pi * variances), axis=1),
            n_features=n_features,
        )
    if r.offset != len(data):
        raise DecodeError(r.offset, "trailing bytes after model payload")
    return ModelSnapshot(kind=kind, params=params, trained_at=trained_at, blob=bytes(data))
