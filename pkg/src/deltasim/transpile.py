"""Decision-tree lowering to a portable IR and standalone C source.

A trained tree is lowered to :class:`DecisionProgram`, a flat node array in
preorder (node 0 is the root, a node always precedes its children).  The
comparison convention is uniform: ``x[feature] <= threshold`` goes left.

The C emitter produces a single ``int predict(float* x)`` function of nested
if/else blocks that mirrors the IR structure one node per branch, with a
``//node = k`` comment on every branch-opening line.  Thresholds are printed
with ``repr``-style shortest round-trip formatting, so parsing the source
back recovers bit-identical constants; :func:`parse_c` does exactly that and
serves as an independent equivalence oracle for the emitter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import math
import numpy as np

from .learners import ModelSnapshot, TreeParams, tree_predict_batch


class ProgramError(ValueError):
    """Malformed decision program (bad ids, cycles, non-finite thresholds)."""


class ParseError(ValueError):
    """Emitted C source failed to re-parse."""


@dataclass(frozen=True)
class Internal:
    feature_index: int
    threshold: float
    left: int
    right: int


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class DecisionProgram:
    """Flat decision tree: ``nodes[root]`` starts the walk, leaves answer."""

    nodes: tuple[Internal | Leaf, ...]
    root: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))


@dataclass(frozen=True)
class EmittedSource:
    text: str
    language_tag: str = "c"
    entry_symbol: str = "predict"

    @property
    def size_bytes(self) -> int:
        return len(self.text.encode("utf-8"))


def validate_program(program: DecisionProgram) -> None:
    """Reject dangling ids, shared/cyclic structure and bad thresholds."""
    n = len(program.nodes)
    if n == 0:
        raise ProgramError("program has no nodes")
    if not 0 <= program.root < n:
        raise ProgramError(f"root id {program.root} out of range")
    seen: set[int] = set()

    def visit(node_id: int) -> None:
        if not 0 <= node_id < n:
            raise ProgramError(f"node id {node_id} out of range")
        if node_id in seen:
            raise ProgramError(f"node {node_id} reachable twice (cycle or shared child)")
        seen.add(node_id)
        node = program.nodes[node_id]
        if isinstance(node, Internal):
            if node.feature_index < 0:
                raise ProgramError(f"node {node_id}: negative feature index")
            if not math.isfinite(node.threshold):
                raise ProgramError(f"node {node_id}: non-finite threshold")
            visit(node.left)
            visit(node.right)
        elif isinstance(node, Leaf):
            if node.label < 0:
                raise ProgramError(f"node {node_id}: negative leaf label")
        else:
            raise ProgramError(f"node {node_id}: unknown node type {type(node)!r}")

    visit(program.root)
    if len(seen) != n:
        raise ProgramError("unreachable nodes present")


def lower_tree(model: ModelSnapshot) -> DecisionProgram:
    """Map a trained tree snapshot to the IR node-for-node (ids preserved)."""
    if model.kind != "decision_tree":
        raise ValueError(f"cannot lower learner kind {model.kind!r}")
    assert isinstance(model.params, TreeParams)
    tp = model.params
    nodes: list[Internal | Leaf] = []
    for i in range(tp.n_nodes):
        if tp.feature[i] >= 0:
            nodes.append(
                Internal(
                    feature_index=int(tp.feature[i]),
                    threshold=float(tp.threshold[i]),
                    left=int(tp.left[i]),
                    right=int(tp.right[i]),
                )
            )
        else:
            nodes.append(Leaf(label=int(tp.label[i])))
    program = DecisionProgram(nodes=nodes, root=0)
    validate_program(program)
    return program


def interpret(program: DecisionProgram, features) -> int:
    """Walk the program root-to-leaf for one feature vector."""
    x = np.asarray(features, dtype=np.float64)
    node = program.nodes[program.root]
    steps = 0
    while isinstance(node, Internal):
        if node.feature_index >= len(x):
            raise ProgramError(
                f"feature index {node.feature_index} out of bounds for input of size {len(x)}"
            )
        node = program.nodes[node.left if x[node.feature_index] <= node.threshold else node.right]
        steps += 1
        if steps > len(program.nodes):
            raise ProgramError("walk exceeded node count (cycle)")
    return node.label


def program_arrays(program: DecisionProgram) -> TreeParams:
    """Columnar view of the program for vectorized interpretation."""
    n = len(program.nodes)
    feature = np.full(n, -1, dtype=np.int32)
    threshold = np.zeros(n, dtype=np.float64)
    left = np.full(n, -1, dtype=np.int32)
    right = np.full(n, -1, dtype=np.int32)
    label = np.full(n, -1, dtype=np.int32)
    max_feature = 0
    for i, node in enumerate(program.nodes):
        if isinstance(node, Internal):
            feature[i] = node.feature_index
            threshold[i] = node.threshold
            left[i] = node.left
            right[i] = node.right
            max_feature = max(max_feature, node.feature_index)
        else:
            label[i] = node.label
    return TreeParams(
        feature=feature, threshold=threshold, left=left, right=right,
        label=label, n_features=max_feature + 1, max_depth=None,
    )


def interpret_batch(program: DecisionProgram, X: np.ndarray) -> np.ndarray:
    return tree_predict_batch(program_arrays(program), X)


def _c_float(value: float) -> str:
    # repr of a Python float is the shortest string that round-trips, and
    # every form it produces ("3.0", "-0.185", "1e-05") is a C double literal
    return repr(float(value))


def emit_c(program: DecisionProgram) -> EmittedSource:
    """Render the program as a standalone ``int predict(float* x)`` function."""
    validate_program(program)
    lines = ["int predict(float* x){"]

    def render(node_id: int, depth: int) -> None:
        pad = "    " * depth
        node = program.nodes[node_id]
        if isinstance(node, Leaf):
            lines.append(f"{pad}return {node.label};")
            return
        lines.append(
            f"{pad}if (x[{node.feature_index}] <= {_c_float(node.threshold)}) {{  //node = {node_id}"
        )
        render(node.left, depth + 1)
        lines.append(f"{pad}}} else {{")
        render(node.right, depth + 1)
        lines.append(f"{pad}}}")

    render(program.root, 1)
    lines.append("}")
    return EmittedSource(text="\n".join(lines) + "\n")


_TOKEN_RE = re.compile(
    r"\s+|//[^\n]*"  # whitespace and line comments are skipped
    r"|(?P<num>-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<word>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<punct><=|[(){}\[\];*])"
)


def _tokenize(source: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r} at offset {pos}")
        pos = m.end()
        if m.lastgroup is not None:
            tokens.append(m.group())
    return tokens


def parse_c(source: str) -> DecisionProgram:
    """Re-parse emitted C into an equivalent program (preorder ids)."""
    tokens = _tokenize(source)
    pos = 0

    def peek() -> str:
        if pos >= len(tokens):
            raise ParseError("unexpected end of source")
        return tokens[pos]

    def take(expected: str | None = None) -> str:
        nonlocal pos
        tok = peek()
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r} (token {pos})")
        pos += 1
        return tok

    nodes: list[Internal | Leaf] = []

    def statement() -> int:
        node_id = len(nodes)
        if peek() == "return":
            take("return")
            label_tok = take()
            take(";")
            try:
                label = int(label_tok)
            except ValueError:
                raise ParseError(f"bad leaf label {label_tok!r}") from None
            nodes.append(Leaf(label=label))
            return node_id
        nodes.append(Leaf(label=-1))  # placeholder, replaced below
        take("if")
        take("(")
        take("x")
        take("[")
        feature_tok = take()
        try:
            feature = int(feature_tok)
        except ValueError:
            raise ParseError(f"bad feature index {feature_tok!r}") from None
        take("]")
        take("<=")
        threshold_tok = take()
        try:
            threshold = float(threshold_tok)
        except ValueError:
            raise ParseError(f"bad threshold {threshold_tok!r}") from None
        take(")")
        take("{")
        left = statement()
        take("}")
        take("else")
        take("{")
        right = statement()
        take("}")
        nodes[node_id] = Internal(
            feature_index=feature, threshold=threshold, left=left, right=right
        )
        return node_id

    for expected in ("int", "predict", "(", "float", "*", "x", ")", "{"):
        take(expected)
    root = statement()
    take("}")
    if pos != len(tokens):
        raise ParseError(f"trailing tokens after function body (token {pos})")
    program = DecisionProgram(nodes=nodes, root=root)
    validate_program(program)
    return program


def _trunc3(value: float) -> str:
    # truncated (not rounded) to three decimals, matching the dump style
    s = f"{value:.12f}"
    return s[: s.index(".") + 4]


def dump_text(program: DecisionProgram) -> str:
    """Human-readable tree dump, one tab-indented line per node."""
    validate_program(program)
    lines: list[str] = []

    def render(node_id: int, depth: int) -> None:
        pad = "\t" * depth
        node = program.nodes[node_id]
        if isinstance(node, Leaf):
            lines.append(f"{pad}node={node_id} leaf node.")
            return
        lines.append(
            f"{pad}node={node_id} test node: go to node {node.left} "
            f"if X[:, {node.feature_index}] <= {_trunc3(node.threshold)} "
            f"else to node {node.right}."
        )
        render(node.left, depth + 1)
        render(node.right, depth + 1)

    render(program.root, 0)
    return "\n".join(lines) + "\n"


def report_sizes(model: ModelSnapshot, source: EmittedSource) -> dict[str, int]:
    """Byte sizes of the serialized model and of the generated source."""
    return {"model_bytes": model.serialized_size, "source_bytes": source.size_bytes}
