"""Simulator and toolkit for splitting online learning between edge and cloud.

The package models three distribution patterns over per-site data streams
(cloud-learn/edge-predict, edge-learn/edge-predict, cloud-learn/
cloud-predict), replays labeled drifting streams through them, prices the
message traffic on realistic access media, and can compile a trained
decision tree to dependency-free C for tiny targets.
"""

from .harness import (
    OffsetReport,
    ResultRow,
    ScenarioConfig,
    case_presets,
    emit_recommendation_table,
    full_grid,
    load_results_csv,
    load_scenarios,
    p0_offset_report,
    preset,
    run_matrix,
    run_scenario,
    trend_checks,
    trend_grid,
    write_recommendation_csv,
    write_results_csv,
)
from .learners import (
    ABSTAIN,
    LEARNER_KINDS,
    DecodeError,
    EmptyFrameError,
    ModelSnapshot,
    MovingFrame,
    ScoreTracker,
    deserialize,
    fit,
    partial_fit,
    predict,
    score_update,
    serialize,
)
from .netsim import (
    APP_CLASSES,
    AppClass,
    MediumProfile,
    MessageSizes,
    Recommendation,
    TransactionReport,
    default_profiles,
    load_profiles,
    pattern_latency,
    recommend,
    transaction_energy,
    transaction_report,
    transaction_time,
)
from .patterns import (
    PATTERNS,
    STEP_LOG_HEADER,
    Message,
    PatternRun,
    encode_d,
    encode_m,
    encode_s,
    encode_sd,
    run_pattern,
    write_step_log,
)
from .streams import (
    CirclesConfig,
    LabeledPoint,
    RandomTreeConfig,
    SiteStreams,
    divide_equal,
    divide_without_one,
    dump_stream_csv,
    generate_circles,
    generate_random_tree_stream,
    load_stream_csv,
)
from .transpile import (
    DecisionProgram,
    EmittedSource,
    Internal,
    Leaf,
    ParseError,
    ProgramError,
    dump_text,
    emit_c,
    interpret,
    lower_tree,
    parse_c,
    report_sizes,
    validate_program,
)

__version__ = "0.1.0"

__all__ = [
    "ABSTAIN", "APP_CLASSES", "AppClass", "CirclesConfig", "DecisionProgram",
    "DecodeError", "EmittedSource", "EmptyFrameError", "Internal",
    "LabeledPoint", "LEARNER_KINDS", "Leaf", "MediumProfile", "Message",
    "MessageSizes", "ModelSnapshot", "MovingFrame", "OffsetReport",
    "ParseError", "PATTERNS", "PatternRun", "ProgramError",
    "RandomTreeConfig", "Recommendation", "ResultRow", "ScenarioConfig",
    "ScoreTracker", "SiteStreams", "STEP_LOG_HEADER", "TransactionReport",
    "case_presets", "default_profiles", "deserialize", "divide_equal",
    "divide_without_one", "dump_stream_csv", "dump_text", "emit_c",
    "emit_recommendation_table", "encode_d", "encode_m", "encode_s",
    "encode_sd", "fit", "full_grid", "generate_circles",
    "generate_random_tree_stream", "interpret", "load_profiles",
    "load_results_csv", "load_scenarios", "load_stream_csv", "lower_tree",
    "p0_offset_report", "parse_c", "partial_fit", "pattern_latency",
    "predict", "preset",
    "recommend", "report_sizes", "run_matrix", "run_pattern", "run_scenario",
    "score_update", "serialize", "transaction_energy", "transaction_report",
    "transaction_time", "trend_checks", "trend_grid", "validate_program",
    "write_recommendation_csv", "write_results_csv", "write_step_log",
]
