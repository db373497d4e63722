"""Tool-calling agent runtime and benchmark harness."""

from .agent import CATEGORIES, AgentConfig, BenchmarkQuery, run_query
from .dataset import (
    RawConversation,
    TrainingConfig,
    TrainingExample,
    compute_training_steps,
    transform_conversation,
    transform_corpus,
)
from .evaluate import (
    CategoryStats,
    JudgeRubric,
    Verdict,
    VotePolicy,
    WinRateComparison,
    aggregate_pass_rate,
    collect_verdict,
    gap_vs,
    majority_vote,
    rule_compare,
    rule_judge_pass,
    wilson_interval,
)
from .gateway import (
    Completion,
    GenerationParams,
    HttpBackend,
    ReplayBackend,
    build_prompt,
)
from .report import RunReport, emit_radar_data, emit_report, load_baselines
from .runner import BenchmarkSuite, load_suite, run_suite
from .toolbox import ObservationResult, ToolParameter, ToolRegistry, ToolSpec, dispatch
from .trace import (
    PathStatus,
    ReActStep,
    SolutionPath,
    parse_step,
    parse_trace,
    render_step,
)

__version__ = "0.1.0"
