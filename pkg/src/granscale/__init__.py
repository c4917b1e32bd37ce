"""granscale: parallel speedup and scalability estimation from one instrumented run.

The estimator decomposes a parallel execution into computation time
(instrumented spans) and overhead (everything else in the wall-clock
envelope), derives the granularity of the run, and converts it into
efficiency and an estimated speedup without measuring a serial baseline.
Built-in workloads and a sweep harness validate the estimate against
conventionally measured speedup.
"""

from .measurement import (
    RunHandle,
    RunRecord,
    Span,
    aggregate,
    begin_run,
    finish_run,
    record_span,
)
from .metrics import (
    INFINITE_GRANULARITY,
    FractionEstimate,
    GranularityMetrics,
    Overhead,
    ScalingModelParams,
    TimingBreakdown,
    amdahl_speedup,
    compute_overhead,
    efficiency_from_granularity,
    estimated_speedup,
    granularity_metrics,
    gustafson_speedup,
    infer_amdahl_fraction,
    infer_gustafson_fraction,
    isogranularity,
    relative_error,
)
from .harness import (
    CellResult,
    ExperimentPlan,
    ResultSet,
    load_results,
    plan_cells,
    plan_hash,
    resume,
    run_plan,
)
from .report import (
    ReportRow,
    report_rows,
    scalability_verdict,
    strong_scaling_csv,
    validate_fixture,
    weak_scaling_tables,
)
from .stats import OutlierDecision, SampleSet, filter_outliers, quartiles, summarize
from .workloads import (
    KMeansSpec,
    PiSpec,
    SyntheticSpec,
    generate_dataset,
    kmeans_parallel,
    kmeans_serial,
    monte_carlo_pi,
    synthetic_run,
)

__version__ = "0.1.0"
