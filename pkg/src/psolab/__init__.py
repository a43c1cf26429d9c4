"""Particle swarm optimization laboratory.

Standard and criticality-seeking swarm variants, benchmark objectives,
swarm-dynamics analysis with power-law fitting, a deterministic parallel
batch runner, and a live-control service for steering running swarms.
"""

from .adaptive import (
    AdaptiveConfig,
    MetricId,
    MetricTrace,
    RuleId,
    apply_rule,
    measure,
    squash,
    step_adaptive,
)
from .analysis import (
    ExponentialFit,
    Histogram,
    PowerLawFit,
    build_histogram,
    fit_exponential,
    fit_exponential_tail,
    fit_power_law,
    msd_to_centroid,
    positive_increments,
    power_law_pdf,
    PdfKind,
)
from .core import (
    InertiaSchedule,
    Particle,
    PsoParams,
    SwarmConfig,
    SwarmRng,
    SwarmState,
    Variant,
    init_swarm,
    make_rng,
    omega_at,
    step_standard,
)
from .eigencritical import step_eigencritical
from .errors import (
    ConfigurationError,
    DegenerateDataError,
    EvaluationError,
    ProtocolError,
    PsoLabError,
    ShapeError,
    SingularSpectrumError,
    TraceParseError,
)
from .numerics import (
    TransformFit,
    dynamic_matrix_eigs,
    dynamic_system,
    eigenvalues,
    lstsq_transform,
    spectral_normalize,
)
from .objectives import ObjectiveId, get_objective, griewank, rastrigin, schwefel, sphere
from .runner import (
    BatchResult,
    IterationRecord,
    RunTrace,
    dump_csv,
    load_csv,
    run_batch,
    run_single,
)
from .soc import (
    AvalancheSeries,
    BakSneppen,
    Sandpile1D,
    simulate_bak_sneppen,
    simulate_sandpile_1d,
)

__version__ = "0.1.0"
