"""Privacy-budget planning engine for differentially private COUNT releases.

Layers, bottom up:

* laplace: the noise mechanism (parameters, pdf/cdf/quantile, sampling)
* risk: closed-form disclosure risk and risk curves over epsilon
* queries: CSV ingestion and exact COUNT execution with GROUP BY/WHERE
* inference: non-private binomial CIs and parametric-bootstrap private CIs
* vizmodel: quantile dotplots, hypothetical-outcome streams, judgments
* allocator: total-budget accounting with manual/responsive slider modes
* sessions + api: what-if exploration and one-shot release over HTTP JSON
* cli: headless driver (ingest, plan, release, serve)
"""

from .allocator import (
    AllocationState,
    QueryAllocation,
    default_allocation,
    remaining_budget,
    set_epsilon,
    set_mode,
    set_total,
    toggle_lock,
)
from .errors import (
    ConfigError,
    DomainError,
    FinalizedError,
    IngestError,
    NotFoundError,
    PlannerError,
    SpecError,
    StateError,
)
from .inference import (
    BootstrapConfig,
    ConfidenceInterval,
    ReplicateSet,
    binomial_ci,
    bootstrap_replicates,
    private_ci,
    private_cis,
)
from .laplace import (
    LaplaceParams,
    PrivacyBudget,
    Sensitivity,
    laplace_cdf,
    laplace_mechanism,
    laplace_pdf,
    laplace_quantile,
    mechanism_params,
    sample,
)
from .queries import (
    ColumnSpec,
    Dataset,
    Metadata,
    Predicate,
    QueryResult,
    QuerySpec,
    Subgroup,
    execute,
    ingest_csv,
    load_dataset,
    load_schema,
    metadata,
    parse_query_spec,
    parse_schema,
    validate_query,
)
from .risk import (
    CURVE_POINTS,
    EPSILON_MAX,
    EPSILON_MIN,
    RiskCurve,
    RiskPoint,
    default_grid,
    disclosure_risk,
    overall_risk,
    risk_curve,
)
from .rng import derive_rng, derive_seed, rng_from_seed, seed_fingerprint
from .sessions import (
    SCHEMA_VERSION,
    Session,
    SessionStore,
    build_release_document,
    session_payload,
    whatif_payload,
)
from .synthdata import CohortConfig, cohort_schema, generate_cohort, write_cohort
from .vizmodel import (
    FRAME_RATE,
    HopFrame,
    HopStream,
    QuantileDotplot,
    SuperiorityEstimate,
    bin_probability,
    cdf_judgment,
    hop_stream,
    probability_of_superiority,
    quantile_dotplot,
)

__version__ = "0.1.0"
