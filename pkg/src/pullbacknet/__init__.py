"""Closed-form single-hidden-layer networks without output weights.

The main model fits each hidden node analytically by pulling the current
residual back through an inverted activation and a ridge pseudoinverse of
the inputs; output weights stay frozen at identity. The package also ships
the ELM-family baselines it is benchmarked against, dataset plumbing, and a
deterministic multi-trial benchmark harness with a CLI.
"""

from .activation import (
    ActivationKind,
    Normalizer,
    act_forward,
    act_inverse,
    fit_normalizer,
)
from .baselines import (
    ElmModel,
    IncrementalModel,
    IncrementalNode,
    belm_fit,
    eielm_fit,
    elm_fit,
    ielm_fit,
)
from .dataio import (
    Dataset,
    Split,
    friedman_targets,
    gen_friedman,
    load_csv,
    load_dataset,
    load_libsvm,
    load_manifest,
    make_split,
    normalize_dataset,
    normalize_split,
    write_csv,
)
from .errors import (
    DomainError,
    InvalidInputError,
    NumericError,
    ParseError,
    ShapeError,
)
from .evalbench import (
    BenchReport,
    MethodSpec,
    TrialResult,
    accuracy,
    emit_report,
    parse_method,
    rmse,
    run_trials,
    stable_seed,
    strip_timing,
)
from .numkernel import (
    RngStream,
    moore_penrose_pinv,
    ridge_pinv,
    rng_uniform,
)
from .pullback import (
    FeedbackNode,
    PullbackNetwork,
    decision_labels,
    fit_network,
    fit_node,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationKind",
    "Normalizer",
    "act_forward",
    "act_inverse",
    "fit_normalizer",
    "ElmModel",
    "IncrementalModel",
    "IncrementalNode",
    "belm_fit",
    "eielm_fit",
    "elm_fit",
    "ielm_fit",
    "Dataset",
    "Split",
    "friedman_targets",
    "gen_friedman",
    "load_csv",
    "load_dataset",
    "load_libsvm",
    "load_manifest",
    "make_split",
    "normalize_dataset",
    "normalize_split",
    "write_csv",
    "DomainError",
    "InvalidInputError",
    "NumericError",
    "ParseError",
    "ShapeError",
    "BenchReport",
    "MethodSpec",
    "TrialResult",
    "accuracy",
    "emit_report",
    "parse_method",
    "rmse",
    "run_trials",
    "stable_seed",
    "strip_timing",
    "RngStream",
    "moore_penrose_pinv",
    "ridge_pinv",
    "rng_uniform",
    "FeedbackNode",
    "PullbackNetwork",
    "decision_labels",
    "fit_network",
    "fit_node",
    "__version__",
]
