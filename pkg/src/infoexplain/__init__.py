"""Information-optimal personalized explanations for linear predictions.

Given a zero-mean Gaussian feature model (or samples of features,
predictions and user summaries), this package selects the sparse feature
subset that maximizes the conditional mutual information between the
explanation and the prediction, given the user's summary — exactly via
Schur complements, and empirically via sparse regression (best subset,
matching pursuit, or the Lasso path).
"""

from ._version import __version__
from .errors import (
    ConfigError,
    CorruptFile,
    DataError,
    DimensionMismatch,
    DimensionTooLarge,
    FactorizationFailure,
    GeometryTooLarge,
    InfoExplainError,
    InvalidCount,
    InvalidFloor,
    InvalidSparsity,
    IoFailure,
    MalformedHeader,
    NonNumericCell,
    NotPositiveSemidefinite,
    RaggedRow,
    SingularSystem,
    SolverError,
    TooFewSamples,
    UnsupportedFormat,
)
from .model import (
    ExplanationSupport,
    GaussianModel,
    JointMoments,
    RNG_NAME,
    SampleSet,
    analytic_moments,
    as_support,
    build_gaussian_model,
    empirical_moments,
    random_gaussian_model,
    sample,
)
from .mi import (
    MAX_ENUMERATION_DIM,
    MiValue,
    conditional_mi,
    conditional_variance,
    enumerate_supports,
    mi_table,
    mi_table_rows,
)
from .search import SearchResult, optimal_support_exhaustive, optimal_support_greedy
from .regression import (
    SolverConfig,
    SparseFit,
    lasso_lambda_max,
    lasso_path,
    lasso_path_fits,
    least_squares_on_support,
    solve_l0,
    solve_lasso,
)
from .explain import (
    METHODS,
    default_method,
    explain_fit,
    explain_from_samples,
    explain_population,
)
from .dataio import (
    ImageGrid,
    load_grayscale_image,
    load_samples_csv,
    write_pgm,
    write_samples_csv,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    NeighborhoodGeometry,
    Rect,
    compute_user_summary,
    default_geometry,
    extract_patches,
    run_experiment,
    support_mask,
    train_predictor,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
