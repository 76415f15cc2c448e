"""Default-risk scoring from corporate financial statements.

Cut-off (S-Score) and fuzzy (FS-Score) scores over four ratios, raw and
fuzzy logits, ROC/Gini validation, and an FS-Score rating scale.
"""

from .calibration import (
    PUBLISHED_RATING_SPEC,
    InternalRatingSpec,
    derive_cutoffs,
    grade_statistics,
    map_fs_to_grade,
    reduce_external_rating,
)
from .ingestion import DefaultEvent, LabeledCase, availability_date, label_cases
from .logit import PUBLISHED_FUZZY_LOGIT, PUBLISHED_RAW_LOGIT, LogitModel, fit_logit, logit_predict
from .metrics import (
    classification_errors,
    correlation_matrix,
    empirical_cdf,
    first_pc_variance_share,
    gini_ar,
    roc_curve,
)
from .modelfile import ModelFile, published_model
from .pipeline import fit_models, score_statements
from .ratios import PredictorVector, altman_z_em, compute_predictors
from .scoring import (
    PUBLISHED_CUTOFFS,
    PUBLISHED_FUZZY,
    CutoffSpec,
    FuzzySpec,
    best_cutoff,
    fs_score,
    membership,
    s_score,
)
from .statements import FinancialStatement, PeriodType
from .synthetic import generate_synthetic_dataset

__version__ = "0.1.0"
