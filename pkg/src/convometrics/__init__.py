"""convometrics: measure, summarize, and predict interpersonal effectiveness
from recorded human-avatar conversation sessions."""

from .config import AnalysisConfig, load_config
from .sessions import (
    AlignedSession,
    AudioTrack,
    EmotionFrames,
    Event,
    EventStream,
    ImpactValue,
    SampledSeries,
    Session,
    SurveyResponses,
    ValidationReport,
    align_streams,
    resample_events,
)
from .bundle import (
    find_bundles,
    ingest_bundle,
    merge_self_annotations,
    validate_session,
    write_bundle,
)
from .metrics import (
    EstimatorClass,
    ImpactScore,
    SuccessLabel,
    SurveyScore,
    classify_success,
    estimator_category,
    impact_score,
    survey_inhabiter,
    survey_participant,
)
from .emotion import (
    ClusterDefs,
    Ellipse,
    EmotionMap,
    PcaResult,
    Trajectory,
    canonical_clusters,
    canonical_map,
    center_of_mass,
    cluster_occupancy,
    confidence_ellipse,
    emotion_vector,
    pca2,
    session_trajectory,
    video_feature_names,
    video_feature_vector,
)
from .svm import (
    CvResult,
    Dataset,
    FeatureSubset,
    LinearHingeSVC,
    RocCurve,
    evaluate_modes,
    load_dataset,
    loo_cv,
    roc_auc,
    select_features,
)
from .stats import (
    ContingencyTable2x2,
    CorrelationResult,
    SessionRecord,
    chi_square_2x2,
    estimator_breakdown,
    group_summary,
    pearson,
    stepdown_adjust,
    success_transition_table,
)
from .report import build_report, emit_report, session_record

__version__ = "0.1.0"
