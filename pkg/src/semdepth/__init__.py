"""Zero-shot depth estimation from patch-to-language-token similarity.

The engine never sees RGB pixels: it takes a dense per-patch feature map and a
bank of prompt embeddings, scores every patch against every semantic distance
token, softens the scores with a temperature softmax, and combines quantified
depth bins into a per-pixel metric depth map. Evaluation, a random lower-bound
baseline, and bin/prompt ablation sweeps live alongside.
"""

from .ablation import (
    PRESET_PARTITIONS,
    PRESET_PROMPTS,
    PROMPT_TEMPLATE,
    BinSweepConfig,
    PromptDesign,
    PromptSweepConfig,
    depth_histogram,
    filter_records,
    preset_bin_sweep,
    preset_prompt_sweep,
    run_bin_sweep,
    run_prompt_sweep,
)
from .baseline import RandomBaselineConfig, random_depth_map
from .errors import (
    ArityMismatch,
    BadMagic,
    ChannelMismatch,
    EmptyClassFilter,
    EmptyMask,
    EvaluationError,
    FormatError,
    IndexOutOfRange,
    ManifestError,
    MetadataMismatch,
    MissingTextBank,
    NonPositivePrediction,
    SemDepthError,
    ShapeError,
    ShapeMismatch,
    TruncatedPayload,
    UnsupportedRank,
    UnsupportedVersion,
    ValidationError,
    ZeroNormVector,
)
from .io import (
    export_pgm,
    format_report,
    load_manifest,
    read_container,
    read_depth_file,
    read_feature_map,
    read_text_bank,
    write_container,
    write_depth_file,
    write_feature_map,
    write_manifest,
    write_report,
    write_text_bank,
)
from .metrics import EvalMask, MetricReport, average_reports, dataset_metrics, image_metrics
from .model import (
    BinPartition,
    DepthMap,
    FeatureMap,
    Manifest,
    ManifestRecord,
    TextBank,
    validate_pairing,
)
from .projection import (
    SimilarityGrid,
    Temperature,
    TokenResponse,
    WeightGrid,
    combine_bins,
    cosine_similarity,
    inspect_patch,
    patch_to_pixel,
    predict,
    temperature_softmax,
)

__version__ = "0.1.0"
