"""Beat-level ECG morphological entropy toolkit."""

from .baselines import (
    BaselineConfig,
    approximate_entropy,
    fuzzy_entropy,
    permutation_entropy,
    sample_entropy,
)
from .diversity import (
    PruneManifest,
    RecordScore,
    prune_by_mee,
    prune_random,
    record_mee,
)
from .io import (
    EcgRecord,
    NoiseSpec,
    add_noise,
    invert_cycles,
    load_record,
    save_record,
    synth_ecg,
)
from .morphology import (
    MorphConfig,
    MorphResult,
    MorphValues,
    WaveletSet,
    bandwidth_entropy,
    extract_wavelet_sets,
    fuse_mee,
    morph_values,
    morphological_entropy,
    normalize,
    wavelet_set_entropy,
    wse_value,
)
from .quality import QualityReport, assess_quality
from .screening import (
    GridSearchResult,
    MeeSeries,
    ScreeningReport,
    evaluate,
    flag_beats,
    grid_search_alpha,
    mee_series,
    sveb_adaptive_threshold,
)
from .segmentation import (
    Beat,
    ExtractedBeats,
    detect_r_peaks,
    extract_beats,
    refine_r_peaks,
    segment_record,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig", "approximate_entropy", "fuzzy_entropy",
    "permutation_entropy", "sample_entropy",
    "PruneManifest", "RecordScore", "prune_by_mee", "prune_random", "record_mee",
    "EcgRecord", "NoiseSpec", "add_noise", "invert_cycles", "load_record",
    "save_record", "synth_ecg",
    "MorphConfig", "MorphResult", "MorphValues", "WaveletSet",
    "bandwidth_entropy", "extract_wavelet_sets", "fuse_mee", "morph_values",
    "morphological_entropy", "normalize", "wavelet_set_entropy", "wse_value",
    "QualityReport", "assess_quality",
    "GridSearchResult", "MeeSeries", "ScreeningReport", "evaluate", "flag_beats",
    "grid_search_alpha", "mee_series", "sveb_adaptive_threshold",
    "Beat", "ExtractedBeats", "detect_r_peaks", "extract_beats",
    "refine_r_peaks", "segment_record",
    "__version__",
]
