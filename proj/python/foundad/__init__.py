"""Few-shot anomaly detection with a feature-manifold projector."""

from ._foundad import (
    FoundadError,
    Layout,
    Projector,
    ProjectorConfig,
    aupr,
    auroc,
    binarize_foreground,
    default_top_k,
    distance_vs_area,
    image_score,
    pixel_auroc,
    pro,
    read_ftns,
    run_cli,
    sample_manifest,
    score_image,
    spearman,
    synthesize_anomaly,
    toy_encode,
    train,
    write_ftns,
)

__all__ = [
    "FoundadError",
    "Layout",
    "Projector",
    "ProjectorConfig",
    "aupr",
    "auroc",
    "binarize_foreground",
    "default_top_k",
    "distance_vs_area",
    "image_score",
    "pixel_auroc",
    "pro",
    "read_ftns",
    "run_cli",
    "sample_manifest",
    "score_image",
    "spearman",
    "synthesize_anomaly",
    "toy_encode",
    "train",
    "write_ftns",
]
