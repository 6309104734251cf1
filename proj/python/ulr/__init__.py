"""Unsupervised label refinement for dataless text classification."""

from ._ulr import (
    UlrError,
    accuracy,
    cluster_random_init,
    ensemble,
    js_divergence,
    kl_divergence,
    load_embeddings,
    load_score_matrix,
    one_to_one_accuracy,
    refine_dual,
    refine_fewshot,
    refine_single,
    write_embeddings,
    write_score_matrix,
)

__all__ = [
    "UlrError",
    "accuracy",
    "cluster_random_init",
    "ensemble",
    "js_divergence",
    "kl_divergence",
    "load_embeddings",
    "load_score_matrix",
    "one_to_one_accuracy",
    "refine_dual",
    "refine_fewshot",
    "refine_single",
    "write_embeddings",
    "write_score_matrix",
]
__version__ = "0.1.0"
