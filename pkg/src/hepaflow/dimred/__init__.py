"""Dimensionality-reduction chain: LDA, FA, t-SNE, UMAP, scaling."""

from .chain import ChainResult, barycentric_place, run_chain
from .fa import FaModel, fa_fit, fa_transform
from .lda import LdaModel, binary_direction, lda_fit, lda_transform
from .scaler import ScalerModel, standard_scale_apply, standard_scale_fit
from .tsne import TsneConfig, conditional_probabilities, joint_probabilities, tsne_embed
from .umap import UmapConfig, fit_ab, fuzzy_graph, knn_graph, min_dist_curve, smooth_knn, umap_embed

__all__ = [
    "ChainResult",
    "FaModel",
    "LdaModel",
    "ScalerModel",
    "TsneConfig",
    "UmapConfig",
    "barycentric_place",
    "binary_direction",
    "conditional_probabilities",
    "fa_fit",
    "fa_transform",
    "fit_ab",
    "fuzzy_graph",
    "joint_probabilities",
    "knn_graph",
    "lda_fit",
    "lda_transform",
    "min_dist_curve",
    "run_chain",
    "smooth_knn",
    "standard_scale_apply",
    "standard_scale_fit",
    "tsne_embed",
    "umap_embed",
]
