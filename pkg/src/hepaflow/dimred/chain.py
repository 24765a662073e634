"""The staged reduction: LDA and FA side by side, concatenated, embedded by
t-SNE, then UMAP, then z-scored.

``run_chain`` fits every stage on the fit rows. When companion rows are
supplied (the leakage-free pipeline mode evaluates held-out data this way)
the linear stages transform them natively, while the two embedding stages
-- which have no out-of-sample map -- place each companion row at the
barycenter of the embeddings of its five nearest fit rows in that stage's
input space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError
from ..numerics import SeededRng, as_matrix
from .fa import FaModel, fa_fit, fa_transform
from .lda import LdaModel, lda_fit, lda_transform
from .scaler import ScalerModel, standard_scale_apply, standard_scale_fit
from .tsne import TsneConfig, tsne_embed
from .umap import UmapConfig, umap_embed

PLACEMENT_NEIGHBORS = 5

_TSNE_STREAM = 11
_UMAP_STREAM = 12


@dataclass
class ChainResult:
    reduced: np.ndarray
    companion: np.ndarray | None
    stages: dict[str, np.ndarray] = field(default_factory=dict)
    widths: list[tuple[str, int]] = field(default_factory=list)
    lda_model: LdaModel | None = None
    fa_model: FaModel | None = None
    scaler_model: ScalerModel | None = None
    kl_trace: list[float] = field(default_factory=list)


def barycentric_place(
    fit_inputs: np.ndarray,
    fit_embedding: np.ndarray,
    new_inputs: np.ndarray,
    k: int = PLACEMENT_NEIGHBORS,
) -> np.ndarray:
    """Place new rows at the mean embedding of their k nearest fit rows."""
    F = as_matrix(fit_inputs, "placement fit inputs")
    E = as_matrix(fit_embedding, "placement fit embedding")
    N = as_matrix(new_inputs, "placement new inputs")
    if F.shape[0] != E.shape[0]:
        raise NumericError("fit inputs and embedding row counts differ")
    k = min(k, F.shape[0])
    out = np.empty((N.shape[0], E.shape[1]))
    for i in range(N.shape[0]):
        d = np.einsum("ij,ij->i", F - N[i], F - N[i])
        nearest = np.argsort(d, kind="stable")[:k]
        out[i] = E[nearest].mean(axis=0)
    return out


def run_chain(
    X,
    y,
    rng: SeededRng,
    *,
    lda_dims: int = 1,
    fa_factors: int = 3,
    tsne_cfg: TsneConfig | None = None,
    umap_cfg: UmapConfig | None = None,
    umap_input: str = "tsne",
    X_companion=None,
    backend: str | None = None,
) -> ChainResult:
    """Fit the full reduction on (X, y); optionally carry companion rows."""
    if umap_input not in ("tsne", "concat"):
        raise NumericError(f"umap_input must be 'tsne' or 'concat', got {umap_input!r}")
    tsne_cfg = tsne_cfg or TsneConfig()
    umap_cfg = umap_cfg or UmapConfig()
    A = as_matrix(X, "chain input")
    C = as_matrix(X_companion, "chain companion") if X_companion is not None else None
    if C is not None and C.shape[1] != A.shape[1]:
        raise NumericError("companion width differs from fit width")

    result = ChainResult(reduced=A, companion=C)
    result.widths.append(("input", A.shape[1]))

    lda_model = lda_fit(A, y, lda_dims)
    x_lda = lda_transform(lda_model, A)
    fa_model = fa_fit(A, fa_factors)
    x_fa = fa_transform(fa_model, A)
    concat = np.hstack([x_lda, x_fa])
    result.stages["lda"] = x_lda
    result.stages["fa"] = x_fa
    result.stages["concat"] = concat
    result.widths += [
        ("lda", x_lda.shape[1]),
        ("fa", x_fa.shape[1]),
        ("concat", concat.shape[1]),
    ]

    x_tsne, kl_trace = tsne_embed(concat, tsne_cfg, rng.substream(_TSNE_STREAM), backend=backend)
    result.stages["tsne"] = x_tsne
    result.kl_trace = kl_trace
    result.widths.append(("tsne", x_tsne.shape[1]))

    umap_source = x_tsne if umap_input == "tsne" else concat
    x_umap = umap_embed(umap_source, umap_cfg, rng.substream(_UMAP_STREAM), backend=backend)
    result.stages["umap"] = x_umap
    result.widths.append(("umap", x_umap.shape[1]))

    scaler_model = standard_scale_fit(x_umap)
    reduced = standard_scale_apply(scaler_model, x_umap)
    result.stages["scaled"] = reduced
    result.widths.append(("scaled", reduced.shape[1]))

    result.reduced = reduced
    result.lda_model = lda_model
    result.fa_model = fa_model
    result.scaler_model = scaler_model

    if C is not None:
        c_lda = lda_transform(lda_model, C)
        c_fa = fa_transform(fa_model, C)
        c_concat = np.hstack([c_lda, c_fa])
        c_tsne = barycentric_place(concat, x_tsne, c_concat)
        c_source = c_tsne if umap_input == "tsne" else c_concat
        fit_source = x_tsne if umap_input == "tsne" else concat
        c_umap = barycentric_place(fit_source, x_umap, c_source)
        result.companion = standard_scale_apply(scaler_model, c_umap)

    return result
