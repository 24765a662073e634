"""Backend selection for the hot embedding kernels.

Two interchangeable backends exist:

* ``compiled`` -- the Cython extension ``hepaflow._kernels._cext``,
* ``python``   -- numpy / pure-Python fallback in ``pybackend``.

Selection happens once at import time: the compiled backend is preferred
when importable. Set ``HEPAFLOW_BACKEND=python`` or ``compiled`` to force a
choice (forcing ``compiled`` raises if the extension is missing).

Within one backend every kernel is bit-deterministic. Across backends the
UMAP optimizer is arithmetic-identical by construction; the t-SNE step
agrees only to rounding (the numpy fallback sums in a different order), so
long t-SNE runs may diverge visibly between backends while remaining valid
embeddings. See ``benchmarks/bench_kernels.py`` for the speed and agreement
comparison.
"""

from __future__ import annotations

import os

import numpy as np

from . import pybackend

try:
    from . import _cext
except ImportError:  # pragma: no cover - depends on the build
    _cext = None

_choice = os.environ.get("HEPAFLOW_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "python"):
    raise RuntimeError(f"HEPAFLOW_BACKEND must be auto|compiled|python, got {_choice!r}")
if _choice == "compiled" and _cext is None:
    raise RuntimeError("HEPAFLOW_BACKEND=compiled but the extension is not built")

if _choice == "python" or _cext is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"


def have_compiled() -> bool:
    return _cext is not None


def tsne_step(P, Y, dY, scratch, exaggeration, compute_kl, backend=None):
    """Dispatch one t-SNE gradient evaluation to the selected backend."""
    if (backend or BACKEND) == "compiled":
        return _cext.tsne_step(P, Y, dY, scratch, exaggeration, compute_kl)
    return pybackend.tsne_step(P, Y, dY, scratch, exaggeration, compute_kl)


def umap_optimize(
    Y,
    head,
    tail,
    epochs_per_sample,
    a,
    b,
    rng,
    n_epochs,
    initial_alpha,
    negative_samples,
    repulsion,
    backend=None,
):
    """Dispatch the UMAP layout optimization; advances ``rng`` identically
    on both backends."""
    if (backend or BACKEND) == "compiled":
        state = np.array(rng.state(), dtype=np.uint64)
        _cext.umap_optimize(
            Y,
            head,
            tail,
            epochs_per_sample,
            a,
            b,
            state,
            n_epochs,
            initial_alpha,
            negative_samples,
            repulsion,
        )
        rng.set_state(state)
        return
    pybackend.umap_optimize(
        Y,
        head,
        tail,
        epochs_per_sample,
        a,
        b,
        rng,
        n_epochs,
        initial_alpha,
        negative_samples,
        repulsion,
    )
