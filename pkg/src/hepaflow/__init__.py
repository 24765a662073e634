"""hepaflow: a deterministic chronic-liver-disease prediction pipeline.

Kept import-light on purpose: the CLI applies the HEPAFLOW_THREADS cap
before any numeric module (and therefore BLAS) loads. Public symbols are
resolved lazily.
"""

__version__ = "0.1.0"

_LAZY = {
    "dataset": ".dataset",
    "dimred": ".dimred",
    "evaluation": ".evaluation",
    "models": ".models",
    "numerics": ".numerics",
    "pipeline": ".pipeline",
    "preprocess": ".preprocess",
    "reporting": ".reporting",
}


def __getattr__(name):
    if name in _LAZY:
        import importlib

        return importlib.import_module(_LAZY[name], __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
