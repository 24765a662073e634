"""Experiment orchestration: config validation, the two run modes, and the
in-memory run report.

``faithful`` reproduces the published order exactly: impute, oversample,
simulate, concatenate, replace outliers, then fit the whole reduction chain
on the complete dataset before splitting or cross-validating. That order
leaks evaluation rows into the oversampler and every fitted transform, and
inflates scores accordingly.

``sound`` keeps the same stages but restricts every fitted statistic
(imputation fill, IQR fences, oversampling, LDA/FA/scaler, and the two
embeddings) to training rows; held-out rows ride along via native
transforms where they exist and 5-nearest-neighbor barycentric placement
through t-SNE/UMAP, which have none. Cross-validation refits the entire
preparation per fold.

Both modes emit the same report structure, stamped with the mode.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__, _kernels
from .dataset import Dataset, class_counts, load_ilpd, resolve_data_path
from .dimred import ChainResult, TsneConfig, UmapConfig, run_chain
from .errors import ConfigError
from .evaluation import (
    ConfusionMatrix,
    CurveSeries,
    MetricRow,
    auc,
    basic_metrics,
    brier,
    calibration_bins,
    confusion,
    isotonic_fit,
    learning_curve,
    roc_curve,
    pr_curve,
    stratified_kfold,
    stratified_split,
    timed,
)
from .models import ClassifierSpec, train
from .numerics import SeededRng, derive_substream
from .preprocess import (
    SyntheticSpec,
    ag_fill_value,
    apply_iqr_replace,
    concatenate,
    fit_iqr_bounds,
    generate_synthetic,
    impute_ag,
    iqr_replace,
    random_oversample,
)

# substream ids of the master seed (fixed; part of the determinism contract)
_S_OVERSAMPLE = 0
_S_SYNTHETIC = 1
_S_SPLIT = 2
_S_KFOLD = 3
_S_CHAIN = 4
_S_MODEL_SPLIT = 1000
_S_FOLD_BASE = 2000
_S_LEARNING = 3000
_S_SOUND_PREP = 5000
_S_SOUND_CHAIN = 6000

DEFAULT_LEARNING_FRACTIONS = tuple(round(0.1 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class EvalConfig:
    test_fraction: float = 0.25
    folds: int = 10
    learning_fractions: tuple = DEFAULT_LEARNING_FRACTIONS
    learning_protocol: str = "split"
    calibration_bins: int = 10

    def validate(self) -> None:
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"eval.test_fraction {self.test_fraction} outside (0, 1)")
        if self.folds < 2:
            raise ConfigError("eval.folds must be >= 2")
        if self.learning_protocol not in ("split", "cv"):
            raise ConfigError("eval.learning_protocol must be 'split' or 'cv'")
        fracs = list(self.learning_fractions)
        if not fracs or any(not 0.0 < f <= 1.0 for f in fracs) or sorted(fracs) != fracs:
            raise ConfigError("eval.learning_fractions must ascend within (0, 1]")
        if self.calibration_bins < 2:
            raise ConfigError("eval.calibration_bins must be >= 2")


def default_classifier_specs() -> list[ClassifierSpec]:
    return [
        ClassifierSpec(kind="logistic_regression"),
        ClassifierSpec(kind="knn"),
        ClassifierSpec(kind="random_forest"),
        ClassifierSpec(kind="mlp"),
    ]


@dataclass
class PipelineConfig:
    data_path: str = "standin"
    output_dir: str = "hepaflow_out"
    seed: int = 42
    mode: str = "faithful"
    paper_total: bool = True
    iqr_k: float = 1.5
    impute_strategy: str = "faithful"
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    lda_dims: int = 1
    fa_factors: int = 3
    tsne: TsneConfig = field(default_factory=TsneConfig)
    umap: UmapConfig = field(default_factory=UmapConfig)
    umap_input: str = "tsne"
    classifiers: list[ClassifierSpec] = field(default_factory=default_classifier_specs)
    eval: EvalConfig = field(default_factory=EvalConfig)
    dump_stages: bool = True
    plots: bool = False

    def validate(self) -> None:
        if self.mode not in ("faithful", "sound"):
            raise ConfigError(f"mode must be 'faithful' or 'sound', got {self.mode!r}")
        if self.umap_input not in ("tsne", "concat"):
            raise ConfigError("umap_input must be 'tsne' or 'concat'")
        if self.iqr_k <= 0:
            raise ConfigError("iqr_k must be positive")
        if self.impute_strategy not in ("faithful", "column_median"):
            raise ConfigError("impute_strategy must be 'faithful' or 'column_median'")
        if self.lda_dims < 1 or self.fa_factors < 1:
            raise ConfigError("lda_dims and fa_factors must be >= 1")
        if not self.classifiers:
            raise ConfigError("at least one classifier is required")
        self.synthetic.validate()
        self.eval.validate()
        for spec in self.classifiers:
            spec.resolved_params()

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["eval"]["learning_fractions"] = list(self.eval.learning_fractions)
        return out


def _take_keys(raw: dict, allowed: dict[str, Any], where: str) -> dict:
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")
    return {k: raw[k] for k in raw}


def config_from_dict(raw: dict) -> PipelineConfig:
    """Build and validate a config from parsed JSON; unknown keys anywhere
    are rejected."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    base = PipelineConfig()
    fields = _take_keys(raw, base.__dict__, "config")

    if "synthetic" in fields:
        fields["synthetic"] = SyntheticSpec(
            **_take_keys(fields["synthetic"], asdict(SyntheticSpec()), "synthetic")
        )
    if "tsne" in fields:
        fields["tsne"] = TsneConfig(**_take_keys(fields["tsne"], asdict(TsneConfig()), "tsne"))
    if "umap" in fields:
        fields["umap"] = UmapConfig(**_take_keys(fields["umap"], asdict(UmapConfig()), "umap"))
    if "eval" in fields:
        ev = _take_keys(fields["eval"], asdict(EvalConfig()), "eval")
        if "learning_fractions" in ev:
            ev["learning_fractions"] = tuple(ev["learning_fractions"])
        fields["eval"] = EvalConfig(**ev)
    if "classifiers" in fields:
        specs = []
        for entry in fields["classifiers"]:
            if not isinstance(entry, dict) or "kind" not in entry:
                raise ConfigError("each classifier entry needs a 'kind'")
            extras = {k: v for k, v in entry.items() if k not in ("kind", "seed")}
            specs.append(
                ClassifierSpec(kind=entry["kind"], params=extras, seed=int(entry.get("seed", 0)))
            )
        fields["classifiers"] = specs

    config = PipelineConfig(**fields)
    config.validate()
    return config


@dataclass
class RunReport:
    config: dict
    mode: str
    seed: int
    stage_log: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)  # name -> protocol -> MetricRow
    extras: dict = field(default_factory=dict)  # name -> {"brier_isotonic": ...}
    confusions: dict = field(default_factory=dict)  # name -> ConfusionMatrix
    curves: list = field(default_factory=list)  # CurveSeries
    runtimes: list = field(default_factory=list)  # (name, protocol, seconds)
    stage_matrices: dict = field(default_factory=dict)  # name -> ndarray
    kl_trace: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    manifest: list = field(default_factory=list)


def _environment_stamp() -> dict:
    import platform

    return {
        "package_version": __version__,
        "python": platform.python_version(),
        "platform": sys.platform,
        "numpy": np.__version__,
        "kernel_backend": _kernels.BACKEND,
    }


def _model_names(specs: list[ClassifierSpec]) -> list[str]:
    names = []
    for spec in specs:
        name = spec.kind
        if name in names:
            suffix = 2
            while f"{name}_{suffix}" in names:
                suffix += 1
            name = f"{name}_{suffix}"
        names.append(name)
    return names


def _seeded(spec: ClassifierSpec, seed: int) -> ClassifierSpec:
    return ClassifierSpec(kind=spec.kind, params=spec.params, seed=seed)


def _split_protocol_metrics(
    report: RunReport,
    config: PipelineConfig,
    names: list[str],
    X_train,
    y_train,
    X_test,
    y_test,
    master: SeededRng,
) -> None:
    for i, (name, spec) in enumerate(zip(names, config.classifiers)):
        seeded = _seeded(spec, derive_substream(master, _S_MODEL_SPLIT + i).seed)
        model, fit_seconds = timed(lambda s=seeded: train(s, X_train, y_train))
        proba, predict_seconds = timed(lambda m=model: m.predict_proba(X_test))
        p_pos = proba[:, 1]
        predicted = (p_pos >= 0.5).astype(np.int64)
        cm = confusion(y_test, predicted)
        accuracy, precision, recall, f1 = basic_metrics(cm)
        roc = roc_curve(y_test, p_pos, model=name)
        series_pr = pr_curve(y_test, p_pos, model=name)
        calib = calibration_bins(y_test, p_pos, config.eval.calibration_bins, model=name)
        row = MetricRow(
            accuracy=accuracy,
            precision=precision,
            recall=recall,
            f1=f1,
            auc=auc(roc),
            brier=brier(y_test, p_pos),
            runtime_seconds=fit_seconds + predict_seconds,
        )
        report.metrics.setdefault(name, {})["split"] = row
        report.confusions[name] = cm
        report.curves += [roc, series_pr, calib]
        report.runtimes.append((name, "split", fit_seconds + predict_seconds))

        iso = isotonic_fit(p_pos, y_test)
        report.extras.setdefault(name, {})["brier_isotonic"] = brier(y_test, iso.apply(p_pos))


def _cv_metrics_from_folds(fold_rows: list[MetricRow]) -> MetricRow:
    def mean(attr: str) -> float:
        values = [getattr(r, attr) for r in fold_rows]
        finite = [v for v in values if not math.isnan(v)]
        return float(np.mean(finite)) if finite else math.nan

    return MetricRow(
        accuracy=mean("accuracy"),
        precision=mean("precision"),
        recall=mean("recall"),
        f1=mean("f1"),
        auc=mean("auc"),
        brier=mean("brier"),
        runtime_seconds=float(sum(r.runtime_seconds for r in fold_rows)),
    )


def _fold_metric_row(model, X_val, y_val) -> MetricRow:
    proba = model.predict_proba(X_val)
    p_pos = proba[:, 1]
    predicted = (p_pos >= 0.5).astype(np.int64)
    cm = confusion(y_val, predicted)
    accuracy, precision, recall, f1 = basic_metrics(cm)
    return MetricRow(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        auc=auc(roc_curve(y_val, p_pos)),
        brier=brier(y_val, p_pos),
    )


def _learning_curves(
    report: RunReport,
    config: PipelineConfig,
    names: list[str],
    X,
    y,
    train_idx,
    test_idx,
    master: SeededRng,
) -> None:
    for i, (name, spec) in enumerate(zip(names, config.classifiers)):
        train_series, val_series = learning_curve(
            spec,
            X,
            y,
            config.eval.learning_fractions,
            derive_substream(master, _S_LEARNING + i),
            protocol=config.eval.learning_protocol,
            train_idx=train_idx,
            test_idx=test_idx,
            folds=config.eval.folds,
            model_name=name,
        )
        train_series.kind = "learning_train"
        report.curves += [train_series, val_series]


def _run_faithful(config: PipelineConfig, report: RunReport, master: SeededRng) -> None:
    data, missing = load_ilpd(resolve_data_path(config.data_path))
    report.stage_log["loaded"] = {
        "rows": data.n_rows,
        "missing_ag": missing.get("A/G", 0),
        "class_counts": list(class_counts(data)),
    }

    imputed = impute_ag(data, config.impute_strategy)
    target = 2 * max(class_counts(imputed)) if config.paper_total else None
    oversampled = random_oversample(
        imputed, derive_substream(master, _S_OVERSAMPLE), target=target
    )
    report.stage_log["oversampled"] = {
        "rows": oversampled.n_rows,
        "class_counts": list(class_counts(oversampled)),
        "per_class_target": target,
    }

    synthetic = generate_synthetic(config.synthetic, derive_substream(master, _S_SYNTHETIC))
    if synthetic.n_features != oversampled.n_features:
        raise ConfigError(
            f"synthetic width {synthetic.n_features} must match clinical width "
            f"{oversampled.n_features}; adjust the synthetic block sizes"
        )
    combined = concatenate(oversampled, synthetic)
    report.stage_log["combined"] = {
        "rows": combined.n_rows,
        "class_counts": list(class_counts(combined)),
    }

    replaced, replacement_counts = iqr_replace(combined, config.iqr_k)
    report.stage_log["iqr"] = {"k": config.iqr_k, "replacements": replacement_counts}

    chain = run_chain(
        replaced.features,
        replaced.labels,
        derive_substream(master, _S_CHAIN),
        lda_dims=config.lda_dims,
        fa_factors=config.fa_factors,
        tsne_cfg=config.tsne,
        umap_cfg=config.umap,
        umap_input=config.umap_input,
    )
    report.stage_log["chain_widths"] = chain.widths
    report.kl_trace = chain.kl_trace
    report.stage_matrices = dict(chain.stages)

    X = chain.reduced
    y = replaced.labels
    names = _model_names(config.classifiers)

    train_idx, test_idx = stratified_split(
        y, config.eval.test_fraction, derive_substream(master, _S_SPLIT)
    )
    report.stage_log["split"] = {"train": int(train_idx.size), "test": int(test_idx.size)}
    _split_protocol_metrics(
        report, config, names, X[train_idx], y[train_idx], X[test_idx], y[test_idx], master
    )

    folds = stratified_kfold(y, config.eval.folds, derive_substream(master, _S_KFOLD))
    report.stage_log["cv"] = {"folds": len(folds)}
    for i, (name, spec) in enumerate(zip(names, config.classifiers)):
        fold_rows = []
        total_seconds = 0.0
        for fold_no, (tr, va) in enumerate(folds):
            fold_rng = derive_substream(master, _S_FOLD_BASE + fold_no)
            seeded = _seeded(spec, derive_substream(fold_rng, i).seed)
            model, seconds = timed(lambda s=seeded, t=tr: train(s, X[t], y[t]))
            total_seconds += seconds
            fold_rows.append(_fold_metric_row(model, X[va], y[va]))
        row = _cv_metrics_from_folds(fold_rows)
        report.metrics.setdefault(name, {})["cv"] = row
        report.runtimes.append((name, "cv", total_seconds))

    _learning_curves(report, config, names, X, y, train_idx, test_idx, master)


def _sound_prepare(
    config: PipelineConfig,
    raw: Dataset,
    n_clinical: int,
    train_idx: np.ndarray,
    eval_idx: np.ndarray,
    tag: int,
    master: SeededRng,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, ChainResult]:
    """Fit all preprocessing and the chain on training rows only."""
    prep_rng = derive_substream(master, _S_SOUND_PREP + tag)
    clinical_train = train_idx[train_idx < n_clinical]
    fill = ag_fill_value(raw.take(clinical_train), config.impute_strategy)
    imputed = impute_ag(raw, config.impute_strategy, fill_value=fill)

    bounds = fit_iqr_bounds(imputed.take(train_idx), config.iqr_k)
    replaced, _ = apply_iqr_replace(imputed, bounds)

    train_part = replaced.take(train_idx)
    eval_part = replaced.take(eval_idx)
    balanced = random_oversample(train_part, prep_rng)

    chain = run_chain(
        balanced.features,
        balanced.labels,
        derive_substream(master, _S_SOUND_CHAIN + tag),
        lda_dims=config.lda_dims,
        fa_factors=config.fa_factors,
        tsne_cfg=config.tsne,
        umap_cfg=config.umap,
        umap_input=config.umap_input,
        X_companion=eval_part.features,
    )
    return chain.reduced, balanced.labels, chain.companion, eval_part.labels, chain


def _run_sound(config: PipelineConfig, report: RunReport, master: SeededRng) -> None:
    data, missing = load_ilpd(resolve_data_path(config.data_path))
    report.stage_log["loaded"] = {
        "rows": data.n_rows,
        "missing_ag": missing.get("A/G", 0),
        "class_counts": list(class_counts(data)),
    }
    synthetic = generate_synthetic(config.synthetic, derive_substream(master, _S_SYNTHETIC))
    if synthetic.n_features != data.n_features:
        raise ConfigError(
            f"synthetic width {synthetic.n_features} must match clinical width "
            f"{data.n_features}; adjust the synthetic block sizes"
        )
    combined = concatenate(data, synthetic)
    report.stage_log["combined"] = {
        "rows": combined.n_rows,
        "class_counts": list(class_counts(combined)),
    }
    names = _model_names(config.classifiers)

    train_idx, test_idx = stratified_split(
        combined.labels, config.eval.test_fraction, derive_substream(master, _S_SPLIT)
    )
    report.stage_log["split"] = {"train": int(train_idx.size), "test": int(test_idx.size)}
    X_train, y_train, X_test, y_test, chain = _sound_prepare(
        config, combined, data.n_rows, train_idx, test_idx, tag=0, master=master
    )
    report.stage_log["chain_widths"] = chain.widths
    report.kl_trace = chain.kl_trace
    report.stage_matrices = dict(chain.stages)
    _split_protocol_metrics(report, config, names, X_train, y_train, X_test, y_test, master)

    folds = stratified_kfold(
        combined.labels, config.eval.folds, derive_substream(master, _S_KFOLD)
    )
    report.stage_log["cv"] = {"folds": len(folds)}
    per_model_rows: dict[str, list[MetricRow]] = {name: [] for name in names}
    per_model_seconds: dict[str, float] = {name: 0.0 for name in names}
    for fold_no, (tr, va) in enumerate(folds):
        Xf_train, yf_train, Xf_val, yf_val, _ = _sound_prepare(
            config, combined, data.n_rows, tr, va, tag=1 + fold_no, master=master
        )
        fold_rng = derive_substream(master, _S_FOLD_BASE + fold_no)
        for i, (name, spec) in enumerate(zip(names, config.classifiers)):
            seeded = _seeded(spec, derive_substream(fold_rng, i).seed)
            model, seconds = timed(lambda s=seeded: train(s, Xf_train, yf_train))
            per_model_seconds[name] += seconds
            per_model_rows[name].append(_fold_metric_row(model, Xf_val, yf_val))
    for name in names:
        report.metrics.setdefault(name, {})["cv"] = _cv_metrics_from_folds(per_model_rows[name])
        report.runtimes.append((name, "cv", per_model_seconds[name]))

    # learning curves over the (already reduced) split-protocol matrices
    X_lc = np.vstack([X_train, X_test])
    y_lc = np.concatenate([y_train, y_test])
    lc_train_idx = np.arange(len(y_train))
    lc_test_idx = np.arange(len(y_train), len(y_lc))
    _learning_curves(report, config, names, X_lc, y_lc, lc_train_idx, lc_test_idx, master)


def run(config: PipelineConfig) -> RunReport:
    """Execute the configured experiment and return the full report."""
    config.validate()
    report = RunReport(
        config=config.to_dict(),
        mode=config.mode,
        seed=config.seed,
        environment=_environment_stamp(),
    )
    master = SeededRng(config.seed)
    if config.mode == "faithful":
        _run_faithful(config, report, master)
    else:
        _run_sound(config, report, master)
    return report
