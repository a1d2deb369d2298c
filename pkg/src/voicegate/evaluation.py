"""Cross-validation evaluation: k-fold and holdout accuracy per neighbor count.

Produces an EvalReport with one row per k, a confusion matrix for the
best-scoring k, a plain-text table rendering, and a JSON mirror.
"""

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InsufficientDataError, LeakageError
from .features import FeatureDataset
from .knn import fit, predict

# Accuracy table reported by the original study (fractions; None marks the
# entries it left indeterminate). Kept for display-format tests and docs
# only; nothing here is a claim about this implementation's accuracy.
REFERENCE_ACCURACY: dict[int, tuple[float, float | None]] = {
    2: (0.20, 1.00),
    3: (0.60, 1.00),
    4: (0.80, None),
    5: (0.60, None),
    6: (0.60, None),
}

# holdout column reported as indeterminate when more than half the test
# predictions decided by a tied vote
TIE_RATE_LIMIT = 0.5


@dataclass
class KNeighborResult:
    kfold_accuracy: float
    holdout_accuracy: float | None  # None = indeterminate


@dataclass
class EvalReport:
    per_k_results: dict[int, KNeighborResult]
    confusion: np.ndarray  # rows: true label, cols: predicted, both in confusion_labels order
    confusion_labels: list[str]
    fold_count: int
    split_seed: int
    best_k: int  # highest k-fold accuracy, ties to the smaller k

    def pooled_accuracy(self) -> float:
        """Trace over sum of the confusion matrix."""
        total = int(self.confusion.sum())
        if total == 0:
            raise ConfigError("confusion matrix is empty")
        return float(np.trace(self.confusion)) / total

    def to_dict(self) -> dict:
        return {
            "fold_count": self.fold_count,
            "split_seed": self.split_seed,
            "best_k": self.best_k,
            "per_k": {
                str(k): {
                    "kfold_accuracy": r.kfold_accuracy,
                    "holdout_accuracy": r.holdout_accuracy,
                }
                for k, r in self.per_k_results.items()
            },
            "confusion": {
                "labels": list(self.confusion_labels),
                "counts": self.confusion.tolist(),
            },
        }


def stratified_folds(labels: list[str], folds: int, seed: int) -> list[np.ndarray]:
    """Deal each label's indices round-robin into seeded-shuffled folds.

    Guarantees each fold's per-label count is within 1 of count/folds.
    """
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    counts = Counter(labels)
    smallest_label, smallest = min(counts.items(), key=lambda kv: (kv[1], kv[0]))
    if smallest < folds:
        raise InsufficientDataError(
            f"label {smallest_label!r} has only {smallest} clips; "
            f"stratified {folds}-fold needs at least {folds} per label"
        )
    rng = np.random.default_rng(seed)
    fold_lists: list[list[int]] = [[] for _ in range(folds)]
    offset = 0
    for lab in sorted(counts):
        idx = np.flatnonzero(np.asarray(labels, dtype=object) == lab)
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            fold_lists[(j + offset) % folds].append(int(i))
        # rotate the starting fold so leftover clips spread across folds
        offset = (offset + len(idx)) % folds
    return [np.array(sorted(f), dtype=int) for f in fold_lists]


def _subset(dataset: FeatureDataset, indices) -> FeatureDataset:
    return FeatureDataset([dataset.features[i] for i in indices])


def _kfold_detail(
    dataset: FeatureDataset, folds: int, k_neighbors: int, seed: int
) -> tuple[list[float], np.ndarray, list[str], float]:
    """Per-fold accuracies, pooled confusion, label order, and tie rate."""
    labels = dataset.labels()
    fold_idx = stratified_folds(labels, folds, seed)
    n = len(labels)
    min_train = n - max(len(f) for f in fold_idx)
    if k_neighbors > min_train:
        raise ConfigError(
            f"k={k_neighbors} exceeds the smallest training partition ({min_train} points)"
        )
    label_order = sorted(set(labels))
    pos = {lab: i for i, lab in enumerate(label_order)}
    confusion = np.zeros((len(label_order), len(label_order)), dtype=int)
    fold_accs: list[float] = []
    ties = 0
    for fold in fold_idx:
        in_fold = np.zeros(n, dtype=bool)
        in_fold[fold] = True
        model = fit(_subset(dataset, np.flatnonzero(~in_fold)), k_neighbors)
        correct = 0
        for i in fold:
            pred = predict(model, dataset.features[i].vector)
            ties += pred.tied_vote
            confusion[pos[labels[i]], pos[pred.label]] += 1
            correct += pred.label == labels[i]
        fold_accs.append(correct / len(fold))
    return fold_accs, confusion, label_order, ties / n


def kfold_cv(dataset: FeatureDataset, folds: int, k_neighbors: int, seed: int) -> float:
    """Mean over stratified folds of the fold's fraction of correct predictions."""
    fold_accs, _, _, _ = _kfold_detail(dataset, folds, k_neighbors, seed)
    return float(np.mean(fold_accs))


def _holdout_detail(
    train: FeatureDataset, test: FeatureDataset, k_neighbors: int
) -> tuple[float, float]:
    overlap = set(train.clip_ids()) & set(test.clip_ids())
    if overlap:
        sample = ", ".join(sorted(overlap)[:3])
        raise LeakageError(f"{len(overlap)} clip ids appear in both train and test (e.g. {sample})")
    if len(test) == 0:
        raise ConfigError("holdout test set is empty")
    model = fit(train, k_neighbors)
    correct = 0
    ties = 0
    for feat in test.features:
        pred = predict(model, feat.vector)
        ties += pred.tied_vote
        correct += pred.label == feat.speaker_id
    return correct / len(test), ties / len(test)


def holdout_cv(train: FeatureDataset, test: FeatureDataset, k_neighbors: int) -> float:
    """Fraction of test clips predicted correctly by a model fit on train."""
    accuracy, _ = _holdout_detail(train, test, k_neighbors)
    return accuracy


def sweep_neighbors(
    dataset: FeatureDataset,
    k_values: list[int],
    folds: int,
    seed: int,
    test_set: FeatureDataset | None = None,
) -> EvalReport:
    """Evaluate every k: k-fold accuracy over `dataset`, plus a holdout column.

    With an explicit `test_set`, the holdout column fits on all of `dataset`
    and scores `test_set`. Without one, a single stratified fold of `dataset`
    (seeded) is held out and the rest is the holdout training side. A holdout
    entry whose vote-tie rate exceeds 50% is recorded as indeterminate (None).
    """
    if not k_values:
        raise ConfigError("k_values must be non-empty")
    if test_set is None:
        fold_idx = stratified_folds(dataset.labels(), folds, seed)
        holdout_train = _subset(dataset, np.flatnonzero(~np.isin(np.arange(len(dataset)), fold_idx[0])))
        holdout_test = _subset(dataset, fold_idx[0])
    else:
        holdout_train, holdout_test = dataset, test_set

    per_k: dict[int, KNeighborResult] = {}
    confusions: dict[int, tuple[np.ndarray, list[str]]] = {}
    for k in k_values:
        fold_accs, confusion, label_order, _ = _kfold_detail(dataset, folds, k, seed)
        accuracy, tie_rate = _holdout_detail(holdout_train, holdout_test, k)
        per_k[k] = KNeighborResult(
            kfold_accuracy=float(np.mean(fold_accs)),
            holdout_accuracy=None if tie_rate > TIE_RATE_LIMIT else accuracy,
        )
        confusions[k] = (confusion, label_order)

    best_k = max(per_k, key=lambda k: (per_k[k].kfold_accuracy, -k))
    confusion, label_order = confusions[best_k]
    return EvalReport(
        per_k_results=per_k,
        confusion=confusion,
        confusion_labels=label_order,
        fold_count=folds,
        split_seed=seed,
        best_k=best_k,
    )


def render_accuracy_table(
    k_values: list[int],
    kfold_row: list[float | None],
    holdout_row: list[float | None],
) -> str:
    """Three-line table: neighbor counts, k-fold %, holdout % ('-' = indeterminate)."""
    width = 6

    def cell(value: float | None) -> str:
        return ("-" if value is None else f"{100 * value:.0f}").rjust(width)

    header = "neighbors".ljust(12) + "".join(str(k).rjust(width) for k in k_values)
    kfold = "k-fold %".ljust(12) + "".join(cell(v) for v in kfold_row)
    holdout = "holdout %".ljust(12) + "".join(cell(v) for v in holdout_row)
    return "\n".join([header, kfold, holdout])


def render_report(report: EvalReport) -> str:
    ks = list(report.per_k_results)
    table = render_accuracy_table(
        ks,
        [report.per_k_results[k].kfold_accuracy for k in ks],
        [report.per_k_results[k].holdout_accuracy for k in ks],
    )
    lines = [table, ""]
    lines.append(f"best k by k-fold accuracy: {report.best_k}")
    lines.append(f"folds: {report.fold_count}  seed: {report.split_seed}")
    lines.append("")
    lines.append("confusion at best k (rows true, columns predicted):")
    label_w = max(len(lab) for lab in report.confusion_labels) + 2
    lines.append(" " * label_w + "".join(lab.rjust(label_w) for lab in report.confusion_labels))
    for i, lab in enumerate(report.confusion_labels):
        row = "".join(str(int(c)).rjust(label_w) for c in report.confusion[i])
        lines.append(lab.ljust(label_w) + row)
    return "\n".join(lines)


def reference_table_text() -> str:
    """The original study's accuracy table, rendered in this report layout.

    Display fixture only; these numbers are not reproduced by this package.
    """
    ks = sorted(REFERENCE_ACCURACY)
    return render_accuracy_table(
        ks,
        [REFERENCE_ACCURACY[k][0] for k in ks],
        [REFERENCE_ACCURACY[k][1] for k in ks],
    )


def save_report(report: EvalReport, path: str | Path, config: dict | None = None) -> None:
    payload = report.to_dict()
    if config is not None:
        payload["config"] = config
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
