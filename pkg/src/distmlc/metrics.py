"""Multi-label evaluation metrics and label-set statistics.

Bipartition metrics take binary prediction/truth matrices; ranking
metrics take real-valued score matrices. Instances whose relevant or
irrelevant label set is empty are excluded from the ranking means (a
diagnostic counter is available via skipped_instances).
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, asdict, fields

import numpy as np


@dataclass(frozen=True)
class EvalReport:
    hamming_loss: float
    accuracy: float
    micro_precision: float
    micro_recall: float
    micro_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    ranking_loss: float
    coverage: float
    one_error: float
    average_precision: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.field_names())
            w.writerow([repr(getattr(self, n)) for n in self.field_names()])


@dataclass(frozen=True)
class LabelStats:
    card: float
    dens: float
    unique_count: int
    novel_count: int


def _binary(a, name="labels") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if not np.all((a == 0.0) | (a == 1.0)):
        raise ValueError(f"{name} must be binary")
    return a


def _pair(pred, truth):
    pred = _binary(pred, "pred")
    truth = _binary(truth, "truth")
    if pred.shape != truth.shape:
        raise ValueError("pred and truth shapes differ")
    return pred, truth


def card(Y) -> float:
    """Mean number of relevant labels per instance."""
    Y = _binary(Y)
    return float(Y.sum(axis=1).mean())


def dens(Y) -> float:
    """Label cardinality normalized by the number of labels."""
    Y = _binary(Y)
    return card(Y) / Y.shape[1]


def hamming_loss(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return float(np.mean(pred != truth))


def accuracy(pred, truth) -> float:
    """Mean Jaccard overlap; an instance with both sets empty counts as 1."""
    pred, truth = _pair(pred, truth)
    inter = (pred * truth).sum(axis=1)
    union = pred.sum(axis=1) + truth.sum(axis=1) - inter
    vals = np.where(union > 0, inter / np.where(union > 0, union, 1.0), 1.0)
    return float(vals.mean())


def _counts(pred, truth):
    tp = (pred * truth).sum(axis=0)
    fp = (pred * (1.0 - truth)).sum(axis=0)
    fn = ((1.0 - pred) * truth).sum(axis=0)
    return tp, fp, fn


def _safe_div(num, den):
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def _hmean(a: float, b: float) -> float:
    return 2.0 * a * b / (a + b) if (a + b) > 0 else 0.0


def micro_precision(pred, truth) -> float:
    tp, fp, _ = _counts(*_pair(pred, truth))
    return float(_safe_div(tp.sum(), tp.sum() + fp.sum()))


def micro_recall(pred, truth) -> float:
    tp, _, fn = _counts(*_pair(pred, truth))
    return float(_safe_div(tp.sum(), tp.sum() + fn.sum()))


def micro_f1(pred, truth) -> float:
    return _hmean(micro_precision(pred, truth), micro_recall(pred, truth))


def macro_precision(pred, truth) -> float:
    """Labels with no predicted positives contribute 0 and stay in the mean."""
    tp, fp, _ = _counts(*_pair(pred, truth))
    return float(_safe_div(tp, tp + fp).mean())


def macro_recall(pred, truth) -> float:
    tp, _, fn = _counts(*_pair(pred, truth))
    return float(_safe_div(tp, tp + fn).mean())


def macro_f1(pred, truth) -> float:
    return _hmean(macro_precision(pred, truth), macro_recall(pred, truth))


def _rankable(scores, truth, need_irrelevant: bool):
    scores = np.asarray(scores, dtype=np.float64)
    truth = _binary(truth, "truth")
    if scores.shape != truth.shape:
        raise ValueError("scores and truth shapes differ")
    pos = truth.sum(axis=1)
    mask = pos > 0
    if need_irrelevant:
        mask &= pos < truth.shape[1]
    if not mask.any():
        raise ValueError("no instance usable for ranking metric")
    return scores[mask], truth[mask]


def skipped_instances(truth, need_irrelevant: bool = True) -> int:
    """How many instances the ranking metrics exclude."""
    truth = _binary(truth, "truth")
    pos = truth.sum(axis=1)
    mask = pos > 0
    if need_irrelevant:
        mask &= pos < truth.shape[1]
    return int((~mask).sum())


def ranking_loss(scores, truth) -> float:
    """Mean fraction of (relevant, irrelevant) pairs ranked strictly wrongly."""
    Z, G = _rankable(scores, truth, need_irrelevant=True)
    total = 0.0
    for z, g in zip(Z, G):
        rel = z[g == 1.0]
        irr = z[g == 0.0]
        total += np.count_nonzero(rel[:, None] < irr[None, :]) / (rel.size * irr.size)
    return total / Z.shape[0]


def coverage(scores, truth, literal: bool = False) -> float:
    """Ranking depth needed to capture every relevant label.

    Default is the worst relevant label's rank minus one. With
    literal=True the worst relevant label itself is included in the
    count (one higher per instance).
    """
    Z, G = _rankable(scores, truth, need_irrelevant=False)
    total = 0.0
    for z, g in zip(Z, G):
        worst = z[g == 1.0].min()
        depth = np.count_nonzero(z >= worst)
        total += depth if literal else depth - 1
    return total / Z.shape[0]


def one_error(scores, truth) -> float:
    """Fraction of instances whose top-scored label is irrelevant."""
    Z, G = _rankable(scores, truth, need_irrelevant=False)
    top = np.argmax(Z, axis=1)
    return float(np.mean(G[np.arange(Z.shape[0]), top] == 0.0))


def average_precision(scores, truth) -> float:
    Z, G = _rankable(scores, truth, need_irrelevant=False)
    total = 0.0
    for z, g in zip(Z, G):
        rel = np.nonzero(g == 1.0)[0]
        acc = 0.0
        for j in rel:
            above_rel = np.count_nonzero(z[rel] >= z[j])
            above_all = np.count_nonzero(z >= z[j])
            acc += above_rel / above_all
        total += acc / rel.size
    return total / Z.shape[0]


def label_stats(Y_train, Y_test) -> LabelStats:
    """Cardinality/density over the train+test union plus label-vector counts."""
    Y_train = _binary(Y_train, "Y_train")
    Y_test = _binary(Y_test, "Y_test")
    union = np.vstack([Y_train, Y_test])
    uniq = np.unique(union, axis=0).shape[0]
    train_set = {row.tobytes() for row in np.ascontiguousarray(Y_train)}
    test_rows = {row.tobytes() for row in np.ascontiguousarray(Y_test)}
    novel = len(test_rows - train_set)
    return LabelStats(
        card=card(union), dens=dens(union), unique_count=uniq, novel_count=novel
    )


def evaluate(pred, scores, truth) -> EvalReport:
    """All twelve metrics for one (predictions, scores, truth) triple."""
    return EvalReport(
        hamming_loss=hamming_loss(pred, truth),
        accuracy=accuracy(pred, truth),
        micro_precision=micro_precision(pred, truth),
        micro_recall=micro_recall(pred, truth),
        micro_f1=micro_f1(pred, truth),
        macro_precision=macro_precision(pred, truth),
        macro_recall=macro_recall(pred, truth),
        macro_f1=macro_f1(pred, truth),
        ranking_loss=ranking_loss(scores, truth),
        coverage=coverage(scores, truth),
        one_error=one_error(scores, truth),
        average_precision=average_precision(scores, truth),
    )
