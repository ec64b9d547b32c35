"""Closed-form leave-one-out tuning for the IDW-weighted predictor.

The ridge system is solved once; leverage values then give every
out-of-sample distance prediction directly, so the power-parameter grid
search and the cardinality-based threshold both reuse a single training
pass.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import RegularizedGram, pairwise_distances, solve_regularized_ls
from . import models as _models

POWER_GRID_EXPONENTS = np.round(np.arange(0.0, 8.01, 0.1), 1)  # 81 values


class LeverageError(ValueError):
    """A leverage value is too close to 1 for the LOO formula."""


@dataclass(frozen=True)
class TunedMlMlm:
    """A distance model with tuned power parameter and global threshold."""

    model: "_models.DistanceModel"
    power: float
    threshold: float
    lrl_curve: tuple[tuple[float, float], ...]


def loo_deltas(Dx, Dy, alpha: float) -> np.ndarray:
    """Out-of-sample distance predictions for every training instance.

    Row i is the distance profile that instance i would receive from a
    model trained without it, obtained from the leverage values of the
    ridge fit instead of retraining N times.
    """
    Dx = np.asarray(Dx, dtype=np.float64)
    Dy = np.asarray(Dy, dtype=np.float64)
    B = solve_regularized_ls(Dx, Dy, alpha)
    gram = RegularizedGram(Dx, alpha)
    h = np.einsum("ij,ji->i", Dx, gram.solve(Dx.T))
    bad = np.nonzero(h >= 1.0 - 1e-12)[0]
    if bad.size:
        raise LeverageError(
            f"leverage >= 1 for instance(s) {bad.tolist()}; "
            "increase alpha to keep the LOO formula well-defined"
        )
    Dy_hat = Dx @ B
    return (Dy_hat - h[:, None] * Dy) / (1.0 - h)[:, None]


def _usable_mask(Y: np.ndarray) -> np.ndarray:
    pos = Y.sum(axis=1)
    return (pos > 0) & (pos < Y.shape[1])


def lrl(loo, Y, P: float) -> float:
    """Leave-one-out ranking loss at power P.

    For each instance the IDW scores built from its out-of-sample distance
    profile are checked against its ground-truth bipartition; the value is
    the mean fraction of (relevant, irrelevant) pairs ranked strictly
    wrongly. Instances with all-relevant or all-irrelevant rows are
    skipped (the pair count is zero there).
    """
    Y = np.asarray(Y, dtype=np.float64)
    usable = _usable_mask(Y)
    if not usable.any():
        raise ValueError("no instance has both relevant and irrelevant labels")
    scores = _models.idw_scores_batch(np.asarray(loo), Y, P)
    return _ranking_loss_rows(scores[usable], Y[usable])


def _ranking_loss_rows(scores: np.ndarray, Y: np.ndarray) -> float:
    # violation: relevant label scored strictly below an irrelevant one;
    # ties are not counted
    total = 0.0
    for z, g in zip(scores, Y):
        rel = z[g == 1.0]
        irr = z[g == 0.0]
        viol = np.count_nonzero(rel[:, None] < irr[None, :])
        total += viol / (rel.size * irr.size)
    return total / scores.shape[0]


def search_power(loo, Y) -> tuple[float, tuple[tuple[float, float], ...]]:
    """Grid search P in {2^s : s = 0.0, 0.1, ..., 8.0} minimizing the LOO ranking loss.

    Returns the winning P (ties go to the smallest grid point) and the
    full (P, LRL) curve.
    """
    loo = np.asarray(loo, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    curve = []
    best_p = None
    best_val = np.inf
    for s in POWER_GRID_EXPONENTS:
        P = float(2.0**s)
        val = lrl(loo, Y, P)
        curve.append((P, val))
        if val < best_val:
            best_val = val
            best_p = P
    return best_p, tuple(curve)


def cardinality_threshold(loo_scores, Y) -> float:
    """Global threshold matching the thresholded score cardinality to the labels'.

    Candidates are every observed score value plus {0, 1}; the candidate
    minimizing |Card(thresholded) - Card(Y)| wins, ties going to the
    larger threshold (fewer predicted labels).
    """
    S = np.asarray(loo_scores, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    n = S.shape[0]
    target = Y.sum() / Y.shape[0]
    flat = np.sort(S.ravel())
    candidates = np.unique(np.concatenate([flat, [0.0, 1.0]]))
    # labels predicted at threshold t: count of scores strictly above t
    above = flat.size - np.searchsorted(flat, candidates, side="right")
    card = above / n
    gap = np.abs(card - target)
    best = gap.min()
    return float(candidates[np.nonzero(gap == best)[0].max()])


def local_rcut(scores, k_cut: int) -> np.ndarray:
    """Keep the k_cut highest-scored labels; score ties go to smaller indices."""
    scores = np.asarray(scores, dtype=np.float64)
    L = scores.shape[0]
    if not 0 <= k_cut <= L:
        raise ValueError(f"k_cut must be in [0, {L}]")
    out = np.zeros(L, dtype=np.int64)
    if k_cut:
        order = np.argsort(-scores, kind="stable")
        out[order[:k_cut]] = 1
    return out


def tune_ml_mlm(
    X, Y, alpha_mode="auto", power_mode="tuned", threshold_mode="cardinality",
    label_names=(),
) -> TunedMlMlm:
    """Train the distance model and pick power and threshold in one LOO pass.

    power_mode is "tuned" or a fixed positive float; threshold_mode is
    "cardinality" or a fixed float. The leave-one-out distances are
    computed only when some hyper-parameter actually needs them.
    """
    model = _models.train(X, Y, alpha_mode=alpha_mode, label_names=label_names)
    X = np.asarray(X, dtype=np.float64)
    need_loo = power_mode == "tuned" or threshold_mode == "cardinality"
    loo = None
    if need_loo:
        Dx = pairwise_distances(X, model.references)
        Dy = pairwise_distances(model.train_labels, model.train_labels)
        loo = loo_deltas(Dx, Dy, model.alpha)
    if power_mode == "tuned":
        power, curve = search_power(loo, model.train_labels)
    else:
        power = float(power_mode)
        if power <= 0:
            raise ValueError("fixed power must be positive")
        curve = ()
    if threshold_mode == "cardinality":
        loo_scores = _models.idw_scores_batch(loo, model.train_labels, power)
        threshold = cardinality_threshold(loo_scores, model.train_labels)
    else:
        threshold = float(threshold_mode)
    return TunedMlMlm(model=model, power=power, threshold=threshold, lrl_curve=curve)


def lrl_curve_csv(curve, path) -> None:
    """Write the (P, LRL) curve with its base-2 exponents as CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("s,P,LRL\n")
        for P, val in curve:
            fh.write(f"{np.log2(P):.1f},{P!r},{val!r}\n")
