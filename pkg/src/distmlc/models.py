"""Distance-regression multi-label models.

The shared training step fits a linear map from input-space distance
profiles to label-space distance profiles. Four predictors consume the
predicted distances: IDW-weighted scoring (ml-mlm), nearest reference
lookup (nn-mlm), an anchor-linearized multilateration solve (lls-mlm),
and per-label closed-form cubic solves (br-mlm). A brute-force
enumerator over {0,1}^L is kept as a test oracle.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import RegularizedGram, pairwise_distances, solve_regularized_ls

SQRT2 = float(np.sqrt(2.0))

UNCERTAINTY_LOW = "low"
UNCERTAINTY_MEDIUM = "medium"
UNCERTAINTY_HIGH = "high"


@dataclass(frozen=True)
class DistanceModel:
    """Trained distance-regression model.

    references: K x M unique training inputs.
    coefficients: K x N map from input-distance profiles to label-space
        distance estimates against all N training label vectors.
    train_labels: N x L binary label matrix.
    """

    references: np.ndarray
    coefficients: np.ndarray
    alpha: float
    train_labels: np.ndarray
    label_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.coefficients.shape[0] != self.references.shape[0]:
            raise ValueError("coefficient rows must equal reference count")
        if self.coefficients.shape[1] != self.train_labels.shape[0]:
            raise ValueError("coefficient cols must equal training instance count")

    @property
    def n_labels(self) -> int:
        return self.train_labels.shape[1]

    @property
    def n_features(self) -> int:
        return self.references.shape[1]


@dataclass(frozen=True)
class BrMlmModel:
    """Per-label scalar distance models sharing one input-space factorization.

    base: the joint distance model (used for nearest-reference cardinality).
    label_coefficients: L x K x N stack; slice l maps input distances to
        per-label output distances |y_l - t_l|.
    """

    base: DistanceModel
    label_coefficients: np.ndarray


@dataclass(frozen=True)
class Prediction:
    scores: np.ndarray
    labels: np.ndarray
    min_distance: float
    uncertainty: str


def _check_binary(Y: np.ndarray, name: str = "Y") -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    if not np.all((Y == 0.0) | (Y == 1.0)):
        raise ValueError(f"{name} must be binary (entries in {{0,1}})")
    return Y


def auto_alpha(references) -> float:
    """Lower 1/1000-quantile of the positive pairwise reference distances.

    Self-distances are excluded; the quantile is taken over the unordered
    distinct pairs by sorting and indexing at floor(count/1000).
    """
    references = np.asarray(references, dtype=np.float64)
    if references.shape[0] < 2:
        raise ValueError("need at least 2 reference points")
    d = pairwise_distances(references, references)
    iu = np.triu_indices(d.shape[0], k=1)
    pair_dists = d[iu]
    pair_dists = pair_dists[pair_dists > 0.0]
    if pair_dists.size == 0:
        raise ValueError("all pairwise reference distances are zero")
    pair_dists.sort()
    return float(pair_dists[pair_dists.size // 1000])


def unique_rows(X: np.ndarray) -> np.ndarray:
    """Unique rows of X (exact float equality), keeping first-seen order."""
    _, idx = np.unique(X, axis=0, return_index=True)
    return X[np.sort(idx)]


def train(X, Y, alpha_mode="auto", label_names=()) -> DistanceModel:
    """Fit the distance-regression map on inputs X (N x M), labels Y (N x L).

    alpha_mode is "auto" (pairwise-distance quantile heuristic) or a
    fixed non-negative float.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = _check_binary(Y)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y must be 2-d with matching row counts")
    references = unique_rows(X)
    if references.shape[0] < 2:
        raise ValueError("need at least 2 unique training inputs")
    if alpha_mode == "auto":
        alpha = auto_alpha(references)
    else:
        alpha = float(alpha_mode)
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
    Dx = pairwise_distances(X, references)
    Dy = pairwise_distances(Y, Y)
    B = solve_regularized_ls(Dx, Dy, alpha)
    # C-contiguous so predictions stay bit-identical after a save/load cycle
    return DistanceModel(
        references=references,
        coefficients=np.ascontiguousarray(B),
        alpha=alpha,
        train_labels=Y,
        label_names=tuple(label_names),
    )


def train_br(X, Y, alpha_mode="auto", label_names=()) -> BrMlmModel:
    """Fit the binary-relevance variant: one scalar output-distance map per label.

    The Gram factorization of the input distances is shared across labels;
    only the output distance matrix differs per label.
    """
    base = train(X, Y, alpha_mode=alpha_mode, label_names=label_names)
    X = np.asarray(X, dtype=np.float64)
    Dx = pairwise_distances(X, base.references)
    gram = RegularizedGram(Dx, base.alpha)
    projector = gram.solve(Dx.T)  # K x N, shared across labels
    Y = base.train_labels
    L = Y.shape[1]
    stacks = np.empty((L, base.references.shape[0], Y.shape[0]))
    for l in range(L):
        Dy_l = np.abs(Y[:, l][:, None] - Y[:, l][None, :])
        stacks[l] = projector @ Dy_l
    return BrMlmModel(base=base, label_coefficients=stacks)


def predict_deltas(model: DistanceModel, x) -> np.ndarray:
    """Raw (unclamped) predicted label-space distances for one query."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != model.n_features:
        raise ValueError(
            f"query has {x.shape[0]} features, model expects {model.n_features}"
        )
    d = pairwise_distances(x[None, :], model.references)
    return (d @ model.coefficients)[0]


def predict_deltas_batch(model: DistanceModel, X) -> np.ndarray:
    """Raw predicted distances for a batch of queries, Nq x N."""
    X = np.asarray(X, dtype=np.float64)
    return pairwise_distances(X, model.references) @ model.coefficients


def clamp_deltas(deltas: np.ndarray) -> np.ndarray:
    """Negative predicted distances are treated as exact matches (0)."""
    return np.maximum(np.asarray(deltas, dtype=np.float64), 0.0)


def idw_scores(deltas, train_labels, P: float) -> np.ndarray:
    """Inverse-distance-weighted convex combination of the training labels.

    Weights are delta^-P for positive deltas and 1 for zero deltas
    (negatives are clamped first). Computed in log space so that large P
    does not overflow; only weight ratios matter for the normalized score.
    """
    if P <= 0:
        raise ValueError("power parameter P must be positive")
    deltas = clamp_deltas(deltas)
    train_labels = np.asarray(train_labels, dtype=np.float64)
    logw = np.where(deltas > 0.0, -P * np.log(np.where(deltas > 0.0, deltas, 1.0)), 0.0)
    w = np.exp(logw - logw.max())
    return (w @ train_labels) / w.sum()


def idw_scores_batch(delta_matrix, train_labels, P: float) -> np.ndarray:
    """Row-wise idw_scores for a matrix of delta vectors."""
    if P <= 0:
        raise ValueError("power parameter P must be positive")
    D = clamp_deltas(delta_matrix)
    train_labels = np.asarray(train_labels, dtype=np.float64)
    logw = np.where(D > 0.0, -P * np.log(np.where(D > 0.0, D, 1.0)), 0.0)
    logw -= logw.max(axis=1, keepdims=True)
    W = np.exp(logw)
    return (W @ train_labels) / W.sum(axis=1, keepdims=True)


def categorize_uncertainty(min_distance: float) -> str:
    """Bucket a predicted nearest distance: <1 low, [1, sqrt(2)] medium, above high."""
    if min_distance < 0:
        raise ValueError("min_distance must be non-negative")
    if min_distance < 1.0:
        return UNCERTAINTY_LOW
    if min_distance <= SQRT2:
        return UNCERTAINTY_MEDIUM
    return UNCERTAINTY_HIGH


def _finish(scores: np.ndarray, labels: np.ndarray, deltas: np.ndarray) -> Prediction:
    dmin = float(clamp_deltas(deltas).min())
    return Prediction(
        scores=scores,
        labels=labels.astype(np.int64),
        min_distance=dmin,
        uncertainty=categorize_uncertainty(dmin),
    )


def nn_mlm_predict(model: DistanceModel, x) -> Prediction:
    """Label vector of the reference with the smallest predicted distance.

    Ties at the minimum go to the smallest index.
    """
    deltas = predict_deltas(model, x)
    k = int(np.argmin(clamp_deltas(deltas)))
    row = model.train_labels[k]
    return _finish(row.copy(), row, deltas)


def ml_mlm_predict(tuned, x) -> Prediction:
    """IDW-scored prediction with the tuned power and global threshold."""
    deltas = predict_deltas(tuned.model, x)
    scores = idw_scores(deltas, tuned.model.train_labels, tuned.power)
    labels = (scores > tuned.threshold).astype(np.int64)
    return _finish(scores, labels, deltas)


def ml_mlm_predict_rcut(tuned, x) -> Prediction:
    """IDW-scored prediction thresholded by the nearest-reference cardinality."""
    from .tuning import local_rcut

    deltas = predict_deltas(tuned.model, x)
    scores = idw_scores(deltas, tuned.model.train_labels, tuned.power)
    k_cut = int(
        tuned.model.train_labels[int(np.argmin(clamp_deltas(deltas)))].sum()
    )
    labels = local_rcut(scores, k_cut)
    return _finish(scores, labels, deltas)


def multilateration_objective(y, targets, deltas) -> float:
    """J(y) = sum_k (||y - t_k||^2 - delta_k^2)^2."""
    y = np.asarray(y, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    sq = ((targets - y) ** 2).sum(axis=1)
    return float(((sq - deltas**2) ** 2).sum())


def brute_force_mlc(targets, deltas, L: int) -> np.ndarray:
    """Exhaustive minimizer of the multilateration objective over {0,1}^L.

    Ties go to the lexicographically smallest bit vector. Enumeration is
    capped at L <= 20.
    """
    if L > 20:
        raise ValueError("brute-force enumeration is limited to L <= 20")
    targets = np.asarray(targets, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    best = None
    best_val = np.inf
    for bits in itertools.product((0.0, 1.0), repeat=L):
        y = np.array(bits)
        val = multilateration_objective(y, targets, deltas)
        if val < best_val:
            best_val = val
            best = y
    return best.astype(np.int64)


def lls_scores(model: DistanceModel, deltas) -> np.ndarray:
    """Real-valued label scores from the anchor-linearized multilateration system.

    The anchor is the reference with the smallest (clamped) predicted
    distance; each remaining reference contributes one linear equation in
    y, solved in least squares (minimum-norm for rank-deficient systems).
    """
    deltas = clamp_deltas(deltas)
    T = model.train_labels
    b = int(np.argmin(deltas))
    mask = np.ones(T.shape[0], dtype=bool)
    mask[b] = False
    Tk = T[mask]
    dk = deltas[mask]
    A = 2.0 * (T[b][None, :] - Tk)
    tnorm = (T**2).sum(axis=1)
    rhs = (dk**2 - deltas[b] ** 2) - (tnorm[mask] - tnorm[b])
    y, _, _, _ = np.linalg.lstsq(A, rhs, rcond=None)
    return y


def lls_mlm_predict(model: DistanceModel, x) -> Prediction:
    """Multilateration solve with local rank-cut thresholding.

    The cut size is the cardinality of the nearest-reference prediction
    from the same distance model.
    """
    from .tuning import local_rcut

    deltas = predict_deltas(model, x)
    scores = lls_scores(model, deltas)
    k_cut = int(model.train_labels[int(np.argmin(clamp_deltas(deltas)))].sum())
    labels = local_rcut(scores, k_cut)
    return _finish(scores, labels, deltas)


def scalar_multilateration_scores(target_cols: np.ndarray, delta_cols: np.ndarray) -> np.ndarray:
    """Closed-form per-label minimizers of J_l(y) = sum_k ((y - t_kl)^2 - d_kl^2)^2.

    Stationarity gives a cubic in y; the real root with the least
    objective value wins (smallest root on ties). target_cols and
    delta_cols are K x L.
    """
    T = np.asarray(target_cols, dtype=np.float64)
    D = clamp_deltas(delta_cols)
    K, L = T.shape
    out = np.empty(L)
    for l in range(L):
        t = T[:, l]
        d2 = D[:, l] ** 2
        # dJ/dy = 4 * sum_k (y - t_k) * ((y - t_k)^2 - d_k^2)
        c3 = float(K)
        c2 = -3.0 * t.sum()
        c1 = 3.0 * (t**2).sum() - d2.sum()
        c0 = -((t**3).sum()) + (d2 * t).sum()
        roots = np.roots([c3, c2, c1, c0])
        real = np.sort(roots[np.abs(roots.imag) < 1e-8].real)
        if real.size == 0:
            # a real cubic always has a real root
            raise AssertionError("cubic with no real root")
        sq = (real[:, None] - t[None, :]) ** 2
        vals = ((sq - d2[None, :]) ** 2).sum(axis=1)
        # symmetric instances give analytically equal minima that differ
        # only by root round-off; count those as ties
        low = vals.min()
        out[l] = float(real[vals <= low + 1e-9 * (1.0 + low)].min())
    return out


def br_mlm_predict(model: BrMlmModel, x) -> Prediction:
    """Per-label cubic multilateration scores with local rank-cut thresholding."""
    from .tuning import local_rcut

    x = np.asarray(x, dtype=np.float64).ravel()
    base = model.base
    d = pairwise_distances(x[None, :], base.references)[0]
    # per-label predicted output distances, K(=N) x L
    delta_cols = np.einsum("k,lkn->nl", d, model.label_coefficients)
    scores = scalar_multilateration_scores(base.train_labels, delta_cols)
    joint_deltas = d @ base.coefficients
    k_cut = int(base.train_labels[int(np.argmin(clamp_deltas(joint_deltas)))].sum())
    labels = local_rcut(scores, k_cut)
    return _finish(scores, labels, joint_deltas)
