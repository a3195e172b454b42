"""Binary soft-margin linear SVM trained with simplified SMO, plus Platt
sigmoid calibration of decision values to probabilities.

The linear kernel lets the weight vector be maintained incrementally, so a
decision value costs one dot product instead of a pass over support vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .features import FeatureVector


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class BinarySvmModel:
    weights: np.ndarray
    bias: float
    alphas: dict[int, float]
    platt_a: float | None = None
    platt_b: float | None = None

    @property
    def calibrated(self) -> bool:
        return self.platt_a is not None


def to_dense(samples: list[FeatureVector]) -> np.ndarray:
    if not samples:
        return np.zeros((0, 0))
    dim = max(s.dimension for s in samples)
    X = np.zeros((len(samples), dim))
    for row, s in enumerate(samples):
        for fid, val in s.values.items():
            X[row, fid] = val
    return X


def _as_matrix(samples) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        return np.asarray(samples, dtype=float)
    return to_dense(list(samples))


def train_smo(samples, labels, config: TrainConfig = TrainConfig()) -> BinarySvmModel:
    """Solve the SVM dual with simplified SMO (random second index, seeded).

    Terminates when a full pass finds no KKT violator at config.tol for
    config.max_passes consecutive passes.
    """
    X = _as_matrix(samples)
    y = np.asarray(labels, dtype=float)
    if X.shape[0] != y.shape[0]:
        raise ValueError("samples and labels differ in length")
    if not (set(np.unique(y)) <= {-1.0, 1.0}):
        raise ValueError("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise ValueError("training requires both classes")

    m, _ = X.shape
    C, tol = config.C, config.tol
    rng = random.Random(config.seed)
    alpha = np.zeros(m)
    w = np.zeros(X.shape[1])
    b = 0.0
    # Squared norms and the full Gram diagonal are reused every update.
    sq = np.einsum("ij,ij->i", X, X)

    passes = 0
    while passes < config.max_passes:
        num_changed = 0
        # One matmul finds the violators as of the start of the pass; each
        # candidate is re-checked against the current weights before updating,
        # and termination still requires a clean full scan.
        residual = y * (X @ w + b - y)
        candidates = np.nonzero(((residual < -tol) & (alpha < C))
                                | ((residual > tol) & (alpha > 0)))[0]
        for i in candidates:
            e_i = X[i] @ w + b - y[i]
            r_i = y[i] * e_i
            if not ((r_i < -tol and alpha[i] < C) or (r_i > tol and alpha[i] > 0)):
                continue
            j = rng.randrange(m - 1)
            if j >= i:
                j += 1
            e_j = X[j] @ w + b - y[j]
            a_i_old, a_j_old = alpha[i], alpha[j]
            if y[i] != y[j]:
                low = max(0.0, a_j_old - a_i_old)
                high = min(C, C + a_j_old - a_i_old)
            else:
                low = max(0.0, a_i_old + a_j_old - C)
                high = min(C, a_i_old + a_j_old)
            if high - low < 1e-12:
                continue
            k_ij = X[i] @ X[j]
            eta = 2.0 * k_ij - sq[i] - sq[j]
            if eta >= 0:
                continue
            a_j = a_j_old - y[j] * (e_i - e_j) / eta
            a_j = min(high, max(low, a_j))
            if abs(a_j - a_j_old) < 1e-12:
                continue
            a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)
            alpha[i], alpha[j] = a_i, a_j
            w = w + y[i] * (a_i - a_i_old) * X[i] + y[j] * (a_j - a_j_old) * X[j]
            b1 = b - e_i - y[i] * (a_i - a_i_old) * sq[i] - y[j] * (a_j - a_j_old) * k_ij
            b2 = b - e_j - y[i] * (a_i - a_i_old) * k_ij - y[j] * (a_j - a_j_old) * sq[j]
            if 0 < a_i < C:
                b = b1
            elif 0 < a_j < C:
                b = b2
            else:
                b = (b1 + b2) / 2.0
            num_changed += 1
        passes = passes + 1 if num_changed == 0 else 0

    support = {int(i): float(a) for i, a in enumerate(alpha) if a > 1e-12}
    # Recompute weights from the retained alphas so the stored pair is
    # consistent to machine precision.
    w_final = np.zeros(X.shape[1])
    for i, a in support.items():
        w_final += a * y[i] * X[i]
    # Recompute the bias from the KKT conditions at the final alphas: average
    # over free support vectors, or the midpoint of the feasible interval when
    # every support vector sits at a bound. The incrementally tracked b can
    # lag the final weights in that case.
    g = y - X @ w_final  # per-sample candidate bias y_i - w.x_i
    free = [i for i in range(m) if 1e-8 < alpha[i] < C - 1e-8]
    if free:
        b = float(np.mean(g[free]))
    else:
        lo, hi = -np.inf, np.inf
        for i in range(m):
            at_zero = alpha[i] <= 1e-8
            if (at_zero and y[i] > 0) or (not at_zero and y[i] < 0):
                lo = max(lo, g[i])
            else:
                hi = min(hi, g[i])
        if np.isfinite(lo) and np.isfinite(hi):
            b = float((lo + hi) / 2.0)
    return BinarySvmModel(weights=w_final, bias=float(b), alphas=support)


def dual_objective(X, y, alpha: np.ndarray) -> float:
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    v = alpha * y
    return float(alpha.sum() - 0.5 * v @ (X @ X.T) @ v)


def decision_value(model: BinarySvmModel, x: FeatureVector | np.ndarray) -> float:
    if isinstance(x, FeatureVector):
        if x.dimension > model.weights.shape[0]:
            raise ValueError("feature vector dimension exceeds model dimension")
        return float(sum(model.weights[fid] * val for fid, val in x.values.items())
                     + model.bias)
    return float(np.asarray(x, dtype=float) @ model.weights + model.bias)


def fit_platt(decision_values, labels, max_iter: int = 100,
              grad_tol: float = 1e-8) -> tuple[float, float]:
    """Fit p(f) = 1 / (1 + exp(A f + B)) by regularized maximum likelihood.

    Uses the smoothed targets t+ = (N+ + 1)/(N+ + 2), t- = 1/(N- + 2) and
    Newton steps with backtracking (the numerically stable formulation of
    Lin, Lin and Weng, 2007).
    """
    f = np.asarray(decision_values, dtype=float)
    y = np.asarray(labels)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == -1))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("calibration requires both classes")
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    a = 0.0
    b = float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    sigma = 1e-12  # Hessian ridge

    def nll(a_, b_):
        z = a_ * f + b_
        # log(1+exp(z)) computed stably; nll = sum t*z + log(1+exp(-z))
        return float(np.sum(t * z + np.logaddexp(0.0, -z)))

    value = nll(a, b)
    for _ in range(max_iter):
        z = a * f + b
        p = 1.0 / (1.0 + np.exp(np.clip(z, -500, 500)))
        d1 = t - p  # dNLL/dz
        g_a = float(np.sum(d1 * f))
        g_b = float(np.sum(d1))
        if max(abs(g_a), abs(g_b)) < grad_tol:
            break
        d2 = p * (1.0 - p)
        h_aa = float(np.sum(d2 * f * f)) + sigma
        h_bb = float(np.sum(d2)) + sigma
        h_ab = float(np.sum(d2 * f))
        det = h_aa * h_bb - h_ab * h_ab
        da = -(h_bb * g_a - h_ab * g_b) / det
        db = -(-h_ab * g_a + h_aa * g_b) / det
        step = 1.0
        while step >= 1e-10:
            cand = nll(a + step * da, b + step * db)
            if cand < value + 1e-4 * step * (g_a * da + g_b * db):
                a, b, value = a + step * da, b + step * db, cand
                break
            step /= 2.0
        else:
            break
    return a, b


def calibrate(model: BinarySvmModel, X, y) -> BinarySvmModel:
    fs = _as_matrix(X) @ model.weights + model.bias
    model.platt_a, model.platt_b = fit_platt(fs, y)
    return model


def sigmoid_posterior(f: float, a: float, b: float) -> float:
    z = a * f + b
    p = 1.0 / (1.0 + np.exp(np.clip(z, -500, 500)))
    return float(min(max(p, 1e-12), 1.0 - 1e-12))


def posterior(model: BinarySvmModel, x) -> float:
    """Calibrated probability of the +1 class, strictly inside (0, 1)."""
    if not model.calibrated:
        raise ValueError("model is not calibrated")
    return sigmoid_posterior(decision_value(model, x), model.platt_a, model.platt_b)
