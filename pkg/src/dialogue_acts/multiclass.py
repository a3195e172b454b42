"""Multiclass composition of binary SVMs.

One-vs-one members are combined with Hastie-Tibshirani pairwise coupling of
their Platt posteriors; one-vs-all normalizes per-class posteriors. A raw
binary ensemble (uncalibrated one-vs-rest, argmax of decision values) exists
as the baseline for the structure timing benchmark.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .svm import (BinarySvmModel, TrainConfig, _as_matrix, calibrate,
                  decision_value, posterior, train_smo)


@dataclass
class OvoModel:
    k: int
    class_labels: tuple[str, ...]
    pair_models: dict[tuple[int, int], BinarySvmModel]
    pair_counts: dict[tuple[int, int], int]
    uniform_weights: bool = False


@dataclass
class OvaModel:
    k: int
    class_labels: tuple[str, ...]
    per_class_models: dict[int, BinarySvmModel]


@dataclass
class BinaryEnsembleModel:
    """Per-class one-vs-rest SVMs, uncalibrated; decided by max margin."""

    k: int
    class_labels: tuple[str, ...]
    per_class_models: dict[int, BinarySvmModel]


@dataclass(frozen=True)
class ClassDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("not a probability distribution")

    @property
    def argmax(self) -> int:
        # np.argmax already breaks ties toward the lowest index
        return int(np.argmax(self.probs))


def _check_classes(y: np.ndarray, k: int) -> None:
    present = set(int(c) for c in np.unique(y))
    missing = sorted(set(range(k)) - present)
    if missing:
        raise ValueError(f"classes with no training sample: {missing}")


def train_one_vs_one(samples, labels, k: int, class_labels,
                     config: TrainConfig = TrainConfig(),
                     calibrated: bool = True) -> OvoModel:
    X = _as_matrix(samples)
    y = np.asarray(labels, dtype=int)
    _check_classes(y, k)
    pair_models: dict[tuple[int, int], BinarySvmModel] = {}
    pair_counts: dict[tuple[int, int], int] = {}
    for i in range(k):
        for j in range(i + 1, k):
            mask = (y == i) | (y == j)
            X_ij = X[mask]
            y_ij = np.where(y[mask] == i, 1.0, -1.0)
            model = train_smo(X_ij, y_ij, config)
            if calibrated:
                calibrate(model, X_ij, y_ij)
            pair_models[(i, j)] = model
            pair_counts[(i, j)] = int(mask.sum())
    return OvoModel(k=k, class_labels=tuple(class_labels),
                    pair_models=pair_models, pair_counts=pair_counts)


def train_one_vs_all(samples, labels, k: int, class_labels,
                     config: TrainConfig = TrainConfig(),
                     calibrated: bool = True) -> OvaModel:
    X = _as_matrix(samples)
    y = np.asarray(labels, dtype=int)
    _check_classes(y, k)
    per_class: dict[int, BinarySvmModel] = {}
    for i in range(k):
        y_i = np.where(y == i, 1.0, -1.0)
        model = train_smo(X, y_i, config)
        if calibrated:
            calibrate(model, X, y_i)
        per_class[i] = model
    return OvaModel(k=k, class_labels=tuple(class_labels), per_class_models=per_class)


def train_binary_ensemble(samples, labels, k: int, class_labels,
                          config: TrainConfig = TrainConfig()) -> BinaryEnsembleModel:
    ova = train_one_vs_all(samples, labels, k, class_labels, config, calibrated=False)
    return BinaryEnsembleModel(k=k, class_labels=ova.class_labels,
                               per_class_models=ova.per_class_models)


def coupling_objective(p: np.ndarray, r: dict[tuple[int, int], float],
                       n: dict[tuple[int, int], float]) -> float:
    """Weighted KL divergence between observed r_ij and mu_ij = p_i/(p_i+p_j)."""
    obj = 0.0
    for (i, j), r_ij in r.items():
        mu = p[i] / (p[i] + p[j])
        mu = min(max(mu, 1e-15), 1.0 - 1e-15)
        obj += n[(i, j)] * (r_ij * np.log(r_ij / mu)
                            + (1.0 - r_ij) * np.log((1.0 - r_ij) / (1.0 - mu)))
    return float(obj)


def pairwise_coupling(r: dict[tuple[int, int], float],
                      n: dict[tuple[int, int], float] | None = None,
                      tol: float = 1e-8, max_iter: int = 1000,
                      debug: bool = False) -> ClassDistribution:
    """Recover a class distribution from pairwise probabilities r_ij.

    Iterative scaling: p_i <- p_i * (sum_j n_ij r_ij) / (sum_j n_ij mu_ij)
    with renormalization, until the largest coordinate update is below tol.
    r must hold an entry for every i < j; r_ji is implied as 1 - r_ij.
    """
    pairs = sorted(r)
    k = max(j for _, j in pairs) + 1
    if n is None:
        n = {pair: 1.0 for pair in pairs}
    for (i, j), r_ij in r.items():
        if not 0.0 < r_ij < 1.0:
            raise ValueError(f"r[{i},{j}]={r_ij} outside (0,1)")
        if n[(i, j)] <= 0:
            raise ValueError(f"non-positive coupling weight for pair ({i},{j})")
    if k == 2:
        return ClassDistribution(np.array([r[(0, 1)], 1.0 - r[(0, 1)]]))

    # Plain-float Gauss-Seidel sweeps: k is small, so avoiding per-step numpy
    # dispatch is what makes per-utterance decoding cheap. The update and the
    # objective depend only on ratios of p, so renormalizing once per sweep is
    # equivalent to renormalizing after every coordinate.
    N = [[0.0] * k for _ in range(k)]
    num = [0.0] * k
    for (i, j), r_ij in r.items():
        w = n[(i, j)]
        N[i][j] = N[j][i] = w
        num[i] += w * r_ij
        num[j] += w * (1.0 - r_ij)

    p = [1.0 / k] * k
    prev_obj = coupling_objective(np.array(p), r, n) if debug else None
    for _ in range(max_iter):
        p_old = p[:]
        for i in range(k):
            pi = p[i]
            n_i = N[i]
            den = 0.0
            for j in range(k):
                w = n_i[j]
                if w:
                    den += w * pi / (pi + p[j])
            if den > 0.0:
                p[i] = pi * num[i] / den
        total = sum(p)
        p = [x / total for x in p]
        if debug:
            obj = coupling_objective(np.array(p), r, n)
            assert obj <= prev_obj + 1e-9, "coupling objective increased"
            prev_obj = obj
        if max(abs(a - b) for a, b in zip(p, p_old)) < tol:
            break
    return ClassDistribution(np.array(p))


def _clamp(x: float) -> float:
    return min(max(x, 1e-12), 1.0 - 1e-12)


def predict_distribution(model: OvoModel | OvaModel | BinaryEnsembleModel,
                         x) -> ClassDistribution:
    if isinstance(model, OvoModel):
        r: dict[tuple[int, int], float] = {}
        for pair, member in model.pair_models.items():
            if not member.calibrated:
                raise ValueError(f"pair model {pair} is not calibrated")
            r[pair] = _clamp(posterior(member, x))
        if model.uniform_weights:
            weights = {pair: 1.0 for pair in r}
        else:
            weights = {pair: float(c) for pair, c in model.pair_counts.items()}
        return pairwise_coupling(r, weights)
    if isinstance(model, OvaModel):
        probs = np.empty(model.k)
        for i, member in model.per_class_models.items():
            if not member.calibrated:
                raise ValueError(f"class model {i} is not calibrated")
            probs[i] = _clamp(posterior(member, x))
        return ClassDistribution(probs / probs.sum())
    if isinstance(model, BinaryEnsembleModel):
        margins = np.array([decision_value(model.per_class_models[i], x)
                            for i in range(model.k)])
        # softmax purely to expose margins as a distribution; argmax preserved
        z = np.exp(margins - margins.max())
        return ClassDistribution(z / z.sum())
    raise TypeError(f"unknown model type {type(model)!r}")
