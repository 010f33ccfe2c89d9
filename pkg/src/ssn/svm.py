"""Gaussian-kernel soft-margin SVM trained by simplified SMO.

Self-contained two-class classifier: RBF kernel exp(-gamma*||x-y||^2),
dual coordinate ascent over randomly paired multipliers under a seeded
generator, so training is deterministic and verifiable against brute-force
dual maximization on small instances. Labels are +1/-1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NumericalError

__all__ = [
    "SvmModel",
    "rbf_kernel",
    "rbf_gram",
    "dual_objective",
    "train_svm",
    "predict",
    "save_model",
    "load_model",
]


@dataclass(frozen=True)
class SvmModel:
    """Trained classifier: support vectors with signed dual coefficients.

    alphas holds alpha_i * y_i, so the decision function is
    sum_i alphas[i] * k(sv_i, x) + bias.
    """

    support_vectors: np.ndarray
    alphas: np.ndarray
    bias: float
    gamma: float
    C: float


def rbf_kernel(x, y, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2) for a single vector pair."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape:
        raise ValueError(f"vector shapes differ: {xa.shape} vs {ya.shape}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    d = xa - ya
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_gram(X, Y, gamma: float) -> np.ndarray:
    """Kernel matrix K[i, j] = exp(-gamma * ||X_i - Y_j||^2)."""
    Xa = np.asarray(X, dtype=np.float64)
    Ya = np.asarray(Y, dtype=np.float64)
    if Xa.shape[1] != Ya.shape[1]:
        raise ValueError(
            f"feature dimensions differ: {Xa.shape[1]} vs {Ya.shape[1]}"
        )
    sq = (
        (Xa**2).sum(axis=1)[:, None]
        + (Ya**2).sum(axis=1)[None, :]
        - 2.0 * (Xa @ Ya.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def dual_objective(alpha, y, K) -> float:
    """SVM dual objective: sum(alpha) - 0.5 * alpha' (yy' * K) alpha."""
    a = np.asarray(alpha, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    v = a * ya
    return float(a.sum() - 0.5 * v @ np.asarray(K) @ v)


def train_svm(
    features,
    labels,
    C: float = 10.0,
    gamma: Optional[float] = None,
    tol: float = 1e-3,
    max_passes: int = 20,
    seed: int = 0,
    max_sweeps: int = 20000,
) -> SvmModel:
    """Train by simplified SMO: sweep samples, fix KKT violators against a
    randomly chosen partner, terminate after max_passes sweeps without change.

    gamma defaults to 1/feature_dim. Deterministic for a fixed seed. The
    returned multipliers satisfy the box constraints exactly and the dual
    equality constraint to rounding.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"bad training shapes: X {X.shape}, y {y.shape}")
    if not np.all(np.isfinite(X)):
        raise NumericalError("training features contain non-finite values")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    if np.unique(y).size < 2:
        raise ValueError("training set must contain both classes")
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    n, d = X.shape
    if gamma is None:
        gamma = 1.0 / d
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")

    K = rbf_gram(X, X, gamma)
    alpha = np.zeros(n)
    b = 0.0
    # Error cache E[i] = decision(x_i) - y_i, kept consistent incrementally.
    E = -y.copy()
    rng = np.random.default_rng(seed)

    passes = 0
    sweeps = 0
    while passes < max_passes and sweeps < max_sweeps:
        changed = 0
        for i in range(n):
            Ei = E[i]
            r = y[i] * Ei
            if not ((r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0)):
                continue
            j = int(rng.integers(n - 1))
            if j >= i:
                j += 1
            Ej = E[j]
            ai_old, aj_old = alpha[i], alpha[j]
            if y[i] != y[j]:
                L = max(0.0, aj_old - ai_old)
                H = min(C, C + aj_old - ai_old)
            else:
                L = max(0.0, ai_old + aj_old - C)
                H = min(C, ai_old + aj_old)
            if L >= H:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            aj = aj_old - y[j] * (Ei - Ej) / eta
            aj = min(max(aj, L), H)
            if abs(aj - aj_old) < 1e-5:
                continue
            ai = ai_old + y[i] * y[j] * (aj_old - aj)
            ai = min(max(ai, 0.0), C)
            di = y[i] * (ai - ai_old)
            dj = y[j] * (aj - aj_old)
            b1 = b - Ei - di * K[i, i] - dj * K[i, j]
            b2 = b - Ej - di * K[i, j] - dj * K[j, j]
            if 0.0 < ai < C:
                b_new = b1
            elif 0.0 < aj < C:
                b_new = b2
            else:
                b_new = 0.5 * (b1 + b2)
            E += di * K[:, i] + dj * K[:, j] + (b_new - b)
            alpha[i], alpha[j] = ai, aj
            b = b_new
            changed += 1
        sweeps += 1
        passes = passes + 1 if changed == 0 else 0

    sv = alpha > 0.0
    return SvmModel(
        support_vectors=X[sv].copy(),
        alphas=(alpha * y)[sv],
        bias=float(b),
        gamma=float(gamma),
        C=float(C),
    )


def predict(
    model: SvmModel, features, batch_size: int = 4096
) -> Tuple[np.ndarray, np.ndarray]:
    """Classify rows of a feature matrix.

    Returns (labels, decisions) with labels in {+1, -1} and sign(0) = +1.
    Evaluation is batched; results do not depend on the batch size.
    """
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if model.support_vectors.size and X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError(
            f"feature dimension {X.shape[1]} does not match support vectors "
            f"{model.support_vectors.shape[1]}"
        )
    decisions = np.empty(X.shape[0])
    if model.support_vectors.shape[0] == 0:
        decisions[:] = model.bias
    else:
        for start in range(0, X.shape[0], batch_size):
            chunk = X[start : start + batch_size]
            Kc = rbf_gram(chunk, model.support_vectors, model.gamma)
            decisions[start : start + batch_size] = Kc @ model.alphas + model.bias
    labels = np.where(decisions >= 0.0, 1.0, -1.0)
    return labels, decisions


def save_model(path, model: SvmModel, channel_labels=None) -> None:
    """Serialize a model (with optional feature channel labels) bit-exactly."""
    labels_json = json.dumps(
        [[tag, [list(ch) for ch in path]] for tag, path in (channel_labels or ())]
    )
    with open(path, "wb") as fh:
        np.savez(
            fh,
            support_vectors=model.support_vectors,
            alphas=model.alphas,
            bias=np.float64(model.bias),
            gamma=np.float64(model.gamma),
            C=np.float64(model.C),
            channel_labels=np.str_(labels_json),
        )


def load_model(path):
    """Inverse of save_model; returns (model, channel_labels)."""
    with np.load(path, allow_pickle=False) as data:
        model = SvmModel(
            support_vectors=data["support_vectors"],
            alphas=data["alphas"],
            bias=float(data["bias"]),
            gamma=float(data["gamma"]),
            C=float(data["C"]),
        )
        raw = json.loads(str(data["channel_labels"]))
    labels = tuple(
        (tag, tuple(tuple(int(v) for v in ch) for ch in path)) for tag, path in raw
    )
    return model, labels
