"""Linear soft-margin SVM trained by sequential minimal optimization.

One binary problem per class (one-vs-rest); each solves

    minimize  0.5 * ||w||^2 + c * sum_i hinge(y_i, w . x_i + b)

through its dual with maximal-violating-pair updates, so the bias stays
unregularized and the solver is fully deterministic: identical inputs give
an identical model. Inputs are assumed standardized by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, DataError

_BOX_EPS = 1e-12
_KKT_EPS = 1e-9


@dataclass(frozen=True)
class SVMConfig:
    c: float = 1.0
    max_epochs: int = 1000
    tolerance: float = 1e-6  # stop when per-epoch objective improvement drops below this
    seed: int = 0  # kept for interface symmetry; the solver itself is deterministic

    def validate(self) -> None:
        if self.c <= 0.0:
            raise ConfigError(f"c must be > 0, got {self.c}")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if self.tolerance <= 0.0:
            raise ConfigError("tolerance must be > 0")


@dataclass
class SVMModel:
    weights: np.ndarray  # (k, p)
    biases: np.ndarray  # (k,)
    class_names: list[str]
    objective_histories: list[list[float]]  # per class, best-so-far primal per epoch

    @property
    def p(self) -> int:
        return self.weights.shape[1]

    def to_text(self) -> str:
        lines = ["svm"]
        for name, w, b in zip(self.class_names, self.weights, self.biases):
            lines.append(f"{name} b={float(b)!r} w=" + " ".join(repr(float(v)) for v in w))
        return "\n".join(lines)


def _primal_objective(x, y_pm, w, b, c) -> float:
    margins = y_pm * (x @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins).sum()
    return 0.5 * float(w @ w) + c * float(hinge)


def _estimate_bias(y_pm, f, alpha, c) -> float:
    """KKT bias: mean residual over free support vectors, else bound midpoint."""
    r = y_pm - f
    free = (alpha > _BOX_EPS * c) & (alpha < c * (1.0 - _BOX_EPS))
    if free.any():
        return float(r[free].mean())
    at_zero = alpha <= _BOX_EPS * c
    at_c = ~at_zero
    lower = r[(at_zero & (y_pm > 0)) | (at_c & (y_pm < 0))]
    upper = r[(at_zero & (y_pm < 0)) | (at_c & (y_pm > 0))]
    if len(lower) and len(upper):
        return float((lower.max() + upper.min()) / 2.0)
    if len(lower):
        return float(lower.max())
    return float(upper.min())


def _solve_binary(x: np.ndarray, y_pm: np.ndarray, cfg: SVMConfig):
    """Maximal-violating-pair SMO on the dual of the hinge-loss problem."""
    n, p = x.shape
    c = cfg.c
    alpha = np.zeros(n)
    w = np.zeros(p)
    f = np.zeros(n)  # cached w . x_i
    self_dot = np.einsum("ij,ij->i", x, x)

    best_obj = _primal_objective(x, y_pm, w, 0.0, c)
    best_w, best_b = w.copy(), 0.0
    history: list[float] = []
    converged = False

    for _ in range(cfg.max_epochs):
        for _ in range(n):
            grad = y_pm * f - 1.0  # gradient of the dual minimization form
            neg_yg = -y_pm * grad
            up = ((y_pm > 0) & (alpha < c - _BOX_EPS)) | ((y_pm < 0) & (alpha > _BOX_EPS))
            low = ((y_pm < 0) & (alpha < c - _BOX_EPS)) | ((y_pm > 0) & (alpha > _BOX_EPS))
            if not up.any() or not low.any():
                converged = True
                break
            i = int(np.argmax(np.where(up, neg_yg, -np.inf)))
            j = int(np.argmin(np.where(low, neg_yg, np.inf)))
            gap = neg_yg[i] - neg_yg[j]
            if gap <= _KKT_EPS:
                converged = True
                break

            quad = max(self_dot[i] + self_dot[j] - 2.0 * float(x[i] @ x[j]), 1e-12)
            delta = gap / quad
            # Feasible step range along (nu_i += delta, nu_j -= delta).
            delta_max_i = (c - alpha[i]) if y_pm[i] > 0 else alpha[i]
            delta_max_j = alpha[j] if y_pm[j] > 0 else (c - alpha[j])
            delta = min(delta, delta_max_i, delta_max_j)
            if delta <= 0.0:
                converged = True
                break

            alpha[i] += y_pm[i] * delta
            alpha[j] -= y_pm[j] * delta
            step = delta * (x[i] - x[j])
            w += step
            f += x @ step

        b = _estimate_bias(y_pm, f, alpha, c)
        obj = _primal_objective(x, y_pm, w, b, c)
        if obj < best_obj:
            best_obj, best_w, best_b = obj, w.copy(), b
        improvement = history[-1] - best_obj if history else np.inf
        history.append(best_obj)
        if converged or improvement < cfg.tolerance:
            break

    return best_w, best_b, history


def train_svm(d: Dataset, cfg: SVMConfig) -> SVMModel:
    """One-vs-rest training over every schema class.

    Classes absent from the training rows get the constant separator
    (w=0, b=-1): they never win the argmax against a present class.
    """
    cfg.validate()
    x = np.asarray(d.features, dtype=np.float64)
    if not np.isfinite(x).all():
        raise DataError("feature matrix contains non-finite entries")
    present = np.unique(d.labels)
    if len(present) < 2:
        raise DataError("training data contains a single class; nothing to separate")

    k, p = len(d.class_names), d.p
    weights = np.zeros((k, p))
    biases = np.zeros(k)
    histories: list[list[float]] = []
    present_set = set(int(v) for v in present)
    for cls in range(k):
        if cls not in present_set:
            biases[cls] = -1.0
            histories.append([])
            continue
        y_pm = np.where(d.labels == cls, 1.0, -1.0)
        w, b, history = _solve_binary(x, y_pm, cfg)
        weights[cls] = w
        biases[cls] = b
        histories.append(history)
    return SVMModel(weights=weights, biases=biases, class_names=list(d.class_names),
                    objective_histories=histories)


def decision_function(model: SVMModel, row: np.ndarray) -> np.ndarray:
    """Per-class margins W_c . x + b_c for a single row."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] != model.p:
        raise DataError(f"row has shape {row.shape}, model expects ({model.p},)")
    return model.weights @ row + model.biases


def margins(model: SVMModel, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != model.p:
        raise DataError(f"matrix has {m.shape[1] if m.ndim == 2 else '?'} columns, "
                        f"model expects {model.p}")
    return m @ model.weights.T + model.biases


def predict(model: SVMModel, m: np.ndarray) -> np.ndarray:
    """Argmax of per-class margins; ties resolve to the lowest class index."""
    return np.argmax(margins(model, m), axis=1)
