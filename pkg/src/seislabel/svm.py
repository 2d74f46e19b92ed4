"""Linear SVMs trained by guarded batch subgradient descent, plus the
one-versus-all multiclass wrapper and its text bundle format."""

import os
from dataclasses import dataclass, field

import numpy as np

DEFAULT_C = 1e4
DEFAULT_MAX_ITER = 100_000
DEFAULT_TOL = 1e-8

BUNDLE_MAGIC = "OVAMODEL"
BUNDLE_VERSION = 1


@dataclass
class LinearModel:
    """One binary decision function w . x + b."""

    weights: np.ndarray
    bias: float
    class_id: int = 0
    # objective trajectory of the training run; monotone non-increasing
    objective_history: list = field(default_factory=list, repr=False)

    def decision(self, features):
        return np.asarray(features, dtype=np.float64) @ self.weights + self.bias


@dataclass
class OvaModel:
    """One linear model per class, sharing a descriptor and feature length."""

    models: list
    descriptor_id: str
    feature_dim: int

    @property
    def n_classes(self):
        return len(self.models)


def _hinge_objective(x, y, w, b, c):
    margins = 1.0 - y * (x @ w + b)
    return 0.5 * float(w @ w) + c * float(np.maximum(margins, 0.0).sum())


def train_binary_svm(features, labels, c=DEFAULT_C, max_iter=DEFAULT_MAX_ITER,
                     tol=DEFAULT_TOL, class_id=0):
    """Minimize 0.5 * ||w||^2 + C * sum(hinge) over (w, b).

    Deterministic batch subgradient descent; each step is backtracked until
    it does not increase the objective, so the recorded objective history is
    monotone non-increasing. Stops when the relative objective change drops
    below ``tol`` or after ``max_iter`` accepted steps.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("features must be (n, dim) with one label per row")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    if not ((y > 0).any() and (y < 0).any()):
        raise ValueError("training set must contain both classes")

    n, dim = x.shape
    # optimize the objective scaled by 1/(C*n) so gradients are O(1); the
    # argmin is unchanged and monotonicity carries over
    scale = 1.0 / (c * n)

    def objective(w, b):
        margins = 1.0 - y * (x @ w + b)
        return scale * (0.5 * float(w @ w)) + float(np.maximum(margins, 0.0).mean())

    w = np.zeros(dim)
    b = 0.0
    obj = objective(w, b)
    history = [obj]
    last_step = 1.0
    streak = 0
    for _ in range(max_iter):
        margins = 1.0 - y * (x @ w + b)
        violated = margins > 0.0
        g_w = scale * w - (y[violated] @ x[violated]) / n
        g_b = -float(y[violated].sum()) / n
        norm = float(np.sqrt(g_w @ g_w + g_b * g_b))
        if norm == 0.0:
            break
        d_w, d_b = g_w / norm, g_b / norm

        # backtrack the step length along the normalized direction, warm
        # started near the last accepted step but never below a floor that
        # could freeze progress
        step = min(max(4.0 * last_step, 1e-6), 1.0)
        accepted = False
        while step >= 1e-13:
            w_try = w - step * d_w
            b_try = b - step * d_b
            new_obj = objective(w_try, b_try)
            if new_obj <= obj:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # no descent step exists along this direction: at a kink optimum
        rel_change = (obj - new_obj) / obj if obj > 0 else 0.0
        w, b, obj = w_try, float(b_try), new_obj
        history.append(obj)
        last_step = step
        # require the relative change to stay below tol on a few consecutive
        # steps so one micro-step cannot end the run early
        streak = streak + 1 if rel_change < tol else 0
        if streak >= 3:
            break

    return LinearModel(weights=w, bias=b, class_id=class_id,
                       objective_history=history)


def train_ova(features, labels, n_classes, c=DEFAULT_C,
              max_iter=DEFAULT_MAX_ITER, descriptor_id="raw"):
    """Train one binary SVM per class against the rest."""
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    models = []
    for k in range(n_classes):
        binary = np.where(y == k, 1.0, -1.0)
        models.append(train_binary_svm(x, binary, c=c, max_iter=max_iter,
                                       class_id=k))
    return OvaModel(models=models, descriptor_id=descriptor_id,
                    feature_dim=x.shape[1])


def predict(model, feature):
    """Class id with the highest decision score; ties go to the lowest id."""
    f = np.asarray(feature, dtype=np.float64)
    if f.shape != (model.feature_dim,):
        raise ValueError(
            f"feature length {f.shape} does not match model dim {model.feature_dim}"
        )
    scores = [m.decision(f) for m in model.models]
    return int(np.argmax(scores))


def save_model(model, path):
    """Write an OVAMODEL v1 text bundle (atomic: temp file then rename).

    Each class line holds the bias followed by the weights, printed with
    full round-trip precision.
    """
    lines = [
        f"{BUNDLE_MAGIC} {BUNDLE_VERSION} {model.n_classes} "
        f"{model.feature_dim} {model.descriptor_id}"
    ]
    for m in model.models:
        values = [repr(float(m.bias))] + [repr(float(v)) for v in m.weights]
        lines.append(" ".join(values))
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_model(path):
    """Read an OVAMODEL v1 text bundle."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[0] != BUNDLE_MAGIC:
            raise ValueError(f"{path}: not an OVAMODEL bundle")
        if int(header[1]) != BUNDLE_VERSION:
            raise ValueError(f"{path}: unsupported bundle version {header[1]}")
        n_classes, dim, descriptor_id = int(header[2]), int(header[3]), header[4]
        models = []
        for k in range(n_classes):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: class {k} line has {len(parts)} values, "
                                 f"expected {dim + 1}")
            models.append(LinearModel(
                weights=np.array([float(v) for v in parts[1:]]),
                bias=float(parts[0]),
                class_id=k,
            ))
    return OvaModel(models=models, descriptor_id=descriptor_id, feature_dim=dim)
