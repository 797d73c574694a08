"""Scoring models, weak-risk gradients and the mini-batch training loop.

Two architectures are supported, both held as one flat parameter vector:

``linear``  ``g(x) = w.x + b``; layout ``[w (d), b]``.
``mlp``     one rectified hidden layer; layout
            ``[W1 (h x d, row-major), b1 (h), w2 (h), b2]``.

Each optimization step takes a fixed number of tuples and a fixed number of
unlabeled points, so every mini-batch risk is itself an unbiased estimate of
the full weak risk.  The correction is applied to that batch risk.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .coefficients import Priors, ReconstructionWeights, SymmetricWeights
from .data import TupleDataset, UnlabeledDataset
from .errors import DimensionMismatch, EmptyInput, NonFiniteRisk
from .losses import LossKind
from .risk import CorrectionSpec, PointWeights, RiskReport, point_weights, weak_risk

__all__ = [
    "Model",
    "TrainConfig",
    "TrainResult",
    "backward",
    "forward",
    "init_model",
    "load_checkpoint",
    "risk_and_gradient",
    "risk_gradient",
    "save_checkpoint",
    "select_learning_rate",
    "train",
]


@dataclass
class Model:
    arch: str
    dim: int
    hidden: int = 0
    params: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.arch not in ("linear", "mlp"):
            raise ValueError(f"unknown architecture {self.arch!r}")
        if self.arch == "mlp" and self.hidden < 1:
            raise ValueError("an mlp needs at least one hidden unit")
        if self.arch == "linear":
            self.hidden = 0
        if self.params is None:
            self.params = np.zeros(self.n_params)
        self.params = np.asarray(self.params, dtype=float)
        if self.params.shape != (self.n_params,):
            raise DimensionMismatch(
                f"{self.arch} model with dim={self.dim}, hidden={self.hidden} "
                f"needs {self.n_params} parameters, got {self.params.shape}"
            )

    @property
    def n_params(self) -> int:
        d, h = self.dim, self.hidden
        return d + 1 if self.arch == "linear" else h * d + 2 * h + 1

    def unpack(self, params=None):
        p = self.params if params is None else params
        d, h = self.dim, self.hidden
        if self.arch == "linear":
            return p[:d], p[d]
        return (p[:h * d].reshape(h, d), p[h * d:h * d + h],
                p[h * d + h:h * d + 2 * h], p[-1])

    def copy(self) -> "Model":
        return Model(self.arch, self.dim, self.hidden, self.params.copy())

    def scores(self, x) -> np.ndarray:
        return forward(self, x)


def init_model(arch: str, dim: int, hidden: int = 0, rng: np.random.Generator | None = None) -> Model:
    """Uniform ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]`` initialization."""
    rng = np.random.default_rng(0) if rng is None else rng
    model = Model(arch, dim, hidden)
    if arch == "linear":
        bound = 1.0 / math.sqrt(dim)
        model.params = rng.uniform(-bound, bound, dim + 1)
    else:
        b1, b2 = 1.0 / math.sqrt(dim), 1.0 / math.sqrt(hidden)
        model.params = np.concatenate([
            rng.uniform(-b1, b1, hidden * dim + hidden),
            rng.uniform(-b2, b2, hidden + 1),
        ])
    return model


def _as_points(model: Model, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.dim:
        raise DimensionMismatch(f"model expects {model.dim} features, got {x.shape[-1]}")
    return x


def forward(model: Model, x) -> np.ndarray:
    """Scores for points ``x`` of shape ``(..., d)``; returns shape ``(...)``."""
    x = _as_points(model, x)
    if model.arch == "linear":
        w, b = model.unpack()
        return x @ w + b
    w1, b1, w2, b2 = model.unpack()
    hidden = np.maximum(x @ w1.T + b1, 0.0)
    return hidden @ w2 + b2


def backward(model: Model, x, dscores) -> np.ndarray:
    """Flat gradient of ``sum(dscores * g(x))`` with respect to the parameters."""
    x = _as_points(model, x).reshape(-1, model.dim)
    ds = np.asarray(dscores, dtype=float).reshape(-1)
    if model.arch == "linear":
        return np.append(ds @ x, ds.sum())
    w1, b1, w2, _ = model.unpack()
    pre = x @ w1.T + b1
    hidden = np.maximum(pre, 0.0)
    dpre = np.outer(ds, w2) * (pre > 0)
    return np.concatenate([(dpre.T @ x).ravel(), dpre.sum(axis=0), ds @ hidden, [ds.sum()]])


def _form(weights, priors) -> PointWeights:
    return weights if isinstance(weights, PointWeights) else point_weights(weights, priors)


def risk_and_gradient(model: Model, tuple_batch, unlabeled_batch, weights, priors: Priors,
                      loss_kind=LossKind.SIGMOID, correction: CorrectionSpec | None = None):
    """Batch risk report and the gradient of its corrected total."""
    tuple_batch = np.asarray(tuple_batch, dtype=float)
    unlabeled_batch = np.asarray(unlabeled_batch, dtype=float).reshape(-1, model.dim)
    form = _form(weights, priors)
    z = forward(model, tuple_batch)
    u = forward(model, unlabeled_batch)
    report, dz, du = weak_risk(form, z, u, loss_kind, correction, with_grad=True)
    grad = backward(model, np.concatenate([tuple_batch.reshape(-1, model.dim), unlabeled_batch]),
                    np.concatenate([dz.ravel(), du]))
    return report, grad


def risk_gradient(model, tuple_batch, unlabeled_batch, weights, priors, loss_kind=LossKind.SIGMOID,
                  correction=None) -> np.ndarray:
    return risk_and_gradient(model, tuple_batch, unlabeled_batch, weights, priors,
                             loss_kind, correction)[1]


@dataclass
class TrainConfig:
    loss: LossKind = LossKind.SIGMOID
    correction: CorrectionSpec = field(default_factory=CorrectionSpec)
    learning_rate: float = 0.05
    epochs: int = 50
    batch_tuples: int = 128
    batch_unlabeled: int = 128
    weight_decay: float = 0.0
    momentum: float = 0.9
    seed: int = 0

    def __post_init__(self):
        self.loss = LossKind.parse(self.loss)
        if self.loss is LossKind.ZERO_ONE:
            raise ValueError("the zero-one loss is for evaluation only")
        if isinstance(self.correction, str):
            self.correction = CorrectionSpec.parse(self.correction)
        elif isinstance(self.correction, dict):
            self.correction = CorrectionSpec(**self.correction)
        if self.learning_rate < 0:
            raise ValueError("learning rate must be non-negative")
        if self.epochs < 1 or self.batch_tuples < 1 or self.batch_unlabeled < 1:
            raise ValueError("epochs and batch sizes must be positive")
        if self.weight_decay < 0 or not 0 <= self.momentum < 1:
            raise ValueError("need weight_decay >= 0 and 0 <= momentum < 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["loss"] = self.loss.value
        out["correction"] = {"kind": self.correction.kind.value, "k": self.correction.k}
        return out


@dataclass
class TrainResult:
    model: Model
    reports: list[RiskReport]  # one per optimization step
    epoch_reports: list[RiskReport] = field(default_factory=list)  # full training set, per epoch


def _full_risk(model, tuples, points, form, cfg) -> RiskReport:
    return weak_risk(form, forward(model, tuples), forward(model, points), cfg.loss, cfg.correction)


def train(model: Model, tuples: TupleDataset, unlabeled: UnlabeledDataset, weights, priors: Priors,
          cfg: TrainConfig, callbacks=(), track_epochs: bool = False) -> TrainResult:
    """Momentum SGD on the corrected weak risk.

    Runs ``epochs * ceil(n_b / batch_tuples)`` steps.  Every epoch both pools
    are reshuffled; step ``s`` takes the ``s``-th block of tuples and the
    ``s``-th block of unlabeled points (wrapping around the unlabeled pool).
    Each callback is called as ``cb(step, report, model)``.  The input
    model is not modified.
    """
    x_tuples = tuples.tuples
    x_unl = unlabeled.points
    n_b, n_u = len(x_tuples), len(x_unl)
    if n_b == 0:
        raise EmptyInput("no tuples to train on")
    form = _form(weights, priors)
    if form.needs_unlabeled and n_u == 0:
        raise EmptyInput("the weak risk needs unlabeled points")
    if x_tuples.shape[2] != model.dim:
        raise DimensionMismatch("tuple features do not match the model dimension")
    bt = min(cfg.batch_tuples, n_b)
    bu = min(cfg.batch_unlabeled, n_u)
    rng = np.random.default_rng(cfg.seed)
    model = model.copy()
    velocity = np.zeros_like(model.params)
    reports: list[RiskReport] = []
    epoch_reports: list[RiskReport] = []
    steps_per_epoch = math.ceil(n_b / bt)
    step = 0
    for _ in range(cfg.epochs):
        perm_t = rng.permutation(n_b)
        perm_u = rng.permutation(n_u) if n_u else np.zeros(0, dtype=int)
        for s in range(steps_per_epoch):
            tb = x_tuples[perm_t[s * bt:(s + 1) * bt]]
            ub = x_unl[perm_u[(s * bu + np.arange(bu)) % n_u]] if n_u else x_unl[:0]
            report, grad = risk_and_gradient(model, tb, ub, form, priors, cfg.loss, cfg.correction)
            if not (math.isfinite(report.raw_total) and np.all(np.isfinite(grad))):
                raise NonFiniteRisk(f"non-finite risk or gradient at step {step}: {report}")
            if cfg.weight_decay:
                grad = grad + cfg.weight_decay * model.params
            velocity = cfg.momentum * velocity + grad
            model.params = model.params - cfg.learning_rate * velocity
            reports.append(report)
            for cb in callbacks:
                cb(step, report, model)
            step += 1
        if track_epochs:
            epoch_reports.append(_full_risk(model, x_tuples, x_unl, form, cfg))
    return TrainResult(model, reports, epoch_reports)


def select_learning_rate(model: Model, tuples: TupleDataset, unlabeled: UnlabeledDataset, weights,
                         priors: Priors, cfg: TrainConfig, grid=None, val_fraction: float = 0.2):
    """Pick the learning rate with the lowest held-out weak risk.

    The last ``val_fraction`` of tuples and unlabeled points is held out and
    scored with the uncorrected weak risk under the training loss; no hidden
    labels are used.  Returns ``(best_rate, {rate: validation_risk})``.
    """
    grid = [10.0 ** -k for k in range(6, 0, -1)] if grid is None else list(grid)
    form = _form(weights, priors)
    cut_t = max(1, int(round(len(tuples) * (1 - val_fraction))))
    cut_u = max(1, int(round(len(unlabeled) * (1 - val_fraction))))
    if cut_t >= len(tuples) or cut_u >= len(unlabeled):
        raise EmptyInput("not enough data for a validation split")
    fit_t = TupleDataset(tuples.tuples[:cut_t], tuples.scenario)
    fit_u = UnlabeledDataset(unlabeled.points[:cut_u])
    val_t, val_u = tuples.tuples[cut_t:], unlabeled.points[cut_u:]
    scores = {}
    for rate in grid:
        trial = TrainConfig(**{**cfg.__dict__, "learning_rate": rate})
        try:
            fitted = train(model, fit_t, fit_u, form, priors, trial).model
            val = weak_risk(form, forward(fitted, val_t), forward(fitted, val_u), cfg.loss).raw_total
        except NonFiniteRisk:
            val = math.inf
        scores[rate] = val if math.isfinite(val) else math.inf
    best = min(grid, key=lambda r: (scores[r], r))
    return best, scores


def save_checkpoint(path, model: Model, seed: int, config: dict | None = None) -> None:
    record = {
        "arch": model.arch,
        "dims": {"input": model.dim, "hidden": model.hidden},
        "parameters": model.params.tolist(),
        "seed": int(seed),
        "config": config or {},
    }
    Path(path).write_text(json.dumps(record, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_checkpoint(path) -> tuple[Model, dict]:
    record = json.loads(Path(path).read_text(encoding="utf-8"))
    dims = record["dims"]
    model = Model(record["arch"], int(dims["input"]), int(dims.get("hidden", 0)),
                  np.array(record["parameters"], dtype=float))
    return model, record

