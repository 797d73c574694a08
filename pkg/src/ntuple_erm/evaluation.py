"""Accuracy, Bayes risk, estimation-error bounds and Monte-Carlo harnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .coefficients import Priors, ReconstructionWeights, SymmetricWeights, mixture, reconstruction_weights, symmetric_weights
from .data import DataModel, LabeledPool, child_rngs, sample_labeled, sample_tuples, sample_unlabeled
from .errors import EmptyInput, NonDifferentiableKind
from .losses import LIPSCHITZ, LossKind, loss, max_loss
from .risk import CorrectionSpec, point_weights, supervised_risk, weak_risk
from .scenario import ScenarioSpec
from .train import Model, TrainConfig, forward, init_model, train

__all__ = [
    "BoundInputs",
    "CurveRow",
    "UnbiasednessReport",
    "accuracy",
    "bayes_risk",
    "bound_inputs_for",
    "correction_comparison",
    "error_bound",
    "excess_risk_curve",
    "labeled_pool_of",
    "scenario_weights",
    "supervised_baseline",
    "unbiasedness_report",
]

_STD_NORMAL = NormalDist()


def _scores(model, points) -> np.ndarray:
    if isinstance(model, Model):
        return forward(model, points)
    return np.asarray(model(np.asarray(points, dtype=float)), dtype=float).reshape(len(points))


def accuracy(model, points, labels) -> float:
    """Fraction of points with ``sign(g(x)) == y``; a score of exactly 0 predicts +1.

    ``model`` is a :class:`Model` or any callable mapping ``(n, d)`` points
    to ``n`` scores.
    """
    labels = np.asarray(labels).ravel()
    if labels.size == 0:
        raise EmptyInput("accuracy needs at least one labeled point")
    pred = np.where(_scores(model, points) >= 0, 1, -1)
    return float(np.mean(pred == labels))


def bayes_risk(model: DataModel) -> float:
    """Zero-one Bayes risk of two Gaussians with a shared diagonal covariance.

    The optimal rule is linear; with Mahalanobis separation ``delta`` and
    ``c = ln(tau_+ / tau_-)`` the risk is
    ``tau_+ Phi(-delta/2 - c/delta) + tau_- Phi(-delta/2 + c/delta)``.
    """
    delta = math.sqrt(float(np.sum(((model.mean_pos - model.mean_neg) / model.stdev) ** 2)))
    tp, tm = model.priors.tau_plus, model.priors.tau_minus
    c = math.log(tp / tm)
    return (tp * _STD_NORMAL.cdf(-delta / 2 - c / delta)
            + tm * _STD_NORMAL.cdf(-delta / 2 + c / delta))


def scenario_weights(spec: ScenarioSpec, priors: Priors):
    """Symmetric weights for permutation-invariant scenarios, least-squares weights otherwise."""
    mix = mixture(spec, priors)
    if spec.is_symmetric and mix.is_symmetric:
        return symmetric_weights(mix, priors)
    return reconstruction_weights(mix, priors)


# ---------------------------------------------------------------- bounds


@dataclass(frozen=True)
class BoundInputs:
    """Constants of the estimation-error bound.

    ``rho`` is the loss Lipschitz constant, ``c_g`` a uniform bound on
    ``|g|``, ``c_ell`` the largest loss value over ``|g| <= c_g``.
    """

    rho: float
    c_g: float
    c_ell: float
    delta: float
    n_b: int
    n_u: int
    n: int

    def __post_init__(self):
        for name in ("rho", "c_g", "c_ell", "delta", "n_b", "n_u", "n"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not self.delta < 1:
            raise ValueError(f"delta must be below 1, got {self.delta}")


def bound_inputs_for(loss_kind, c_g: float, delta: float, n_b: int, n_u: int, n: int) -> BoundInputs:
    """Fill ``rho`` and ``c_ell`` from the loss's declared constants."""
    kind = LossKind.parse(loss_kind)
    if kind not in LIPSCHITZ:
        raise NonDifferentiableKind(f"no Lipschitz constant for {kind.value}")
    return BoundInputs(LIPSCHITZ[kind], c_g, max_loss(kind, c_g), delta, n_b, n_u, n)


def error_bound(inputs: BoundInputs, weights, priors: Priors) -> float:
    """Estimation-error bound ``R(g_hat) - R(g*)`` at confidence ``1 - delta``.

    General weights give ``K_n / sqrt(n_b) + K_u / sqrt(n_u)``; symmetric
    weights give ``S_n / sqrt(N n_b) + S_u / sqrt(n_u)``.  The prior-weighted
    coefficient sums and ``tau_+ tau_- / denom`` enter through their
    magnitudes so the bound stays positive when those factors are negative.
    """
    b = inputs
    tp, tm = priors.tau_plus, priors.tau_minus
    if isinstance(weights, SymmetricWeights):
        s_n = (4 * tp * tm / abs(weights.denom)
               * (2 * b.rho * b.c_g + b.c_ell * math.sqrt(0.5 * math.log(4 / b.delta))))
        s_u = 4 * b.rho * b.c_g + 2 * b.c_ell * math.sqrt(math.log(4 / b.delta) / 2)
        return s_n / math.sqrt(weights.n * b.n_b) + s_u / math.sqrt(b.n_u)
    if isinstance(weights, ReconstructionWeights):
        k_n = (abs(tp * math.fsum(weights.c1) + tm * math.fsum(weights.c2))
               * (4 * b.rho * b.c_g + b.c_ell * math.sqrt(2 * math.log(4 * weights.n / b.delta))))
        k_u = (abs(tp * weights.d1 + tm * weights.d2)
               * (4 * b.rho * b.c_g + b.c_ell * math.sqrt(2 * math.log(4 / b.delta))))
        return k_n / math.sqrt(b.n_b) + k_u / math.sqrt(b.n_u)
    raise TypeError(f"expected reconstruction or symmetric weights, got {type(weights).__name__}")


# ---------------------------------------------------------- unbiasedness


@dataclass
class UnbiasednessReport:
    mean_weak_risk: float
    weak_std_error: float
    supervised_risk: float
    supervised_std_error: float
    z_score: float
    repeats: int
    weak_risks: list[float] = field(repr=False, default_factory=list)

    @property
    def difference(self) -> float:
        return self.mean_weak_risk - self.supervised_risk

    def to_dict(self) -> dict:
        return {
            "mean_weak_risk": self.mean_weak_risk,
            "weak_std_error": self.weak_std_error,
            "supervised_risk": self.supervised_risk,
            "supervised_std_error": self.supervised_std_error,
            "difference": self.difference,
            "z_score": self.z_score,
            "repeats": self.repeats,
        }


def unbiasedness_report(model, spec: ScenarioSpec, data_model: DataModel, n_b: int, n_u: int,
                        repeats: int = 50, seed: int = 0, loss_kind=LossKind.SIGMOID,
                        supervised_size: int = 1_000_000) -> UnbiasednessReport:
    """Compare the average uncorrected weak risk of a fixed model with its supervised risk.

    Each repeat draws fresh tuples and unlabeled points.  The supervised
    risk is a labeled Monte-Carlo average over ``supervised_size`` points
    drawn by class (``tau_+`` share positives); the z-score divides the
    absolute difference by the combined standard error of both averages.
    """
    if repeats < 10:
        raise ValueError("need at least 10 repeats")
    priors = data_model.priors
    form = point_weights(scenario_weights(spec, priors), priors)
    streams = np.random.SeedSequence(int(seed)).spawn(repeats + 1)
    risks = []
    for child in streams[:repeats]:
        rng = np.random.default_rng(child)
        tuples = sample_tuples(data_model, spec, n_b, rng).tuples
        unl = sample_unlabeled(data_model, n_u, rng).points
        risks.append(weak_risk(form, _scores(model, tuples.reshape(-1, data_model.dim)).reshape(n_b, spec.n),
                               _scores(model, unl), loss_kind).raw_total)
    risks_arr = np.array(risks)
    mean_weak = float(np.mean(risks_arr))
    se_weak = float(np.std(risks_arr, ddof=1) / math.sqrt(repeats))

    # stratified labeled sample: exact class shares remove the label noise
    rng = np.random.default_rng(streams[repeats])
    n_pos = max(2, int(round(priors.tau_plus * supervised_size)))
    n_neg = max(2, supervised_size - n_pos)
    lp = loss(loss_kind, _scores(model, data_model.draw(np.ones(n_pos, dtype=int), rng)), 1)
    ln = loss(loss_kind, _scores(model, data_model.draw(-np.ones(n_neg, dtype=int), rng)), -1)
    sup = priors.tau_plus * float(np.mean(lp)) + priors.tau_minus * float(np.mean(ln))
    se_sup = math.sqrt(priors.tau_plus ** 2 * np.var(lp, ddof=1) / n_pos
                       + priors.tau_minus ** 2 * np.var(ln, ddof=1) / n_neg)
    combined = math.hypot(se_weak, se_sup)
    diff = abs(mean_weak - sup)
    if combined > 0:
        z = diff / combined
    else:
        z = 0.0 if diff <= 1e-12 else math.inf
    return UnbiasednessReport(mean_weak, se_weak, sup, se_sup, z, repeats, risks)


# ------------------------------------------------------------ baselines


def supervised_baseline(train_points, train_labels, test_points, test_labels, seed: int = 0) -> float:
    """Test accuracy of logistic regression fit on true labels."""
    from sklearn.linear_model import LogisticRegression

    clf = LogisticRegression(random_state=seed)
    clf.fit(np.asarray(train_points), np.asarray(train_labels).ravel())
    return float(clf.score(np.asarray(test_points), np.asarray(test_labels).ravel()))


# ------------------------------------------------------ excess risk curve


@dataclass
class CurveRow:
    n: int
    median_excess_risk: float
    bayes_risk: float
    test_errors: list[float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "median_excess_risk": self.median_excess_risk,
            "bayes_risk": self.bayes_risk,
            "test_errors": self.test_errors,
        }


def excess_risk_curve(spec: ScenarioSpec, data_model: DataModel, sizes, seeds, cfg: TrainConfig,
                      arch: str = "linear", hidden: int = 0, n_test: int = 10_000) -> list[CurveRow]:
    """Median over seeds of test zero-one error minus the Bayes risk, for each ``n_b = n_u = n``.

    Each (size, seed) run derives its streams from ``child_rngs(seed)``, so
    runs at different sizes share a test set but not their training data.
    """
    sizes, seeds = [int(s) for s in sizes], [int(s) for s in seeds]
    if len(sizes) < 3 or len(seeds) < 3:
        raise ValueError("an excess-risk curve needs at least 3 sizes and 3 seeds")
    if min(sizes) < 1:
        raise ValueError("sizes must be positive")
    priors = data_model.priors
    weights = scenario_weights(spec, priors)
    opt = bayes_risk(data_model)
    rows = []
    for n in sizes:
        errors = []
        for seed in seeds:
            r_tuples, r_unl, r_test, r_train = child_rngs(seed)
            tuples = sample_tuples(data_model, spec, n, r_tuples)
            unl = sample_unlabeled(data_model, n, r_unl)
            test = sample_labeled(data_model, n_test, r_test)
            model = init_model(arch, data_model.dim, hidden, r_train)
            run_cfg = TrainConfig(**{**cfg.__dict__, "seed": int(r_train.integers(2 ** 31))})
            fitted = train(model, tuples, unl, weights, priors, run_cfg).model
            errors.append(1.0 - accuracy(fitted, test.points, test.labels))
        rows.append(CurveRow(n, float(np.median(sorted(errors))) - opt, opt, errors))
    return rows


# ------------------------------------------------------ correction study


def correction_comparison(spec: ScenarioSpec, data_model: DataModel, n_b: int, n_u: int,
                          cfg: TrainConfig, arch: str = "mlp", hidden: int = 100, seed: int = 0,
                          corrections=("none", "abs"), n_test: int = 5000) -> dict:
    """Train the same initial model under each correction on the same data.

    Returns ``{name: {"steps": [...], "epochs": [...], "test_accuracy": float}}``
    where ``steps`` holds one batch :class:`RiskReport` record per step and
    ``epochs`` one full-training-set record per epoch.
    """
    priors = data_model.priors
    weights = scenario_weights(spec, priors)
    r_tuples, r_unl, r_test, r_train = child_rngs(seed)
    tuples = sample_tuples(data_model, spec, n_b, r_tuples)
    unl = sample_unlabeled(data_model, n_u, r_unl)
    test = sample_labeled(data_model, n_test, r_test)
    start = init_model(arch, data_model.dim, hidden, r_train)
    out = {}
    for name in corrections:
        correction = name if isinstance(name, CorrectionSpec) else CorrectionSpec.parse(name)
        run_cfg = TrainConfig(**{**cfg.__dict__, "correction": correction})
        result = train(start, tuples, unl, weights, priors, run_cfg, track_epochs=True)
        out[correction.kind.value] = {
            "steps": [r.record(i) for i, r in enumerate(result.reports)],
            "epochs": [r.record(i) for i, r in enumerate(result.epoch_reports)],
            "test_accuracy": accuracy(result.model, test.points, test.labels),
        }
    return out


def labeled_pool_of(tuples, unlabeled) -> LabeledPool:
    """All points with hidden labels from a tuple set and an unlabeled set, for oracles."""
    if tuples.hidden_labels is None or unlabeled.hidden_labels is None:
        raise EmptyInput("hidden labels are not available")
    points = np.concatenate([tuples.tuples.reshape(-1, tuples.dim), unlabeled.points])
    labels = np.concatenate([tuples.hidden_labels.ravel(), unlabeled.hidden_labels])
    return LabeledPool(points, labels)
