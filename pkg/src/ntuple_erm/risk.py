"""Supervised, weakly supervised and corrected empirical risks.

Every weak risk here is linear in the per-point losses, so it is also
exposed as a :class:`PointWeights` record: one coefficient on
``l(z, +1)`` and one on ``l(z, -1)`` for each tuple position and for the
unlabeled pool.  Training uses that form to get gradients with respect to
the scores.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coefficients import Priors, ReconstructionWeights, SymmetricWeights
from .errors import EmptyInput, ShapeMismatch
from .losses import LossKind, loss, loss_grad

__all__ = [
    "CorrectionKind",
    "CorrectionSpec",
    "PointWeights",
    "RiskReport",
    "correct",
    "correction_slope",
    "empirical_risk_general",
    "empirical_risk_symmetric",
    "point_weights",
    "supervised_risk",
    "weak_risk",
]


class CorrectionKind(str, enum.Enum):
    NONE = "none"
    RELU = "relu"
    ABS = "abs"
    GENERALIZED = "generalized"


@dataclass(frozen=True)
class CorrectionSpec:
    """``f(x) = x`` for ``x >= 0``; below zero ``0`` (relu), ``|x|`` (abs) or ``k|x|`` (generalized)."""

    kind: CorrectionKind = CorrectionKind.GENERALIZED
    k: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", CorrectionKind(self.kind))
        if self.kind is CorrectionKind.GENERALIZED and not self.k > 0:
            raise ValueError(f"generalized correction needs k > 0, got {self.k}")

    @classmethod
    def parse(cls, name: str, k: float = 1.0) -> "CorrectionSpec":
        return cls(CorrectionKind(name.strip().lower()), k)


def correct(raw: float, spec: CorrectionSpec) -> float:
    if raw >= 0 or spec.kind is CorrectionKind.NONE:
        return raw
    if spec.kind is CorrectionKind.RELU:
        return 0.0
    if spec.kind is CorrectionKind.ABS:
        return -raw
    return spec.k * -raw


def correction_slope(raw: float, spec: CorrectionSpec) -> float:
    """Derivative of the correction at ``raw`` (right derivative at 0)."""
    if raw >= 0 or spec.kind is CorrectionKind.NONE:
        return 1.0
    if spec.kind is CorrectionKind.RELU:
        return 0.0
    if spec.kind is CorrectionKind.ABS:
        return -1.0
    return -spec.k


@dataclass
class RiskReport:
    tuple_term: float
    unlabeled_term: float
    raw_total: float
    corrected_total: float
    batch_sizes: tuple[int, int]

    def record(self, step: int) -> dict:
        return {
            "step": step,
            "tuple_term": self.tuple_term,
            "unlabeled_term": self.unlabeled_term,
            "raw": self.raw_total,
            "corrected": self.corrected_total,
        }


@dataclass(frozen=True)
class PointWeights:
    """Coefficients of ``l(z,+1)`` / ``l(z,-1)`` per tuple position and for unlabeled points.

    The risk is ``sum_j mean_i[tuple_pos[j] l(z_ji,+1) + tuple_neg[j] l(z_ji,-1)]
    + mean_i[unl_pos l(u_i,+1) + unl_neg l(u_i,-1)]``.
    """

    tuple_pos: np.ndarray
    tuple_neg: np.ndarray
    unl_pos: float
    unl_neg: float

    @property
    def n(self) -> int:
        return len(self.tuple_pos)

    @property
    def needs_unlabeled(self) -> bool:
        return self.unl_pos != 0 or self.unl_neg != 0


def point_weights(weights, priors: Priors) -> PointWeights:
    if isinstance(weights, SymmetricWeights):
        share = weights.tuple_multiplier / weights.n
        return PointWeights(
            tuple_pos=np.full(weights.n, share),
            tuple_neg=np.full(weights.n, -share),
            unl_pos=weights.u_pos,
            unl_neg=weights.u_neg,
        )
    if isinstance(weights, ReconstructionWeights):
        tp, tm = priors.tau_plus, priors.tau_minus
        return PointWeights(
            tuple_pos=tp * np.asarray(weights.c1),
            tuple_neg=tm * np.asarray(weights.c2),
            unl_pos=tp * weights.d1,
            unl_neg=tm * weights.d2,
        )
    raise TypeError(f"expected reconstruction or symmetric weights, got {type(weights).__name__}")


def _report(tuple_term, unlabeled_term, sizes, correction, raw=None):
    if raw is None:
        raw = tuple_term + unlabeled_term
    corrected = raw if correction is None else correct(raw, correction)
    return RiskReport(float(tuple_term), float(unlabeled_term), float(raw), float(corrected), sizes)


def _exact_dot(*factor_lists) -> Fraction:
    """Sum of elementwise products of float sequences, with no intermediate rounding."""
    total = Fraction(0)
    for factors in zip(*factor_lists):
        term = Fraction(1)
        for f in factors:
            term *= Fraction(float(f))
        total += term
    return total


def supervised_risk(scores_pos, scores_neg, priors: Priors, loss_kind=LossKind.SIGMOID) -> float:
    """Class-prior weighted risk from labeled positive and negative scores."""
    scores_pos = np.asarray(scores_pos, dtype=float).ravel()
    scores_neg = np.asarray(scores_neg, dtype=float).ravel()
    if scores_pos.size == 0 or scores_neg.size == 0:
        raise EmptyInput("supervised risk needs both positive and negative scores")
    return float(priors.tau_plus * np.mean(loss(loss_kind, scores_pos, 1))
                 + priors.tau_minus * np.mean(loss(loss_kind, scores_neg, -1)))


def _check_unlabeled(unlabeled_scores, required):
    u = np.asarray(unlabeled_scores, dtype=float).ravel()
    if u.size == 0 and required:
        raise EmptyInput("the unlabeled term has nonzero weight but no unlabeled scores were given")
    return u


def empirical_risk_general(weights: ReconstructionWeights, priors: Priors, tuple_scores,
                           unlabeled_scores, loss_kind=LossKind.SIGMOID,
                           correction: CorrectionSpec | None = None) -> RiskReport:
    """Weak risk from an ``(n_b, N)`` tuple score matrix and unlabeled scores."""
    z = np.asarray(tuple_scores, dtype=float)
    if z.ndim != 2 or z.shape[1] != weights.n:
        raise ShapeMismatch(f"tuple scores must have shape (n_b, {weights.n}), got {z.shape}")
    if z.shape[0] == 0:
        raise EmptyInput("no tuples")
    u = _check_unlabeled(unlabeled_scores, weights.d1 != 0 or weights.d2 != 0)
    tp, tm = priors.tau_plus, priors.tau_minus
    # weights can reach 1e5 near the singular boundary while the risk is O(1):
    # average losses per position, then combine the 2N+2 means exactly
    mean_pos = np.mean(loss(loss_kind, z, 1), axis=0)
    mean_neg = np.mean(loss(loss_kind, z, -1), axis=0)
    n = weights.n
    tuple_exact = (_exact_dot([tp] * n, weights.c1, mean_pos)
                   + _exact_dot([tm] * n, weights.c2, mean_neg))
    if u.size:
        unl_exact = _exact_dot([tp, tm], [weights.d1, weights.d2],
                               [np.mean(loss(loss_kind, u, 1)), np.mean(loss(loss_kind, u, -1))])
    else:
        unl_exact = Fraction(0)
    return _report(float(tuple_exact), float(unl_exact), (z.shape[0], u.size), correction,
                   float(tuple_exact + unl_exact))


def empirical_risk_symmetric(sym: SymmetricWeights, tuple_scores_flat, unlabeled_scores,
                             loss_kind=LossKind.SIGMOID,
                             correction: CorrectionSpec | None = None) -> RiskReport:
    """Weak risk for permutation-invariant scenarios; tuple members are pooled."""
    z = np.asarray(tuple_scores_flat, dtype=float).ravel()
    if z.size == 0:
        raise EmptyInput("no tuple members")
    u = _check_unlabeled(unlabeled_scores, True)
    tuple_exact = _exact_dot([sym.tuple_multiplier], [np.mean(loss(loss_kind, z, 1) - loss(loss_kind, z, -1))])
    unl_exact = _exact_dot([sym.u_pos, sym.u_neg], [np.mean(loss(loss_kind, u, 1)), np.mean(loss(loss_kind, u, -1))])
    return _report(float(tuple_exact), float(unl_exact), (z.size // sym.n, u.size), correction,
                   float(tuple_exact + unl_exact))


def weak_risk(form: PointWeights, tuple_scores, unlabeled_scores, loss_kind=LossKind.SIGMOID,
              correction: CorrectionSpec | None = None, with_grad: bool = False):
    """Risk (and optionally its gradient w.r.t. every score) from a :class:`PointWeights` form.

    Returns ``report`` or ``(report, d_tuple_scores, d_unlabeled_scores)``;
    the gradients are of the corrected total.
    """
    z = np.asarray(tuple_scores, dtype=float)
    if z.ndim != 2 or z.shape[1] != form.n:
        raise ShapeMismatch(f"tuple scores must have shape (n_b, {form.n}), got {z.shape}")
    if z.shape[0] == 0:
        raise EmptyInput("no tuples")
    u = _check_unlabeled(unlabeled_scores, form.needs_unlabeled)
    nb, nu = z.shape[0], u.size
    tuple_term = float(np.sum(np.sum(form.tuple_pos * loss(loss_kind, z, 1)
                                     + form.tuple_neg * loss(loss_kind, z, -1), axis=0))) / nb
    unlabeled_term = 0.0
    if nu:
        unlabeled_term = float(np.sum(form.unl_pos * loss(loss_kind, u, 1)
                                      + form.unl_neg * loss(loss_kind, u, -1))) / nu
    report = _report(tuple_term, unlabeled_term, (nb, nu), correction)
    if not with_grad:
        return report
    slope = 1.0 if correction is None else correction_slope(report.raw_total, correction)
    dz = slope * (form.tuple_pos * loss_grad(loss_kind, z, 1)
                  + form.tuple_neg * loss_grad(loss_kind, z, -1)) / nb
    du = np.zeros(0)
    if nu:
        du = slope * (form.unl_pos * loss_grad(loss_kind, u, 1)
                      + form.unl_neg * loss_grad(loss_kind, u, -1)) / nu
    return report, dz, du
