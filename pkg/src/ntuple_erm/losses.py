"""Margin losses ``l(z, y)`` on a real score ``z`` and a label ``y`` in ``{-1, +1}``.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import NonDifferentiableKind, NonFiniteScore

__all__ = ["LIPSCHITZ", "LossKind", "loss", "loss_grad", "max_loss"]


class LossKind(str, enum.Enum):
    SIGMOID = "sigmoid"
    LOGISTIC = "logistic"
    DOUBLE_HINGE = "double_hinge"
    ZERO_ONE = "zero_one"  # evaluation only

    @classmethod
    def parse(cls, name) -> "LossKind":
        if isinstance(name, cls):
            return name
        return cls(str(name).strip().lower().replace("-", "_"))


# Lipschitz constants in the score.  The double hinge has slope -1 for
# margins below -1, so its constant is 1.
LIPSCHITZ = {
    LossKind.SIGMOID: 0.25,
    LossKind.LOGISTIC: 1.0,
    LossKind.DOUBLE_HINGE: 1.0,
}


def _margin(score, label):
    z = np.asarray(score, dtype=float)
    if not np.all(np.isfinite(z)):
        raise NonFiniteScore("scores must be finite")
    y = np.asarray(label)
    if not np.all((y == 1) | (y == -1)):
        raise ValueError("labels must be -1 or +1")
    return y * z


def loss(kind, score, label):
    """Loss value; a 0-d input returns a Python float."""
    kind = LossKind.parse(kind)
    m = _margin(score, label)
    if kind is LossKind.SIGMOID:
        out = 0.5 * (1.0 - np.tanh(0.5 * m))
    elif kind is LossKind.LOGISTIC:
        out = np.logaddexp(0.0, -m)
    elif kind is LossKind.DOUBLE_HINGE:
        out = np.maximum(-m, np.maximum(0.0, 0.5 * (1.0 - m)))
    else:
        out = (m <= 0).astype(float)
    return float(out) if np.ndim(out) == 0 else out


def loss_grad(kind, score, label):
    """Derivative with respect to the score.

    At the double-hinge kinks the one-sided derivative from the right (in
    the score) is returned.
    """
    kind = LossKind.parse(kind)
    if kind is LossKind.ZERO_ONE:
        raise NonDifferentiableKind("the zero-one loss has no useful gradient")
    y = np.asarray(label)
    m = _margin(score, label)
    if kind is LossKind.SIGMOID:
        s = 0.5 * (1.0 - np.tanh(0.5 * m))
        out = -y * s * (1.0 - s)
    elif kind is LossKind.LOGISTIC:
        out = -y * 0.5 * (1.0 - np.tanh(0.5 * m))
    else:
        # dl/dm is -1, -1/2, 0 on (-inf,-1), [-1,1), [1,inf); a step right in
        # z is a step right in m for y=+1 and a step left for y=-1
        right = np.where(m >= 1, 0.0, np.where(m >= -1, -0.5, -1.0))
        left = np.where(m > 1, 0.0, np.where(m > -1, -0.5, -1.0))
        out = y * np.where(y == 1, right, left)
    return float(out) if np.ndim(out) == 0 else out


def max_loss(kind, bound: float) -> float:
    """``sup_{|z| <= bound, y}`` of the loss, i.e. its value at margin ``-bound``."""
    return float(loss(kind, -abs(bound), 1))
