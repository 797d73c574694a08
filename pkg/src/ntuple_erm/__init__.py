"""Binary classification from N-tuples of weakly labeled points plus unlabeled data.

Each tuple carries a constraint on the joint labels of its members (for
example "the first member is at least as positive as the second", or "all
members share a label").  The package computes the mixture coefficients
and reconstruction weights that turn such data into an unbiased estimate
of the supervised risk, trains linear models and small MLPs on it, and
evaluates them against closed-form and Monte-Carlo oracles.
"""

__version__ = "0.1.0"

from .coefficients import Priors, mixture, reconstruction_weights, symmetric_weights
from .losses import LossKind, loss
from .risk import CorrectionSpec, weak_risk
from .scenario import Kind, ScenarioSpec

__all__ = [
    "CorrectionSpec",
    "Kind",
    "LossKind",
    "Priors",
    "ScenarioSpec",
    "__version__",
    "loss",
    "mixture",
    "reconstruction_weights",
    "symmetric_weights",
    "weak_risk",
]
