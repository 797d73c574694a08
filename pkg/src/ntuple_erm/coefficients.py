"""Mixture coefficients and reconstruction weights.

Each tuple position ``j`` sees a two-component mixture
``p_j(x) = alpha_j p_+(x) + beta_j p_-(x)``.  Stacking the ``N`` position
mixtures with the unlabeled marginal ``p(x) = tau_+ p_+(x) + tau_- p_-(x)``
gives an ``(N+1) x 2`` system ``M``; its least-squares left inverse yields
the weights that turn tuple and unlabeled expectations back into the two
class-conditional expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, fsum

import numpy as np

from .errors import AsymmetricInput, SingularMixture, UnsupportedKind
from .scenario import Kind, ScenarioSpec, enumerate_labels

__all__ = [
    "DENOM_TOL",
    "DET_RTOL",
    "MixtureCoefficients",
    "Priors",
    "ReconstructionWeights",
    "SymmetricWeights",
    "comp_closed_weights",
    "identity_residuals",
    "mixture",
    "mixture_closed_form",
    "mixture_from_enumeration",
    "reconstruction_weights",
    "symmetric_weights",
]

# absolute tolerance on |alpha tau_- - beta tau_+|
DENOM_TOL = 1e-9
# relative tolerance on the 2x2 normal-matrix determinant; below ~1e-9 the
# weights are so large that even correctly rounded ones miss the left-inverse
# identities by more than 1e-10 when checked in double precision
DET_RTOL = 1e-9


@dataclass(frozen=True)
class Priors:
    tau_plus: float

    def __post_init__(self):
        tau = float(self.tau_plus)
        if not (0.0 < tau < 1.0) or math.isnan(tau):
            raise ValueError(f"tau_plus must lie strictly inside (0, 1), got {self.tau_plus}")
        object.__setattr__(self, "tau_plus", tau)

    @property
    def tau_minus(self) -> float:
        return 1.0 - self.tau_plus

    def of(self, label: int) -> float:
        return self.tau_plus if label == 1 else self.tau_minus


@dataclass(frozen=True)
class MixtureCoefficients:
    """Per-position weights: ``alpha[j]`` on ``p_+``, ``beta[j]`` on ``p_-``; ``z`` is the subset mass."""

    alpha: np.ndarray
    beta: np.ndarray
    z: float

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.all(np.abs(self.alpha - self.alpha[0]) <= 1e-12))

    def matrix(self, priors: Priors) -> np.ndarray:
        """The stacked ``(N+1) x 2`` system ``[A; Gamma]``."""
        return np.vstack([np.column_stack([self.alpha, self.beta]),
                          [priors.tau_plus, priors.tau_minus]])


@dataclass(frozen=True)
class ReconstructionWeights:
    c1: np.ndarray
    c2: np.ndarray
    d1: float
    d2: float
    conditioning: float  # smallest singular value of M
    det: float = float("nan")  # determinant of M^T M

    @property
    def n(self) -> int:
        return len(self.c1)

    def left_inverse(self) -> np.ndarray:
        """The ``2 x (N+1)`` matrix ``[[C_1., D_1], [C_2., D_2]]``."""
        return np.vstack([np.append(self.c1, self.d1), np.append(self.c2, self.d2)])


@dataclass(frozen=True)
class SymmetricWeights:
    """Coefficients of the simplified risk for permutation-invariant scenarios.

    The tuple term is ``tuple_multiplier * E[l(z,+1) - l(z,-1)]`` over all
    tuple members; the unlabeled term is ``E[u_pos l(z,+1) + u_neg l(z,-1)]``.
    """

    tuple_multiplier: float
    u_pos: float
    u_neg: float
    denom: float
    n: int
    alpha: float
    beta: float


def _prior_products(labels: np.ndarray, priors: Priors) -> np.ndarray:
    taus = np.where(labels == 1, priors.tau_plus, priors.tau_minus)
    return np.prod(taus, axis=1)


def mixture_from_enumeration(spec: ScenarioSpec, priors: Priors) -> MixtureCoefficients:
    """Brute-force sum over every allowed label vector (``N`` up to the enumeration cap)."""
    labels = enumerate_labels(spec)
    weights = _prior_products(labels, priors)
    z = fsum(weights)
    alpha = np.array([fsum(weights[labels[:, j] == 1]) for j in range(spec.n)]) / z
    beta = np.array([fsum(weights[labels[:, j] == -1]) for j in range(spec.n)]) / z
    return MixtureCoefficients(alpha=alpha, beta=beta, z=z)


def mixture_closed_form(kind, n: int, priors: Priors) -> MixtureCoefficients:
    """Closed-form coefficients for the four named scenarios; no enumeration cap."""
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    tp, tm = priors.tau_plus, priors.tau_minus
    if kind is Kind.COMP:
        terms = [tp ** k * tm ** (n - k) for k in range(n + 1)]
        z = fsum(terms)
        alpha = np.array([fsum(terms[j:]) for j in range(1, n + 1)]) / z
        beta = np.array([fsum(terms[:j]) for j in range(1, n + 1)]) / z
        return MixtureCoefficients(alpha=alpha, beta=beta, z=z)
    if kind is Kind.SIM:
        z = tp ** n + tm ** n
        a, b = tp ** n / z, tm ** n / z
    elif kind is Kind.MIX:
        z = fsum(comb(n, n - k) * tp ** (n - k) * tm ** k for k in range(1, n))
        a = fsum(comb(n - 1, k) * tp ** (n - k) * tm ** k for k in range(1, n)) / z
        b = fsum(comb(n - 1, n - k) * tp ** (n - k) * tm ** k for k in range(1, n)) / z
    elif kind is Kind.NOT_ALL_NEG:
        z = 1.0 - tm ** n
        a = (tp ** n + fsum(comb(n - 1, k) * tp ** (n - k) * tm ** k for k in range(1, n))) / z
        b = fsum(comb(n - 1, n - k) * tp ** (n - k) * tm ** k for k in range(1, n)) / z
    else:
        raise UnsupportedKind(f"no closed form for scenario kind {kind.value!r}")
    return MixtureCoefficients(alpha=np.full(n, a), beta=np.full(n, b), z=z)


def mixture(spec: ScenarioSpec, priors: Priors) -> MixtureCoefficients:
    """Closed form for named kinds, enumeration for custom subsets."""
    if spec.kind is Kind.CUSTOM:
        return mixture_from_enumeration(spec, priors)
    return mixture_closed_form(spec.kind, spec.n, priors)


def _singular_values(gram: np.ndarray, det_sqrt: float | None = None) -> tuple[float, float]:
    # largest from the 2x2 eigenproblem; smallest from the determinant when
    # it is known accurately (the eigenvalue difference cancels badly)
    a, b, d = gram[0, 0], gram[0, 1], gram[1, 1]
    s_max = math.sqrt(0.5 * (a + d) + math.hypot(0.5 * (a - d), b))
    if det_sqrt is None:
        det_sqrt = math.sqrt(max(a * d - b * b, 0.0))
    return s_max, det_sqrt / s_max


def _exact_left_inverse(m: np.ndarray):
    """``(M^T M)^{-1} M^T`` in rational arithmetic on the float entries of ``M``.

    Returns the two rows rounded once to float, the exact normal determinant
    and the relative determinant ``det / (|m_1|^2 |m_2|^2)``.  Near-singular
    systems amplify every rounding error by the condition number squared, so
    the float64 normal equations and even a float64 QR lose digits the
    identity checks need; exact arithmetic on a 2x2 system is cheap.
    """
    cols = [[Fraction(float(v)) for v in m[:, k]] for k in range(2)]
    g11 = sum(v * v for v in cols[0])
    g12 = sum(u * v for u, v in zip(cols[0], cols[1]))
    g22 = sum(v * v for v in cols[1])
    det = g11 * g22 - g12 * g12
    rel_det = float(det / (g11 * g22)) if g11 and g22 else 0.0
    if det == 0:
        return None, None, 0.0, rel_det
    row1 = np.array([float((g22 * u - g12 * v) / det) for u, v in zip(cols[0], cols[1])])
    row2 = np.array([float((g11 * v - g12 * u) / det) for u, v in zip(cols[0], cols[1])])
    return row1, row2, float(det), rel_det


def reconstruction_weights(mix: MixtureCoefficients, priors: Priors) -> ReconstructionWeights:
    """Least-squares left inverse ``(M^T M)^{-1} M^T`` of the stacked mixture system.

    Singularity is judged on the relative normal determinant
    ``det(M^T M) / (|m_1|^2 |m_2|^2)``.
    """
    m = mix.matrix(priors)
    row1, row2, det, rel_det = _exact_left_inverse(m)
    if not rel_det > DET_RTOL:
        raise SingularMixture(
            f"mixture matrix is rank deficient (relative normal determinant {rel_det:.3e})"
        )
    n = mix.n
    gram = m.T @ m
    return ReconstructionWeights(
        c1=row1[:n].copy(),
        c2=row2[:n].copy(),
        d1=float(row1[n]),
        d2=float(row2[n]),
        conditioning=_singular_values(gram, math.sqrt(det))[1],
        det=det,
    )


def comp_closed_weights(priors: Priors, n: int) -> ReconstructionWeights:
    """Comparison-tuple weights written out through the three normal-equation sums.

    The sums ``g1 = sum a^2 + tau_+^2``, ``g2 = sum a b + tau_+ tau_-`` and
    ``g3 = sum b^2 + tau_-^2`` are formed exactly, like the generic solver.
    """
    mix = mixture_closed_form(Kind.COMP, n, priors)
    a = [Fraction(float(v)) for v in mix.alpha]
    b = [Fraction(float(v)) for v in mix.beta]
    tp, tm = Fraction(priors.tau_plus), Fraction(priors.tau_minus)
    g1 = sum(v * v for v in a) + tp * tp
    g2 = sum(u * v for u, v in zip(a, b)) + tp * tm
    g3 = sum(v * v for v in b) + tm * tm
    det = g1 * g3 - g2 * g2
    if not det > DET_RTOL * g1 * g3:
        raise SingularMixture(f"comparison mixture is rank deficient (determinant {float(det):.3e})")
    gram = np.array([[float(g1), float(g2)], [float(g2), float(g3)]])
    return ReconstructionWeights(
        c1=np.array([float((u * g3 - v * g2) / det) for u, v in zip(a, b)]),
        c2=np.array([float((v * g1 - u * g2) / det) for u, v in zip(a, b)]),
        d1=float((tp * g3 - tm * g2) / det),
        d2=float((tm * g1 - tp * g2) / det),
        conditioning=_singular_values(gram, math.sqrt(det))[1],
        det=float(det),
    )


def symmetric_weights(mix: MixtureCoefficients, priors: Priors, tol: float = DENOM_TOL) -> SymmetricWeights:
    if not mix.is_symmetric:
        raise AsymmetricInput("symmetric weights need identical mixture rows")
    a, b = float(mix.alpha[0]), float(mix.beta[0])
    tp, tm = priors.tau_plus, priors.tau_minus
    # the difference cancels near the singular boundary; form it exactly
    exact = Fraction(a) * Fraction(tm) - Fraction(b) * Fraction(tp)
    denom = float(exact)
    if abs(denom) < tol:
        raise SingularMixture(
            f"alpha*tau_- - beta*tau_+ = {denom:.3e}; tuples carry no class information"
        )
    return SymmetricWeights(
        tuple_multiplier=float(Fraction(tp) * Fraction(tm) / exact),
        u_pos=float(-Fraction(b) * Fraction(tp) / exact),
        u_neg=float(Fraction(a) * Fraction(tm) / exact),
        denom=denom,
        n=mix.n,
        alpha=a,
        beta=b,
    )


def identity_residuals(weights: ReconstructionWeights, mix: MixtureCoefficients, priors: Priors) -> dict:
    """Largest violations of ``L M = I`` and of the unit row sums ``L 1 = 1``."""
    left = weights.left_inverse()
    product = left @ mix.matrix(priors)
    row_sums = np.array([fsum(left[0]), fsum(left[1])])
    return {
        "left_inverse": float(np.max(np.abs(product - np.eye(2)))),
        "row_sum": float(np.max(np.abs(row_sums - 1.0))),
    }
