"""
Mixture coefficients and reconstruction weights
===============================================

Every tuple position sees a mixture of the two class-conditionals.  This
script prints the mixing proportions for the four named scenarios, checks them
against brute-force enumeration, and shows the weights that turn tuple and
unlabeled averages back into class-conditional averages.
"""

import numpy as np

from ntuple_erm.coefficients import (
    Priors,
    identity_residuals,
    mixture_closed_form,
    mixture_from_enumeration,
    reconstruction_weights,
    symmetric_weights,
)
from ntuple_erm.errors import SingularMixture
from ntuple_erm.scenario import ScenarioSpec, census_by_positives

np.set_printoptions(precision=4, suppress=True)

# The label subsets themselves: how many vectors with k positives each allows
for kind in ("comp", "sim", "mix", "notallneg"):
    spec = ScenarioSpec.named(kind, 4)
    print(f"{kind:9s} N=4  vectors by number of positives: {census_by_positives(spec)}")

# Pairs of similar items at tau_+ = 0.8: both positive with probability
# 0.64 / (0.64 + 0.04) = 16/17, so every position is 16/17 positive
priors = Priors(0.8)
sim = mixture_closed_form("sim", 2, priors)
print("\nsim pair alpha:", sim.alpha, " 16/17 =", 16 / 17)

# Comparison triples: position j is positive when at least j members are
comp = mixture_closed_form("comp", 3, Priors(0.4))
enum = mixture_from_enumeration(ScenarioSpec.named("comp", 3), Priors(0.4))
print("comp triple alpha (closed form):", comp.alpha)
print("comp triple alpha (enumeration):", enum.alpha)

# Reconstruction weights: the rows of a left inverse of the stacked system
w = reconstruction_weights(comp, Priors(0.4))
print("\nleft inverse of the comparison system:\n", w.left_inverse())
print("identity residuals:", identity_residuals(w, comp, Priors(0.4)))

# Permutation-invariant scenarios collapse to three numbers
sym = symmetric_weights(sim, priors)
print(f"\nsim pair: tuple multiplier {sym.tuple_multiplier:.4f} (17/15 = {17 / 15:.4f}), "
      f"unlabeled weights {sym.u_pos:.4f}, {sym.u_neg:.4f}")

# A negative multiplier is possible, and the weights can be singular
mix = symmetric_weights(mixture_closed_form("mix", 3, priors), priors)
print(f"mix triple at tau_+=0.8: tuple multiplier {mix.tuple_multiplier:.4f}")
try:
    symmetric_weights(mixture_closed_form("mix", 2, Priors(0.5)), Priors(0.5))
except SingularMixture as exc:
    print("mix pair at tau_+=0.5:", exc)

# How the multiplier grows as a scenario approaches its singular prior
print("\nNotAllNeg N=3 tuple multiplier by prior")
for tau in (0.1, 0.3, 0.5, 0.7, 0.8, 0.9):
    p = Priors(tau)
    try:
        m = symmetric_weights(mixture_closed_form("notallneg", 3, p), p).tuple_multiplier
        print(f"  tau_+={tau:.1f}: {m:10.4f}")
    except SingularMixture:
        print(f"  tau_+={tau:.1f}: singular")
