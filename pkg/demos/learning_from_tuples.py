"""
Learning a classifier from tuples alone
=======================================

Train a linear classifier for each scenario from 2000 triples and 2000
unlabeled points, then compare it with logistic regression fit on the labels
the weak learner never sees.  The last table shows the excess risk over the
Bayes classifier shrinking as the sample grows.
"""

import numpy as np

from ntuple_erm.data import DataModel, child_rngs, sample_labeled, sample_tuples, sample_unlabeled
from ntuple_erm.evaluation import (
    accuracy,
    bayes_risk,
    excess_risk_curve,
    labeled_pool_of,
    scenario_weights,
    supervised_baseline,
)
from ntuple_erm.scenario import ScenarioSpec
from ntuple_erm.train import TrainConfig, init_model, train

dm = DataModel.symmetric([1.5, 1.5], 1.0, 0.3)
cfg = TrainConfig(loss="sigmoid", correction="abs", epochs=50)
print(f"Bayes accuracy: {1 - bayes_risk(dm):.4f}\n")

print(f"{'scenario':10s} {'weak':>7s} {'supervised':>10s}")
for kind in ("comp", "sim", "mix", "notallneg"):
    spec = ScenarioSpec.named(kind, 3)
    r_tuples, r_unl, r_test, r_train = child_rngs(0)
    tuples = sample_tuples(dm, spec, 2000, r_tuples)
    unl = sample_unlabeled(dm, 2000, r_unl)
    test = sample_labeled(dm, 10_000, r_test)
    fitted = train(init_model("linear", 2, rng=r_train), tuples, unl,
                   scenario_weights(spec, dm.priors), dm.priors, cfg).model
    # the oracle gets the hidden labels of the very same points
    pool = labeled_pool_of(tuples, unl)
    oracle = supervised_baseline(pool.points, pool.labels, test.points, test.labels)
    print(f"{kind:10s} {accuracy(fitted, test.points, test.labels):7.4f} {oracle:10.4f}")

print("\nmedian excess zero-one risk over 3 seeds (Sim triples)")
rows = excess_risk_curve(ScenarioSpec.named("sim", 3), dm, [30, 300, 3000], [0, 1, 2], cfg,
                         n_test=50_000)
for r in rows:
    print(f"  n = {r.n:5d}: {r.median_excess_risk:.4f}  (errors {np.round(r.test_errors, 4)})")
