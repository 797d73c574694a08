"""Acceptance gate: one group of tests per criterion, summarised by conftest.py."""

import json
import math
import time
import zlib

import numpy as np
import pytest

from ntuple_erm.cli import main
from ntuple_erm.coefficients import (
    Priors,
    comp_closed_weights,
    identity_residuals,
    mixture_closed_form,
    mixture_from_enumeration,
    reconstruction_weights,
    symmetric_weights,
)
from ntuple_erm.data import (
    DataModel,
    child_rngs,
    rejection_sample_tuples,
    sample_labeled,
    sample_tuples,
    sample_unlabeled,
)
from ntuple_erm.errors import SingularMixture
from ntuple_erm.evaluation import (
    accuracy,
    bound_inputs_for,
    error_bound,
    excess_risk_curve,
    labeled_pool_of,
    scenario_weights,
    supervised_baseline,
    unbiasedness_report,
)
from ntuple_erm.risk import CorrectionSpec, empirical_risk_general, empirical_risk_symmetric
from ntuple_erm.scenario import ScenarioSpec
from ntuple_erm.train import Model, TrainConfig, forward, init_model, risk_and_gradient, train

NAMED = ["comp", "sim", "mix", "notallneg"]
SYMMETRIC = ["sim", "mix", "notallneg"]
NS = range(2, 11)
TAUS = [round(0.05 * k, 2) for k in range(1, 20)]
LOSSES = ["sigmoid", "logistic", "double_hinge"]


def general_or_none(kind, n, tau):
    priors = Priors(tau)
    mix = mixture_closed_form(kind, n, priors)
    try:
        return mix, reconstruction_weights(mix, priors)
    except SingularMixture:
        return mix, None


# ----------------------------------------------------------- criterion 1


@pytest.mark.criterion(1, "closed-form coefficients match enumeration; identities hold")
def test_coefficient_oracle_equivalence():
    start = time.perf_counter()
    checked = singular = 0
    for kind in NAMED:
        for n in NS:
            spec = ScenarioSpec.named(kind, n)
            for tau in TAUS:
                priors = Priors(tau)
                closed = mixture_closed_form(kind, n, priors)
                enum = mixture_from_enumeration(spec, priors)
                np.testing.assert_allclose(closed.alpha, enum.alpha, rtol=0, atol=1e-12)
                np.testing.assert_allclose(closed.beta, enum.beta, rtol=0, atol=1e-12)
                try:
                    w = reconstruction_weights(closed, priors)
                except SingularMixture:
                    singular += 1
                    continue
                res = identity_residuals(w, closed, priors)
                assert res["left_inverse"] <= 1e-10 and res["row_sum"] <= 1e-10, (kind, n, tau, res)
                checked += 1
    elapsed = time.perf_counter() - start
    print(f"criterion 1: {checked} configurations checked, {singular} singular skipped, {elapsed:.2f} s")
    assert checked > 0
    assert elapsed < 5


# ----------------------------------------------------------- criterion 2


@pytest.mark.criterion(2, "comparison-form closed weights equal least-squares weights")
def test_comp_gamma_form_equals_least_squares():
    worst = 0.0
    for n in NS:
        for tau in TAUS:
            priors = Priors(tau)
            generic = reconstruction_weights(mixture_closed_form("comp", n, priors), priors)
            closed = comp_closed_weights(priors, n)
            worst = max(worst, float(np.max(np.abs(closed.left_inverse() - generic.left_inverse()))))
    print(f"criterion 2: max abs difference {worst:.2e}")
    assert worst <= 1e-12


# ----------------------------------------------------------- criterion 3


@pytest.mark.criterion(3, "symmetric and general risk forms agree")
@pytest.mark.parametrize("kind", SYMMETRIC)
def test_symmetric_and_general_forms_agree(kind):
    rng = np.random.default_rng(zlib.crc32(kind.encode()))
    worst, configs = 0.0, 0
    for n in NS:
        for tau in TAUS:
            priors = Priors(tau)
            mix, w = general_or_none(kind, n, tau)
            if w is None:
                continue
            sym = symmetric_weights(mix, priors)
            configs += 1
            loss_kind = LOSSES[configs % 3]
            for _ in range(100):
                z = rng.normal(scale=2.0, size=(6, n))
                u = rng.normal(scale=2.0, size=5)
                a = empirical_risk_general(w, priors, z, u, loss_kind).raw_total
                b = empirical_risk_symmetric(sym, z.ravel(), u, loss_kind).raw_total
                worst = max(worst, abs(a - b))
    print(f"criterion 3 [{kind}]: {configs} configurations x 100 matrices, max difference {worst:.2e}")
    assert worst <= 1e-10


# ----------------------------------------------------------- criterion 4


@pytest.mark.criterion(4, "all-zero scores give the loss at zero")
@pytest.mark.parametrize("loss_kind, value", [("sigmoid", 0.5), ("double_hinge", 0.5), ("logistic", math.log(2))])
def test_constant_loss_identity(loss_kind, value):
    worst = 0.0
    for kind in NAMED:
        for n in NS:
            for tau in TAUS:
                priors = Priors(tau)
                mix, w = general_or_none(kind, n, tau)
                if w is None:
                    continue
                worst = max(worst, abs(empirical_risk_general(w, priors, np.zeros((5, n)), np.zeros(3),
                                                              loss_kind).raw_total - value))
                if kind != "comp":
                    sym = symmetric_weights(mix, priors)
                    worst = max(worst, abs(empirical_risk_symmetric(sym, np.zeros(5 * n), np.zeros(3),
                                                                    loss_kind).raw_total - value))
    print(f"criterion 4 [{loss_kind}]: max deviation {worst:.2e}")
    assert worst <= 1e-12


# ----------------------------------------------------------- criterion 5

_UNBIASED_START = []


@pytest.mark.criterion(5, "weak risk is unbiased for the supervised risk")
@pytest.mark.parametrize("kind", NAMED)
@pytest.mark.parametrize("tau", [0.2, 0.6, 0.8])
def test_unbiasedness(kind, tau):
    if not _UNBIASED_START:
        _UNBIASED_START.append(time.perf_counter())
    spec = ScenarioSpec.named(kind, 3)
    dm = DataModel.symmetric([1.0], 1.0, tau)
    try:
        scenario_weights(spec, dm.priors)
    except SingularMixture:
        pytest.skip("singular scenario/prior pair")
    g = Model("linear", 1, params=np.array([0.8, 0.1]))
    rep = unbiasedness_report(g, spec, dm, 10_000, 10_000, repeats=50, seed=zlib.crc32(f"{kind}{tau}".encode()))
    print(f"criterion 5 [{kind}, tau={tau}]: weak {rep.mean_weak_risk:.5f} +- {rep.weak_std_error:.5f}, "
          f"supervised {rep.supervised_risk:.5f} +- {rep.supervised_std_error:.5f}, z = {rep.z_score:.2f}")
    assert rep.z_score <= 3
    assert time.perf_counter() - _UNBIASED_START[0] < 120


# ----------------------------------------------------------- criterion 6


def within_4_sigma(rate, p, count):
    return abs(rate - p) <= 4 * math.sqrt(p * (1 - p) / count)


@pytest.mark.criterion(6, "sampler matches mixture coefficients and acceptance rate")
@pytest.mark.parametrize("kind, tau", [("comp", 0.6), ("notallneg", 0.3)])
def test_sampler_fidelity(kind, tau):
    spec, count = ScenarioSpec.named(kind, 3), 100_000
    priors = Priors(tau)
    dm = DataModel.symmetric([1.0], 1.0, tau)
    data = sample_tuples(dm, spec, count, np.random.default_rng(zlib.crc32(kind.encode())))
    alpha = mixture_closed_form(kind, 3, priors).alpha
    rates = np.mean(data.hidden_labels == 1, axis=0)
    print(f"criterion 6 [{kind}]: position rates {np.round(rates, 4)} vs alpha {np.round(alpha, 4)}")
    for j in range(3):
        assert within_4_sigma(rates[j], alpha[j], count)

    z = mixture_from_enumeration(spec, priors).z
    accepted = 20_000
    _, attempts = rejection_sample_tuples(dm, spec, accepted, np.random.default_rng(1))
    rate = accepted / attempts
    sd = math.sqrt(z * z * (1 - z) / accepted)
    print(f"criterion 6 [{kind}]: acceptance rate {rate:.4f} vs Z {z:.4f} (sd {sd:.4f})")
    assert abs(rate - z) <= 4 * sd


# ----------------------------------------------------------- criterion 7


def _near_kink(model, points, loss_kind, raw, margin=1e-3):
    if abs(raw) < margin:
        return True
    z = forward(model, points)
    if loss_kind == "double_hinge" and np.any(np.abs(np.abs(z) - 1) < margin):
        return True
    if model.arch == "mlp":
        w1, b1, _, _ = model.unpack()
        if np.any(np.abs(points @ w1.T + b1) < margin):
            return True
    return False


@pytest.mark.criterion(7, "analytic gradients match central differences")
@pytest.mark.parametrize("kind, tau", [("comp", 0.6), ("sim", 0.7), ("mix", 0.8), ("notallneg", 0.3)])
@pytest.mark.parametrize("arch", ["linear", "mlp"])
@pytest.mark.parametrize("loss_kind", LOSSES)
@pytest.mark.parametrize("corr", ["none", "relu", "abs"])
def test_gradient_correctness(kind, tau, arch, loss_kind, corr):
    spec = ScenarioSpec.named(kind, 3)
    dm = DataModel.symmetric([1.5, 1.5], 1.0, tau)
    weights = scenario_weights(spec, dm.priors)
    correction = CorrectionSpec(corr)
    rng = np.random.default_rng(zlib.crc32(f"acc/{kind}/{arch}/{loss_kind}/{corr}".encode()))
    h, worst, checked = 1e-4, 0.0, 0
    while checked < 10:
        m = init_model(arch, 2, 8, rng)
        tb = sample_tuples(dm, spec, 8, rng).tuples
        ub = sample_unlabeled(dm, 8, rng).points
        rep, grad = risk_and_gradient(m, tb, ub, weights, dm.priors, loss_kind, correction)
        # a difference of width h straddling a kink measures a one-sided slope, not a bug
        if _near_kink(m, np.concatenate([tb.reshape(-1, 2), ub]), loss_kind, rep.raw_total):
            continue
        fd = np.zeros(m.n_params)
        for i in range(m.n_params):
            up, dn = m.copy(), m.copy()
            up.params[i] += h
            dn.params[i] -= h
            fd[i] = (risk_and_gradient(up, tb, ub, weights, dm.priors, loss_kind, correction)[0].corrected_total
                     - risk_and_gradient(dn, tb, ub, weights, dm.priors, loss_kind, correction)[0].corrected_total
                     ) / (2 * h)
        scale = max(np.linalg.norm(fd), np.linalg.norm(grad))
        # relu clips a negative batch risk: both gradients are then exactly zero
        worst = max(worst, np.linalg.norm(grad - fd) / scale if scale > 0 else 0.0)
        checked += 1
    assert worst <= 1e-5


# ----------------------------------------------------------- criterion 8

_E2E_START = []


@pytest.mark.criterion(8, "end-to-end accuracy within 3 points of the supervised oracle")
@pytest.mark.parametrize("kind", NAMED)
def test_end_to_end_learning(kind):
    if not _E2E_START:
        _E2E_START.append(time.perf_counter())
    spec = ScenarioSpec.named(kind, 3)
    dm = DataModel.symmetric([1.5, 1.5], 1.0, 0.3)
    weights = scenario_weights(spec, dm.priors)
    gaps, accs, oracles = [], [], []
    for seed in range(5):
        r_t, r_u, r_test, r_train = child_rngs(seed)
        tuples = sample_tuples(dm, spec, 2000, r_t)
        unl = sample_unlabeled(dm, 2000, r_u)
        test = sample_labeled(dm, 10_000, r_test)
        res = train(init_model("linear", 2, rng=r_train), tuples, unl, weights, dm.priors,
                    TrainConfig(loss="sigmoid", correction="abs", epochs=50, learning_rate=0.05, seed=seed))
        pool = labeled_pool_of(tuples, unl)
        oracle = supervised_baseline(pool.points, pool.labels, test.points, test.labels, seed=seed)
        acc = accuracy(res.model, test.points, test.labels)
        accs.append(acc)
        oracles.append(oracle)
        gaps.append(oracle - acc)
    print(f"criterion 8 [{kind}]: median accuracy {np.median(accs):.4f}, oracle {np.median(oracles):.4f}, "
          f"median gap {np.median(gaps):.4f}")
    assert np.median(gaps) <= 0.03
    assert time.perf_counter() - _E2E_START[0] < 300


# ----------------------------------------------------------- criterion 9


def _jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


@pytest.mark.criterion(9, "risk correction keeps training risk non-negative")
def test_correction_behaviour(tmp_path):
    assert main(["train", "--config", "correction_demo", "--out", str(tmp_path)]) == 0
    none_steps, none_epochs = _jsonl(tmp_path / "metrics_none.jsonl"), _jsonl(tmp_path / "epochs_none.jsonl")
    abs_steps, abs_epochs = _jsonl(tmp_path / "metrics_abs.jsonl"), _jsonl(tmp_path / "epochs_abs.jsonl")
    low = min(e["raw"] for e in none_epochs)
    floor = min(s["corrected"] for s in abs_steps)
    print(f"criterion 9: uncorrected full-data raw risk reaches {low:.4f}; "
          f"abs-corrected minimum over {len(abs_steps)} steps {floor:.2e}")
    assert none_steps and abs_epochs
    assert low < -0.05
    assert floor >= 0


# ---------------------------------------------------------- criterion 10


@pytest.mark.criterion(10, "excess risk shrinks with sample size; bound scales by 1/sqrt(2)")
@pytest.mark.parametrize("kind", NAMED)
def test_convergence_trend(kind):
    spec = ScenarioSpec.named(kind, 3)
    dm = DataModel.symmetric([1.5, 1.5], 1.0, 0.3)
    # a large shared test set per seed: at this separation the n=100 excess risk is
    # only a few test-set standard errors above zero when n_test is 10^4
    rows = excess_risk_curve(spec, dm, [100, 1000, 10_000], [0, 1, 2, 3, 4],
                             TrainConfig(loss="sigmoid", correction="abs", epochs=50), n_test=100_000)
    print(f"criterion 10 [{kind}]: median excess risk "
          + ", ".join(f"n={r.n}: {r.median_excess_risk:.4f}" for r in rows))
    assert rows[-1].median_excess_risk <= rows[0].median_excess_risk

    priors = dm.priors
    w = scenario_weights(spec, priors)
    for n in (100, 1000, 10_000):
        one = error_bound(bound_inputs_for("sigmoid", 1.0, 0.05, n, n, 3), w, priors)
        two = error_bound(bound_inputs_for("sigmoid", 1.0, 0.05, 2 * n, 2 * n, 3), w, priors)
        assert abs(two * math.sqrt(2) / one - 1) <= 1e-12


# ---------------------------------------------------------- criterion 11

COMMANDS = {
    "verify-coeffs": ["verify-coeffs", "--n-max", "4"],
    "gen": ["gen", "--tuples", "50", "--unlabeled", "50", "--test", "50"],
    "train": ["train", "--tuples", "200", "--unlabeled", "200", "--test", "500", "--epochs", "3",
              "--arch", "mlp", "--hidden", "6", "--compare-corrections", "none,abs"],
    "unbiasedness": ["unbiasedness", "--n-b", "300", "--n-u", "300", "--repeats", "10",
                     "--supervised-size", "5000"],
    "bounds": ["bounds"],
    "curve": ["curve", "--sizes", "50,100,200", "--seeds", "0,1,2", "--epochs", "2", "--test", "500"],
}


def _snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.mark.criterion(11, "repeated commands are byte-identical")
@pytest.mark.parametrize("command", list(COMMANDS) + ["eval"])
def test_determinism(command, tmp_path, capsys):
    snaps = []
    for run in ("a", "b"):
        out = tmp_path / run
        if command == "eval":
            assert main(COMMANDS["train"][:-2] + ["--seed", "5", "--out", str(out)]) == 0
        assert main([*COMMANDS.get(command, ["eval"]), "--seed", "5", "--out", str(out)]) == 0
        snaps.append(_snapshot(out))
    assert snaps[0].keys() == snaps[1].keys() and snaps[0]
    differing = [name for name in snaps[0] if snaps[0][name] != snaps[1][name]]
    assert not differing, differing
