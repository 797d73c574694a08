"""Command-line entry point: ``ntuple-erm <command> [options]``.

Commands
--------
verify-coeffs  closed-form vs enumerated mixture coefficients and left-inverse checks (CSV)
gen            sample tuples, unlabeled points and a labeled test set (CSV)
train          fit a model on tuples + unlabeled points (checkpoint JSON, metrics JSON-lines)
eval           test accuracy of a checkpoint next to a supervised logistic-regression oracle
unbiasedness   Monte-Carlo check that the weak risk of a fixed model matches its supervised risk
bounds         estimation-error bound values for a range of sample sizes (CSV)
curve          median excess zero-one risk over seeds for several sample sizes (CSV)

Settings come from flags and from an optional JSON file given with
``--config``; flags win.  ``--config`` also accepts the name of a bundled
config (``sim_synthetic``, ``correction_demo``) or a manifest written by an
earlier run.  Every command that writes to ``--out`` also writes
``manifest_<command>.json`` holding the version, the seed and every
resolved setting, so the run can be repeated with ``--config`` on it.

Exit status: 0 success, 1 runtime failure (a JSON error record is printed
on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .coefficients import (
    Priors,
    identity_residuals,
    mixture_closed_form,
    mixture_from_enumeration,
    reconstruction_weights,
)
from .data import (
    DataModel,
    child_rngs,
    load_csv,
    load_tuples,
    load_unlabeled,
    sample_labeled,
    sample_tuples,
    sample_unlabeled,
    save_points,
    save_tuples,
    save_unlabeled,
)
from .errors import NTupleError, SingularMixture
from .evaluation import (
    accuracy,
    bayes_risk,
    bound_inputs_for,
    error_bound,
    excess_risk_curve,
    labeled_pool_of,
    scenario_weights,
    supervised_baseline,
    unbiasedness_report,
)
from .losses import LossKind
from .risk import CorrectionSpec
from .scenario import MAX_ENUMERATION_N, Kind, ScenarioSpec, load_subset_file
from .train import (
    TrainConfig,
    init_model,
    load_checkpoint,
    save_checkpoint,
    select_learning_rate,
    train,
)

NAMED_KINDS = ("comp", "sim", "mix", "notallneg")
VERIFY_COLUMNS = ["kind", "N", "tau_plus", "j", "alpha", "beta", "c1", "c2", "d1", "d2", "denom",
                  "max_identity_residual", "enum_residual", "status"]
ENUM_TOL = 1e-12
IDENTITY_TOL = 1e-10


class UsageError(Exception):
    """Bad flag combination or config content; exits with status 2."""


# ------------------------------------------------------------ formatting


def _num(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _num(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _write_jsonl(path: Path, records) -> None:
    path.write_text("".join(_json(r) + "\n" for r in records), encoding="utf-8")


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(float(v)) for v in str(text).split(",") if v.strip()]


def _str_list(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(v) for v in text]
    return [v.strip() for v in str(text).split(",") if v.strip()]


# ------------------------------------------------------------- arguments


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("global")
    g.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    g.add_argument("--out", default=None, help="output directory")
    g.add_argument("--config", default=None,
                   help="JSON config file, manifest, or bundled config name; flags override it")


def _scenario_args(parser) -> None:
    g = parser.add_argument_group("scenario")
    g.add_argument("--scenario", default="sim", help="comp, sim, mix or notallneg (default sim)")
    g.add_argument("--n", type=int, default=3, help="tuple size N (default 3)")
    g.add_argument("--tau", type=float, default=0.7, help="class prior tau_+ (default 0.7)")
    g.add_argument("--subset-file", default=None,
                   help="custom label subset: header 'N=<int>' then one vector per line")


def _data_args(parser, dim=2, offset=1.5) -> None:
    g = parser.add_argument_group("data model (Gaussians at +offset and -offset in every coordinate)")
    g.add_argument("--dim", type=int, default=dim, help=f"feature dimension (default {dim})")
    g.add_argument("--offset", type=float, default=offset, help=f"per-coordinate class mean offset (default {offset})")
    g.add_argument("--stdev", type=float, default=1.0, help="per-coordinate standard deviation (default 1)")


def _size_args(parser) -> None:
    g = parser.add_argument_group("sample sizes")
    g.add_argument("--tuples", type=int, default=2000, help="number of tuples n_b (default 2000)")
    g.add_argument("--unlabeled", type=int, default=2000, help="number of unlabeled points n_u (default 2000)")
    g.add_argument("--test", type=int, default=10000, help="labeled test points (default 10000)")


def _train_args(parser) -> None:
    g = parser.add_argument_group("training")
    g.add_argument("--arch", choices=("linear", "mlp"), default="linear")
    g.add_argument("--hidden", type=int, default=32, help="hidden units for mlp (default 32)")
    g.add_argument("--loss", default="sigmoid", help="sigmoid, logistic or double_hinge")
    g.add_argument("--correction", default="abs", help="none, relu, abs or generalized (default abs)")
    g.add_argument("--k", type=float, default=1.0, help="slope of the generalized correction")
    g.add_argument("--lr", type=float, default=0.05, help="learning rate (default 0.05)")
    g.add_argument("--epochs", type=int, default=50)
    g.add_argument("--batch-tuples", type=int, default=128)
    g.add_argument("--batch-unlabeled", type=int, default=128)
    g.add_argument("--weight-decay", type=float, default=0.0)
    g.add_argument("--momentum", type=float, default=0.9)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ntuple-erm",
        description="Learning from N-tuples with constrained labels plus unlabeled data.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Exit status: 0 success, 1 runtime failure, 2 usage error.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = sub.add_parser("verify-coeffs", help="check closed-form coefficients and reconstruction weights",
                       description="Print a CSV with columns: " + ", ".join(VERIFY_COLUMNS) + ". "
                       "status is OK, FAIL, SINGULAR (excluded from pass/fail) or ENUM_TOO_LARGE "
                       "(no enumeration oracle; closed forms still printed).")
    _common(p)
    p.add_argument("--kinds", default=",".join(NAMED_KINDS), help="comma-separated scenario kinds")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--taus", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--subset-file", default=None, help="also check a custom subset at every tau")

    p = sub.add_parser("gen", help="sample a synthetic dataset",
                       description="Writes tuples.csv, unlabeled.csv and test.csv (hidden labels in "
                       "*.hidden.csv sidecars) plus manifest_gen.json.")
    _common(p)
    _scenario_args(p)
    _data_args(p)
    _size_args(p)

    p = sub.add_parser("train", help="train on tuples and unlabeled points",
                       description="Writes checkpoint.json, metrics.jsonl (one record per step: "
                       "step, tuple_term, unlabeled_term, raw, corrected), epochs.jsonl (the same "
                       "fields on the full training set after each epoch) and manifest_train.json. "
                       "With --compare-corrections each file name gets a _<correction> suffix.")
    _common(p)
    _scenario_args(p)
    _data_args(p)
    _size_args(p)
    _train_args(p)
    p.add_argument("--data-dir", default=None, help="read tuples.csv / unlabeled.csv written by gen")
    p.add_argument("--select-lr", action="store_true",
                   help="pick the learning rate from 1e-6..1e-1 by held-out weak risk")
    p.add_argument("--compare-corrections", default=None,
                   help="comma-separated corrections to train side by side from the same start")

    p = sub.add_parser("eval", help="evaluate a checkpoint",
                       description="Writes eval.json and eval.csv with columns: accuracy, "
                       "supervised_accuracy, zero_one_risk, bayes_risk, n_test.  The data settings "
                       "are taken from the checkpoint unless given here.")
    _common(p)
    p.add_argument("--checkpoint", default=None, help="default: <out>/checkpoint.json")
    p.add_argument("--test-file", default=None, help="labeled CSV to evaluate on")

    p = sub.add_parser("unbiasedness", help="Monte-Carlo unbiasedness check for a fixed model",
                       description="Writes unbiasedness.json with mean_weak_risk, weak_std_error, "
                       "supervised_risk, supervised_std_error, difference, z_score, repeats.")
    _common(p)
    _scenario_args(p)
    _data_args(p, dim=1, offset=1.0)
    p.add_argument("--weights", default="0.8", help="linear model weights, comma-separated")
    p.add_argument("--bias", type=float, default=0.1)
    p.add_argument("--checkpoint", default=None, help="use a trained model instead")
    p.add_argument("--loss", default="sigmoid")
    p.add_argument("--n-b", type=int, default=10000)
    p.add_argument("--n-u", type=int, default=10000)
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--supervised-size", type=int, default=1_000_000)

    p = sub.add_parser("bounds", help="estimation-error bound values",
                       description="Writes bounds.csv with columns: n_b, n_u, bound.")
    _common(p)
    _scenario_args(p)
    p.add_argument("--loss", default="sigmoid")
    p.add_argument("--c-g", type=float, default=1.0, help="uniform bound on |g|")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--sizes", default="100,200,400,800,1600,3200,6400,12800",
                   help="n_b = n_u values")

    p = sub.add_parser("curve", help="excess zero-one risk versus sample size",
                       description="Writes curve.csv with columns: n, median_excess_risk, bayes_risk, "
                       "and one test_error_seed<k> column per seed.")
    _common(p)
    _scenario_args(p)
    _data_args(p)
    _train_args(p)
    p.add_argument("--sizes", default="100,1000,10000")
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--test", type=int, default=10000)
    return parser


# ---------------------------------------------------------------- config


def _config_dict(ref: str) -> dict:
    path = Path(ref)
    if not path.exists():
        try:
            text = resources.files("ntuple_erm").joinpath("configs", f"{Path(ref).stem}.json").read_text(
                encoding="utf-8")
        except (FileNotFoundError, OSError):
            raise UsageError(f"config {ref!r} is neither a file nor a bundled config") from None
    else:
        text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {ref!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    if "command" in data and isinstance(data.get("config"), dict):
        data = data["config"]
    return data


def parse_args(argv, parser=None) -> argparse.Namespace:
    parser = parser or build_parser()
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    config = _config_dict(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in subparser._actions}
    for key in config:
        if key.replace("-", "_") not in known:
            subparser.error(f"config key {key!r} is not a setting of '{args.command}'")
    subparser.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()
                              if k not in ("config", "command")})
    return parser.parse_args(argv)


def _settings(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "config", "out")}


def _out_dir(args, required=True) -> Path | None:
    if args.out is None:
        if required:
            raise UsageError(f"'{args.command}' needs --out")
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, args, extra=None) -> None:
    record = {
        "command": args.command,
        "version": __version__,
        "seed": args.seed,
        "config": _settings(args),
    }
    if extra:
        record.update(extra)
    (out / f"manifest_{args.command.replace('-', '_')}.json").write_text(
        json.dumps(record, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _scenario(args) -> ScenarioSpec:
    if args.subset_file:
        return load_subset_file(args.subset_file)
    return ScenarioSpec.named(Kind.parse(args.scenario), args.n)


def _data_model(args) -> DataModel:
    if args.dim < 1:
        raise UsageError("--dim must be at least 1")
    return DataModel.symmetric(np.full(args.dim, args.offset), args.stdev, args.tau)


def _train_config(args, correction=None) -> TrainConfig:
    corr = correction if correction is not None else args.correction
    return TrainConfig(
        loss=args.loss,
        correction=CorrectionSpec.parse(corr, args.k),
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_tuples=args.batch_tuples,
        batch_unlabeled=args.batch_unlabeled,
        weight_decay=args.weight_decay,
        momentum=args.momentum,
        seed=args.seed,
    )


def _datasets(args, spec, dm):
    """Tuples, unlabeled points and a test set; regenerated from the seed or read from ``--data-dir``."""
    r_tuples, r_unl, r_test, _ = child_rngs(args.seed)
    data_dir = getattr(args, "data_dir", None)
    if data_dir:
        d = Path(data_dir)
        tuples = load_tuples(d / "tuples.csv", spec)
        unl = load_unlabeled(d / "unlabeled.csv")
        test = load_csv(d / "test.csv") if (d / "test.csv").exists() else None
        return tuples, unl, test
    tuples = sample_tuples(dm, spec, args.tuples, r_tuples)
    unl = sample_unlabeled(dm, args.unlabeled, r_unl)
    test = sample_labeled(dm, args.test, r_test) if args.test > 0 else None
    return tuples, unl, test


# -------------------------------------------------------------- commands


def _verify_rows(spec: ScenarioSpec, kind_label: str, tau: float):
    priors = Priors(tau)
    n = spec.n
    if spec.kind is Kind.CUSTOM:
        mix = mixture_from_enumeration(spec, priors)
        enum_res = float("nan")
    else:
        mix = mixture_closed_form(spec.kind, n, priors)
        if n <= MAX_ENUMERATION_N:
            ref = mixture_from_enumeration(spec, priors)
            enum_res = float(max(np.max(np.abs(mix.alpha - ref.alpha)), np.max(np.abs(mix.beta - ref.beta))))
        else:
            enum_res = None
    tp, tm = priors.tau_plus, priors.tau_minus
    nan = float("nan")
    try:
        w = reconstruction_weights(mix, priors)
        res = identity_residuals(w, mix, priors)
        ident = max(res.values())
        c1, c2, d1, d2 = w.c1, w.c2, w.d1, w.d2
        denom = w.det
        status = "OK"
    except SingularMixture:
        c1 = c2 = np.full(n, nan)
        d1 = d2 = ident = nan
        denom = nan
        status = "SINGULAR"
    if mix.is_symmetric and spec.kind is not Kind.COMP:
        denom = float(mix.alpha[0] * tm - mix.beta[0] * tp)
    if enum_res is None:
        status = "ENUM_TOO_LARGE" if status == "OK" else status
        enum_cell = "nan"
    else:
        enum_cell = enum_res
        if status == "OK" and (enum_res > ENUM_TOL or ident > IDENTITY_TOL):
            status = "FAIL"
        elif status == "SINGULAR" and enum_res > ENUM_TOL:
            status = "FAIL"
    rows = []
    for j in range(n):
        rows.append([kind_label, n, tau, j + 1, mix.alpha[j], mix.beta[j], c1[j], c2[j], d1, d2, denom,
                     ident, enum_cell, status])
    return rows


def cmd_verify_coeffs(args) -> int:
    kinds = _str_list(args.kinds)
    taus = _float_list(args.taus)
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= --n-min <= --n-max")
    specs = []
    for kind in kinds:
        k = Kind.parse(kind)
        if k is Kind.CUSTOM:
            raise UsageError("use --subset-file for custom subsets")
        specs += [(ScenarioSpec.named(k, n), k.value) for n in range(args.n_min, args.n_max + 1)]
    if args.subset_file:
        specs.append((load_subset_file(args.subset_file), "custom"))
    rows = []
    for spec, label in specs:
        for tau in taus:
            rows += _verify_rows(spec, label, tau)
    text = _csv_text(VERIFY_COLUMNS, rows)
    sys.stdout.write(text)
    out = _out_dir(args, required=False)
    if out is not None:
        (out / "verify_coeffs.csv").write_text(text, encoding="utf-8")
        _write_manifest(out, args)
    failing = [r for r in rows if r[-1] == "FAIL"]
    if failing:
        sys.stderr.write("first failing row: " + _csv_text(VERIFY_COLUMNS, failing[:1]).splitlines()[1] + "\n")
        return 1
    return 0


def cmd_gen(args) -> int:
    out = _out_dir(args)
    spec = _scenario(args)
    dm = _data_model(args)
    tuples, unl, test = _datasets(args, spec, dm)
    save_tuples(out / "tuples.csv", tuples)
    save_unlabeled(out / "unlabeled.csv", unl)
    if test is not None:
        save_points(out / "test.csv", test.points, test.labels)
    _write_manifest(out, args, {"data_model": dm.to_dict()})
    return 0


def _run_training(args, spec, dm, tuples, unl, correction=None):
    priors = Priors(args.tau)
    weights = scenario_weights(spec, priors)
    _, _, _, r_train = child_rngs(args.seed)
    model = init_model(args.arch, tuples.dim, args.hidden if args.arch == "mlp" else 0, r_train)
    cfg = _train_config(args, correction)
    lr_scores = None
    if args.select_lr:
        best, lr_scores = select_learning_rate(model, tuples, unl, weights, priors, cfg)
        cfg = TrainConfig(**{**cfg.__dict__, "learning_rate": best})
    result = train(model, tuples, unl, weights, priors, cfg, track_epochs=True)
    return result, cfg, lr_scores


def cmd_train(args) -> int:
    out = _out_dir(args)
    spec = _scenario(args)
    dm = _data_model(args)
    tuples, unl, test = _datasets(args, spec, dm)
    settings = _settings(args)
    corrections = _str_list(args.compare_corrections) if args.compare_corrections else [None]
    summary = {}
    for corr in corrections:
        suffix = "" if corr is None else f"_{corr}"
        result, cfg, lr_scores = _run_training(args, spec, dm, tuples, unl, corr)
        _write_jsonl(out / f"metrics{suffix}.jsonl", [r.record(i) for i, r in enumerate(result.reports)])
        _write_jsonl(out / f"epochs{suffix}.jsonl", [r.record(i) for i, r in enumerate(result.epoch_reports)])
        save_checkpoint(out / f"checkpoint{suffix}.json", result.model, args.seed,
                        {**settings, "train": cfg.to_dict(), "correction": cfg.correction.kind.value})
        entry = {
            "final_raw": result.epoch_reports[-1].raw_total,
            "final_corrected": result.epoch_reports[-1].corrected_total,
            "min_step_raw": min(r.raw_total for r in result.reports),
            "min_epoch_raw": min(r.raw_total for r in result.epoch_reports),
            "learning_rate": cfg.learning_rate,
        }
        if lr_scores is not None:
            entry["lr_scores"] = {repr(k): v for k, v in lr_scores.items()}
        if test is not None and hasattr(test, "labels"):
            entry["test_accuracy"] = accuracy(result.model, test.points, test.labels)
        summary[corr or cfg.correction.kind.value] = entry
    (out / "train_summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n",
                                            encoding="utf-8")
    _write_manifest(out, args, {"data_model": dm.to_dict()})
    return 0


def cmd_eval(args) -> int:
    out = _out_dir(args)
    ckpt = Path(args.checkpoint) if args.checkpoint else out / "checkpoint.json"
    if not ckpt.exists():
        raise FileNotFoundError(f"checkpoint {ckpt} not found")
    model, record = load_checkpoint(ckpt)
    saved = argparse.Namespace(**{**record["config"], "seed": record["seed"], "command": "eval"})
    spec = _scenario(saved)
    dm = _data_model(saved)
    tuples, unl, test = _datasets(saved, spec, dm)
    if args.test_file:
        test = load_csv(args.test_file)
    if test is None or not hasattr(test, "labels"):
        raise ValueError("no labeled test set: give --test-file or train with --test > 0")
    acc = accuracy(model, test.points, test.labels)
    result = {"accuracy": acc, "zero_one_risk": 1.0 - acc, "n_test": len(test), "checkpoint": ckpt.name}
    try:
        pool = labeled_pool_of(tuples, unl)
        result["supervised_accuracy"] = supervised_baseline(pool.points, pool.labels, test.points,
                                                            test.labels, seed=saved.seed)
    except NTupleError:
        result["supervised_accuracy"] = None
    result["bayes_risk"] = None if getattr(saved, "data_dir", None) else bayes_risk(dm)
    (out / "eval.json").write_text(json.dumps(result, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    cols = ["accuracy", "supervised_accuracy", "zero_one_risk", "bayes_risk", "n_test"]
    (out / "eval.csv").write_text(
        _csv_text(cols, [["nan" if result[c] is None else result[c] for c in cols]]), encoding="utf-8")
    _write_manifest(out, args)
    sys.stdout.write(_json(result) + "\n")
    return 0


class _LinearScore:
    def __init__(self, w, b):
        self.w, self.b = np.asarray(w, dtype=float), float(b)

    def __call__(self, x):
        return x @ self.w + self.b


def cmd_unbiasedness(args) -> int:
    spec = _scenario(args)
    dm = _data_model(args)
    if args.checkpoint:
        model, _ = load_checkpoint(args.checkpoint)
    else:
        w = _float_list(args.weights)
        if len(w) != dm.dim:
            raise UsageError(f"--weights needs {dm.dim} values")
        model = _LinearScore(w, args.bias)
    report = unbiasedness_report(model, spec, dm, args.n_b, args.n_u, args.repeats, args.seed,
                                 LossKind.parse(args.loss), args.supervised_size)
    text = json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n"
    sys.stdout.write(text)
    out = _out_dir(args, required=False)
    if out is not None:
        (out / "unbiasedness.json").write_text(text, encoding="utf-8")
        _write_manifest(out, args)
    return 0


def cmd_bounds(args) -> int:
    spec = _scenario(args)
    priors = Priors(args.tau)
    weights = scenario_weights(spec, priors)
    rows = []
    for size in _int_list(args.sizes):
        inputs = bound_inputs_for(args.loss, args.c_g, args.delta, size, size, spec.n)
        rows.append([size, size, error_bound(inputs, weights, priors)])
    text = _csv_text(["n_b", "n_u", "bound"], rows)
    sys.stdout.write(text)
    out = _out_dir(args, required=False)
    if out is not None:
        (out / "bounds.csv").write_text(text, encoding="utf-8")
        _write_manifest(out, args)
    return 0


def cmd_curve(args) -> int:
    spec = _scenario(args)
    dm = _data_model(args)
    seeds = _int_list(args.seeds)
    rows = excess_risk_curve(spec, dm, _int_list(args.sizes), seeds, _train_config(args),
                             arch=args.arch, hidden=args.hidden if args.arch == "mlp" else 0,
                             n_test=args.test)
    header = ["n", "median_excess_risk", "bayes_risk"] + [f"test_error_seed{s}" for s in seeds]
    text = _csv_text(header, [[r.n, r.median_excess_risk, r.bayes_risk] + r.test_errors for r in rows])
    sys.stdout.write(text)
    out = _out_dir(args, required=False)
    if out is not None:
        (out / "curve.csv").write_text(text, encoding="utf-8")
        _write_manifest(out, args)
    return 0


COMMANDS = {
    "verify-coeffs": cmd_verify_coeffs,
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "unbiasedness": cmd_unbiasedness,
    "bounds": cmd_bounds,
    "curve": cmd_curve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parse_args(argv, parser)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return 2
    except (NTupleError, ValueError, OSError) as exc:
        sys.stderr.write(_json({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
