"""Synthetic data, tuple samplers and dataset files.

Tuples are generated the way the framework assumes they arise: draw a
label vector from the allowed subset with probability proportional to
``prod_k tau_{y_k}``, then draw each member from its class-conditional.
:func:`rejection_sample_tuples` produces the same distribution by drawing
i.i.d. labeled points and keeping only admissible label vectors; it exists
as a test oracle.

Hidden labels are diagnostics.  They ride along on the dataset objects in
their own field and are written to a separate sidecar file; training code
only ever reads ``tuples`` and ``points``.

Seeding: every generator takes a ``numpy.random.Generator``.  Command-line
runs derive those from one integer seed with :func:`child_rngs`, which
spawns independent streams from ``numpy.random.SeedSequence(seed)`` in a
fixed order (tuples, unlabeled, test, training).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coefficients import Priors
from .errors import (
    AcceptanceTooLow,
    DimensionMismatch,
    EmptyInput,
    MissingClass,
    ParseError,
    ShapeMismatch,
)
from .scenario import ScenarioSpec, contains_many, enumerate_labels

__all__ = [
    "STREAMS",
    "DataModel",
    "LabeledPool",
    "TupleDataset",
    "UnlabeledDataset",
    "build_tuples_from_labeled",
    "child_rngs",
    "label_vector_probabilities",
    "load_csv",
    "load_tuples",
    "load_unlabeled",
    "rejection_sample_tuples",
    "sample_label_vector",
    "sample_label_vectors",
    "sample_labeled",
    "sample_tuples",
    "sample_unlabeled",
    "save_points",
    "save_tuples",
    "save_unlabeled",
]

STREAMS = ("tuples", "unlabeled", "test", "train")


def child_rngs(seed: int, count: int = len(STREAMS)) -> list[np.random.Generator]:
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.default_rng(c) for c in children]


@dataclass(frozen=True)
class DataModel:
    """Two diagonal Gaussians with a shared per-dimension standard deviation."""

    mean_pos: np.ndarray
    mean_neg: np.ndarray
    stdev: np.ndarray
    priors: Priors

    def __post_init__(self):
        mp = np.atleast_1d(np.asarray(self.mean_pos, dtype=float))
        mn = np.atleast_1d(np.asarray(self.mean_neg, dtype=float))
        sd = np.broadcast_to(np.asarray(self.stdev, dtype=float), mp.shape).copy()
        if mp.shape != mn.shape or mp.ndim != 1:
            raise DimensionMismatch("class means must be vectors of equal length")
        if np.any(sd <= 0):
            raise ValueError("standard deviations must be positive")
        if np.array_equal(mp, mn):
            raise ValueError("class means must differ")
        object.__setattr__(self, "mean_pos", mp)
        object.__setattr__(self, "mean_neg", mn)
        object.__setattr__(self, "stdev", sd)

    @classmethod
    def symmetric(cls, offset, stdev, tau_plus: float) -> "DataModel":
        """Means at ``+offset`` and ``-offset``."""
        offset = np.atleast_1d(np.asarray(offset, dtype=float))
        return cls(offset, -offset, stdev, Priors(tau_plus))

    @property
    def dim(self) -> int:
        return self.mean_pos.shape[0]

    def draw(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One feature vector per entry of ``labels`` (any shape); appends a feature axis."""
        labels = np.asarray(labels)
        noise = rng.standard_normal(labels.shape + (self.dim,))
        means = np.where((labels == 1)[..., None], self.mean_pos, self.mean_neg)
        return means + self.stdev * noise

    def to_dict(self) -> dict:
        return {
            "mean_pos": self.mean_pos.tolist(),
            "mean_neg": self.mean_neg.tolist(),
            "stdev": self.stdev.tolist(),
            "tau_plus": self.priors.tau_plus,
        }


@dataclass
class TupleDataset:
    tuples: np.ndarray  # (n_b, N, d)
    scenario: ScenarioSpec
    hidden_labels: np.ndarray | None = field(default=None, repr=False)  # (n_b, N)

    def __post_init__(self):
        self.tuples = np.asarray(self.tuples, dtype=float)
        if self.tuples.ndim != 3 or self.tuples.shape[1] != self.scenario.n:
            raise ShapeMismatch(
                f"tuples must have shape (n_b, {self.scenario.n}, d), got {self.tuples.shape}"
            )
        if self.hidden_labels is not None:
            self.hidden_labels = np.asarray(self.hidden_labels, dtype=np.int8)
            if self.hidden_labels.shape != self.tuples.shape[:2]:
                raise ShapeMismatch("hidden labels must have shape (n_b, N)")
            if not np.all(contains_many(self.scenario, self.hidden_labels)):
                raise ValueError("a hidden label vector lies outside the scenario's label subset")

    @property
    def n(self) -> int:
        return self.tuples.shape[1]

    @property
    def dim(self) -> int:
        return self.tuples.shape[2]

    def __len__(self):
        return self.tuples.shape[0]


@dataclass
class UnlabeledDataset:
    points: np.ndarray  # (n_u, d)
    hidden_labels: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ShapeMismatch(f"points must be 2-D, got {self.points.shape}")
        if self.hidden_labels is not None:
            self.hidden_labels = np.asarray(self.hidden_labels, dtype=np.int8)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


@dataclass
class LabeledPool:
    points: np.ndarray  # (n, d)
    labels: np.ndarray  # (n,) in {-1, +1}

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int8)
        if self.points.ndim != 2 or self.labels.shape != (self.points.shape[0],):
            raise ShapeMismatch("labeled pool needs (n, d) points and n labels")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


def label_vector_probabilities(spec: ScenarioSpec, priors: Priors):
    """Canonical label vectors and their probabilities under the restricted prior product."""
    labels = enumerate_labels(spec)
    weights = np.prod(np.where(labels == 1, priors.tau_plus, priors.tau_minus), axis=1)
    return labels, weights / weights.sum()


def sample_label_vectors(spec: ScenarioSpec, priors: Priors, count: int,
                         rng: np.random.Generator) -> np.ndarray:
    """``count`` label vectors by inverse CDF over the canonical enumeration."""
    labels, probs = label_vector_probabilities(spec, priors)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(count), side="right")
    return labels[np.minimum(idx, len(labels) - 1)].copy()


def sample_label_vector(spec: ScenarioSpec, priors: Priors, rng: np.random.Generator) -> np.ndarray:
    return sample_label_vectors(spec, priors, 1, rng)[0]


def sample_tuples(model: DataModel, spec: ScenarioSpec, count: int,
                  rng: np.random.Generator) -> TupleDataset:
    if count < 1:
        raise ValueError("need at least one tuple")
    labels = sample_label_vectors(spec, model.priors, count, rng)
    return TupleDataset(model.draw(labels, rng), spec, labels)


def rejection_sample_tuples(model: DataModel, spec: ScenarioSpec, count: int,
                            rng: np.random.Generator, min_acceptance: float = 1e-6):
    """Draw ``N`` i.i.d. labeled points at a time and keep admissible tuples.

    Returns ``(dataset, attempts)`` where ``attempts`` counts every candidate
    tuple drawn, so ``count / attempts`` estimates the subset mass ``Z``.
    """
    labels_all = enumerate_labels(spec)
    z = float(np.sum(np.prod(np.where(labels_all == 1, model.priors.tau_plus,
                                      model.priors.tau_minus), axis=1)))
    if z < min_acceptance:
        raise AcceptanceTooLow(f"acceptance probability {z:.3e} is below {min_acceptance:.0e}")
    kept_x, kept_y = [], []
    have = attempts = 0
    while have < count:
        batch = max(64, int(1.2 * (count - have) / z) + 1)
        y = np.where(rng.random((batch, spec.n)) < model.priors.tau_plus, 1, -1).astype(np.int8)
        x = model.draw(y, rng)
        ok = contains_many(spec, y)
        # only count attempts up to the candidate that completes the dataset
        hits = np.flatnonzero(ok)
        need = count - have
        if hits.size >= need:
            last = hits[need - 1]
            attempts += last + 1
            ok[last + 1:] = False
        else:
            attempts += batch
        kept_x.append(x[ok])
        kept_y.append(y[ok])
        have += int(ok.sum())
    return TupleDataset(np.concatenate(kept_x), spec, np.concatenate(kept_y)), attempts


def sample_unlabeled(model: DataModel, count: int, rng: np.random.Generator) -> UnlabeledDataset:
    if count < 1:
        raise ValueError("need at least one unlabeled point")
    labels = np.where(rng.random(count) < model.priors.tau_plus, 1, -1).astype(np.int8)
    return UnlabeledDataset(model.draw(labels, rng), labels)


def sample_labeled(model: DataModel, count: int, rng: np.random.Generator) -> LabeledPool:
    """Fully labeled points from the joint distribution (test sets, supervised baselines)."""
    data = sample_unlabeled(model, count, rng)
    return LabeledPool(data.points, data.hidden_labels)


def build_tuples_from_labeled(pool: LabeledPool, spec: ScenarioSpec, priors: Priors, count: int,
                              rng: np.random.Generator) -> TupleDataset:
    """Assemble tuples from a labeled pool, sampling each member with replacement from its class."""
    pos = np.flatnonzero(pool.labels == 1)
    neg = np.flatnonzero(pool.labels == -1)
    if pos.size == 0 or neg.size == 0:
        raise MissingClass("the labeled pool must contain both classes")
    labels = sample_label_vectors(spec, priors, count, rng)
    picks = np.where(labels == 1,
                     pos[rng.integers(0, pos.size, labels.shape)],
                     neg[rng.integers(0, neg.size, labels.shape)])
    return TupleDataset(pool.points[picks], spec, labels)


# ---------------------------------------------------------------- file I/O

def _fmt(v: float) -> str:
    return repr(float(v))


def save_points(path, points, labels=None) -> None:
    """Point CSV: ``label,f0,...``; an empty label marks an unlabeled row."""
    points = np.asarray(points, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"f{i}" for i in range(points.shape[1])])
        for i, row in enumerate(points):
            lab = "" if labels is None else str(int(labels[i]))
            writer.writerow([lab] + [_fmt(v) for v in row])


def _read_rows(path, first_columns):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", 1) from None
        k = len(first_columns)
        if [h.strip() for h in header[:k]] != first_columns:
            raise ParseError(f"header must start with {','.join(first_columns)}", 1)
        features = header[k:]
        if features != [f"f{i}" for i in range(len(features))] or not features:
            raise ParseError("feature columns must be named f0, f1, ...", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DimensionMismatch(
                    f"line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                feats = [float(v) for v in row[k:]]
            except ValueError:
                raise ParseError(f"malformed number in {row[k:]}", lineno) from None
            yield lineno, row[:k], feats


def load_csv(path):
    """Read a point CSV.

    Returns a :class:`LabeledPool` when every row is labeled and an
    :class:`UnlabeledDataset` when none is; mixing the two is an error.
    """
    points, labels = [], []
    state = None
    for lineno, (lab,), feats in _read_rows(path, ["label"]):
        lab = lab.strip()
        labeled = lab != ""
        if state is None:
            state = labeled
        elif state != labeled:
            raise ParseError("file mixes labeled and unlabeled rows", lineno)
        if labeled:
            if lab not in ("1", "-1", "+1"):
                raise ParseError(f"label must be -1 or 1, got {lab!r}", lineno)
            labels.append(int(lab))
        points.append(feats)
    if not points:
        raise EmptyInput(f"{path}: no data rows")
    if state:
        return LabeledPool(np.array(points), np.array(labels))
    return UnlabeledDataset(np.array(points))


def _sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".hidden" + path.suffix)


def save_tuples(path, data: TupleDataset) -> None:
    """Tuple CSV ``tuple_id,slot,f0,...``; hidden labels, if any, go to ``<stem>.hidden.csv``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tuple_id", "slot"] + [f"f{i}" for i in range(data.dim)])
        for i, tup in enumerate(data.tuples):
            for slot, row in enumerate(tup):
                writer.writerow([i, slot] + [_fmt(v) for v in row])
    side = _sidecar(path)
    if data.hidden_labels is not None:
        with open(side, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tuple_id", "slot", "label"])
            for i, labs in enumerate(data.hidden_labels):
                for slot, lab in enumerate(labs):
                    writer.writerow([i, slot, int(lab)])
    elif side.exists():
        side.unlink()


def load_tuples(path, spec: ScenarioSpec) -> TupleDataset:
    groups: dict[int, list] = {}
    order: list[int] = []
    for lineno, (tid, slot), feats in _read_rows(path, ["tuple_id", "slot"]):
        try:
            tid, slot = int(tid), int(slot)
        except ValueError:
            raise ParseError("tuple_id and slot must be integers", lineno) from None
        if tid not in groups:
            if order and tid in order:
                raise ParseError(f"rows of tuple {tid} are not contiguous", lineno)
            groups[tid] = []
            order.append(tid)
        elif order[-1] != tid:
            raise ParseError(f"rows of tuple {tid} are not contiguous", lineno)
        if slot != len(groups[tid]):
            raise ParseError(f"tuple {tid}: expected slot {len(groups[tid])}, got {slot}", lineno)
        if slot >= spec.n:
            raise ParseError(f"slot {slot} out of range for N={spec.n}", lineno)
        groups[tid].append(feats)
    if not order:
        raise EmptyInput(f"{path}: no tuples")
    for tid in order:
        if len(groups[tid]) != spec.n:
            raise ShapeMismatch(f"tuple {tid} has {len(groups[tid])} members, expected {spec.n}")
    tuples = np.array([groups[t] for t in order])
    hidden = None
    side = _sidecar(path)
    if side.exists():
        hidden = np.zeros(tuples.shape[:2], dtype=np.int8)
        index = {t: i for i, t in enumerate(order)}
        with open(side, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader, None)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    hidden[index[int(row[0])], int(row[1])] = int(row[2])
                except (ValueError, KeyError, IndexError):
                    raise ParseError(f"{side}: bad hidden-label row {row}", lineno) from None
    return TupleDataset(tuples, spec, hidden)


def save_unlabeled(path, data: UnlabeledDataset) -> None:
    """Unlabeled point CSV; hidden labels, if any, go to ``<stem>.hidden.csv`` as ``index,label``."""
    save_points(path, data.points)
    side = _sidecar(path)
    if data.hidden_labels is not None:
        with open(side, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "label"])
            for i, lab in enumerate(data.hidden_labels):
                writer.writerow([i, int(lab)])
    elif side.exists():
        side.unlink()


def load_unlabeled(path) -> UnlabeledDataset:
    data = load_csv(path)
    if not isinstance(data, UnlabeledDataset):
        raise ParseError(f"{path}: expected unlabeled rows")
    side = _sidecar(path)
    if side.exists():
        hidden = np.zeros(len(data), dtype=np.int8)
        with open(side, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader, None)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    hidden[int(row[0])] = int(row[1])
                except (ValueError, IndexError):
                    raise ParseError(f"{side}: bad hidden-label row {row}", lineno) from None
        data.hidden_labels = hidden
    return data
