"""Constrained tuple label spaces.

A scenario is a non-empty, strict subset of ``{-1, +1}^N``.  Four named
scenarios are built in:

``comp``
    Comparison tuples ordered by decreasing confidence of being positive.
    Materialized as the ``N + 1`` threshold vectors ``(+1,...,+1,-1,...,-1)``.
``sim``
    All members share one class: ``{(+1,...,+1), (-1,...,-1)}``.
``mix``
    Members are not all from the same class.
``notallneg``
    At least one member is positive.

Anything else can be supplied as an explicit ``custom`` vector set.

Label vectors are stored as ``int8`` arrays.  The canonical order is
lexicographic with ``+1 < -1`` at each coordinate, which is the same as
ordering by the integer code ``sum_k [y_k = -1] * 2**(N-1-k)``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from math import comb
from pathlib import Path

import numpy as np

from .errors import (
    EmptySubset,
    EnumerationTooLarge,
    FullSubset,
    LengthMismatch,
    ParseError,
    UnsupportedKind,
)

__all__ = [
    "MAX_ENUMERATION_N",
    "Kind",
    "ScenarioSpec",
    "census_by_positives",
    "contains",
    "encode",
    "enumerate_labels",
    "load_subset_file",
    "save_subset_file",
]

MAX_ENUMERATION_N = 20


class Kind(str, enum.Enum):
    COMP = "comp"
    SIM = "sim"
    MIX = "mix"
    NOT_ALL_NEG = "notallneg"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, name: str) -> "Kind":
        key = name.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "comp": cls.COMP, "ncompu": cls.COMP, "ntcomp": cls.COMP,
            "sim": cls.SIM, "nsu": cls.SIM,
            "mix": cls.MIX, "mnu": cls.MIX,
            "notallneg": cls.NOT_ALL_NEG, "nan": cls.NOT_ALL_NEG,
            "nposu": cls.NOT_ALL_NEG, "npos": cls.NOT_ALL_NEG,
            "custom": cls.CUSTOM,
        }
        try:
            return aliases[key]
        except KeyError:
            raise UnsupportedKind(f"unknown scenario kind {name!r}") from None


def _as_vector(y, n=None):
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise LengthMismatch(f"label vector must be 1-D, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise LengthMismatch(f"label vector has length {arr.shape[0]}, expected {n}")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"label entries must be -1 or +1, got {arr.tolist()}")
    return arr.astype(np.int8)


def encode(labels) -> np.ndarray:
    """Integer code of each label vector (rows of a 2-D array, or a single vector)."""
    arr = np.atleast_2d(np.asarray(labels))
    n = arr.shape[1]
    powers = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    return (arr == -1).astype(np.int64) @ powers


def _decode(codes, n) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (codes[:, None] >> shifts) & 1
    return (1 - 2 * bits).astype(np.int8)


@dataclass(frozen=True)
class ScenarioSpec:
    """A tuple size ``n`` and the label-space constraint ``kind``.

    For ``Kind.CUSTOM`` pass the allowed vectors as ``vectors``; they are
    validated, deduplicated and stored in canonical order.
    """

    n: int
    kind: Kind
    vectors: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        kind = Kind.parse(self.kind) if isinstance(self.kind, str) else self.kind
        object.__setattr__(self, "kind", kind)
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"tuple size must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if kind is Kind.CUSTOM:
            if self.vectors is None:
                raise EmptySubset("custom scenario needs an explicit vector set")
            rows = [_as_vector(v, self.n) for v in self.vectors]
            if not rows:
                raise EmptySubset("custom label subset is empty")
            codes = sorted(set(int(c) for c in encode(np.stack(rows))))
            if len(codes) == 2 ** self.n:
                raise FullSubset("custom label subset covers the whole label space")
            canon = tuple(tuple(int(v) for v in row) for row in _decode(codes, self.n))
            object.__setattr__(self, "vectors", canon)
        elif self.vectors is not None:
            raise ValueError("explicit vectors are only accepted for custom scenarios")

    @classmethod
    def named(cls, kind, n: int) -> "ScenarioSpec":
        return cls(n=n, kind=kind)

    @classmethod
    def custom(cls, vectors, n: int | None = None) -> "ScenarioSpec":
        vectors = [tuple(int(v) for v in row) for row in vectors]
        if n is None:
            if not vectors:
                raise EmptySubset("custom label subset is empty")
            n = len(vectors[0])
        return cls(n=n, kind=Kind.CUSTOM, vectors=tuple(vectors))

    @property
    def is_symmetric(self) -> bool:
        """True for the permutation-invariant named kinds."""
        return self.kind in (Kind.SIM, Kind.MIX, Kind.NOT_ALL_NEG)

    @property
    def size(self) -> int:
        """Cardinality of the label subset (closed form for named kinds)."""
        n = self.n
        return {
            Kind.COMP: n + 1,
            Kind.SIM: 2,
            Kind.MIX: 2 ** n - 2,
            Kind.NOT_ALL_NEG: 2 ** n - 1,
        }.get(self.kind) or len(self.vectors)

    @property
    def label(self) -> str:
        return f"{self.kind.value}-N{self.n}"


def _member_mask(spec: ScenarioSpec, labels: np.ndarray) -> np.ndarray:
    pos = labels == 1
    if spec.kind is Kind.SIM:
        return pos.all(axis=1) | (~pos).all(axis=1)
    if spec.kind is Kind.MIX:
        return pos.any(axis=1) & (~pos).any(axis=1)
    if spec.kind is Kind.NOT_ALL_NEG:
        return pos.any(axis=1)
    if spec.kind is Kind.COMP:
        # threshold vectors: once a -1 appears no +1 follows
        return np.all(pos[:, :-1] | ~pos[:, 1:], axis=1)
    allowed = encode(np.asarray(spec.vectors))
    return np.isin(encode(labels), allowed)


@functools.lru_cache(maxsize=256)
def _enumerate_cached(spec: ScenarioSpec) -> np.ndarray:
    if spec.kind is Kind.CUSTOM:
        out = np.asarray(spec.vectors, dtype=np.int8)
    elif spec.kind is Kind.COMP:
        n = spec.n
        out = np.array([[1] * k + [-1] * (n - k) for k in range(n, -1, -1)], dtype=np.int8)
    elif spec.kind is Kind.SIM:
        out = np.array([[1] * spec.n, [-1] * spec.n], dtype=np.int8)
    else:
        full = _decode(np.arange(2 ** spec.n, dtype=np.int64), spec.n)
        out = full[_member_mask(spec, full)]
    out.setflags(write=False)
    return out


def enumerate_labels(spec: ScenarioSpec) -> np.ndarray:
    """All label vectors of ``spec`` as a read-only ``(|Y^sub|, N)`` int8 array, canonical order."""
    if spec.n > MAX_ENUMERATION_N:
        raise EnumerationTooLarge(
            f"enumeration is capped at N={MAX_ENUMERATION_N}, got N={spec.n}; "
            "use the closed-form coefficients instead"
        )
    return _enumerate_cached(spec)


def contains(spec: ScenarioSpec, y) -> bool:
    y = _as_vector(y, spec.n)
    return bool(_member_mask(spec, y[None, :])[0])


def contains_many(spec: ScenarioSpec, labels) -> np.ndarray:
    """Vectorized membership test over the rows of ``labels``."""
    labels = np.asarray(labels)
    if labels.ndim != 2 or labels.shape[1] != spec.n:
        raise LengthMismatch(f"expected an (m, {spec.n}) label array, got {labels.shape}")
    return _member_mask(spec, labels)


def census_by_positives(spec: ScenarioSpec) -> dict[int, int]:
    """Number of allowed vectors for each positive count ``m``; zero counts omitted."""
    n = spec.n
    if spec.kind is Kind.COMP:
        return {m: 1 for m in range(n, -1, -1)}
    if spec.kind is Kind.SIM:
        return {n: 1, 0: 1}
    if spec.kind is Kind.MIX:
        return {m: comb(n, m) for m in range(n - 1, 0, -1)}
    if spec.kind is Kind.NOT_ALL_NEG:
        return {m: comb(n, m) for m in range(n, 0, -1)}
    counts: dict[int, int] = {}
    for row in spec.vectors:
        m = sum(1 for v in row if v == 1)
        counts[m] = counts.get(m, 0) + 1
    return dict(sorted(counts.items(), reverse=True))


def load_subset_file(path) -> ScenarioSpec:
    """Read a custom subset: header ``N=<int>`` then one comma-separated vector per line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header_seen = False
    n = None
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if not header_seen:
            key, _, value = text.partition("=")
            if key.strip().upper() != "N" or not value.strip():
                raise ParseError("expected header 'N=<int>'", lineno)
            try:
                n = int(value)
            except ValueError:
                raise ParseError(f"bad tuple size {value.strip()!r}", lineno) from None
            header_seen = True
            continue
        try:
            row = [int(tok) for tok in text.split(",")]
        except ValueError:
            raise ParseError(f"non-integer entry in {text!r}", lineno) from None
        if len(row) != n:
            raise ParseError(f"vector has {len(row)} entries, header says N={n}", lineno)
        if any(v not in (-1, 1) for v in row):
            raise ParseError(f"entries must be -1 or 1, got {text!r}", lineno)
        rows.append(tuple(row))
    if not header_seen:
        raise ParseError("missing 'N=<int>' header", 1)
    return ScenarioSpec(n=n, kind=Kind.CUSTOM, vectors=tuple(rows))


def save_subset_file(path, spec: ScenarioSpec) -> None:
    rows = enumerate_labels(spec)
    body = "\n".join(",".join(str(int(v)) for v in row) for row in rows)
    Path(path).write_text(f"N={spec.n}\n{body}\n", encoding="utf-8")
