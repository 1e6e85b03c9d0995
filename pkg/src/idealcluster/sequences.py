"""Point sequences in R^d and their finite prefixes.

A :class:`SequenceSpec` is a pure generator: ``spec.values(N)`` returns an
``(N, d)`` float array whose row ``n - 1`` is ``x_n``.  Prefixes are
immutable value objects and the generators are total, so
``generate(spec, N)`` is always a prefix of ``generate(spec, 2 * N)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .indexset import IndexSet


class InputError(ValueError):
    """Sequence input (file, spec) cannot supply the requested data."""


# -- metric spaces --------------------------------------------------------------

@dataclass(frozen=True)
class MetricSpace:
    dimension: int = 1
    metric: str = "euclidean"
    description: str = ""

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.metric not in ("euclidean", "max"):
            raise ValueError(f"unknown metric {self.metric!r}")

    @property
    def minkowski_p(self) -> float:
        return 2.0 if self.metric == "euclidean" else np.inf

    def distance(self, a, b) -> np.ndarray:
        """Distances between broadcastable point arrays (last axis = coordinates)."""
        diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
        if self.metric == "euclidean":
            return np.sqrt(np.sum(diff * diff, axis=-1))
        return np.max(np.abs(diff), axis=-1)


LINE = MetricSpace(1, "euclidean", "real line")


def as_point(p, d: Optional[int] = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(p, dtype=np.float64))
    if arr.ndim != 1:
        raise ValueError("a point is a 1-D coordinate vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if d is not None and arr.size != d:
        raise ValueError(f"expected a {d}-dimensional point, got {arr.size}")
    return arr


# -- sequence specifications -------------------------------------------------------

class SequenceSpec:
    """Base generator.  Subclasses implement :meth:`_values`."""

    space: MetricSpace = LINE
    kind = "sequence"

    def values(self, N: int) -> np.ndarray:
        if N < 0:
            raise ValueError("N must be non-negative")
        out = np.asarray(self._values(int(N)), dtype=np.float64).reshape(N, self.space.dimension)
        return out

    def _values(self, N: int) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind, "metric": self.space.metric, "dimension": self.space.dimension}


@dataclass(frozen=True, eq=False)
class Constant(SequenceSpec):
    point: tuple = (0.0,)
    space: MetricSpace = LINE
    kind = "constant"

    def _values(self, N):
        return np.tile(as_point(self.point, self.space.dimension), (N, 1))

    def describe(self):
        return {**super().describe(), "point": list(self.point)}


@dataclass(frozen=True, eq=False)
class IndicatorSet(SequenceSpec):
    """x_n = on for n in A, otherwise ``off`` (a point or another sequence)."""

    A: IndexSet
    on: tuple = (1.0,)
    off: Union[tuple, SequenceSpec] = (0.0,)
    space: MetricSpace = LINE
    kind = "indicator"

    def _values(self, N):
        d = self.space.dimension
        if isinstance(self.off, SequenceSpec):
            base = self.off.values(N).copy()
        else:
            base = np.tile(as_point(self.off, d), (N, 1))
        base[self.A.mask(N)] = as_point(self.on, d)
        return base

    def describe(self):
        off = self.off.describe() if isinstance(self.off, SequenceSpec) else list(self.off)
        return {**super().describe(), "set": self.A.name, "on": list(self.on), "off": off}


def dyadic_schedule_level(b: int) -> int:
    """Level of the recurring grid in stage b: the sequence 0; 0,1; 0,1,2; 0,1,2,3; ..."""
    t = int((math.isqrt(8 * b + 1) - 1) // 2)
    return b - t * (t + 1) // 2


@lru_cache(maxsize=64)
def _dyadic_stage(b: int, a: float, c: float) -> np.ndarray:
    length = 1 << b
    dense = (3 * length) // 4
    g_dense = b // 3
    g_rec = dyadic_schedule_level(b)
    grid_d = a + (c - a) * np.arange((1 << g_dense) + 1) / (1 << g_dense)
    grid_r = a + (c - a) * np.arange((1 << g_rec) + 1) / (1 << g_rec)
    out = np.empty(length)
    out[:dense] = grid_d[np.arange(dense) % grid_d.size]
    out[dense:] = grid_r[np.arange(length - dense) % grid_r.size]
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class RationalEnumeration(SequenceSpec):
    """Dyadic rationals of [a, b] arranged in doubling stages.

    Stage ``s`` occupies indices [2^s, 2^{s+1}).  Its first three quarters
    cycle through the dyadic grid of level floor(s/3), which spreads mass
    over every subinterval; its last quarter cycles through the grid of level
    g(s), where g runs 0; 0,1; 0,1,2; ...  Each fixed dyadic rational is
    therefore hit with upper density at least 1/(8(2^g + 1)).
    """

    a: float = 0.0
    b: float = 1.0
    ordering: str = "dyadic-doubling"
    space: MetricSpace = LINE
    kind = "rational-enumeration"

    def __post_init__(self):
        if self.ordering != "dyadic-doubling":
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if not self.a < self.b:
            raise ValueError("need a < b")

    def _values(self, N):
        out = np.empty(N)
        s = 0
        while (1 << s) <= N:
            lo = 1 << s
            hi = min(2 * lo - 1, N)
            out[lo - 1:hi] = _dyadic_stage(s, float(self.a), float(self.b))[:hi - lo + 1]
            s += 1
        return out

    def describe(self):
        return {**super().describe(), "interval": [self.a, self.b], "ordering": self.ordering}


@dataclass(frozen=True, eq=False)
class BlockPattern(SequenceSpec):
    """Consecutive constant blocks cycling through ``levels``.

    ``rule="doubling"`` gives block k (k = 0, 1, ...) length 2^k, so block k
    covers [2^k, 2^{k+1}) and carries ``levels[k % len(levels)]``.
    """

    levels: tuple = ((0.0,), (1.0,))
    rule: str = "doubling"
    space: MetricSpace = LINE
    kind = "block-pattern"

    def _values(self, N):
        if self.rule != "doubling":
            raise ValueError(f"unknown block rule {self.rule!r}")
        lv = np.array([as_point(p, self.space.dimension) for p in self.levels])
        n = np.arange(1, N + 1)
        k = np.floor(np.log2(n)).astype(np.int64) if N else np.zeros(0, dtype=np.int64)
        # guard against log2 rounding at exact powers of two
        k -= (1 << k) > n
        k += (1 << (k + 1)) <= n
        return lv[k % len(lv)]

    def describe(self):
        return {**super().describe(), "levels": [list(p) for p in self.levels], "rule": self.rule}


def _inverse(n):
    return 1.0 / n


FORMULAS = {"inverse": _inverse}


@dataclass(frozen=True, eq=False)
class Formula(SequenceSpec):
    """x_n = FORMULAS[name](n) on the real line."""

    name: str = "inverse"
    space: MetricSpace = LINE
    kind = "formula"

    def _values(self, N):
        return FORMULAS[self.name](np.arange(1, N + 1, dtype=np.float64))

    def describe(self):
        return {**super().describe(), "formula": self.name}


@dataclass(frozen=True, eq=False)
class Tabulated(SequenceSpec):
    """Points read from a text file: one point per line, coordinates separated by commas."""

    path: str
    space: MetricSpace = LINE
    kind = "tabulated"

    def _values(self, N):
        rows = []
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rows.append([float(t) for t in line.split(",")])
                if len(rows) == N:
                    break
        if len(rows) < N:
            raise InputError(f"{self.path} holds {len(rows)} points, {N} requested")
        arr = np.asarray(rows, dtype=np.float64).reshape(N, -1)
        if arr.shape[1] != self.space.dimension:
            raise InputError(f"{self.path}: expected dimension {self.space.dimension}")
        if not np.all(np.isfinite(arr)):
            raise InputError(f"{self.path}: non-finite coordinate")
        return arr

    def describe(self):
        return {**super().describe(), "path": str(self.path)}


# -- prefixes -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SequencePrefix:
    """The first N terms of a sequence (or of a subsequence x↾ω)."""

    values: np.ndarray
    space: MetricSpace = LINE
    spec: Optional[SequenceSpec] = None
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        v = np.array(v, copy=True)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return int(self.values.shape[0])

    def __len__(self):
        return self.N

    def distances(self, point) -> np.ndarray:
        return self.space.distance(self.values, as_point(point, self.space.dimension))

    def equals(self, other: "SequencePrefix") -> bool:
        return self.values.shape == other.values.shape and bool(np.array_equal(self.values, other.values))


def generate(spec: SequenceSpec, N: int) -> SequencePrefix:
    """Deterministic prefix x_1..x_N."""
    if N < 1:
        raise ValueError("N must be positive")
    return SequencePrefix(spec.values(N), spec.space, spec, label=spec.kind)


@dataclass(frozen=True)
class LevelSet:
    """Predicate ``{n : x_n == point}`` for a sequence spec (picklable)."""

    spec: SequenceSpec
    point: tuple

    def __call__(self, idx):
        n = int(idx[-1]) if idx.size else 0
        v = self.spec.values(n)
        hit = np.all(v == np.asarray(self.point, dtype=np.float64), axis=1)
        return hit[idx - 1]


def level_set(spec: SequenceSpec, point, n_max: int = 10**7, name: str = "") -> IndexSet:
    p = tuple(float(c) for c in as_point(point, spec.space.dimension))
    return IndexSet.from_predicate(LevelSet(spec, p), n_max=n_max, name=name or f"level{list(p)}")


def sequence_from_config(d: dict) -> SequenceSpec:
    """Build a spec from a mapping; ``{"zoo": name}`` defers to the catalogue."""
    from .indexset import named_set
    from .zoo import zoo
    if "zoo" in d:
        return zoo(d["zoo"]).spec
    space = MetricSpace(int(d.get("dimension", 1)), d.get("metric", "euclidean"))
    kind = d.get("kind")
    if kind == "constant":
        return Constant(tuple(np.atleast_1d(d.get("point", 0.0)).tolist()), space)
    if kind == "indicator":
        return IndicatorSet(named_set(d["set"]), tuple(np.atleast_1d(d.get("on", 1.0)).tolist()),
                            tuple(np.atleast_1d(d.get("off", 0.0)).tolist()), space)
    if kind == "rational-enumeration":
        a, b = d.get("interval", [0.0, 1.0])
        return RationalEnumeration(float(a), float(b), space=space)
    if kind == "block-pattern":
        levels = tuple(tuple(np.atleast_1d(p).tolist()) for p in d.get("levels", [0.0, 1.0]))
        return BlockPattern(levels, d.get("rule", "doubling"), space)
    if kind == "formula":
        return Formula(d.get("formula", "inverse"), space)
    if kind == "tabulated":
        return Tabulated(str(d["path"]), space)
    raise InputError(f"unknown sequence kind {kind!r}")
