"""Weight functions, submeasures on finite index sets, and block partitions.

Submeasures are evaluated on boolean masks (entry ``i - 1`` for integer
``i``), which is the lower-semicontinuous finite approximation
``phi(A ∩ [1, n])`` with ``n = len(mask)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .indexset import DomainError, IndexSet, as_mask


class InvariantViolation(ValueError):
    """Inputs break a structural requirement (non-positive weights, ...)."""


def compensated_cumsum(values: np.ndarray, block: int = 1024) -> np.ndarray:
    """Prefix sums with per-block float accumulation and compensated block offsets.

    In-block error is bounded by ``block`` ulps; offsets between blocks are
    carried with Neumaier summation of pairwise-summed block totals.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    if n <= block:
        return np.cumsum(v)
    nb = -(-n // block)
    padded = np.zeros(nb * block)
    padded[:n] = v
    blocks = padded.reshape(nb, block)
    inner = np.cumsum(blocks, axis=1)
    totals = blocks.sum(axis=1).tolist()
    offsets = np.empty(nb)
    s = c = 0.0
    for k in range(nb):
        offsets[k] = s + c
        t = totals[k]
        u = s + t
        if abs(s) >= abs(t):
            c += (s - u) + t
        else:
            c += (t - u) + s
        s = u
    return (inner + offsets[:, None]).ravel()[:n]


# -- weights -------------------------------------------------------------

class Weight:
    """A weight function f on the positive integers.  ``values(n)`` gives f(1..n)."""

    name = "weight"

    def values(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def cumulative(self, n: int) -> np.ndarray:
        cache = self.__dict__.setdefault("_cum_cache", {})
        if n not in cache:
            if len(cache) > 8:
                cache.clear()
            cum = compensated_cumsum(self.values(n))
            cum.setflags(write=False)
            cache[n] = cum
        return cache[n]

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_cum_cache", None)
        return state


@dataclass(eq=False)
class ConstantWeight(Weight):
    c: float = 1.0

    @property
    def name(self):
        return "constant" if self.c == 1.0 else f"constant({self.c:g})"

    def values(self, n):
        return np.full(n, float(self.c))


@dataclass(eq=False)
class PowerWeight(Weight):
    """f(i) = i**s."""

    s: float = 0.0

    @property
    def name(self):
        return "inverse" if self.s == -1 else f"power({self.s:g})"

    def values(self, n):
        i = np.arange(1, n + 1, dtype=np.float64)
        if self.s == 0:
            return np.ones(n)
        if self.s == -1:
            return 1.0 / i
        return i ** self.s


def inverse_weight() -> PowerWeight:
    return PowerWeight(-1.0)


@dataclass(eq=False)
class TabulatedWeight(Weight):
    """Weights read from a file, one value per line (line k holds f(k))."""

    table: tuple
    source: str = ""

    @classmethod
    def from_file(cls, path) -> "TabulatedWeight":
        text = Path(path).read_text().split()
        return cls(tuple(float(t) for t in text), source=str(path))

    @property
    def name(self):
        return f"tabulated({self.source or len(self.table)})"

    def values(self, n):
        if n > len(self.table):
            raise DomainError(f"weight table has {len(self.table)} entries, need {n}")
        return np.asarray(self.table[:n], dtype=np.float64)


WEIGHT_CATALOGUE = {
    "constant": lambda **kw: ConstantWeight(float(kw.get("c", 1.0))),
    "inverse": lambda **kw: inverse_weight(),
    "power": lambda **kw: PowerWeight(float(kw["s"])),
}


def named_weight(name: str, **params) -> Weight:
    if name == "tabulated":
        return TabulatedWeight.from_file(params["path"])
    try:
        return WEIGHT_CATALOGUE[name](**params)
    except KeyError:
        raise KeyError(f"unknown weight {name!r}") from None


# -- submeasures -----------------------------------------------------------

class Submeasure:
    """Monotone, subadditive set function with phi(∅) = 0."""

    name = "submeasure"

    def evaluate(self, mask: np.ndarray) -> float:
        raise NotImplementedError

    def __call__(self, A, n: int | None = None) -> float:
        if n is None:
            if isinstance(A, IndexSet):
                n = A.n_max
            elif isinstance(A, np.ndarray) and A.dtype == bool:
                n = len(A)
            else:
                A = list(A)
                n = max(A, default=0)
        return self.evaluate(as_mask(A, n))


@dataclass(eq=False)
class WeightedMeasure(Submeasure):
    """phi(A) = sum_{i in A} w(i) / scale."""

    weight: Weight
    scale: float = 1.0

    @property
    def name(self):
        return f"measure[{self.weight.name}]/{self.scale:g}"

    def evaluate(self, mask):
        n = len(mask)
        if n == 0:
            return 0.0
        w = self.weight.values(n)
        return math.fsum(w[mask]) / self.scale


@dataclass(eq=False)
class ErdosUlamSubmeasure(Submeasure):
    """phi_f(A) = sup_m sum_{i<=m, i in A} f(i) / sum_{i<=m} f(i)."""

    weight: Weight

    @property
    def name(self):
        return f"phi[{self.weight.name}]"

    def ratios(self, mask: np.ndarray) -> np.ndarray:
        n = len(mask)
        w = self.weight.values(n)
        if n and np.any(w <= 0):
            bad = int(np.flatnonzero(w <= 0)[0]) + 1
            raise InvariantViolation(f"weight {self.weight.name} is non-positive at {bad}")
        num = compensated_cumsum(np.where(mask, w, 0.0))
        return num / self.weight.cumulative(n)

    def evaluate(self, mask):
        if len(mask) == 0 or not mask.any():
            return 0.0
        return float(self.ratios(mask).max())


@dataclass(eq=False)
class SupSubmeasure(Submeasure):
    """Pointwise supremum of finitely many submeasures."""

    parts: tuple

    @property
    def name(self):
        return "sup(" + ",".join(p.name for p in self.parts) + ")"

    def evaluate(self, mask):
        return max((p.evaluate(mask) for p in self.parts), default=0.0)


@dataclass(eq=False)
class FunctionSubmeasure(Submeasure):
    """Wraps ``func(elements: tuple[int, ...]) -> float``; for small hand-built instances."""

    func: Callable
    label: str = "custom"

    @property
    def name(self):
        return self.label

    def evaluate(self, mask):
        return float(self.func(tuple(int(i) for i in np.flatnonzero(mask) + 1)))


# -- block partitions --------------------------------------------------------

class BlockPartition:
    """Partition of the positive integers into consecutive finite intervals.

    Block ``j >= 1`` is ``I_j = (e_{j-1}, e_j]`` with ``e_0 = 0``.
    Subclasses provide :meth:`ends_upto`, the block ends that are ``<= n``.
    """

    name = "partition"

    def ends_upto(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def _ends_covering(self, i: int) -> np.ndarray:
        n = max(int(i), 2)
        while True:
            ends = self.ends_upto(n)
            if ends.size and ends[-1] >= i:
                return ends
            n *= 2

    def block(self, j: int) -> tuple:
        """(lo, hi) inclusive bounds of block j."""
        if j < 1:
            raise DomainError("blocks are numbered from 1")
        n = 2
        while True:
            ends = self.ends_upto(n)
            if ends.size >= j:
                lo = int(ends[j - 2]) + 1 if j >= 2 else 1
                return lo, int(ends[j - 1])
            n *= 2

    def block_of(self, i: int) -> int:
        if i < 1:
            raise DomainError("blocks cover positive integers")
        ends = self._ends_covering(i)
        return int(np.searchsorted(ends, i)) + 1

    def complete_blocks(self, n: int) -> int:
        return int(self.ends_upto(n).size)


@dataclass(eq=False)
class DyadicPartition(BlockPartition):
    """I_1 = {1, 2}, I_j = (2^{j-1}, 2^j] for j >= 2."""

    name = "dyadic"

    def ends_upto(self, n):
        if n < 2:
            return np.empty(0, dtype=np.int64)
        top = int(math.floor(math.log2(n)))
        ends = 2 ** np.arange(1, top + 1, dtype=np.int64)
        return ends[ends <= n]


@dataclass(eq=False)
class ExplicitPartition(BlockPartition):
    """Given block ends; beyond the last one, blocks keep the last block's length."""

    ends: tuple

    def __post_init__(self):
        e = np.asarray(self.ends, dtype=np.int64)
        if e.size == 0 or e[0] < 1 or np.any(np.diff(e) <= 0):
            raise DomainError("block ends must be positive and strictly increasing")

    @property
    def name(self):
        return f"explicit{list(self.ends)}"

    def ends_upto(self, n):
        e = np.asarray(self.ends, dtype=np.int64)
        step = int(e[-1] - (e[-2] if e.size > 1 else 0))
        if n > e[-1]:
            extra = np.arange(e[-1] + step, n + 1, step, dtype=np.int64)
            e = np.concatenate([e, extra])
        return e[e <= n]


@dataclass(eq=False)
class WeightRatioPartition(BlockPartition):
    """Blocks along which the cumulative weight F grows by at least ``ratio``.

    e_1 = 1 and e_j = min{k > e_{j-1} : F(k) >= ratio * F(e_{j-1})}.
    For f = 1 and ratio 2 this reproduces the ends 1, 2, 4, 8, ...
    """

    weight: Weight
    ratio: float = 2.0

    @property
    def name(self):
        return f"weight-ratio[{self.weight.name},{self.ratio:g}]"

    def ends_upto(self, n):
        if n < 1:
            return np.empty(0, dtype=np.int64)
        F = self.weight.cumulative(n)
        ends = [1]
        while True:
            target = self.ratio * F[ends[-1] - 1]
            k = int(np.searchsorted(F, target, side="left"))
            k = max(k, ends[-1])  # index of first F >= target, 0-based
            if k >= n:
                break
            ends.append(k + 1)
        return np.asarray(ends, dtype=np.int64)


# -- block submeasure families ------------------------------------------------

class BlockFamily:
    """The sequence (mu_j) of a generalized density ideal, mu_j concentrated on I_j.

    :meth:`block_values` returns ``mu_j(A ∩ I_j)`` for every complete block
    ``j`` of ``[1, len(mask)]``.
    """

    name = "family"

    def block_values(self, mask: np.ndarray, ends: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def submeasure(self, j: int, partition: BlockPartition) -> Submeasure:
        raise NotImplementedError


def _block_sums(values: np.ndarray, ends: np.ndarray) -> np.ndarray:
    if ends.size == 0:
        return np.empty(0)
    cum = np.concatenate([[0.0], compensated_cumsum(values[: int(ends[-1])])])
    return cum[ends] - cum[np.concatenate([[0], ends[:-1]])]


@dataclass(eq=False)
class BlockNormalizedCount(BlockFamily):
    """mu_j(A) = |A ∩ I_j| / |I_j|."""

    name = "count/|I_j|"

    def block_values(self, mask, ends):
        if ends.size == 0:
            return np.empty(0)
        cum = np.concatenate([[0], np.cumsum(mask[: int(ends[-1])], dtype=np.int64)])
        starts = np.concatenate([[0], ends[:-1]])
        return (cum[ends] - cum[starts]) / (ends - starts)

    def submeasure(self, j, partition):
        lo, hi = partition.block(j)
        return _BlockRestricted(WeightedMeasure(ConstantWeight(1.0), float(hi - lo + 1)), lo, hi)


@dataclass(eq=False)
class CumulativeWeightFamily(BlockFamily):
    """mu_j(A) = F(A ∩ I_j) / F(e_j), with F the cumulative weight."""

    weight: Weight

    @property
    def name(self):
        return f"F(.∩I_j)/F(e_j)[{self.weight.name}]"

    def block_values(self, mask, ends):
        if ends.size == 0:
            return np.empty(0)
        n = int(ends[-1])
        w = self.weight.values(n)
        sums = _block_sums(np.where(mask[:n], w, 0.0), ends)
        return sums / self.weight.cumulative(n)[ends - 1]

    def submeasure(self, j, partition):
        lo, hi = partition.block(j)
        scale = float(self.weight.cumulative(hi)[hi - 1])
        return _BlockRestricted(WeightedMeasure(self.weight, scale), lo, hi)


@dataclass(eq=False)
class BlockNormalizedWeight(BlockFamily):
    """mu_j(A) = F(A ∩ I_j) / F(I_j); for f = 1 this is BlockNormalizedCount."""

    weight: Weight

    @property
    def name(self):
        return f"F(.∩I_j)/F(I_j)[{self.weight.name}]"

    def block_values(self, mask, ends):
        if ends.size == 0:
            return np.empty(0)
        n = int(ends[-1])
        w = self.weight.values(n)
        F = np.concatenate([[0.0], self.weight.cumulative(n)])
        starts = np.concatenate([[0], ends[:-1]])
        return _block_sums(np.where(mask[:n], w, 0.0), ends) / (F[ends] - F[starts])

    def submeasure(self, j, partition):
        lo, hi = partition.block(j)
        scale = math.fsum(self.weight.values(hi)[lo - 1:hi])
        return _BlockRestricted(WeightedMeasure(self.weight, scale), lo, hi)


@dataclass(eq=False)
class SubmeasureFamily(BlockFamily):
    """Arbitrary per-block submeasures ``mu(j)``; evaluated block by block."""

    mu: Callable
    partition: BlockPartition
    label: str = "custom"

    @property
    def name(self):
        return self.label

    def block_values(self, mask, ends):
        out = np.empty(ends.size)
        lo = 0
        for k, hi in enumerate(ends):
            local = np.zeros(int(hi), dtype=bool)
            local[lo:hi] = mask[lo:hi]
            out[k] = self.mu(k + 1).evaluate(local)
            lo = int(hi)
        return out

    def submeasure(self, j, partition):
        lo, hi = partition.block(j)
        return _BlockRestricted(self.mu(j), lo, hi)


@dataclass(eq=False)
class _BlockRestricted(Submeasure):
    """A submeasure made to concentrate on [lo, hi]."""

    inner: Submeasure
    lo: int
    hi: int

    @property
    def name(self):
        return f"{self.inner.name}|[{self.lo},{self.hi}]"

    def evaluate(self, mask):
        local = np.zeros(min(len(mask), self.hi), dtype=bool)
        local[self.lo - 1:] = mask[self.lo - 1:self.hi]
        return self.inner.evaluate(local)
