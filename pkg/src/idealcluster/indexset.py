"""Subsets of the positive integers, explicit or predicate-backed.

An :class:`IndexSet` is either a sorted array of positive integers or a
vectorised membership predicate together with an enumeration bound
``n_max``.  Everything downstream consumes sets through :meth:`IndexSet.mask`,
a boolean array whose entry ``i - 1`` says whether ``i`` belongs to the set.

Predicates receive a 1-D ``int64`` array of positive integers and must return
a boolean array of the same shape.  The catalogue predicates below are
module-level callables so that sets survive pickling into worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

DEFAULT_NMAX = 10**7


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class IndexSet:
    __slots__ = ("_elements", "_predicate", "n_max", "finite", "name")

    def __init__(self, *, elements=None, predicate=None, n_max=None,
                 finite=False, name=""):
        if (elements is None) == (predicate is None):
            raise ValueError("give exactly one of elements or predicate")
        if elements is not None:
            arr = np.unique(np.asarray(list(elements) if not isinstance(elements, np.ndarray)
                                       else elements, dtype=np.int64))
            if arr.size and arr[0] < 1:
                raise DomainError("index sets contain positive integers only")
            top = int(arr[-1]) if arr.size else 0
            if n_max is None:
                n_max = max(top, 1)
            if n_max < top:
                raise DomainError(f"n_max={n_max} below largest element {top}")
            arr.setflags(write=False)
            self._elements = arr
            self._predicate = None
        else:
            self._elements = None
            self._predicate = predicate
            if n_max is None:
                n_max = DEFAULT_NMAX
        self.n_max = int(n_max)
        self.finite = bool(finite)
        self.name = name

    # -- constructors -------------------------------------------------
    @classmethod
    def explicit(cls, elements: Iterable[int], n_max: Optional[int] = None,
                 finite: bool = True, name: str = "") -> "IndexSet":
        """Explicit set.  ``finite=False`` marks a truncation of an infinite set.

        A finite set is known everywhere, so its ``n_max`` defaults to the
        global enumeration bound rather than to its largest element.
        """
        if finite and n_max is None:
            n_max = DEFAULT_NMAX
        return cls(elements=elements, n_max=n_max, finite=finite, name=name)

    @classmethod
    def from_predicate(cls, predicate: Callable[[np.ndarray], np.ndarray],
                       n_max: int = DEFAULT_NMAX, finite: bool = False,
                       name: str = "") -> "IndexSet":
        return cls(predicate=predicate, n_max=n_max, finite=finite, name=name)

    @classmethod
    def from_mask(cls, mask: np.ndarray, finite: bool = False, name: str = "") -> "IndexSet":
        """Set ``{i : mask[i-1]}`` with ``n_max = len(mask)``."""
        mask = np.asarray(mask, dtype=bool)
        return cls(elements=np.flatnonzero(mask) + 1, n_max=max(len(mask), 1),
                   finite=finite, name=name)

    @classmethod
    def empty(cls, n_max: int = DEFAULT_NMAX) -> "IndexSet":
        return cls(elements=np.empty(0, dtype=np.int64), n_max=n_max, finite=True,
                   name="empty")

    # -- queries ------------------------------------------------------
    @property
    def is_explicit(self) -> bool:
        return self._elements is not None

    def mask(self, n: int) -> np.ndarray:
        """Boolean indicator of ``A ∩ [1, n]`` (entry ``i-1`` for integer ``i``)."""
        n = int(n)
        if n < 0:
            raise DomainError("n must be non-negative")
        if n > self.n_max:
            raise DomainError(f"n={n} exceeds n_max={self.n_max} of {self.name or 'set'}")
        if self._elements is not None:
            out = np.zeros(n, dtype=bool)
            els = self._elements[self._elements <= n]
            out[els - 1] = True
            return out
        idx = np.arange(1, n + 1, dtype=np.int64)
        out = np.asarray(self._predicate(idx), dtype=bool)
        if out.shape != idx.shape:
            raise ValueError("predicate must return one boolean per index")
        return out

    def elements(self, n: Optional[int] = None) -> np.ndarray:
        """Sorted elements of ``A ∩ [1, n]`` (``n`` defaults to ``n_max``)."""
        n = self.n_max if n is None else n
        if self._elements is not None:
            return self._elements[self._elements <= n]
        return np.flatnonzero(self.mask(n)) + 1

    def count(self, n: int) -> int:
        return int(np.count_nonzero(self.mask(n)))

    def __contains__(self, i) -> bool:
        i = int(i)
        if i < 1 or i > self.n_max:
            return False
        if self._elements is not None:
            k = np.searchsorted(self._elements, i)
            return bool(k < self._elements.size and self._elements[k] == i)
        return bool(self._predicate(np.array([i], dtype=np.int64))[0])

    def __repr__(self):
        kind = f"{self._elements.size} elements" if self.is_explicit else "predicate"
        return f"IndexSet({self.name or '?'}, {kind}, n_max={self.n_max}, finite={self.finite})"

    # -- algebra ------------------------------------------------------
    def _combine(self, other: "IndexSet", op: str, finite: bool) -> "IndexSet":
        n_max = min(self.n_max, other.n_max)
        name = f"({self.name} {op} {other.name})"
        return IndexSet.from_predicate(_Combined(op, self, other), n_max=n_max,
                                       finite=finite, name=name)

    def union(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, "|", self.finite and other.finite)

    def intersection(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, "&", self.finite or other.finite)

    def difference(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, "-", self.finite)

    def complement(self) -> "IndexSet":
        return IndexSet.from_predicate(_Complement(self), n_max=self.n_max,
                                       finite=False, name=f"~{self.name}")

    __or__ = union
    __and__ = intersection
    __sub__ = difference


def as_mask(A, n: int) -> np.ndarray:
    """Coerce an IndexSet, boolean array or iterable of ints to a mask of length n."""
    if isinstance(A, IndexSet):
        return A.mask(n)
    if isinstance(A, np.ndarray) and A.dtype == bool:
        if len(A) < n:
            raise DomainError("mask shorter than requested n")
        return A[:n]
    out = np.zeros(n, dtype=bool)
    for i in A:
        if i < 1:
            raise DomainError("index sets contain positive integers only")
        if i <= n:
            out[i - 1] = True
    return out


# -- picklable predicate helpers ---------------------------------------

@dataclass(frozen=True)
class _Combined:
    op: str
    a: IndexSet
    b: IndexSet

    def __call__(self, idx):
        n = int(idx[-1]) if idx.size else 0
        ma, mb = self.a.mask(n), self.b.mask(n)
        if self.op == "|":
            m = ma | mb
        elif self.op == "&":
            m = ma & mb
        else:
            m = ma & ~mb
        return m[idx - 1]


@dataclass(frozen=True)
class _Complement:
    a: IndexSet

    def __call__(self, idx):
        n = int(idx[-1]) if idx.size else 0
        return ~self.a.mask(n)[idx - 1]


@dataclass(frozen=True)
class Multiples:
    k: int

    def __call__(self, idx):
        return idx % self.k == 0


@dataclass(frozen=True)
class Residue:
    r: int
    k: int

    def __call__(self, idx):
        return idx % self.k == self.r % self.k


def is_square(idx):
    r = np.floor(np.sqrt(idx.astype(np.float64))).astype(np.int64)
    r += (r + 1) * (r + 1) <= idx
    r -= r * r > idx
    return r * r == idx


def is_cube(idx):
    r = np.round(np.cbrt(idx.astype(np.float64))).astype(np.int64)
    return r * r * r == idx


def is_power_of_two(idx):
    return (idx & (idx - 1)) == 0


def is_triangular(idx):
    return is_square(8 * idx + 1)


def _sieve(n: int) -> np.ndarray:
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if s[p]:
            s[p * p::p] = False
    return s


def is_prime(idx):
    if idx.size == 0:
        return np.zeros(0, dtype=bool)
    return _sieve(int(idx.max()))[idx]


def is_squarefree(idx):
    if idx.size == 0:
        return np.zeros(0, dtype=bool)
    n = int(idx.max())
    sf = np.ones(n + 1, dtype=bool)
    for p in range(2, math.isqrt(n) + 1):
        sf[p * p::p * p] = False
    return sf[idx]


def even_dyadic_stage(idx):
    """``n`` with ``floor(log2 n)`` even, i.e. ``n ∈ [4^k, 2·4^k)``."""
    bl = np.floor(np.log2(idx.astype(np.float64))).astype(np.int64)
    return bl % 2 == 0


def evens(n_max=DEFAULT_NMAX):
    return IndexSet.from_predicate(Multiples(2), n_max, name="evens")


def odds(n_max=DEFAULT_NMAX):
    return IndexSet.from_predicate(Residue(1, 2), n_max, name="odds")


def squares(n_max=DEFAULT_NMAX):
    return IndexSet.from_predicate(is_square, n_max, name="squares")


def primes(n_max=DEFAULT_NMAX):
    return IndexSet.from_predicate(is_prime, n_max, name="primes")


def multiples(k, n_max=DEFAULT_NMAX):
    return IndexSet.from_predicate(Multiples(k), n_max, name=f"multiples-of-{k}")


def everything(n_max=DEFAULT_NMAX):
    return IndexSet.from_predicate(_All(), n_max, name="all")


@dataclass(frozen=True)
class _All:
    def __call__(self, idx):
        return np.ones(idx.shape, dtype=bool)


NAMED_SETS = {
    "evens": evens,
    "odds": odds,
    "squares": squares,
    "primes": primes,
    "all": everything,
    "cubes": lambda n_max=DEFAULT_NMAX: IndexSet.from_predicate(is_cube, n_max, name="cubes"),
    "powers-of-two": lambda n_max=DEFAULT_NMAX: IndexSet.from_predicate(
        is_power_of_two, n_max, name="powers-of-two"),
    "triangular": lambda n_max=DEFAULT_NMAX: IndexSet.from_predicate(
        is_triangular, n_max, name="triangular"),
    "squarefree": lambda n_max=DEFAULT_NMAX: IndexSet.from_predicate(
        is_squarefree, n_max, name="squarefree"),
    "even-dyadic-stages": lambda n_max=DEFAULT_NMAX: IndexSet.from_predicate(
        even_dyadic_stage, n_max, name="even-dyadic-stages"),
}


def named_set(name: str, n_max: int = DEFAULT_NMAX) -> IndexSet:
    """Look up a catalogue set; ``multiples-of-K`` and ``residue-R-mod-K`` are parsed."""
    if name in NAMED_SETS:
        return NAMED_SETS[name](n_max)
    if name.startswith("multiples-of-"):
        return multiples(int(name.rsplit("-", 1)[1]), n_max)
    if name.startswith("residue-"):
        _, r, _, k = name.split("-")
        return IndexSet.from_predicate(Residue(int(r), int(k)), n_max, name=name)
    if name.startswith("range-"):
        lo, hi = (int(v) for v in name[len("range-"):].split("-"))
        return IndexSet.explicit(range(lo, hi + 1), n_max=max(hi, n_max), name=name)
    raise KeyError(f"unknown set {name!r}")


def density_corpus(n_max: int = DEFAULT_NMAX) -> list:
    """Twenty fixed test sets with statistics well clear of the default verdict band."""
    ev, sq, od = evens(n_max), squares(n_max), odds(n_max)
    corpus = [
        ev, od, sq,
        named_set("cubes", n_max), named_set("powers-of-two", n_max),
        primes(n_max), multiples(3, n_max), multiples(5, n_max), multiples(7, n_max),
        multiples(1000, n_max), sq.complement(), ev | sq, ev & sq, od - sq,
        named_set("residue-1-mod-4", n_max), named_set("squarefree", n_max),
        named_set("even-dyadic-stages", n_max), IndexSet.empty(n_max),
        IndexSet.explicit(range(1, 11), n_max=n_max, name="first-ten"),
        named_set("triangular", n_max),
    ]
    return corpus
