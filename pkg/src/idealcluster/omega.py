"""Subsequences as dyadic reals ω ∈ (0, 1].

The digits d_i of the non-terminating binary expansion of ω select the
indices n_1 < n_2 < ... with d_{n_k} = 1, and x↾ω = (x_{n_k}).  An
:class:`OmegaPrefix` stores d_1..d_M plus a tail policy that fixes every
later digit and always leaves infinitely many ones.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .indexset import IndexSet, Multiples
from .sequences import SequencePrefix
from .submeasures import InvariantViolation


class WitnessConstructionError(RuntimeError):
    """A donor cannot supply the selections the witness schedule asks for."""


class EmptySubsequenceWarning(UserWarning):
    pass


# -- tail policies ---------------------------------------------------------------

@dataclass(frozen=True)
class AllOnes:
    def digits(self, start: int, stop: int) -> np.ndarray:
        """Digits d_i for start <= i <= stop."""
        return np.ones(max(stop - start + 1, 0), dtype=np.uint8)

    def tag(self):
        return "ones"


@dataclass(frozen=True)
class PeriodicOnes:
    """d_i = 1 iff i is a multiple of ``period``."""

    period: int

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("period must be positive")

    def digits(self, start, stop):
        i = np.arange(start, stop + 1)
        return (i % self.period == 0).astype(np.uint8)

    def tag(self):
        return f"periodic({self.period})"


@dataclass(frozen=True, eq=False)
class CopyFrom:
    """d_i = other.d_{i + offset}."""

    other: "OmegaPrefix"
    offset: int = 0

    def digits(self, start, stop):
        if stop < start:
            return np.zeros(0, dtype=np.uint8)
        src = self.other.digits_upto(stop + self.offset)
        return src[start - 1 + self.offset: stop + self.offset].copy()

    def tag(self):
        return f"copy({self.offset})[{self.other.to_text()}]"


TailPolicy = Union[AllOnes, PeriodicOnes, CopyFrom]


@dataclass(frozen=True, eq=False)
class OmegaPrefix:
    digits: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.uint8))
    tail: TailPolicy = field(default_factory=AllOnes)

    def __post_init__(self):
        d = np.asarray(self.digits, dtype=np.uint8).ravel().copy()
        if d.size and d.max() > 1:
            raise ValueError("digits are bits")
        d.setflags(write=False)
        object.__setattr__(self, "digits", d)

    @property
    def M(self) -> int:
        return int(self.digits.size)

    def digits_upto(self, N: int) -> np.ndarray:
        """d_1..d_N with the tail policy applied beyond M."""
        if N <= self.M:
            return self.digits[:N]
        return np.concatenate([self.digits, self.tail.digits(self.M + 1, N)])

    def digit(self, i: int) -> int:
        return int(self.digits_upto(i)[i - 1])

    def to_text(self) -> str:
        return "digits:" + "".join(map(str, self.digits.tolist())) + "|tail:" + self.tail.tag()

    def same_digits(self, other: "OmegaPrefix", N: int) -> bool:
        return bool(np.array_equal(self.digits_upto(N), other.digits_upto(N)))

    def __repr__(self):
        text = self.to_text()
        return f"OmegaPrefix({text if len(text) < 80 else text[:77] + '...'})"


_TEXT = re.compile(r"^digits:([01]*)\|tail:(.*)$")


def omega_from_text(text: str) -> OmegaPrefix:
    """Inverse of :meth:`OmegaPrefix.to_text`."""
    m = _TEXT.match(text.strip())
    if not m:
        raise ValueError(f"malformed omega record {text!r}")
    digits = np.array([int(c) for c in m.group(1)], dtype=np.uint8)
    tail = m.group(2)
    if tail == "ones":
        pol = AllOnes()
    elif tail.startswith("periodic("):
        pol = PeriodicOnes(int(tail[len("periodic("):-1]))
    elif tail.startswith("copy("):
        close = tail.index(")")
        offset = int(tail[len("copy("):close])
        inner = tail[close + 1:]
        if not (inner.startswith("[") and inner.endswith("]")):
            raise ValueError(f"malformed copy tail {tail!r}")
        pol = CopyFrom(omega_from_text(inner[1:-1]), offset)
    else:
        raise ValueError(f"unknown tail policy {tail!r}")
    return OmegaPrefix(digits, pol)


ALL_ONES = OmegaPrefix()


# -- codec -------------------------------------------------------------------------

def decode(omega: OmegaPrefix, N: int) -> IndexSet:
    """{i <= N : d_i(ω) = 1}."""
    d = omega.digits_upto(N)
    return IndexSet.explicit(np.flatnonzero(d) + 1, n_max=N, finite=False, name="decode")


def encode(selected: IndexSet, M: int, tail: Optional[TailPolicy] = None) -> OmegaPrefix:
    """Digits of ``selected ∩ [1, M]`` and a non-terminating tail.

    Without an explicit ``tail``, a multiples-of-k predicate keeps the
    matching :class:`PeriodicOnes` tail and everything else gets
    :class:`AllOnes`.  A set declared finite has no non-terminating encoding.
    """
    if M < 1:
        raise ValueError("M must be positive")
    if selected.finite:
        raise InvariantViolation(f"{selected.name or 'set'} is finite: its expansion would terminate")
    digits = selected.mask(M).astype(np.uint8)
    if tail is None:
        pred = selected._predicate
        if isinstance(pred, Multiples):
            tail = PeriodicOnes(pred.k)
        else:
            tail = AllOnes()
    return OmegaPrefix(digits, tail)


def _tail_value(tail, after: int) -> Optional[Fraction]:
    """Closed form of sum_{i > after} d_i 2^{-i}, if the policy has one."""
    if isinstance(tail, AllOnes):
        return Fraction(1, 2 ** after)
    if isinstance(tail, PeriodicOnes):
        p = tail.period
        k0 = p * (after // p + 1)
        return Fraction(1, 2 ** k0) / (1 - Fraction(1, 2 ** p))
    return None


def dyadic_value(omega: OmegaPrefix, precision: Optional[int] = None) -> Fraction:
    """Exact partial sum of sum d_i 2^{-i} to ``precision`` digits.

    When ``precision >= M`` and the tail is AllOnes or PeriodicOnes, the tail's
    closed form is added, so the result is the exact value of ω.  Copy tails
    are truncated at ``precision``.
    """
    P = max(omega.M, 64) if precision is None else int(precision)
    d = omega.digits_upto(P)
    num = 0
    for bit in d.tolist():
        num = 2 * num + bit
    val = Fraction(num, 2 ** P)
    if P >= omega.M:
        tv = _tail_value(omega.tail, P)
        if tv is not None:
            val += tv
    return val


def subsequence(x: SequencePrefix, omega: OmegaPrefix) -> SequencePrefix:
    """x↾ω restricted to n_k <= N."""
    sel = np.flatnonzero(omega.digits_upto(x.N))
    if sel.size == 0:
        warnings.warn("ω selects no index in [1, N]; empty subsequence", EmptySubsequenceWarning,
                      stacklevel=2)
    return SequencePrefix(x.values[sel], x.space, None, label=f"{x.label}|omega")


def splice(prefix_bits: Sequence[int], donor: OmegaPrefix) -> OmegaPrefix:
    """Digits e_1..e_{n1} followed by the donor's digits d_{n1+1}, d_{n1+2}, ..."""
    e = np.asarray(prefix_bits, dtype=np.uint8).ravel()
    if e.size == 0:
        return donor
    return OmegaPrefix(e, CopyFrom(donor, 0))


# -- sampling ----------------------------------------------------------------------

def random_bits(seed: int, M: int, stream: int = 0) -> np.ndarray:
    """M fair bits from Philox-4x64 keyed by (seed, stream); bits are read LSB first."""
    if M < 0:
        raise ValueError("M must be non-negative")
    key = (int(seed) & (2**64 - 1)) | ((int(stream) & (2**64 - 1)) << 64)
    bitgen = np.random.Philox(key=key)
    words = bitgen.random_raw(-(-M // 64)).astype("<u8")
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")
    return bits[:M]


def sample_uniform(seed: int, M: int, stream: int = 0) -> OmegaPrefix:
    """Uniform ω: M independent fair digits, then the all-ones tail."""
    if M < 1:
        raise ValueError("M must be positive")
    return OmegaPrefix(random_bits(seed, M, stream), AllOnes())


# -- constructions -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SelectionReport:
    omega: OmegaPrefix
    selected: IndexSet
    construction_log: tuple
    targets: tuple = ()

    def log_text(self) -> str:
        lines = ["cycle,target,start,end,count"]
        lines += [",".join(str(v) for v in row) for row in self.construction_log]
        return "\n".join(lines)

    def as_dict(self):
        return {"omega": self.omega.to_text(), "selected_count": int(self.selected.elements().size),
                "targets": [list(map(float, np.atleast_1d(t))) for t in self.targets],
                "log": [dict(zip(("cycle", "target", "start", "end", "count"), r))
                        for r in self.construction_log]}


def _donor_indices(donor, N: int) -> np.ndarray:
    if isinstance(donor, OmegaPrefix):
        return np.flatnonzero(donor.digits_upto(N)) + 1
    if isinstance(donor, IndexSet):
        return donor.elements(min(N, donor.n_max))
    return np.asarray(donor, dtype=np.int64)


def greedy_donor(x: SequencePrefix, target, eps: float) -> IndexSet:
    """{n <= N : d(x_n, target) < eps}, a finite-scale stand-in for a convergent subsequence."""
    mask = x.distances(target) < eps
    return IndexSet.from_mask(mask, finite=False, name=f"near{list(np.atleast_1d(target))}")


def generic_witness(x: SequencePrefix, targets: Sequence, schedule: str = "doubling") -> SelectionReport:
    """Interleave donor selections so that every target recurs with positive upper density.

    ``targets`` holds (point, donor) pairs, donors being IndexSets, OmegaPrefixes
    or index arrays.  Cycle c gives each target, in order, a block that copies
    its donor's digits until 2^c donor indices have been taken, so within any
    completed cycle each target supplies exactly a 1/#targets share of the
    selected positions.  The last block is cut at N.
    """
    if schedule != "doubling":
        raise ValueError(f"unknown schedule {schedule!r}")
    if not targets:
        raise ValueError("need at least one target")
    N = x.N
    donors = []
    for k, (pt, donor) in enumerate(targets):
        idx = _donor_indices(donor, N)
        if idx.size == 0:
            raise WitnessConstructionError(
                f"donor for target {list(np.atleast_1d(pt))} selects nothing in [1, {N}]")
        donors.append(idx)
    digits = np.zeros(N, dtype=np.uint8)
    log = []
    p = 0
    c = 0
    while p < N:
        for t, idx in enumerate(donors):
            if p >= N:
                break
            need = 1 << c
            k = int(np.searchsorted(idx, p, side="right"))
            avail = idx[k:k + need]
            end = int(avail[-1]) if avail.size == need else N
            digits[avail - 1] = 1
            log.append((c, t, p + 1, end, int(avail.size)))
            p = end
        c += 1
    omega = OmegaPrefix(digits, AllOnes())
    selected = decode(omega, N)
    return SelectionReport(omega, selected, tuple(log),
                           tuple(np.atleast_1d(np.asarray(pt, dtype=float)) for pt, _ in targets))
