"""Canonical sequences with analytically known limit sets.

Each entry documents L_x, Γ_x(I_0) and Λ_x(I_0) as point sets or intervals,
a short justification, a recommended neighbourhood schedule and a donor
index set for every target point (used to build witness subsequences).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .indexset import everything, odds, squares, evens
from .sequences import (BlockPattern, Constant, Formula, IndicatorSet, MetricSpace,
                        RationalEnumeration, SequenceSpec, level_set)


@dataclass(frozen=True)
class ExpectedSet:
    """A finite point set, or a union of closed boxes ``[lo, hi]`` (given per coordinate)."""

    points: tuple = ()
    boxes: tuple = ()

    def net(self, spacing: float) -> np.ndarray:
        """Finite stand-in: the points together with a grid of the boxes at ``spacing``."""
        parts = [np.asarray(self.points, dtype=np.float64).reshape(len(self.points), -1)] if self.points else []
        for lo, hi in self.boxes:
            lo, hi = np.atleast_1d(lo).astype(float), np.atleast_1d(hi).astype(float)
            axes = [np.linspace(a, b, max(int(np.ceil((b - a) / spacing)), 1) + 1) for a, b in zip(lo, hi)]
            mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)
            parts.append(mesh)
        if not parts:
            return np.empty((0, 1))
        return np.unique(np.concatenate(parts), axis=0)

    def as_dict(self):
        return {"points": [list(np.atleast_1d(p)) for p in self.points],
                "boxes": [[list(np.atleast_1d(lo)), list(np.atleast_1d(hi))] for lo, hi in self.boxes]}


@dataclass(frozen=True, eq=False)
class ZooEntry:
    name: str
    spec: SequenceSpec
    L: ExpectedSet
    Gamma: ExpectedSet
    Lambda: ExpectedSet
    justification: str
    eps0: float = 0.5
    M: int = 8
    donors: tuple = ()          # (point, IndexSet) pairs

    def targets(self, n_max: int = 10**7) -> list:
        return [(np.atleast_1d(np.asarray(p, dtype=np.float64)), d) for p, d in self.donors]

    def as_dict(self):
        return {"name": self.name, "spec": self.spec.describe(), "L": self.L.as_dict(),
                "Gamma": self.Gamma.as_dict(), "Lambda": self.Lambda.as_dict(),
                "justification": self.justification,
                "schedule": {"eps0": self.eps0, "M": self.M},
                "donors": [{"target": list(np.atleast_1d(p)), "set": d.name} for p, d in self.donors]}


def _pts(*ps):
    return tuple(tuple(np.atleast_1d(p).astype(float).tolist()) for p in ps)


def _constant_zero():
    spec = Constant((0.0,))
    return ZooEntry(
        "constant-zero", spec, ExpectedSet(_pts(0)), ExpectedSet(_pts(0)), ExpectedSet(_pts(0)),
        "x_n = 0 for all n; every neighbourhood of 0 contains all indices and ℕ is in no ideal.",
        donors=((0.0, everything()),))


def _squares_indicator():
    spec = IndicatorSet(squares(), (1.0,), (0.0,))
    return ZooEntry(
        "squares-indicator", spec, ExpectedSet(_pts(0, 1)), ExpectedSet(_pts(0)), ExpectedSet(_pts(0)),
        "x_n = 1 on perfect squares and 0 elsewhere. Both values recur infinitely often, "
        "but the squares have density floor(sqrt n)/n -> 0, so only 0 is a statistical "
        "cluster or limit point.",
        donors=((0.0, squares().complement()), (1.0, squares())))


def _evens_indicator():
    spec = IndicatorSet(evens(), (1.0,), (0.0,))
    return ZooEntry(
        "evens-indicator", spec, ExpectedSet(_pts(0, 1)), ExpectedSet(_pts(0, 1)), ExpectedSet(_pts(0, 1)),
        "x_n = 1 on even n and 0 on odd n; both level sets have density 1/2.",
        donors=((0.0, odds()), (1.0, evens())))


def _rational_enumeration():
    spec = RationalEnumeration(0.0, 1.0)
    grid = np.arange(17) / 16.0
    return ZooEntry(
        "rational-enumeration-[0,1]", spec,
        ExpectedSet(boxes=(((0.0,), (1.0,)),)), ExpectedSet(boxes=(((0.0,), (1.0,)),)),
        ExpectedSet(boxes=(((0.0,), (1.0,)),)),
        "Dyadic rationals in doubling stages [2^s, 2^{s+1}). Three quarters of each stage sweep "
        "a grid of level floor(s/3), so every interval of length h receives a share of about h "
        "of each stage and Γ(I_0) = L = [0,1]. The remaining quarter sweeps a grid whose level "
        "cycles 0; 0,1; 0,1,2; ..., so each dyadic rational of level g is hit with upper "
        "density at least 1/(8(2^g+1)); Λ(I_0) is the set of dyadic rationals, a dense subset "
        "represented here by the interval.",
        eps0=0.5, M=3,
        donors=tuple((float(g), level_set(spec, g, name=f"x=={g:g}")) for g in grid))


def _inverse_n():
    spec = Formula("inverse")
    return ZooEntry(
        "inverse-n", spec, ExpectedSet(_pts(0)), ExpectedSet(_pts(0)), ExpectedSet(_pts(0)),
        "x_n = 1/n converges to 0, so every neighbourhood of 0 holds a cofinite index set; "
        "each other value occurs once.",
        donors=((0.0, everything()),))


def _doubling_blocks():
    spec = BlockPattern(((0.0,), (1.0,)), "doubling")
    return ZooEntry(
        "doubling-blocks-01", spec, ExpectedSet(_pts(0, 1)), ExpectedSet(_pts(0, 1)),
        ExpectedSet(_pts(0, 1)),
        "Blocks [2^k, 2^{k+1}) alternate between 0 and 1; at the end of a block of either "
        "level that level holds about 2/3 of the indices, so both level sets have upper "
        "density 2/3 while neither has a density.",
        donors=((0.0, level_set(spec, 0.0, name="even-blocks")),
                (1.0, level_set(spec, 1.0, name="odd-blocks"))))


def _corners():
    space = MetricSpace(2, "max", "plane with the max-coordinate metric")
    inner = IndicatorSet(odds(), (1.0, 0.0), (0.0, 0.0), space)
    spec = IndicatorSet(squares(), (1.0, 1.0), inner, space)
    return ZooEntry(
        "corners-squares-2d", spec, ExpectedSet(_pts((0, 0), (1, 0), (1, 1))),
        ExpectedSet(_pts((0, 0), (1, 0))), ExpectedSet(_pts((0, 0), (1, 0))),
        "x_n = (1,1) on squares, otherwise (n mod 2, 0). The two parity corners carry "
        "density 1/2 each and the square corner density 0.",
        donors=(((0.0, 0.0), evens() - squares()), ((1.0, 0.0), odds() - squares()),
                ((1.0, 1.0), squares())))


_BUILDERS = {
    "constant-zero": _constant_zero,
    "squares-indicator": _squares_indicator,
    "evens-indicator": _evens_indicator,
    "rational-enumeration-[0,1]": _rational_enumeration,
    "inverse-n": _inverse_n,
    "doubling-blocks-01": _doubling_blocks,
    "corners-squares-2d": _corners,
}

ZOO_NAMES = tuple(_BUILDERS)


def zoo(name: str) -> ZooEntry:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown zoo entry {name!r}; known: {', '.join(ZOO_NAMES)}") from None


def export_catalogue() -> str:
    return json.dumps([zoo(n).as_dict() for n in ZOO_NAMES], indent=2, ensure_ascii=False)
