"""Ideals on the positive integers and finite-scale membership verdicts.

Five families are represented: ``Fin``, the alpha-density ideals
``DensityAlpha``, Erdős–Ulam ideals ``Exh(phi_f)``, summable ideals and
generalized density ideals ``Z_mu``.  At finite scale "A belongs to the
ideal" becomes a three-way verdict obtained by comparing a tail statistic
against a deadband ``[in_threshold, not_in_threshold)``.

Every ideal contains ``Fin``, and the verdicts respect that: a set declared
finite is always ``InIdeal``, and a set with no element in the tail window
``(ceil(beta*N), N]`` is ``InIdeal`` whatever the family statistic says.
A set with fewer than ``min_hits`` tail elements is never promoted beyond
``Undecided``.
"""

from __future__ import annotations

import enum
import math
import warnings
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .indexset import DomainError, IndexSet, as_mask
from .submeasures import (BlockFamily, BlockNormalizedCount, BlockNormalizedWeight, BlockPartition,
                          DyadicPartition,
                          ErdosUlamSubmeasure, InvariantViolation, PowerWeight,
                          Submeasure, Weight, WeightRatioPartition,
                          compensated_cumsum, named_weight)


class ConfigError(ValueError):
    """Inconsistent experiment or threshold configuration."""


class IdealWarning(UserWarning):
    """A numerically checked ideal invariant looks doubtful on the prefix in use."""


@dataclass(frozen=True)
class MembershipConfig:
    in_threshold: float = 1e-2
    not_in_threshold: float = 5e-2
    window_fraction: float = 0.5
    min_hits: int = 20
    eu_cut_weight_fraction: float = 0.5
    summable_bound: float = 10.0
    eu_growth_tolerance: float = 0.05
    lambda_block_ratio: float = 2.0
    eu_block_ratio: float = 1.25
    block_window_fraction: float = 0.125
    fin_gate: bool = True

    def validate(self) -> "MembershipConfig":
        if not (0 < self.in_threshold <= self.not_in_threshold):
            raise ConfigError(
                f"threshold band inverted or empty: in={self.in_threshold}, "
                f"not_in={self.not_in_threshold}")
        if not (0 < self.window_fraction < 1):
            raise ConfigError("window_fraction must lie in (0, 1)")
        if not (0 < self.eu_cut_weight_fraction < 1):
            raise ConfigError("eu_cut_weight_fraction must lie in (0, 1)")
        if self.min_hits < 1:
            raise ConfigError("min_hits must be positive")
        if not (0 < self.block_window_fraction < 1):
            raise ConfigError("block_window_fraction must lie in (0, 1)")
        if self.lambda_block_ratio <= 1 or self.eu_block_ratio <= 1:
            raise ConfigError("block ratios must exceed 1")
        return self

    def tail_start(self, n: int) -> int:
        """fin_cut: the tail window is (tail_start, n]."""
        return min(math.ceil(self.window_fraction * n), n)


DEFAULT_CONFIG = MembershipConfig()


class Verdict(enum.Enum):
    IN_IDEAL = "InIdeal"
    NOT_IN_IDEAL = "NotInIdeal"
    UNDECIDED = "Undecided"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: Verdict
    statistic: float
    window: tuple
    threshold: float
    promotion: float
    gate: Optional[str] = None
    family_statistic: Optional[float] = None

    def as_dict(self):
        return {"verdict": str(self.verdict), "statistic": self.statistic,
                "window": list(self.window), "threshold": self.threshold,
                "promotion": self.promotion, "gate": self.gate,
                "family_statistic": self.family_statistic}


def _classify(stat, lo, hi):
    if stat < lo:
        return Verdict.IN_IDEAL
    if stat >= hi:
        return Verdict.NOT_IN_IDEAL
    return Verdict.UNDECIDED


# -- ideal families ------------------------------------------------------------

class IdealSpec:
    """Base for the tagged ideal descriptions."""

    family = "ideal"

    @property
    def label(self) -> str:
        return self.family

    def check(self, n: int, config: MembershipConfig = DEFAULT_CONFIG) -> list:
        """Numerical invariant checks on ``[1, n]``; returns human-readable issues."""
        return []


@dataclass(frozen=True)
class Fin(IdealSpec):
    family = "fin"


@dataclass(frozen=True)
class DensityAlpha(IdealSpec):
    alpha: float = 0.0
    family = "density"

    def __post_init__(self):
        if self.alpha < -1:
            raise DomainError("alpha must be >= -1")

    @property
    def label(self):
        return f"density({self.alpha:g})"

    @property
    def weight(self) -> Weight:
        return _power_weight(self.alpha)


@dataclass(frozen=True, eq=False)
class ErdosUlam(IdealSpec):
    weight: Weight
    family = "erdos-ulam"

    @property
    def label(self):
        return f"erdos-ulam({self.weight.name})"

    def check(self, n, config=DEFAULT_CONFIG):
        w = self.weight.values(n)
        if np.any(w <= 0):
            raise InvariantViolation(f"Erdős–Ulam weight must be positive (got {w.min()})")
        issues = []
        F = self.weight.cumulative(n)
        if w[-1] / F[-1] > config.eu_growth_tolerance:
            issues.append(f"f(n)/F(n) = {w[-1] / F[-1]:.3g} at n={n}: f = o(F) doubtful")
        if F[-1] < config.summable_bound:
            issues.append(f"partial sum {F[-1]:.3g} < {config.summable_bound}: divergence unconfirmed")
        return issues


@dataclass(frozen=True, eq=False)
class Summable(IdealSpec):
    weight: Weight
    family = "summable"

    @property
    def label(self):
        return f"summable({self.weight.name})"

    def check(self, n, config=DEFAULT_CONFIG):
        w = self.weight.values(n)
        if np.any(w < 0):
            raise InvariantViolation("summable weight must be non-negative")
        s = math.fsum(w)
        if s <= config.summable_bound:
            return [f"partial sum {s:.3g} <= {config.summable_bound}: divergence unconfirmed"]
        return []


@dataclass(frozen=True, eq=False)
class GeneralizedDensity(IdealSpec):
    """Z_mu for a partition (I_j) and block submeasures mu_j.

    ``window`` selects the blocks over which limsup_j is estimated:
    ``"endpoint"`` (default) takes blocks whose right end lies in
    [ceil(fraction*N), N], with ``fraction`` falling back to the config's
    ``block_window_fraction``; ``"block-index"`` takes j in [ceil(beta*J), J]
    for the J complete blocks; ``"after-cut"`` takes blocks lying inside
    (cut, N] for a given ``cut``.
    """

    partition: BlockPartition
    mu: BlockFamily
    name: str = "gdi"
    window: str = "endpoint"
    cut: Optional[int] = None
    fraction: Optional[float] = None
    family = "gdi"

    @property
    def label(self):
        return f"gdi({self.name})"

    def window_blocks(self, ends: np.ndarray, n: int, config: MembershipConfig) -> np.ndarray:
        """Indices (0-based) into ``ends`` of the blocks inside the limsup window."""
        J = ends.size
        if J == 0:
            return np.empty(0, dtype=np.int64)
        if self.window == "block-index":
            lo = max(math.ceil(config.window_fraction * J), 1)
            return np.arange(lo - 1, J)
        if self.window == "endpoint":
            frac = config.block_window_fraction if self.fraction is None else self.fraction
            return np.flatnonzero(ends >= math.ceil(frac * n))
        if self.window == "after-cut":
            starts = np.concatenate([[0], ends[:-1]])
            return np.flatnonzero(starts >= (self.cut or 0))
        raise ConfigError(f"unknown window {self.window!r}")

    def block_values(self, mask: np.ndarray) -> tuple:
        """(ends, mu_j(A ∩ I_j)) for the complete blocks of [1, len(mask)]."""
        ends = self.partition.ends_upto(len(mask))
        return ends, self.mu.block_values(mask, ends)

    def block_limsup(self, n: int, config: MembershipConfig = DEFAULT_CONFIG) -> float:
        """Windowed estimate of limsup_j mu_j(I_j)."""
        ends, vals = self.block_values(np.ones(n, dtype=bool))
        win = self.window_blocks(ends, n, config)
        return float(vals[win].max()) if win.size else 0.0

    def check(self, n, config=DEFAULT_CONFIG):
        v = self.block_limsup(n, config)
        if v <= 0:
            return [f"estimated limsup mu_j(I_j) = {v} on [1,{n}]: not positive"]
        return []


@lru_cache(maxsize=32)
def _power_weight(alpha):
    # shared instances keep the cumulative-sum cache warm
    return PowerWeight(float(alpha))


def natural_density_gdi() -> GeneralizedDensity:
    """Natural density as Z_mu: dyadic blocks, mu_j = |. ∩ I_j| / |I_j|."""
    return GeneralizedDensity(DyadicPartition(), BlockNormalizedCount(), name="natural-density")


def weight_gdi(weight: Weight, ratio: float = 2.0, window: str = "endpoint",
               cut: Optional[int] = None, name: str = "",
               fraction: Optional[float] = None) -> GeneralizedDensity:
    """Density-ideal representation along blocks on which F grows by ``ratio``.

    mu_j(A) = F(A ∩ I_j) / F(I_j).  Any two ratios give block families of
    bounded overlap, hence the same ideal; for f = 1 and ratio 2 this is the
    natural-density representation.
    """
    return GeneralizedDensity(WeightRatioPartition(weight, ratio), BlockNormalizedWeight(weight),
                              name=name or f"weight-blocks[{weight.name},{ratio:g}]",
                              window=window, cut=cut, fraction=fraction)


def eu_cut(weight: Weight, n: int, config: MembershipConfig = DEFAULT_CONFIG) -> int:
    """Smallest k with F(k) >= eu_cut_weight_fraction * F(n)."""
    F = weight.cumulative(n)
    return int(np.searchsorted(F, config.eu_cut_weight_fraction * F[-1], side="left")) + 1


def lambda_representation(ideal: IdealSpec, n: int,
                          config: MembershipConfig = DEFAULT_CONFIG) -> Optional[GeneralizedDensity]:
    """The generalized-density view used to estimate I-limit points, or None for F_sigma ideals."""
    if isinstance(ideal, GeneralizedDensity):
        return ideal
    if isinstance(ideal, DensityAlpha):
        return weight_gdi(ideal.weight, config.lambda_block_ratio, window="endpoint",
                          name=f"density({ideal.alpha:g})-blocks")
    if isinstance(ideal, ErdosUlam):
        return weight_gdi(ideal.weight, config.eu_block_ratio, window="after-cut",
                          cut=eu_cut(ideal.weight, n, config),
                          name=f"erdos-ulam({ideal.weight.name})-blocks")
    return None


# -- operations ----------------------------------------------------------------------

def alpha_weight_ratio(A, alpha: float, n: int, exact: bool = False):
    """sum_{i in A, i<=n} i^alpha / sum_{i<=n} i^alpha.

    ``exact=True`` (integer alpha >= 0 only) returns a Fraction computed with
    integer arithmetic.  The float path sums with ``math.fsum``.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if alpha < -1:
        raise DomainError("alpha must be >= -1")
    if isinstance(A, IndexSet) and n > A.n_max:
        raise DomainError(f"n={n} exceeds n_max={A.n_max}")
    mask = as_mask(A, n)
    if exact:
        if alpha != int(alpha) or alpha < 0:
            raise DomainError("exact path needs integer alpha >= 0")
        a = int(alpha)
        els = (np.flatnonzero(mask) + 1).tolist()
        return Fraction(sum(i ** a for i in els), sum(i ** a for i in range(1, n + 1)))
    w = _power_weight(alpha).values(n)
    return math.fsum(w[mask]) / math.fsum(w)


def alpha_ratio_series(mask: np.ndarray, alpha: float) -> np.ndarray:
    """Prefix ratios r(m), m = 1..len(mask), for the alpha-density."""
    w = _power_weight(alpha)
    n = len(mask)
    num = compensated_cumsum(np.where(mask, w.values(n), 0.0))
    return num / w.cumulative(n)


def limsup_estimate(values, window_fraction: float = 0.5) -> float:
    """Max of the values over n in [ceil(window_fraction * N), N].

    ``values`` is either a sequence of (n, value) pairs with increasing n, or a
    1-D array holding the value at n = 1..N.
    """
    if not (0 < window_fraction < 1):
        raise DomainError("window_fraction must lie in (0, 1)")
    if isinstance(values, np.ndarray) and values.ndim == 1:
        if values.size == 0:
            raise DomainError("limsup of an empty collection")
        lo = math.ceil(window_fraction * values.size)
        return float(values[lo - 1:].max())
    pairs = list(values)
    if not pairs:
        raise DomainError("limsup of an empty collection")
    N = pairs[-1][0]
    lo = math.ceil(window_fraction * N)
    return float(max(v for k, v in pairs if k >= lo))


def erdos_ulam_phi(f: Weight, A, n: int) -> float:
    """phi_f(A ∩ [1, n]) = max over m <= n of the weighted prefix ratio."""
    return ErdosUlamSubmeasure(f).evaluate(as_mask(A, n))


def exh_tail_value(phi: Submeasure, A, cut: int, N: int) -> float:
    """phi((A \\ [1, cut]) ∩ [1, N])."""
    if cut > N:
        raise DomainError(f"cut={cut} exceeds N={N}")
    if isinstance(A, IndexSet) and N > A.n_max:
        raise DomainError(f"N={N} exceeds n_max={A.n_max}")
    mask = as_mask(A, N).copy()
    mask[:max(cut, 0)] = False
    return phi.evaluate(mask)


def gdi_block_value(gdi: GeneralizedDensity, A, j: int) -> float:
    """mu_j(A ∩ I_j)."""
    lo, hi = gdi.partition.block(j)
    if isinstance(A, IndexSet) and hi > A.n_max:
        raise DomainError(f"block {j} = [{lo},{hi}] exceeds n_max={A.n_max}")
    mask = as_mask(A, hi)
    ends = gdi.partition.ends_upto(hi)
    return float(gdi.mu.block_values(mask, ends)[j - 1])


def family_statistic(ideal: IdealSpec, mask: np.ndarray,
                     config: MembershipConfig = DEFAULT_CONFIG) -> tuple:
    """(statistic, window, in_threshold, promotion) of the family formula on A ∩ [1, N]."""
    N = len(mask)
    tail = config.tail_start(N)
    if isinstance(ideal, Fin):
        stat = float(np.count_nonzero(mask[tail:]))
        return stat, (tail, N), 1.0, float(config.min_hits)
    if isinstance(ideal, DensityAlpha):
        if not mask.any():
            return 0.0, (max(tail, 1), N), config.in_threshold, config.not_in_threshold
        r = alpha_ratio_series(mask, ideal.alpha)
        lo = max(tail, 1)
        return float(r[lo - 1:].max()), (lo, N), config.in_threshold, config.not_in_threshold
    if isinstance(ideal, ErdosUlam):
        cut = min(eu_cut(ideal.weight, N, config), N)
        stat = exh_tail_value(ErdosUlamSubmeasure(ideal.weight), mask, cut, N)
        return stat, (cut, N), config.in_threshold, config.not_in_threshold
    if isinstance(ideal, Summable):
        w = ideal.weight.values(N)
        stat = math.fsum(w[tail:][mask[tail:]])
        return stat, (tail, N), config.in_threshold, config.not_in_threshold
    if isinstance(ideal, GeneralizedDensity):
        ends, vals = ideal.block_values(mask)
        win = ideal.window_blocks(ends, N, config)
        if win.size == 0:
            return float("nan"), (N, N), config.in_threshold, config.not_in_threshold
        starts = np.concatenate([[0], ends[:-1]])
        window = (int(starts[win[0]]) + 1, int(ends[win[-1]]))
        return float(vals[win].max()), window, config.in_threshold, config.not_in_threshold
    raise TypeError(f"unsupported ideal {ideal!r}")


def membership_mask(ideal: IdealSpec, mask: np.ndarray, config: MembershipConfig = DEFAULT_CONFIG,
                    finite: bool = False) -> MembershipVerdict:
    """Verdict for ``A ∩ [1, len(mask)]``; ``finite`` declares A itself finite."""
    N = len(mask)
    tail = config.tail_start(N)
    if finite:
        return MembershipVerdict(Verdict.IN_IDEAL, 0.0, (tail, N), config.in_threshold,
                                 config.not_in_threshold, gate="finite")
    stat, window, lo, hi = family_statistic(ideal, mask, config)
    if isinstance(ideal, Fin):
        return MembershipVerdict(_classify(stat, lo, hi), stat, window, lo, hi)
    if math.isnan(stat):
        return MembershipVerdict(Verdict.UNDECIDED, stat, window, lo, hi, gate="no-window")
    verdict = _classify(stat, lo, hi)
    tail_count = float(np.count_nonzero(mask[tail:]))
    fin_verdict = _classify(tail_count, 1.0, float(config.min_hits))
    if not config.fin_gate:
        fin_verdict = Verdict.NOT_IN_IDEAL
    if fin_verdict is Verdict.IN_IDEAL:
        return MembershipVerdict(Verdict.IN_IDEAL, tail_count, (tail, N), 1.0,
                                 float(config.min_hits), gate="fin", family_statistic=stat)
    if fin_verdict is Verdict.UNDECIDED and verdict is Verdict.NOT_IN_IDEAL:
        return MembershipVerdict(Verdict.UNDECIDED, tail_count, (tail, N), 1.0,
                                 float(config.min_hits), gate="fin", family_statistic=stat)
    return MembershipVerdict(verdict, stat, window, lo, hi)


def membership(ideal: IdealSpec, A: IndexSet, N: int,
               config: MembershipConfig = DEFAULT_CONFIG) -> MembershipVerdict:
    """Finite-scale verdict on whether A belongs to the ideal, using A ∩ [1, N]."""
    config.validate()
    if N > A.n_max:
        raise DomainError(f"N={N} exceeds n_max={A.n_max}")
    for issue in ideal.check(N, config):
        warnings.warn(f"{ideal.label}: {issue}", IdealWarning, stacklevel=2)
    return membership_mask(ideal, A.mask(N), config, finite=A.finite)


def alpha_equivalence_probe(A: IndexSet, alphas: Sequence[float], N: int,
                            config: MembershipConfig = DEFAULT_CONFIG) -> list:
    """Per-alpha windowed statistic and verdict of ``A`` under ``DensityAlpha(alpha)``."""
    for a in alphas:
        if a <= -1:
            raise DomainError(f"alpha={a} must exceed -1")
    rows = []
    for a in alphas:
        v = membership(DensityAlpha(a), A, N, config)
        rows.append({"alpha": float(a), "statistic": v.statistic, "verdict": v.verdict})
    return rows


# -- construction from structured config ----------------------------------------

def weight_from_config(d: dict) -> Weight:
    d = dict(d)
    name = d.pop("weight", d.pop("name", "constant"))
    if "weight_file" in d:
        return named_weight("tabulated", path=d.pop("weight_file"))
    params = {k: d[k] for k in ("c", "s", "path") if k in d}
    return named_weight(name, **params)


def ideal_from_config(d: dict) -> IdealSpec:
    """Build an ideal from a key-value mapping, e.g. ``{"family": "density", "alpha": 0}``."""
    fam = d.get("family")
    if fam == "fin":
        return Fin()
    if fam == "density":
        return DensityAlpha(float(d.get("alpha", 0.0)))
    if fam == "erdos-ulam":
        return ErdosUlam(weight_from_config(d))
    if fam == "summable":
        return Summable(weight_from_config(d))
    if fam == "gdi":
        rep = d.get("representation", "natural-density")
        if rep == "natural-density":
            return natural_density_gdi()
        if rep == "weight-blocks":
            return weight_gdi(weight_from_config(d), float(d.get("ratio", 2.0)))
        raise ConfigError(f"unknown gdi representation {rep!r}")
    raise ConfigError(f"unknown ideal family {fam!r}")


def parse_ideal(text: str) -> IdealSpec:
    """Compact form: ``fin``, ``density:ALPHA``, ``erdos-ulam:WEIGHT``, ``summable:WEIGHT``,
    ``gdi:natural-density``; weights are ``constant``, ``inverse`` or ``power=S``."""
    fam, _, arg = text.partition(":")
    if fam == "fin":
        return Fin()
    if fam == "density":
        return DensityAlpha(float(arg or 0))
    if fam in ("erdos-ulam", "summable"):
        if arg.startswith("power="):
            d = {"weight": "power", "s": float(arg.split("=", 1)[1])}
        elif arg.startswith("file="):
            d = {"weight_file": arg.split("=", 1)[1]}
        else:
            d = {"weight": arg or "constant"}
        return ideal_from_config({"family": fam, **d})
    if fam == "gdi":
        return ideal_from_config({"family": "gdi", "representation": arg or "natural-density"})
    raise ConfigError(f"cannot parse ideal {text!r}")
