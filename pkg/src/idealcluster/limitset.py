"""Finite-prefix estimates of L_x, Γ_x(I) and Λ_x(I).

A candidate ℓ is tested through its neighbourhood index sets
``A_m = {n <= N : d(x_n, ℓ) < eps_m}`` with ``eps_m = eps0 * 2^-m``,
m = 0..M.  Candidates are grid nodes at spacing about eps_M near the data,
plus every value that occurs at least ``min_hits`` times.

Every estimate shares the tail window ``(ceil(beta*N), N]``: L needs
``min_hits`` tail hits at each scale and Γ needs a NotInIdeal verdict, which
itself requires those tail hits.  Λ needs a block level q reached at every
scale and, since a set K ∉ I with x_K -> ℓ forces every A_m ∉ I, the same
NotInIdeal verdicts that Γ asks for.  Hence accepted(Λ) ⊆ accepted(Γ) ⊆
accepted(L) at any N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .ideals import (DEFAULT_CONFIG, ConfigError, Fin,
                     GeneralizedDensity, IdealSpec, MembershipConfig, Summable, Verdict,
                     lambda_representation, membership_mask)
from .omega import OmegaPrefix, subsequence
from .sequences import MetricSpace, SequencePrefix

Q_FRACTIONS = (0.5, 0.25, 0.1, 0.05, 0.01)


class LambdaWitnessError(RuntimeError):
    """No block sequence realizes the requested level; ``kind`` is "shortfall" or "rejection"."""

    def __init__(self, message, kind, best, required):
        super().__init__(message)
        self.kind = kind
        self.best = best
        self.required = required


@dataclass(frozen=True)
class NeighborhoodSchedule:
    eps0: float = 0.5
    M: int = 8

    def __post_init__(self):
        if not (self.eps0 > 0 and math.isfinite(self.eps0)):
            raise ConfigError("eps0 must be positive and finite")
        if self.M < 0:
            raise ConfigError("M must be non-negative")

    def eps(self, m: int) -> float:
        return self.eps0 * 2.0 ** (-m)

    @property
    def radii(self) -> np.ndarray:
        return self.eps0 * 2.0 ** (-np.arange(self.M + 1))

    @property
    def eps_M(self) -> float:
        return self.eps(self.M)


# -- candidates ---------------------------------------------------------------------

def grid_spacing(schedule: NeighborhoodSchedule, d: int) -> float:
    return schedule.eps_M * min(1.0, 1.9 / math.sqrt(d))


def _check_resolution(values: np.ndarray, schedule: NeighborhoodSchedule):
    scale = float(np.max(np.abs(values))) if values.size else 1.0
    resolution = 16 * np.spacing(max(scale, 1.0))
    if schedule.eps_M <= resolution:
        raise ConfigError(f"eps_M = {schedule.eps_M:g} is below the data resolution {resolution:g}")


def candidate_grid(x: SequencePrefix, schedule: NeighborhoodSchedule, min_hits: int) -> np.ndarray:
    """Grid nodes within eps_M of some term, plus heavy hitters; sorted and unique."""
    v = x.values
    d = v.shape[1]
    if v.shape[0] == 0:
        return np.empty((0, d))
    _check_resolution(v, schedule)
    h = grid_spacing(schedule, d)
    base = np.unique(np.rint(v / h).astype(np.int64), axis=0)
    offsets = np.array(list(product((-1, 0, 1), repeat=d)), dtype=np.int64)
    nodes = np.unique((base[:, None, :] + offsets[None, :, :]).reshape(-1, d), axis=0)
    pts = nodes * h
    distinct, counts = np.unique(v, axis=0, return_counts=True)
    tree = cKDTree(distinct)
    dist, _ = tree.query(pts, k=1, p=x.space.minkowski_p)
    pts = pts[dist <= schedule.eps_M * (1 + 1e-12)]
    heavy = distinct[counts >= min_hits]
    return np.unique(np.concatenate([pts, heavy]), axis=0)


# -- reports --------------------------------------------------------------------------

@dataclass
class CandidateRecord:
    point: np.ndarray
    status: str                        # accepted / rejected / undecided
    statistics: list                   # one value per level m
    verdicts: list                     # one verdict label per level m
    passing_q: Optional[float] = None
    reason: str = ""

    def as_dict(self):
        return {"point": [float(c) for c in self.point], "status": self.status,
                "statistics": [float(s) for s in self.statistics],
                "verdicts": list(self.verdicts), "passing_q": self.passing_q, "reason": self.reason}


@dataclass
class LimitSetReport:
    kind: str
    records: list
    params: dict = field(default_factory=dict)

    def _select(self, status):
        pts = [r.point for r in self.records if r.status == status]
        d = self.params.get("dimension", 1)
        return np.array(pts).reshape(len(pts), d) if pts else np.empty((0, d))

    @property
    def accepted(self) -> np.ndarray:
        return self._select("accepted")

    @property
    def rejected(self) -> np.ndarray:
        return self._select("rejected")

    @property
    def undecided(self) -> np.ndarray:
        return self._select("undecided")

    def as_dict(self):
        return {"kind": self.kind, "params": self.params,
                "accepted": self.accepted.tolist(), "undecided": self.undecided.tolist(),
                "records": [r.as_dict() for r in self.records]}

    def rows(self):
        """Flat records for tabular output."""
        out = []
        for r in self.records:
            row = {"kind": self.kind}
            for i, c in enumerate(r.point):
                row[f"x{i}"] = float(c)
            row["status"] = r.status
            row["passing_q"] = r.passing_q
            for m, (s, v) in enumerate(zip(r.statistics, r.verdicts)):
                row[f"stat_{m}"] = float(s)
                row[f"verdict_{m}"] = v
            out.append(row)
        return out


def _params(x, schedule, config, **extra):
    return {"N": x.N, "eps0": schedule.eps0, "M": schedule.M, "metric": x.space.metric,
            "dimension": x.space.dimension, "min_hits": config.min_hits, **extra}


def _level_masks(x: SequencePrefix, point, schedule: NeighborhoodSchedule) -> np.ndarray:
    """Boolean array (M+1, N): row m is A_m."""
    dist = x.distances(point)
    return dist[None, :] < schedule.radii[:, None]


def _candidates(x, schedule, config, candidates):
    if candidates is None:
        return candidate_grid(x, schedule, config.min_hits)
    c = np.asarray(candidates, dtype=np.float64)
    return c.reshape(-1, x.space.dimension)


def _prefiltered(x, pts, schedule, config):
    """Split candidates by whether the finest ball holds any tail term.

    Without the Fin gate the whole prefix counts as tail.
    """
    tail = config.tail_start(x.N) if config.fin_gate else 0
    tv = x.values[tail:]
    if tv.shape[0] == 0 or pts.shape[0] == 0:
        return np.zeros(pts.shape[0], dtype=bool)
    tree = cKDTree(tv)
    dist, _ = tree.query(pts, k=1, p=x.space.minkowski_p)
    return dist < schedule.eps_M


def _empty_record(p, schedule, reason="no tail term within eps_M"):
    return CandidateRecord(p, "rejected", [0.0] * (schedule.M + 1),
                           ["InIdeal"] * (schedule.M + 1), reason=reason)


def estimate_L(x: SequencePrefix, schedule: NeighborhoodSchedule, min_hits: Optional[int] = None,
               config: MembershipConfig = DEFAULT_CONFIG, candidates=None) -> LimitSetReport:
    """Accept ℓ iff every ball B(ℓ, eps_m) holds at least ``min_hits`` tail terms."""
    if min_hits is not None:
        config = replace(config, min_hits=int(min_hits))
    config.validate()
    if x.N < config.min_hits:
        raise ConfigError(f"N={x.N} is below min_hits={config.min_hits}")
    pts = _candidates(x, schedule, config, candidates)
    live = _prefiltered(x, pts, schedule, replace(config, fin_gate=True))
    tail = config.tail_start(x.N)
    records = []
    for p, ok in zip(pts, live):
        if not ok:
            records.append(_empty_record(p, schedule))
            continue
        counts = _level_masks(x, p, schedule)[:, tail:].sum(axis=1)
        good = counts >= config.min_hits
        records.append(CandidateRecord(p, "accepted" if good.all() else "rejected",
                                       counts.astype(float).tolist(),
                                       ["hit" if g else "miss" for g in good]))
    return LimitSetReport("L", records, _params(x, schedule, config, ideal="fin-tail-count"))


def estimate_Gamma(x: SequencePrefix, ideal: IdealSpec, schedule: NeighborhoodSchedule,
                   config: MembershipConfig = DEFAULT_CONFIG, candidates=None) -> LimitSetReport:
    """Accept ℓ iff every A_m gets NotInIdeal; any InIdeal rejects; otherwise undecided."""
    config.validate()
    pts = _candidates(x, schedule, config, candidates)
    live = _prefiltered(x, pts, schedule, config)
    records = []
    for p, ok in zip(pts, live):
        if not ok:
            records.append(_empty_record(p, schedule))
            continue
        masks = _level_masks(x, p, schedule)
        vs = [membership_mask(ideal, masks[m], config) for m in range(schedule.M + 1)]
        labels = [str(v.verdict) for v in vs]
        if all(v.verdict is Verdict.NOT_IN_IDEAL for v in vs):
            status = "accepted"
        elif any(v.verdict is Verdict.IN_IDEAL for v in vs):
            status = "rejected"
        else:
            status = "undecided"
        records.append(CandidateRecord(p, status, [v.statistic for v in vs], labels))
    return LimitSetReport("Gamma", records, _params(x, schedule, config, ideal=ideal.label))


# -- generalized density machinery ------------------------------------------------------

def _gdi_window(gdi: GeneralizedDensity, N: int, config: MembershipConfig):
    ends = gdi.partition.ends_upto(N)
    return ends, gdi.window_blocks(ends, N, config)


def block_limsup(gdi: GeneralizedDensity, N: int, config: MembershipConfig = DEFAULT_CONFIG) -> float:
    return gdi.block_limsup(N, config)


def make_qgrid(gdi: GeneralizedDensity, N: int, config: MembershipConfig = DEFAULT_CONFIG,
               qgrid: Optional[Sequence[float]] = None) -> list:
    """Decreasing q levels, all at least the InIdeal threshold.

    By default the levels are Q_FRACTIONS times the windowed estimate of
    limsup mu_j(I_j).  Levels below the threshold are dropped; an explicitly
    supplied grid that ends up empty is a configuration error.
    """
    if qgrid is not None:
        vals = sorted({float(q) for q in qgrid}, reverse=True)
        if not vals:
            raise ConfigError("empty q-grid")
        if any(q <= 0 for q in vals):
            raise ConfigError("q-grid values must be positive")
        kept = [q for q in vals if q >= config.in_threshold]
        if not kept:
            raise ConfigError(f"every q-grid value is below in_threshold={config.in_threshold}")
        return kept
    top = gdi.block_limsup(N, config)
    return [f * top for f in Q_FRACTIONS if f * top >= config.in_threshold]


def _window_stats(gdi, masks, ends, win):
    """Per level m: max over window blocks of mu_j(A_m ∩ I_j)."""
    out = np.zeros(masks.shape[0])
    if win.size == 0:
        return out
    for m in range(masks.shape[0]):
        vals = gdi.mu.block_values(masks[m], ends)
        out[m] = vals[win].max()
    return out


def v_ell_statistic(x: SequencePrefix, omega: OmegaPrefix, ell, gdi: GeneralizedDensity,
                    schedule: NeighborhoodSchedule, config: MembershipConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Windowed limsup_j mu_j(A_{ω,m} ∩ I_j), positions k counted along x↾ω."""
    sub = subsequence(x, omega)
    if sub.N == 0:
        raise ValueError("ω selects no index in [1, N]")
    masks = _level_masks(sub, ell, schedule)
    ends, win = _gdi_window(gdi, sub.N, config)
    return _window_stats(gdi, masks, ends, win)


def estimate_Lambda_gdi(x: SequencePrefix, gdi: GeneralizedDensity, schedule: NeighborhoodSchedule,
                        qgrid: Optional[Sequence[float]] = None,
                        config: MembershipConfig = DEFAULT_CONFIG, candidates=None,
                        label: Optional[str] = None,
                        certify: Optional[IdealSpec] = None) -> LimitSetReport:
    """Accept ℓ iff some q has windowed block statistics >= q at every scale.

    Acceptance also needs a NotInIdeal verdict for every A_m under
    ``certify`` (default: the generalized density ideal itself).  A point is
    rejected when some scale has a statistic below ``in_threshold`` or an
    InIdeal verdict; otherwise it is undecided.
    """
    certify = gdi if certify is None else certify
    config.validate()
    N = x.N
    pts = _candidates(x, schedule, config, candidates)
    ends, win = _gdi_window(gdi, N, config)
    params = _params(x, schedule, config, ideal=label or gdi.label,
                     blocks_in_window=int(win.size))
    if win.size == 0:
        if qgrid is not None:
            make_qgrid(gdi, N, config, qgrid)
        recs = [CandidateRecord(p, "undecided", [float("nan")] * (schedule.M + 1),
                                ["Undecided"] * (schedule.M + 1),
                                reason=f"no complete block in the window at N={N}") for p in pts]
        return LimitSetReport("Lambda", recs, {**params, "qgrid": []})
    levels = make_qgrid(gdi, N, config, qgrid)
    params["qgrid"] = levels
    live = _prefiltered(x, pts, schedule, config)
    records = []
    for p, ok in zip(pts, live):
        if not ok:
            records.append(_empty_record(p, schedule))
            continue
        masks = _level_masks(x, p, schedule)
        stats = _window_stats(gdi, masks, ends, win)
        cert = [membership_mask(certify, masks[m], config).verdict for m in range(schedule.M + 1)]
        cert_ok = all(v is Verdict.NOT_IN_IDEAL for v in cert)
        low = float(stats.min())
        passing = [q for q in levels if low >= q]
        labels = [str(v) for v in cert]
        if passing and cert_ok:
            records.append(CandidateRecord(p, "accepted", stats.tolist(), labels, passing_q=passing[0]))
            continue
        hard = (stats < config.in_threshold).any() or any(v is Verdict.IN_IDEAL for v in cert)
        reason = "no q level reached" if levels else "q-grid empty: block limsup below threshold"
        if passing and not cert_ok:
            reason = f"index sets not certified outside {certify.label}"
        records.append(CandidateRecord(p, "rejected" if hard else "undecided", stats.tolist(), labels,
                                       reason=reason))
    return LimitSetReport("Lambda", records, params)


def estimate_Lambda(x: SequencePrefix, ideal: IdealSpec, schedule: NeighborhoodSchedule,
                    config: MembershipConfig = DEFAULT_CONFIG, qgrid=None, candidates=None) -> LimitSetReport:
    """Λ_x(I) by family: F_sigma ideals (Fin, summable) coincide with Γ; the
    density-like families go through their generalized-density representation."""
    if isinstance(ideal, (Fin, Summable)):
        rep = estimate_Gamma(x, ideal, schedule, config, candidates)
        rep.params["route"] = "gamma (F_sigma ideal)"
        return LimitSetReport("Lambda", rep.records, rep.params)
    gdi = lambda_representation(ideal, x.N, config)
    rep = estimate_Lambda_gdi(x, gdi, schedule, qgrid, config, candidates, label=ideal.label,
                              certify=ideal)
    rep.params["route"] = gdi.label
    return rep


# -- witnesses and oracles ------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaWitness:
    indices: np.ndarray            # sorted K ⊆ [1, N]
    blocks: tuple                  # (m, j, mu_j(K ∩ I_j), threshold) per realized block
    q: float

    @property
    def best(self) -> float:
        return max(b[2] for b in self.blocks)


def extract_lambda_witness(x: SequencePrefix, ell, gdi: GeneralizedDensity, q: float,
                           schedule: NeighborhoodSchedule,
                           config: MembershipConfig = DEFAULT_CONFIG) -> LambdaWitness:
    """Build K = ∪_m (A_m ∩ I_{j_m}) along blocks j_0 < ... < j_M.

    Working back from the end of the prefix, j_M is the last window block with
    mu(A_M ∩ I_j) >= q(1 - 2^-(M+1)), and j_m is the last earlier block with
    mu(A_m ∩ I_j) >= q(1 - 2^-(m+1)); scales with no such block are skipped.
    Terms of K in later blocks lie in smaller balls around ℓ.
    """
    N = x.N
    masks = _level_masks(x, ell, schedule)
    ends, win = _gdi_window(gdi, N, config)
    M = schedule.M
    vals = np.array([gdi.mu.block_values(masks[m], ends) for m in range(M + 1)])
    need = q * (1 - 2.0 ** -(M + 1))
    cand = win[vals[M, win] >= need] if win.size else win
    if cand.size == 0:
        best = float(vals[M, win].max()) if win.size else 0.0
        kind = "shortfall" if best >= config.in_threshold else "rejection"
        raise LambdaWitnessError(
            f"no window block reaches {need:.6g} at scale m={M} around {list(np.atleast_1d(ell))} "
            f"(best {best:.6g}, {win.size} window blocks, N={N})", kind, best, need)
    chosen = [(M, int(cand[-1]))]
    for m in range(M - 1, -1, -1):
        hi = chosen[-1][1]
        thr = q * (1 - 2.0 ** -(m + 1))
        ok = np.flatnonzero(vals[m, :hi] >= thr)
        if ok.size:
            chosen.append((m, int(ok[-1])))
    starts = np.concatenate([[0], ends[:-1]])
    K = np.zeros(N, dtype=bool)
    for m, j in chosen:
        lo, hi = int(starts[j]), int(ends[j])
        K[lo:hi] |= masks[m, lo:hi]
    kv = gdi.mu.block_values(K, ends)
    blocks = tuple((m, j + 1, float(kv[j]), q * (1 - 2.0 ** -(m + 1))) for m, j in reversed(chosen))
    return LambdaWitness(np.flatnonzero(K) + 1, blocks, float(q))


def brute_force_lambda_oracle(x: SequencePrefix, gdi: GeneralizedDensity, ell, q: float,
                              eps: float, max_n: int = 24) -> bool:
    """Exhaustive search for K ⊆ {k : d(x_k, ℓ) < eps} with max_j mu_j(K ∩ I_j) >= q.

    K is only ever scored through max over blocks, so the search runs over all
    subsets of the hits inside each complete block; mu_j is evaluated through
    the family's per-block submeasure, independently of ``block_values``.
    """
    N = x.N
    if N > max_n:
        raise ValueError(f"brute force refused for N={N} > {max_n}")
    hits = x.distances(ell) < eps
    ends = gdi.partition.ends_upto(N)
    lo = 1
    for j, hi in enumerate(ends, start=1):
        idx = [i for i in range(lo, int(hi) + 1) if hits[i - 1]]
        mu = gdi.mu.submeasure(j, gdi.partition)
        for bits in range(1 << len(idx)):
            mask = np.zeros(N, dtype=bool)
            for b, i in enumerate(idx):
                if bits >> b & 1:
                    mask[i - 1] = True
            if mu.evaluate(mask) >= q:
                return True
        lo = int(hi) + 1
    return False


# -- comparison ---------------------------------------------------------------------

@dataclass(frozen=True)
class SetComparison:
    equal: bool
    a_minus_b: np.ndarray
    b_minus_a: np.ndarray
    hausdorff: float

    def as_dict(self):
        return {"equal": self.equal, "a_minus_b": self.a_minus_b.tolist(),
                "b_minus_a": self.b_minus_a.tolist(), "hausdorff": self.hausdorff}


def _unmatched(a, b, tol, p):
    if a.shape[0] == 0:
        return a, 0.0
    if b.shape[0] == 0:
        return a, math.inf
    dist, _ = cKDTree(b).query(a, k=1, p=p)
    return a[dist > tol * (1 + 1e-12)], float(dist.max())


def compare_sets(a, b, tol: float, space: Optional[MetricSpace] = None) -> SetComparison:
    """Equal iff the Hausdorff distance is at most ``tol``; lists unmatched points otherwise."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d = a.shape[1] if a.ndim == 2 and a.size else (b.shape[1] if b.ndim == 2 and b.size else 1)
    a = a.reshape(-1, d)
    b = b.reshape(-1, d)
    p = space.minkowski_p if space is not None else 2.0
    am, da = _unmatched(a, b, tol, p)
    bm, db = _unmatched(b, a, tol, p)
    if a.shape[0] == 0 and b.shape[0] == 0:
        h = 0.0
    else:
        h = max(da, db)
    return SetComparison(am.shape[0] == 0 and bm.shape[0] == 0, am, bm, h)


def inclusion_violations(inner: LimitSetReport, outer: LimitSetReport) -> np.ndarray:
    """Points accepted by ``inner`` but not by ``outer`` (exact coordinates)."""
    outer_set = {tuple(p) for p in outer.accepted.tolist()}
    bad = [p for p in inner.accepted.tolist() if tuple(p) not in outer_set]
    return np.array(bad).reshape(len(bad), inner.params.get("dimension", 1))
