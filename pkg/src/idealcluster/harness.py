"""Experiment orchestration: Monte Carlo preservation, witness dichotomies, oracle suite.

All randomness derives from ``(seed, trial)`` through the counter-based
sampler in :mod:`omega`, so results do not depend on how trials are
scheduled over worker processes.
"""

from __future__ import annotations

import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ideals import (DEFAULT_CONFIG, ConfigError, DensityAlpha, ErdosUlam, Fin, GeneralizedDensity,
                     IdealSpec, MembershipConfig, Summable, alpha_weight_ratio, erdos_ulam_phi,
                     exh_tail_value, gdi_block_value, ideal_from_config, limsup_estimate,
                     natural_density_gdi, parse_ideal)
from .indexset import IndexSet, density_corpus, evens
from .limitset import (LambdaWitnessError, LimitSetReport, NeighborhoodSchedule,
                       brute_force_lambda_oracle, compare_sets, estimate_Gamma, estimate_L,
                       estimate_Lambda, estimate_Lambda_gdi, extract_lambda_witness,
                       inclusion_violations)
from .omega import (ALL_ONES, OmegaPrefix, PeriodicOnes, decode, dyadic_value, encode,
                    generic_witness, greedy_donor, sample_uniform, subsequence)
from .sequences import SequencePrefix, SequenceSpec, generate, sequence_from_config
from .submeasures import (BlockNormalizedCount, BlockNormalizedWeight, CumulativeWeightFamily,
                          ErdosUlamSubmeasure, ExplicitPartition, PowerWeight, Submeasure,
                          SubmeasureFamily, ConstantWeight, inverse_weight)
from .zoo import ZOO_NAMES, ZooEntry, zoo

DEFAULT_SEED = 20170331


# -- configuration -------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    sequence: object = "squares-indicator"      # zoo name or sequence mapping
    ideal: object = "density:0"                 # compact string or ideal mapping
    N: Optional[int] = None
    eps0: Optional[float] = None
    M: Optional[int] = None
    trials: int = 200
    seed: int = DEFAULT_SEED
    thresholds: MembershipConfig = field(default_factory=MembershipConfig)
    qgrid: Optional[tuple] = None
    lambda_enabled: bool = True
    workers: int = 1
    output: Optional[str] = None
    format: str = "structured"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        th = d.pop("thresholds", {}) or {}
        names = {f.name for f in fields(MembershipConfig)}
        unknown = set(th) - names
        if unknown:
            raise ConfigError(f"unknown threshold keys {sorted(unknown)}")
        schedule = d.pop("schedule", {}) or {}
        d.setdefault("eps0", schedule.get("eps0"))
        d.setdefault("M", schedule.get("M"))
        if "lambda" in d:
            d["lambda_enabled"] = bool(d.pop("lambda"))
        if d.get("qgrid") is not None:
            d["qgrid"] = tuple(float(q) for q in d["qgrid"])
        own = {f.name for f in fields(cls)}
        unknown = set(d) - own
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(thresholds=MembershipConfig(**th), **d)

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["thresholds"] = asdict(self.thresholds)
        d["qgrid"] = list(self.qgrid) if self.qgrid is not None else None
        return d

    # -- resolution ----------------------------------------------------
    def zoo_entry(self) -> Optional[ZooEntry]:
        if isinstance(self.sequence, str):
            return zoo(self.sequence)
        if isinstance(self.sequence, dict) and "zoo" in self.sequence:
            return zoo(self.sequence["zoo"])
        return None

    def sequence_spec(self) -> SequenceSpec:
        entry = self.zoo_entry()
        if entry is not None:
            return entry.spec
        if isinstance(self.sequence, SequenceSpec):
            return self.sequence
        return sequence_from_config(self.sequence)

    def ideal_spec(self) -> IdealSpec:
        if isinstance(self.ideal, IdealSpec):
            return self.ideal
        if isinstance(self.ideal, dict):
            return ideal_from_config(self.ideal)
        return parse_ideal(str(self.ideal))

    def resolved_N(self) -> int:
        if self.N is not None:
            return int(self.N)
        ideal = self.ideal_spec()
        # logarithmic density converges slowly; a longer default prefix
        if isinstance(ideal, DensityAlpha) and ideal.alpha == -1:
            return 10**6
        return 10**5

    def schedule(self) -> NeighborhoodSchedule:
        entry = self.zoo_entry()
        eps0 = self.eps0 if self.eps0 is not None else (entry.eps0 if entry else 0.5)
        M = self.M if self.M is not None else (entry.M if entry else 8)
        return NeighborhoodSchedule(float(eps0), int(M))

    def validate(self) -> "ExperimentConfig":
        self.thresholds.validate()
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        N = self.resolved_N()
        if N < 10 * self.thresholds.min_hits:
            raise ConfigError(f"N={N} must be at least 10*min_hits={10 * self.thresholds.min_hits}")
        if self.qgrid is not None and len(self.qgrid) == 0:
            raise ConfigError("empty q-grid")
        if self.format not in ("structured", "tabular"):
            raise ConfigError(f"unknown format {self.format!r}")
        self.schedule()
        self.ideal_spec()
        self.sequence_spec()
        return self


def _set_summary(rep: LimitSetReport) -> dict:
    return {"accepted": rep.accepted.tolist(), "undecided": rep.undecided.tolist(),
            "n_candidates": len(rep.records)}


def _estimates(x, ideal, schedule, cfg, with_lambda=True):
    G = estimate_Gamma(x, ideal, schedule, cfg.thresholds)
    Lam = estimate_Lambda(x, ideal, schedule, cfg.thresholds, cfg.qgrid) if with_lambda else None
    return G, Lam


# -- Monte Carlo ---------------------------------------------------------------------

@dataclass
class PreservationSummary:
    fraction_gamma_preserved: float
    fraction_lambda_preserved: Optional[float]
    trials: int
    voided: int
    records: list
    base: dict
    params: dict

    def as_dict(self):
        return {"fraction_gamma_preserved": self.fraction_gamma_preserved,
                "fraction_lambda_preserved": self.fraction_lambda_preserved,
                "trials": self.trials, "voided": self.voided, "base": self.base,
                "params": self.params, "records": self.records}

    def rows(self):
        return self.records


def _trial(args):
    cfg, t, base_gamma, base_lambda = args
    spec = cfg.sequence_spec()
    ideal = cfg.ideal_spec()
    N = cfg.resolved_N()
    schedule = cfg.schedule()
    x = generate(spec, N)
    omega = sample_uniform(cfg.seed, N, stream=t)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sub = subsequence(x, omega)
    rec = {"trial": t, "seed": cfg.seed, "stream": t, "length": sub.N}
    if sub.N < cfg.thresholds.min_hits:
        rec.update(voided=True, gamma_equal=None, lambda_equal=None)
        return rec
    tol = 2 * schedule.eps_M
    G, Lam = _estimates(sub, ideal, schedule, cfg, cfg.lambda_enabled)
    cg = compare_sets(G.accepted, base_gamma, tol, x.space)
    rec.update(voided=False, gamma_equal=cg.equal, gamma_undecided=len(G.undecided),
               gamma_unmatched=int(cg.a_minus_b.shape[0] + cg.b_minus_a.shape[0]))
    if Lam is not None:
        cl = compare_sets(Lam.accepted, base_lambda, tol, x.space)
        rec.update(lambda_equal=cl.equal, lambda_undecided=len(Lam.undecided),
                   lambda_unmatched=int(cl.a_minus_b.shape[0] + cl.b_minus_a.shape[0]))
    else:
        rec.update(lambda_equal=None)
    return rec


def _map(fn, tasks, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [fn(t) for t in tasks]


def run_montecarlo(cfg: ExperimentConfig, workers: Optional[int] = None) -> PreservationSummary:
    """Sample ω per trial and compare Γ (and Λ) of x↾ω with those of x."""
    cfg.validate()
    workers = cfg.workers if workers is None else workers
    N = cfg.resolved_N()
    schedule = cfg.schedule()
    x = generate(cfg.sequence_spec(), N)
    ideal = cfg.ideal_spec()
    G, Lam = _estimates(x, ideal, schedule, cfg, cfg.lambda_enabled)
    base_lambda = Lam.accepted if Lam is not None else None
    tasks = [(cfg, t, G.accepted, base_lambda) for t in range(cfg.trials)]
    records = sorted(_map(_trial, tasks, workers), key=lambda r: r["trial"])
    valid = [r for r in records if not r["voided"]]
    voided = len(records) - len(valid)
    fg = sum(bool(r["gamma_equal"]) for r in valid) / len(valid) if valid else float("nan")
    fl = None
    if cfg.lambda_enabled:
        fl = sum(bool(r["lambda_equal"]) for r in valid) / len(valid) if valid else float("nan")
    base = {"Gamma": _set_summary(G)}
    if Lam is not None:
        base["Lambda"] = _set_summary(Lam)
    params = {"sequence": cfg.sequence if isinstance(cfg.sequence, (str, dict)) else repr(cfg.sequence),
              "ideal": ideal.label, "N": N, "eps0": schedule.eps0, "M": schedule.M,
              "seed": cfg.seed, "tolerance": 2 * schedule.eps_M}
    return PreservationSummary(fg, fl, cfg.trials, voided, records, base, params)


# -- witnesses and dichotomies ------------------------------------------------------------

def witness_targets(cfg: ExperimentConfig, x: SequencePrefix, L: LimitSetReport,
                    schedule: NeighborhoodSchedule) -> list:
    """Zoo donors when available, otherwise greedy eps_M-donors around accepted L points."""
    entry = cfg.zoo_entry()
    if entry is not None:
        return entry.targets()
    return [(p, greedy_donor(x, p, schedule.eps_M)) for p in L.accepted]


def run_dichotomy(cfg: ExperimentConfig, targets=None) -> dict:
    """Classify the instance (Γ = L or not), then contrast a constructed ω with random ω."""
    cfg.validate()
    N = cfg.resolved_N()
    schedule = cfg.schedule()
    tol = 2 * schedule.eps_M
    ideal = cfg.ideal_spec()
    x = generate(cfg.sequence_spec(), N)
    L = estimate_L(x, schedule, config=cfg.thresholds)
    G, Lam = _estimates(x, ideal, schedule, cfg)
    gl = compare_sets(G.accepted, L.accepted, tol, x.space)
    case = "preserving" if gl.equal else "dichotomy"
    if targets is None:
        targets = witness_targets(cfg, x, L, schedule)
    wit = generic_witness(x, targets)
    sub = subsequence(x, wit.omega)
    Gw, Lw = _estimates(sub, ideal, schedule, cfg)
    w_gamma_vs_L = compare_sets(Gw.accepted, L.accepted, tol, x.space)
    w_gamma_vs_lambda = compare_sets(Gw.accepted, Lw.accepted, tol, x.space)
    mc = run_montecarlo(cfg)
    random_keeps_gamma = mc.fraction_gamma_preserved
    report = {
        "params": {**mc.params, "case_rule": "Gamma == L at tolerance 2*eps_M"},
        "L": _set_summary(L), "Gamma": _set_summary(G), "Lambda": _set_summary(Lam),
        "case": case,
        "gamma_vs_L": gl.as_dict(),
        "witness": {"length": sub.N, "construction": wit.as_dict(),
                    "Gamma": _set_summary(Gw), "Lambda": _set_summary(Lw),
                    "gamma_equals_L": w_gamma_vs_L.equal,
                    "gamma_equals_lambda": w_gamma_vs_lambda.equal,
                    "gamma_vs_L": w_gamma_vs_L.as_dict()},
        "random": {"trials": mc.trials, "voided": mc.voided,
                   "fraction_gamma_preserved": random_keeps_gamma,
                   "fraction_lambda_preserved": mc.fraction_lambda_preserved},
    }
    report["coherent"] = (case == "preserving") == gl.equal
    report["measure_category_divergence"] = bool(
        case == "dichotomy" and w_gamma_vs_L.equal and random_keeps_gamma >= 0.95)
    return report


def dichotomy_rows(report: dict) -> list:
    rows = []
    for name, part in (("L", report["L"]), ("Gamma", report["Gamma"]), ("Lambda", report["Lambda"]),
                       ("witness.Gamma", report["witness"]["Gamma"]),
                       ("witness.Lambda", report["witness"]["Lambda"])):
        for p in part["accepted"]:
            rows.append({"set": name, "point": p, "status": "accepted"})
        for p in part["undecided"]:
            rows.append({"set": name, "point": p, "status": "undecided"})
    return rows


def run_corollary_fin(cfg: ExperimentConfig, targets=None) -> dict:
    """With I = Fin: does the constructed ω keep L, and how often do random ω keep it?"""
    cfg = replace(cfg, ideal="fin")
    cfg.validate()
    N = cfg.resolved_N()
    schedule = cfg.schedule()
    tol = 2 * schedule.eps_M
    x = generate(cfg.sequence_spec(), N)
    L = estimate_L(x, schedule, config=cfg.thresholds)
    if targets is None:
        targets = witness_targets(cfg, x, L, schedule)
    wit = generic_witness(x, targets)
    sub = subsequence(x, wit.omega)
    Lw = estimate_L(sub, schedule, config=cfg.thresholds)
    cw = compare_sets(Lw.accepted, L.accepted, tol, x.space)
    tasks = [(cfg, t, L.accepted) for t in range(cfg.trials)]
    recs = sorted(_map(_fin_trial, tasks, cfg.workers), key=lambda r: r["trial"])
    valid = [r for r in recs if not r["voided"]]
    frac = sum(r["L_equal"] for r in valid) / len(valid) if valid else float("nan")
    return {"params": {"N": N, "eps0": schedule.eps0, "M": schedule.M, "seed": cfg.seed,
                       "tolerance": tol, "sequence": cfg.sequence if isinstance(cfg.sequence, (str, dict)) else ""},
            "L": _set_summary(L),
            "witness": {"length": sub.N, "L": _set_summary(Lw), "preserves_L": cw.equal,
                        "comparison": cw.as_dict(), "construction": wit.as_dict()},
            "random": {"trials": cfg.trials, "voided": len(recs) - len(valid),
                       "fraction_L_preserved": frac, "records": recs}}


def _fin_trial(args):
    cfg, t, base_L = args
    N = cfg.resolved_N()
    schedule = cfg.schedule()
    x = generate(cfg.sequence_spec(), N)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sub = subsequence(x, sample_uniform(cfg.seed, N, stream=t))
    if sub.N < cfg.thresholds.min_hits:
        return {"trial": t, "voided": True, "L_equal": None, "length": sub.N}
    Ls = estimate_L(sub, schedule, config=cfg.thresholds)
    c = compare_sets(Ls.accepted, base_L, 2 * schedule.eps_M, x.space)
    return {"trial": t, "voided": False, "L_equal": c.equal, "length": sub.N}


def chain_ideals() -> list:
    """Fin, I_0, I_1, Erdős–Ulam and summable with f = 1/i, natural density as a GDI."""
    return [Fin(), DensityAlpha(0.0), DensityAlpha(1.0), ErdosUlam(inverse_weight()),
            Summable(inverse_weight()), natural_density_gdi()]


def run_inclusion_chain(N: int = 10**5, seed: int = DEFAULT_SEED, n_random: int = 5,
                        names=None, ideals=None, config: MembershipConfig = DEFAULT_CONFIG) -> dict:
    """Check Λ ⊆ Γ ⊆ L on x↾ω, and Γ_{x↾ω} ⊆ L_x at tolerance 2·eps_M.

    ω ranges over all-ones, ``n_random`` uniform samples and the generic
    witness built from the zoo donors.  Inclusions on x↾ω compare exact
    candidate coordinates, which all three estimators share.
    """
    names = ZOO_NAMES if names is None else names
    ideals = chain_ideals() if ideals is None else ideals
    rows = []
    for name in names:
        entry = zoo(name)
        schedule = NeighborhoodSchedule(entry.eps0, entry.M)
        tol = 2 * schedule.eps_M
        x = generate(entry.spec, N)
        L_x = estimate_L(x, schedule, config=config)
        omegas = [("all-ones", ALL_ONES)]
        omegas += [(f"random-{s}", sample_uniform(seed, N, stream=s)) for s in range(n_random)]
        omegas.append(("witness", generic_witness(x, entry.targets()).omega))
        for tag, om in omegas:
            sub = subsequence(x, om)
            L_sub = estimate_L(sub, schedule, config=config)
            for ideal in ideals:
                G, Lam = _estimates(sub, ideal, schedule, replace(ExperimentConfig(), thresholds=config))
                v_lg = inclusion_violations(Lam, G)
                v_gl = inclusion_violations(G, L_sub)
                v_gx = compare_sets(G.accepted, L_x.accepted, tol, x.space).a_minus_b
                v_lx = compare_sets(Lam.accepted, L_x.accepted, tol, x.space).a_minus_b
                n_bad = sum(int(v.shape[0]) for v in (v_lg, v_gl, v_gx, v_lx))
                rows.append({"sequence": name, "omega": tag, "ideal": ideal.label, "length": sub.N,
                             "L": L_sub.accepted.shape[0], "Gamma": G.accepted.shape[0],
                             "Lambda": Lam.accepted.shape[0], "violations": n_bad,
                             "lambda_not_in_gamma": v_lg.tolist(), "gamma_not_in_L": v_gl.tolist(),
                             "gamma_not_in_L_x": v_gx.tolist(), "lambda_not_in_L_x": v_lx.tolist()})
    return {"params": {"N": N, "seed": seed, "n_random": n_random},
            "violations": sum(r["violations"] for r in rows), "rows": rows}


# -- oracle suite --------------------------------------------------------------------

@dataclass(frozen=True)
class _SqrtCount(Submeasure):
    """sqrt(|A ∩ [lo, hi]|) / sqrt(hi - lo + 1): a non-additive block submeasure."""

    lo: int
    hi: int

    @property
    def name(self):
        return f"sqrtcount[{self.lo},{self.hi}]"

    def evaluate(self, mask):
        c = int(np.count_nonzero(mask[self.lo - 1:self.hi]))
        return math.sqrt(c) / math.sqrt(self.hi - self.lo + 1)


@dataclass(frozen=True)
class _SqrtCountMu:
    partition: ExplicitPartition

    def __call__(self, j):
        lo, hi = self.partition.block(j)
        return _SqrtCount(lo, hi)


@dataclass(frozen=True, eq=False)
class TinyInstance:
    x: SequencePrefix
    gdi: GeneralizedDensity
    ell: np.ndarray
    q: float
    eps: float


def tiny_lambda_instances(seed: int, count: int = 50, max_n: int = 24) -> list:
    """Random small Λ(I;q) instances over explicit partitions and mixed block families."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        N = int(rng.integers(6, max_n + 1))
        if k % 2:
            vals = rng.choice([0.0, 0.25, 0.5, 1.0], size=N)
        else:
            vals = rng.random(N)
        lengths = rng.integers(1, 6, size=N)
        ends = np.cumsum(lengths)
        ends = tuple(int(e) for e in ends[ends <= N]) or (N,)
        part = ExplicitPartition(ends)
        kind = k % 4
        if kind == 0:
            fam = BlockNormalizedCount()
        elif kind == 1:
            fam = BlockNormalizedWeight(PowerWeight(float(rng.choice([-1.0, 0.5, 1.0]))))
        elif kind == 2:
            fam = CumulativeWeightFamily(ConstantWeight(1.0))
        else:
            fam = SubmeasureFamily(_SqrtCountMu(part), part, label="sqrt-count")
        gdi = GeneralizedDensity(part, fam, name=f"tiny-{k}", window="endpoint", fraction=1e-9)
        ell = np.array([float(vals[rng.integers(N)]) if rng.random() < 0.8 else float(rng.random())])
        q = float(rng.uniform(0.05, 1.0))
        eps = float(rng.choice([0.05, 0.2, 0.4]))
        out.append(TinyInstance(SequencePrefix(vals), gdi, ell, q, eps))
    return out


TINY_CONFIG = MembershipConfig(min_hits=1, fin_gate=False)


def estimator_decision(inst: TinyInstance) -> bool:
    """estimate_Lambda_gdi at a single scale eps and a single level q."""
    rep = estimate_Lambda_gdi(inst.x, inst.gdi, NeighborhoodSchedule(inst.eps, 0), [inst.q],
                              TINY_CONFIG, candidates=[inst.ell])
    return bool(rep.records[0].status == "accepted")


def oracle_decision(inst: TinyInstance) -> bool:
    return brute_force_lambda_oracle(inst.x, inst.gdi, inst.ell, inst.q, inst.eps)


@dataclass
class OracleCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class OracleSuiteResult:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"passed": self.passed, "n_checks": len(self.checks),
                "n_failed": sum(not c.passed for c in self.checks),
                "checks": [asdict(c) for c in self.checks]}

    def rows(self):
        return [asdict(c) for c in self.checks]


def _faulhaber(n, a):
    """sum_{i<=n} i^a for a in {0, 1, 2}."""
    return {0: n, 1: n * (n + 1) // 2, 2: n * (n + 1) * (2 * n + 1) // 6}[a]


def exact_alpha_checks(n: int = 10**4, alphas=(0, 1, 2), rel_tol: float = 1e-12) -> list:
    checks = []
    for A in density_corpus(n_max=max(n, 10**5)):
        els = A.elements(n).tolist()
        for a in alphas:
            oracle = Fraction(sum(i ** a for i in els), _faulhaber(n, a))
            exact = alpha_weight_ratio(A, a, n, exact=True)
            flt = alpha_weight_ratio(A, a, n)
            err = abs(flt - float(oracle)) / float(oracle) if oracle else abs(flt)
            ok = exact == oracle and err <= rel_tol
            checks.append(OracleCheck(f"alpha-ratio[{A.name},a={a},n={n}]", ok,
                                      f"exact={exact} float={flt!r} rel_err={err:.3g}"))
    return checks


def codec_checks(seed: int, cases: int = 1000) -> list:
    rng = np.random.default_rng(seed)
    bad = []
    for k in range(cases):
        M = int(rng.integers(1, 200))
        density = rng.random()
        mask = rng.random(M) < density
        S = IndexSet.from_mask(mask, finite=False)
        om = encode(S, M)
        back = decode(om, M).elements()
        if not np.array_equal(back, S.elements(M)):
            bad.append((k, M))
    checks = [OracleCheck("codec-roundtrip", not bad, f"{cases} cases, failures {bad[:5]}")]
    forms = {"all-ones": (OmegaPrefix(), Fraction(1)),
             "half": (OmegaPrefix(np.array([0], dtype=np.uint8)), Fraction(1, 2)),
             "third": (OmegaPrefix(np.array([0, 1], dtype=np.uint8), PeriodicOnes(2)), Fraction(1, 3))}
    for name, (om, val) in forms.items():
        got = dyadic_value(om)
        checks.append(OracleCheck(f"dyadic-value[{name}]", got == val, f"{got} vs {val}"))
    return checks


def lambda_oracle_checks(seed: int, count: int = 50) -> list:
    agree = 0
    bad = []
    for k, inst in enumerate(tiny_lambda_instances(seed, count)):
        e, o = estimator_decision(inst), oracle_decision(inst)
        if e == o:
            agree += 1
        else:
            bad.append({"instance": k, "N": inst.x.N, "q": inst.q, "eps": inst.eps,
                        "ell": inst.ell.tolist(), "estimator": e, "oracle": o})
    return [OracleCheck("lambda-oracle-agreement", not bad, f"{agree}/{count} agree; {bad[:3]}")]


def misc_checks() -> list:
    checks = []
    vals = np.array([1.0 / n for n in range(1, 101)])
    checks.append(OracleCheck("limsup[1/n]", limsup_estimate(vals, 0.5) == 1 / 50))
    ev = evens()
    ratios = [sum(1 for i in range(11, m + 1) if i % 2 == 0) / m for m in range(1, 1001)]
    got = exh_tail_value(ErdosUlamSubmeasure(ConstantWeight(1.0)), ev, 10, 1000)
    checks.append(OracleCheck("exh-tail[evens]", abs(got - max(ratios)) <= 1e-12, f"{got} vs {max(ratios)}"))
    odds_sup = max(sum(1 for i in range(1, m + 1) if i % 2) / m for m in range(1, 101))
    got = erdos_ulam_phi(ConstantWeight(1.0), IndexSet.from_predicate(lambda i: i % 2 == 1, 100), 100)
    checks.append(OracleCheck("phi[odds]", got == odds_sup, f"{got} vs {odds_sup}"))
    got = gdi_block_value(natural_density_gdi(), ev, 5)
    checks.append(OracleCheck("gdi-block[evens,5]", got == 0.5, f"{got}"))
    return checks


def witness_oracle_check() -> list:
    """Hand-built 12-term instance with one passing block."""
    x = SequencePrefix(np.array([0, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0], dtype=float))
    part = ExplicitPartition((2, 6, 12))
    gdi = GeneralizedDensity(part, BlockNormalizedCount(), name="hand", window="endpoint", fraction=1e-9)
    checks = []
    # with M = 0 the witness must realize q/2 in some block; the oracle is asked the same
    for q in (0.5, 0.8, 1.2, 1.6):
        oracle = brute_force_lambda_oracle(x, gdi, [1.0], q / 2, 0.1)
        try:
            w = extract_lambda_witness(x, [1.0], gdi, q, NeighborhoodSchedule(0.1, 0), TINY_CONFIG)
            est = w.best >= q / 2
        except LambdaWitnessError:
            est = False
        checks.append(OracleCheck(f"witness-vs-oracle[q={q}]", est == oracle, f"witness={est} oracle={oracle}"))
    return checks


def run_oracle_suite(size: str = "small", seed: int = DEFAULT_SEED,
                     config: MembershipConfig = DEFAULT_CONFIG) -> OracleSuiteResult:
    """Execute every exact or exhaustive oracle comparison and tally the outcomes."""
    config.validate()
    if size not in ("small", "full"):
        raise ConfigError(f"unknown suite size {size!r}")
    n = 10**4
    checks = []
    checks += exact_alpha_checks(n)
    checks += codec_checks(seed, 1000 if size == "full" else 200)
    checks += lambda_oracle_checks(seed, 50)
    checks += misc_checks()
    checks += witness_oracle_check()
    return OracleSuiteResult(checks)
