"""Structural feature vectors of CNF formulas: the power-law exponent alpha,
modularity q, pseudo-dimensions d (VIG) and d_b (CVIG), and the clause to
variable ratio, plus min-max normalization for distance-based learning."""

from __future__ import annotations

import json
import warnings as _warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .cnf import CnfFormula
from .community import fold_communities
from .fractal import cover_curve, fit_dimension
from .graph import build_cvig, build_vig
from .scalefree import fit_alpha, occurrence_histogram

FEATURE_NAMES = ("alpha", "q", "d", "d_b", "ratio")
EXTRA_NAMES = ("beta", "beta_b", "n", "m", "r_max")
CSV_HEADER = "instance,family,alpha,q,d,d_b,ratio,beta,beta_b,n,m,r_max"


@dataclass(frozen=True)
class FeatureConfig:
    seed: int = 42
    fit_lo: int = 1
    fit_hi: int = 5
    ordering: str = "desc_degree"
    monotone_clamp: bool = False
    min_gain: float = 1e-6


@dataclass(frozen=True)
class FeatureVector:
    alpha: float
    q: float
    d: float
    d_b: float
    ratio: float
    extras: dict = field(default_factory=dict)

    def value(self, name: str) -> float:
        if name in FEATURE_NAMES:
            return getattr(self, name)
        return self.extras[name]

    def as_array(self, names=FEATURE_NAMES) -> np.ndarray:
        return np.array([self.value(n) for n in names], dtype=np.float64)


@dataclass(frozen=True)
class FeatureRow:
    instance: str
    family: str | None
    vector: FeatureVector


class FeatureMatrix:
    """Feature rows plus optional per-feature min-max normalization captured
    from a training subset. Constant features are excluded from distances."""

    def __init__(self, rows, normalization=None, excluded=()):
        self.rows: list[FeatureRow] = list(rows)
        self.normalization: dict[str, tuple[float, float]] | None = normalization
        self.excluded: tuple[str, ...] = tuple(excluded)

    @property
    def instance_ids(self) -> list[str]:
        return [r.instance for r in self.rows]

    @property
    def distance_features(self) -> tuple[str, ...]:
        return tuple(n for n in FEATURE_NAMES if n not in self.excluded)

    def row(self, instance: str) -> FeatureRow:
        for r in self.rows:
            if r.instance == instance:
                return r
        raise KeyError(instance)

    def to_array(self, names=None) -> np.ndarray:
        names = FEATURE_NAMES if names is None else names
        return np.array([r.vector.as_array(names) for r in self.rows])

    def subset(self, instance_ids) -> "FeatureMatrix":
        wanted = set(instance_ids)
        return FeatureMatrix([r for r in self.rows if r.instance in wanted],
                             self.normalization, self.excluded)

    def drop(self, instance_id: str) -> "FeatureMatrix":
        return FeatureMatrix([r for r in self.rows if r.instance != instance_id],
                             self.normalization, self.excluded)

    def __len__(self) -> int:
        return len(self.rows)


def _canonical_clause_order(f: CnfFormula) -> CnfFormula:
    """Sort clauses lexicographically so clause node ids (and therefore
    degree-tie iteration) do not depend on the input clause order."""
    def key(c):
        return tuple(sorted(c, key=lambda l: (abs(l), l < 0)))
    order = sorted(range(f.num_clauses), key=lambda i: key(f.clauses[i]))
    taut = set(f.tautological)
    return CnfFormula(f.num_vars, tuple(f.clauses[i] for i in order),
                      tuple(i for i, old in enumerate(order) if old in taut))


def extract_features(f: CnfFormula, config: FeatureConfig | None = None
                     ) -> FeatureVector:
    """Full feature pipeline for one formula.

    Fractal fits run on the unweighted VIG and CVIG, alpha on the occurrence
    histogram, q by folding the weighted VIG. Deterministic per config seed,
    and invariant under clause permutation (clause order is canonicalized).
    """
    cfg = config or FeatureConfig()
    if f.num_vars == 0 or f.num_clauses == 0:
        raise ValueError("features need a nonempty formula")
    f = _canonical_clause_order(f)
    alpha = fit_alpha(occurrence_histogram(f)).alpha

    vig = build_vig(f, weighted=False)
    curve = cover_curve(vig, r_stop=cfg.fit_hi, ordering=cfg.ordering,
                        monotone_clamp=cfg.monotone_clamp)
    fit_v = fit_dimension(curve, cfg.fit_lo, cfg.fit_hi)

    cvig = build_cvig(f, weighted=False)
    curve_b = cover_curve(cvig, r_stop=cfg.fit_hi, ordering=cfg.ordering,
                          monotone_clamp=cfg.monotone_clamp)
    fit_b = fit_dimension(curve_b, cfg.fit_lo, cfg.fit_hi)

    wvig = build_vig(f, weighted=True)
    q = fold_communities(wvig, seed=cfg.seed, min_gain=cfg.min_gain).q

    extras = {
        "beta": fit_v.beta,
        "beta_b": fit_b.beta,
        "n": float(f.num_vars),
        "m": float(f.num_clauses),
    }
    if curve.r_max is not None:
        extras["r_max"] = float(curve.r_max)
    return FeatureVector(alpha=alpha, q=q, d=fit_v.d, d_b=fit_b.d,
                         ratio=f.num_clauses / f.num_vars, extras=extras)


def normalize(matrix: FeatureMatrix, training_ids) -> FeatureMatrix:
    """Min-max normalize each feature using the training rows; other rows are
    clamped into [0, 1]. Constant training features are excluded from
    distances (their values map to 0)."""
    training = set(training_ids)
    train_rows = [r for r in matrix.rows if r.instance in training]
    if not train_rows:
        raise ValueError("no training rows")
    norm: dict[str, tuple[float, float]] = {}
    excluded: list[str] = []
    for name in FEATURE_NAMES:
        vals = [r.vector.value(name) for r in train_rows]
        lo, hi = min(vals), max(vals)
        if lo == hi:
            excluded.append(name)
            _warnings.warn(f"feature {name!r} constant on training set; "
                           "excluded from distances")
        norm[name] = (lo, hi)
    new_rows = []
    for r in matrix.rows:
        vals = {}
        for name in FEATURE_NAMES:
            lo, hi = norm[name]
            if name in excluded:
                vals[name] = 0.0
                continue
            x = (r.vector.value(name) - lo) / (hi - lo)
            if r.instance not in training:
                x = min(max(x, 0.0), 1.0)
            vals[name] = x
        new_rows.append(FeatureRow(r.instance, r.family,
                                   replace(r.vector, **vals)))
    return FeatureMatrix(new_rows, norm, tuple(excluded))


# ---------------------------------------------------------------------------
# CSV / JSON interchange


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def matrix_to_csv(matrix: FeatureMatrix) -> str:
    lines = [CSV_HEADER + "\n"]
    for r in matrix.rows:
        v = r.vector
        extras = [v.extras.get(n) for n in EXTRA_NAMES]
        cells = [r.instance, r.family or "",
                 _fmt(v.alpha), _fmt(v.q), _fmt(v.d), _fmt(v.d_b), _fmt(v.ratio)]
        cells += [_fmt(e) for e in extras]
        lines.append(",".join(cells) + "\n")
    return "".join(lines)


def matrix_from_csv(text: str, skip_errors: bool = False) -> FeatureMatrix:
    """Read a feature CSV. Rows marked ERROR (from batch extraction failures)
    raise unless skip_errors is set, in which case they are dropped with a
    warning."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty feature CSV")
    header = lines[0].split(",")
    expected = CSV_HEADER.split(",")
    if header[:len(expected)] != expected:
        raise ValueError(f"unexpected feature CSV header: {lines[0]!r}")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) < 7:
            raise ValueError(f"short feature CSV row: {ln!r}")
        instance, family = cells[0], cells[1] or None
        if family == "ERROR":
            if skip_errors:
                _warnings.warn(f"skipping ERROR row for {instance}")
                continue
            raise ValueError(f"feature CSV contains ERROR row for {instance}")
        alpha, q, d, d_b, ratio = (float(c) for c in cells[2:7])
        extras = {}
        for name, cell in zip(EXTRA_NAMES, cells[7:12]):
            if cell:
                extras[name] = float(cell)
        rows.append(FeatureRow(instance, family,
                               FeatureVector(alpha, q, d, d_b, ratio, extras)))
    return FeatureMatrix(rows)


def matrix_to_json(matrix: FeatureMatrix) -> str:
    out = []
    for r in matrix.rows:
        v = r.vector
        entry = {"instance": r.instance, "family": r.family,
                 "alpha": v.alpha, "q": v.q, "d": v.d, "d_b": v.d_b,
                 "ratio": v.ratio}
        entry.update({k: v.extras[k] for k in EXTRA_NAMES if k in v.extras})
        out.append(entry)
    return json.dumps(out, indent=2)
