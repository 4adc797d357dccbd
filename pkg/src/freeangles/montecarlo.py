"""Finite-n simulations of random subspace pairs and their distance to limit laws.

Each trial draws two independent Haar subspaces from its own generator
(keyed by ``seed XOR trial``) and records either the nonzero principal
angles or the spectrum of a self-adjoint polynomial in the two projections.
Samples from all trials are pooled with weight ``1 / (n * trials)`` each, so
eigenvalue targets have total mass 1 and the angle target has mass ``r / n``
with ``r = min(k, l, n - k, n - l)``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .blocks import block_structure, exact_spectrum
from .laws import (
    SpectralLaw,
    angle_law,
    anticommutator_law,
    boxplus_bernoulli,
    boxtimes_bernoulli,
    commutator_law,
    p_plus_qpq_law,
)
from .ncpoly import NCPolynomial, evaluate, format_ncpoly, parse_ncpoly
from .subspace import DEFAULT_TOL_ZERO, FIELDS, haar_subspace, principal_angles, projector, rng_stream

TARGETS = {
    "angles": None,
    "pqp": "p*q*p",
    "sum": "p + q",
    "commutator": "i*(p*q - q*p)",
    "anticommutator": "p*q + q*p",
    "p_plus_qpq": "p + q*p*q",
}
PATHS = ("exact-blocks", "dense-oracle")
DENSE_MAX_N = 500


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation: dimensions, trial count, seed and what to record.

    ``target`` is a key of :data:`TARGETS` or a polynomial in text form.
    """

    n: int
    k: int
    l: int
    trials: int = 1
    seed: int = 0
    field: str = "real"
    target: str = "p_plus_qpq"
    path: str = "exact-blocks"
    tol_zero: float = DEFAULT_TOL_ZERO
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not (0 <= self.k <= self.n and 0 <= self.l <= self.n):
            raise ValueError(f"need 0 <= k, l <= n, got n={self.n}, k={self.k}, l={self.l}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}")
        if self.path not in PATHS:
            raise ValueError(f"unknown path {self.path!r}; choose from {', '.join(PATHS)}")
        if self.path == "dense-oracle" and self.n > DENSE_MAX_N:
            raise ValueError(f"dense-oracle path is limited to n <= {DENSE_MAX_N}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        poly = self.polynomial
        if poly is not None and not poly.is_self_adjoint(tol=1e-14):
            raise ValueError(f"polynomial {poly} is not self-adjoint")

    @property
    def polynomial(self) -> NCPolynomial | None:
        """The polynomial to diagonalize, or None for the angle target."""
        if self.target in TARGETS:
            text = TARGETS[self.target]
            return None if text is None else parse_ncpoly(text)
        return parse_ncpoly(self.target)

    @property
    def is_angles(self) -> bool:
        return self.target == "angles"

    @property
    def r(self) -> int:
        return min(self.k, self.l, self.n - self.k, self.n - self.l)

    def with_n(self, n: int, alpha: float, beta: float) -> "ExperimentConfig":
        return replace(self, n=n, k=int(math.floor(alpha * n)), l=int(math.floor(beta * n)))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Sorted pooled samples, each carrying the same weight."""

    samples: np.ndarray
    weight_per_sample: float

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float))
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return int(self.samples.size)

    @property
    def total_mass(self) -> float:
        return self.count * self.weight_per_sample

    def cdf(self, x) -> np.ndarray:
        return self.weight_per_sample * np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right")

    def cdf_left(self, x) -> np.ndarray:
        return self.weight_per_sample * np.searchsorted(self.samples, np.asarray(x, dtype=float), side="left")

    def mean(self) -> float:
        return float(self.samples.sum() * self.weight_per_sample)

    def normalized(self) -> "EmpiricalDistribution":
        return EmpiricalDistribution(self.samples, 1.0 / self.count)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value"])
        for v in self.samples:
            w.writerow([repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, weight_per_sample: float) -> "EmpiricalDistribution":
        rows = list(csv.reader(io.StringIO(text)))
        return cls(np.array([float(r[0]) for r in rows[1:]]), weight_per_sample)


@dataclass(frozen=True)
class DistanceReport:
    ks: float
    w1: float
    sample_count: int


# --- trials ------------------------------------------------------------------------


def _draw_pair(config: ExperimentConfig, trial: int):
    rng = rng_stream(config.seed, trial)
    E = haar_subspace(config.n, config.k, rng, config.field)
    F = haar_subspace(config.n, config.l, rng, config.field)
    return E, F


def trial_values(config: ExperimentConfig, trial: int) -> np.ndarray:
    """Recorded values (unsorted order irrelevant) for a single trial."""
    E, F = _draw_pair(config, trial)
    poly = config.polynomial
    if config.path == "exact-blocks":
        ang = principal_angles(E, F, config.tol_zero)
        if poly is None:
            return np.sort(ang.nonzero_angles)
        return exact_spectrum(poly, block_structure(config.n, config.k, config.l, ang)).values()
    PE, PF = projector(E), projector(F)
    if poly is None:
        # oracle: singular values of the full product P_E P_F
        s = np.linalg.svd(PE @ PF, compute_uv=False)[: min(config.k, config.l)]
        theta = np.sort(np.arccos(np.clip(s, 0.0, 1.0)))
        return theta[theta > config.tol_zero]
    M = evaluate(poly, PE, PF)
    return np.linalg.eigvalsh(0.5 * (M + M.conj().T))


def trial_samples(config: ExperimentConfig) -> list[np.ndarray]:
    """Per-trial sorted values, in trial order regardless of scheduling."""
    trials = range(config.trials)
    if config.workers > 1 and config.trials > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            out = list(pool.map(lambda t: trial_values(config, t), trials))
    else:
        out = [trial_values(config, t) for t in trials]
    return [np.sort(v) for v in out]


def empirical_spectrum(config: ExperimentConfig) -> EmpiricalDistribution:
    """Pool all trials; each value weighs ``1 / (n * trials)``."""
    parts = trial_samples(config)
    return EmpiricalDistribution(np.concatenate(parts), 1.0 / (config.n * config.trials))


def per_trial_distributions(config: ExperimentConfig) -> list[EmpiricalDistribution]:
    return [EmpiricalDistribution(v, 1.0 / config.n) for v in trial_samples(config)]


# --- distances -------------------------------------------------------------------


def _law_jumps(law: SpectralLaw) -> np.ndarray:
    pts = [loc for loc, _ in law.atoms]
    for p in law.pieces:
        pts += [p.a, p.b]
    return np.array(pts, dtype=float)


def ks_distance(emp: EmpiricalDistribution, law: SpectralLaw) -> float:
    """Sup-norm distance between the unnormalized distribution functions."""
    if emp.count == 0:
        raise ValueError("empty empirical sample")
    pts = np.unique(np.concatenate([emp.samples, _law_jumps(law)]))
    right = np.abs(emp.cdf(pts) - law.cdf(pts))
    left = np.abs(emp.cdf_left(pts) - law.cdf_left(pts))
    tail = abs(emp.total_mass - law.total_mass)
    return float(max(right.max(), left.max(), tail))


def w1_distance(emp: EmpiricalDistribution, law: SpectralLaw, grid_per_piece: int = 2000) -> float:
    """Integral of ``|F_emp - F_law|`` over the union of both supports."""
    if emp.count == 0:
        raise ValueError("empty empirical sample")
    pts = [emp.samples, _law_jumps(law)]
    for p in law.pieces:
        pts.append(np.linspace(p.a, p.b, grid_per_piece))
    x = np.unique(np.concatenate(pts))
    if x.size < 2:
        return 0.0
    # on (x_i, x_{i+1}) the empirical CDF is constant and the law CDF continuous
    f_emp = emp.cdf(x[:-1])
    lo = np.abs(f_emp - law.cdf(x[:-1]))
    hi = np.abs(f_emp - law.cdf_left(x[1:]))
    return float(np.sum(0.5 * (lo + hi) * np.diff(x)))


def distances(emp: EmpiricalDistribution, law: SpectralLaw) -> DistanceReport:
    return DistanceReport(ks_distance(emp, law), w1_distance(emp, law), emp.count)


def limit_law_for(target: str, alpha: float, beta: float) -> SpectralLaw:
    """The free limit of a named target for trace parameters ``(alpha, beta)``."""
    if target == "angles":
        return angle_law(alpha, beta)
    if target == "pqp":
        return boxtimes_bernoulli(alpha, beta)
    if target == "sum":
        return boxplus_bernoulli(alpha, beta)
    if target == "commutator":
        return commutator_law(alpha, beta)
    if target == "anticommutator":
        return anticommutator_law(alpha, beta)
    if target == "p_plus_qpq":
        if alpha != 0.5 or beta != 0.5:
            raise ValueError("the p + qpq limit law is only available for alpha = beta = 1/2")
        return p_plus_qpq_law()
    raise ValueError(f"no limit law for target {target!r}")


@dataclass(frozen=True)
class ConvergenceReport:
    alpha: float
    beta: float
    rows: tuple  # (n, ks, w1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "ks", "w1"])
        for n, ks, w1 in self.rows:
            w.writerow([n, repr(ks), repr(w1)])
        return buf.getvalue()


def convergence_report(
    base: ExperimentConfig,
    n_list,
    alpha: float | None = None,
    beta: float | None = None,
    law: SpectralLaw | None = None,
) -> ConvergenceReport:
    """KS and W1 distances at each ``n`` with ``k = floor(alpha n)``, ``l = floor(beta n)``."""
    alpha = base.k / base.n if alpha is None else alpha
    beta = base.l / base.n if beta is None else beta
    law = limit_law_for(base.target, alpha, beta) if law is None else law
    rows = []
    for n in n_list:
        emp = empirical_spectrum(base.with_n(int(n), alpha, beta))
        rows.append((int(n), ks_distance(emp, law), w1_distance(emp, law)))
    return ConvergenceReport(alpha, beta, tuple(rows))


# --- histograms ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Histogram:
    """Bins with heights scaled so the total area is the empirical mass."""

    edges: np.ndarray
    counts: np.ndarray
    weight_per_sample: float

    @property
    def heights(self) -> np.ndarray:
        return self.counts * self.weight_per_sample / np.diff(self.edges)

    @property
    def area(self) -> float:
        return float(np.sum(self.heights * np.diff(self.edges)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["left", "right", "count", "density"])
        for a, b, c, h in zip(self.edges[:-1], self.edges[1:], self.counts, self.heights):
            w.writerow([repr(float(a)), repr(float(b)), int(c), repr(float(h))])
        return buf.getvalue()


def detect_atoms(samples: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Locations repeated (within ``tol``) at least twice in sorted ``samples``."""
    s = np.asarray(samples, dtype=float)
    if s.size < 2:
        return np.zeros(0)
    close = np.diff(s) <= tol
    return np.unique(s[:-1][close])


def freedman_diaconis_bins(samples: np.ndarray) -> int:
    s = np.asarray(samples, dtype=float)
    span = float(s[-1] - s[0]) if s.size else 0.0
    q75, q25 = np.percentile(s, [75, 25]) if s.size else (0.0, 0.0)
    iqr = q75 - q25
    if span <= 0:
        return 1
    if iqr <= 0:
        return max(1, int(math.ceil(math.log2(s.size) + 1)))
    h = 2 * iqr / s.size ** (1 / 3)
    return int(min(max(math.ceil(span / h), 1), 10_000))


def histogram(
    emp: EmpiricalDistribution,
    bins: int | None = None,
    value_range: tuple[float, float] | None = None,
) -> Histogram:
    """Density histogram whose bin edges never coincide with an atom."""
    if emp.count == 0:
        raise ValueError("empty empirical sample")
    s = emp.samples
    nb = freedman_diaconis_bins(s) if bins is None else int(bins)
    if nb < 1:
        raise ValueError("need at least one bin")
    lo, hi = value_range if value_range is not None else (float(s[0]), float(s[-1]))
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    atoms = detect_atoms(s)
    width = (hi - lo) / nb
    eps = 1e-9 * max(1.0, abs(lo), abs(hi))
    if np.any(np.abs(atoms - lo) <= eps) or np.any(np.abs(atoms - hi) <= eps):
        lo, hi = lo - 0.5 * width, hi + 0.5 * width
        width = (hi - lo) / nb
    edges = lo + width * np.arange(nb + 1)
    edges[-1] = hi
    for a in atoms:
        j = int(np.argmin(np.abs(edges - a)))
        if 0 < j < nb and abs(edges[j] - a) <= eps:
            # move the edge half way to its right neighbour
            edges[j] = 0.5 * (a + edges[j + 1])
    inside = s[(s >= lo) & (s <= hi)]
    counts = np.histogram(inside, bins=edges)[0]
    return Histogram(edges, counts, emp.weight_per_sample)


def describe(config: ExperimentConfig) -> str:
    what = "angles" if config.is_angles else format_ncpoly(config.polynomial)
    return f"{what} at n={config.n}, k={config.k}, l={config.l}, {config.trials} trial(s), seed {config.seed}"
