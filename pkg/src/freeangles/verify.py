"""Self-checks of the library against independent oracles.

Each suite returns a :class:`SuiteReport` made of named checks, each with the
measured value and the threshold it was held to. ``quick`` mode shrinks the
sample sizes and grids; thresholds are unchanged.
"""
from __future__ import annotations

import io
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .blocks import (
    block_structure,
    exact_spectrum,
    spectrum_anticommutator,
    spectrum_commutator,
    spectrum_pqp,
    spectrum_sum,
)
from .laws import (
    PushforwardPiece,
    angle_law,
    anticommutator_law,
    anticommutator_law_half,
    arcsine_cdf,
    boxplus_bernoulli,
    boxplus_edges,
    boxtimes_bernoulli,
    commutator_law,
    p_plus_qpq_law,
    p_plus_qpq_pushforward,
    uniform_angle_law,
)
from .montecarlo import (
    EmpiricalDistribution,
    ExperimentConfig,
    empirical_spectrum,
    histogram,
    ks_distance,
    w1_distance,
)
from .ncpoly import evaluate, parse_ncpoly
from .subspace import haar_subspace, planted_pair, principal_angles, principal_vectors, projector, rng_stream


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    mode: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, threshold: float, detail: str = "", le: bool = True) -> Check:
        ok = bool(value <= threshold) if le else bool(value >= threshold)
        c = Check(name, ok, float(value), float(threshold), detail)
        self.checks.append(c)
        return c

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "mode": self.mode,
            "passed": self.passed,
            "elapsed": round(self.elapsed, 3),
            "checks": [asdict(c) for c in self.checks],
        }


# --- random configurations ------------------------------------------------------------

REGIMES = ("k+l<n", "k+l>n", "k=l", "k=0", "k=n")


def random_configs(count: int, n_max: int = 200, seed: int = 2024) -> list[tuple[int, int, int, str, str]]:
    """``(n, k, l, field, regime)`` cycling through the dimension regimes and both fields."""
    rng = rng_stream(seed)
    out = []
    for i in range(count):
        regime = REGIMES[i % len(REGIMES)]
        fld = "real" if (i // len(REGIMES)) % 2 == 0 else "complex"
        n = int(rng.integers(4, n_max + 1))
        if regime == "k+l<n":
            k = int(rng.integers(1, n // 2 + 1))
            l = int(rng.integers(0, n - k))
        elif regime == "k+l>n":
            k = int(rng.integers(n // 2 + 1, n + 1))
            l = int(rng.integers(n - k + 1, n + 1))
        elif regime == "k=l":
            k = l = int(rng.integers(0, n + 1))
        elif regime == "k=0":
            k, l = 0, int(rng.integers(0, n + 1))
        else:
            k, l = n, int(rng.integers(0, n + 1))
        out.append((n, k, l, fld, regime))
    return out


def _pair(n, k, l, fld, seed):
    rng = rng_stream(seed)
    return haar_subspace(n, k, rng, fld), haar_subspace(n, l, rng, fld)


def _max_sorted_diff(a, b) -> float:
    a, b = np.sort(np.asarray(a).real), np.sort(np.asarray(b).real)
    if a.shape != b.shape:
        return np.inf
    return float(np.max(np.abs(a - b))) if a.size else 0.0


# --- suites ---------------------------------------------------------------------------


def suite_closed_forms(quick: bool = False) -> SuiteReport:
    """The four closed-form spectra against dense eigenvalues of the assembled matrices."""
    rep = SuiteReport("closed-forms", "quick" if quick else "full")
    forms = {
        "pqp": (spectrum_pqp, lambda A, B: A @ B @ A),
        "qpq": (spectrum_pqp, lambda A, B: B @ A @ B),
        "p+q": (spectrum_sum, lambda A, B: A + B),
        "i(pq-qp)": (spectrum_commutator, lambda A, B: 1j * (A @ B - B @ A)),
        "pq+qp": (spectrum_anticommutator, lambda A, B: A @ B + B @ A),
    }
    worst = {name: 0.0 for name in forms}
    configs = random_configs(10 if quick else 50)
    for idx, (n, k, l, fld, _) in enumerate(configs):
        E, F = _pair(n, k, l, fld, 1000 + idx)
        blocks = block_structure(n, k, l, principal_angles(E, F))
        A, B = projector(E), projector(F)
        for name, (closed, dense) in forms.items():
            M = dense(A, B)
            err = _max_sorted_diff(closed(blocks).values(), np.linalg.eigvalsh(0.5 * (M + M.conj().T)))
            worst[name] = max(worst[name], err)
    for name, err in worst.items():
        rep.add(f"{name} vs dense eigensolver", err, 1e-8, f"{len(configs)} configurations")
    return rep


def suite_generic_spectrum(quick: bool = False) -> SuiteReport:
    """Block-wise spectra of higher-degree polynomials against the dense oracle."""
    rep = SuiteReport("generic-spectrum", "quick" if quick else "full")
    polys = ["p + q*p*q", "p*q*p*q + q*p*q*p", "p*q*p", "i*(p*q - q*p)"]
    configs = random_configs(10 if quick else 50, seed=77)
    for text in polys:
        poly = parse_ncpoly(text)
        worst = 0.0
        for idx, (n, k, l, fld, _) in enumerate(configs):
            E, F = _pair(n, k, l, fld, 5000 + idx)
            blocks = block_structure(n, k, l, principal_angles(E, F))
            M = evaluate(poly, projector(E), projector(F))
            dense = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
            worst = max(worst, _max_sorted_diff(exact_spectrum(poly, blocks).values(), dense))
        rep.add(f"{text} vs dense eigensolver", worst, 1e-8, f"{len(configs)} configurations")
    return rep


PLANTED_LISTS = (
    [0.0],
    [np.pi / 2],
    [0.0, np.pi / 2],
    [0.0, 0.0, 0.3, np.pi / 2],
    [1e-6, 0.5, 1.0, 1.5],
    [0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
    [np.pi / 4] * 3,
    [0.0, 1e-3, np.pi / 2 - 1e-3, np.pi / 2],
    list(np.linspace(0, np.pi / 2, 9)),
    [0.7, 0.7 + 1e-9, 1.2],
)


def suite_angle_recovery(quick: bool = False) -> SuiteReport:
    """Planted principal angles are recovered; principal vectors satisfy the Gram pattern."""
    rep = SuiteReport("angle-recovery", "quick" if quick else "full")
    worst = 0.0
    for i, angles in enumerate(PLANTED_LISTS):
        for fld in ("real", "complex"):
            r = len(angles)
            n = 2 * r + 7
            # pad only one side so the planted list is the full angle list
            E, F = planted_pair(n, angles, extra_e=0, extra_f=3 + i % 3, seed=31 + i, field=fld)
            got = principal_angles(E, F).angles
            worst = max(worst, _max_sorted_diff(got, angles))
            got_swapped = principal_angles(F, E).angles
            worst = max(worst, _max_sorted_diff(got_swapped, angles))
    rep.add("planted angles recovered", worst, 1e-10, f"{len(PLANTED_LISTS)} angle lists, both fields")
    gram_err = 0.0
    pairs = [(40, 10, 15), (30, 20, 25), (12, 6, 6), (50, 5, 45), (9, 9, 4)]
    for j, (n, k, l) in enumerate(pairs[: 3 if quick else None]):
        for fld in ("real", "complex"):
            E, F = _pair(n, k, l, fld, 900 + j)
            pv = principal_vectors(E, F)
            G = pv.gram()
            target = np.zeros(G.shape)
            d = min(k, l)
            target[np.arange(d), np.arange(d)] = np.cos(pv.angles.angles)
            gram_err = max(gram_err, float(np.max(np.abs(G - target))))
            for basis in (pv.e_basis, pv.f_basis):
                gram_err = max(gram_err, float(np.max(np.abs(basis.conj().T @ basis - np.eye(basis.shape[1])))))
    rep.add("principal-vector Gram pattern", gram_err, 1e-10, "random pairs, both fields")
    return rep


def _quadrature_mass(piece) -> float:
    return piece.table_mass() if isinstance(piece, PushforwardPiece) else piece.quadrature_mass


def _grid(quick: bool) -> np.ndarray:
    return np.linspace(0.0, 1.0, 6 if quick else 21)


def suite_masses(quick: bool = False) -> SuiteReport:
    """AC masses and total masses by quadrature over an (alpha, beta) grid."""
    rep = SuiteReport("masses", "quick" if quick else "full")
    g = _grid(quick)
    errs = {k: 0.0 for k in ("boxtimes ac", "boxtimes total", "boxplus ac", "boxplus total", "angle total",
                             "commutator total", "anticommutator total")}
    edge_err = 0.0
    for a in g:
        for b in g:
            r = min(a, b, 1 - a, 1 - b)
            for key, law, ac_target in (
                ("boxtimes", boxtimes_bernoulli(a, b), r),
                ("boxplus", boxplus_bernoulli(a, b), 2 * r),
            ):
                ac = sum(_quadrature_mass(p) for p in law.pieces)
                errs[f"{key} ac"] = max(errs[f"{key} ac"], abs(ac - ac_target))
                errs[f"{key} total"] = max(errs[f"{key} total"], abs(law.atom_mass + ac - 1))
            ang = angle_law(a, b)
            errs["angle total"] = max(errs["angle total"], abs(sum(_quadrature_mass(p) for p in ang.pieces) - r))
            if not quick or (a, b) in {(0.2, 0.4), (0.5, 0.5), (0.6, 0.8)}:
                for key, law in (("commutator", commutator_law(a, b)), ("anticommutator", anticommutator_law(a, b))):
                    tot = law.atom_mass + sum(_quadrature_mass(p) for p in law.pieces)
                    errs[f"{key} total"] = max(errs[f"{key} total"], abs(tot - 1))
            e = boxplus_edges(a, b)
            edge_err = max(edge_err, abs(e.gamma1 + e.gamma4 - 2), abs(e.gamma2 + e.gamma3 - 2))
    for key, err in errs.items():
        rep.add(f"{key} mass", err, 1e-6, f"{g.size}x{g.size} grid")
    rep.add("boxplus edge sums equal 2 (to rounding)", edge_err, 1e-15)
    return rep


def suite_moments(quick: bool = False) -> SuiteReport:
    """Means of the Bernoulli convolutions, plus a Monte Carlo trace cross-check."""
    rep = SuiteReport("moments", "quick" if quick else "full")
    g = _grid(quick)
    e_plus = e_times = 0.0
    for a in g:
        for b in g:
            e_plus = max(e_plus, abs(boxplus_bernoulli(a, b).mean() - (a + b)))
            e_times = max(e_times, abs(boxtimes_bernoulli(a, b).mean() - a * b))
    rep.add("mean of boxplus equals alpha + beta", e_plus, 1e-8, f"{g.size}x{g.size} grid")
    rep.add("mean of boxtimes equals alpha beta", e_times, 1e-6, f"{g.size}x{g.size} grid")
    n = 200 if quick else 500
    trials = 8 if quick else 20
    for j, (a, b) in enumerate(((0.3, 0.6), (0.5, 0.5), (0.2, 0.7))):
        k, l = round(a * n), round(b * n)
        vals = []
        for t in range(trials):
            E, F = _pair(n, k, l, "real", 7000 + 100 * j + t)
            A, B = projector(E), projector(F)
            vals.append(np.trace(A @ B @ A) / n)
        vals = np.array(vals)
        se = vals.std(ddof=1) / np.sqrt(trials)
        dev = abs(vals.mean() - boxtimes_bernoulli(a, b).mean())
        rep.add(f"Monte Carlo trace of PQP at alpha={a}, beta={b} (in standard errors)", dev / se, 3.0,
                f"n={n}, {trials} trials, mean {vals.mean():.6f}, se {se:.2e}")
    return rep


def suite_uniform_angles(quick: bool = False) -> SuiteReport:
    """Principal angles of two half-dimensional subspaces are nearly uniform on [0, pi/2].

    Probability normalization: each of the ``n`` angles weighs ``1/n``, and the
    reference is the uniform probability law on ``[0, pi/2]``.
    """
    rep = SuiteReport("uniform-angles", "quick" if quick else "full")
    half = 300 if quick else 1000
    cfg = ExperimentConfig(2 * half, half, half, trials=1, seed=6, target="angles")
    t0 = time.perf_counter()
    emp = empirical_spectrum(cfg)
    per_angle = EmpiricalDistribution(emp.samples, 1.0 / half)
    ks = ks_distance(per_angle, uniform_angle_law())
    took = time.perf_counter() - t0
    rep.add("KS to uniform law on [0, pi/2]", ks, 0.05, f"{half} angles in ambient dimension {2 * half}")
    rep.add("runtime in seconds", took, 60.0)
    # the ambient normalization against the sub-probability angle law gives the same picture
    rep.add("KS to angle law, ambient normalization", ks_distance(emp, angle_law(0.5, 0.5)), 0.05)
    return rep


def suite_figure(quick: bool = False) -> SuiteReport:
    """Eigenvalues of P + QPQ for half-dimensional subspaces against the limit law."""
    rep = SuiteReport("figure", "quick" if quick else "full")
    half = 300 if quick else 1000
    cfg = ExperimentConfig(2 * half, half, half, trials=1, seed=1, target="p_plus_qpq")
    emp = empirical_spectrum(cfg)
    law = p_plus_qpq_law()
    rep.add("W1 to the p + qpq law", w1_distance(emp, law), 0.05, f"ambient dimension {2 * half}")
    s = emp.samples
    inside = ((s >= -0.02) & (s <= 0.22)) | ((s >= 0.98) & (s <= 2.02))
    rep.add("samples outside [-0.02, 0.22] u [0.98, 2.02]", float(np.sum(~inside)), 0.0)
    h = histogram(emp)
    rep.add("histogram area minus empirical mass", abs(h.area - emp.total_mass), 1e-9)
    return rep


def _cdf_gap(f: Callable, g: Callable, x: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(f(x)) - np.asarray(g(x)))))


def suite_dual_path(quick: bool = False) -> SuiteReport:
    """Laws computed along two independent routes agree."""
    rep = SuiteReport("dual-path", "quick" if quick else "full")
    x = np.linspace(-0.3, 2.1, 50)
    rep.add(
        "pq + qp: closed form vs pushforward of the sum law",
        _cdf_gap(anticommutator_law_half().cdf, anticommutator_law(0.5, 0.5).cdf, x), 1e-8,
    )
    theta = np.linspace(0, np.pi / 2, 50)
    gap = 0.0
    for a, b in ((0.3, 0.6), (0.5, 0.5), (0.2, 0.9), (0.7, 0.75)):
        ang = angle_law(a, b)
        ac = boxtimes_bernoulli(a, b).ac_part()
        # theta -> cos^2 theta is decreasing
        gap = max(gap, _cdf_gap(ang.cdf, lambda t: ac.total_mass - ac.cdf(np.cos(t) ** 2), theta))
    rep.add("angle law vs product law under cos^2", gap, 1e-8, "four parameter pairs")
    rep.add(
        "p + qpq: closed form vs eigenvalue-branch pushforward",
        _cdf_gap(p_plus_qpq_law().cdf, p_plus_qpq_pushforward().cdf, x), 1e-8,
    )
    y = np.linspace(1.0, 2.0, 52)[1:-1]
    rep.add(
        "p + qpq density on (1, 2): closed form vs pushforward",
        float(np.max(np.abs(p_plus_qpq_law().density(y) - p_plus_qpq_pushforward().density(y))
                     / p_plus_qpq_law().density(y))), 1e-8, "relative",
    )
    return rep


def suite_special_cases(quick: bool = False) -> SuiteReport:
    """Arcsine laws at alpha = beta = 1/2."""
    rep = SuiteReport("special-cases", "quick" if quick else "full")
    x01 = np.linspace(-0.1, 1.1, 50)
    x02 = np.linspace(-0.1, 2.1, 50)
    xm = np.linspace(-1.1, 1.1, 50)
    rep.add(
        "product law AC part is half the arcsine law on [0, 1]",
        _cdf_gap(boxtimes_bernoulli(0.5, 0.5).ac_part().cdf, lambda t: arcsine_cdf(t, 0.0, 1.0, 0.5), x01), 1e-8,
    )
    rep.add(
        "sum law is the arcsine law on [0, 2]",
        _cdf_gap(boxplus_bernoulli(0.5, 0.5).cdf, lambda t: arcsine_cdf(t, 0.0, 2.0), x02), 1e-8,
    )
    com = commutator_law(0.5, 0.5)
    rep.add(
        "commutator law is the arcsine law on [-1, 1]",
        _cdf_gap(com.cdf, lambda t: arcsine_cdf(t, -1.0, 1.0), xm), 1e-8,
        "expected to fail: the commutator eigenvalues cos t sin t never exceed 1/2",
    )
    rep.add(
        "commutator law is the arcsine law on [-1/2, 1/2]",
        _cdf_gap(com.cdf, lambda t: arcsine_cdf(t, -0.5, 0.5), xm), 1e-8,
    )
    return rep


def suite_determinism(quick: bool = False) -> SuiteReport:
    """Repeated runs with identical seeds give byte-identical CSV output."""
    from .cli import main

    rep = SuiteReport("determinism", "quick" if quick else "full")
    n = "60" if quick else "200"
    commands = [
        ["angles", "--n", n, "--k", "20", "--l", "30", "--seed", "5"],
        ["angles", "--n", n, "--k", "20", "--l", "30", "--seed", "5", "--field", "complex"],
        ["spectrum", "--n", n, "--k", "25", "--l", "40", "--seed", "9", "--poly", "p + q*p*q"],
        ["law", "anticommutator", "--alpha", "0.3", "--beta", "0.6", "--grid", "200"],
        ["simulate", "--n", n, "--k", "30", "--l", "30", "--trials", "3", "--seed", "11",
         "--target", "sum", "--dump-samples", "-"],
        ["simulate", "--n", n, "--k", "30", "--l", "30", "--trials", "3", "--seed", "11",
         "--target", "sum", "--dump-samples", "-", "--workers", "3"],
    ]
    outputs = []
    mismatches = 0
    for argv in commands:
        runs = []
        for _ in range(2):
            buf = io.StringIO()
            code = main(argv, out=buf)
            if code != 0:
                mismatches += 1
            runs.append(buf.getvalue().encode())
        mismatches += runs[0] != runs[1]
        outputs.append(runs[0])
    rep.add("commands with differing output across runs", mismatches, 0, f"{len(commands)} commands")
    rep.add("serial and threaded simulation differ", float(outputs[-1] != outputs[-2]), 0)
    return rep


SUITES: dict[str, Callable[[bool], SuiteReport]] = {
    "closed-forms": suite_closed_forms,
    "generic-spectrum": suite_generic_spectrum,
    "angle-recovery": suite_angle_recovery,
    "masses": suite_masses,
    "moments": suite_moments,
    "uniform-angles": suite_uniform_angles,
    "figure": suite_figure,
    "dual-path": suite_dual_path,
    "special-cases": suite_special_cases,
    "determinism": suite_determinism,
}


def run_suite(name: str, quick: bool = False) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    rep = SUITES[name](quick)
    rep.elapsed = time.perf_counter() - t0
    return rep


def run_all(quick: bool = False) -> list[SuiteReport]:
    return [run_suite(name, quick) for name in SUITES]


def reports_json(reports: list[SuiteReport]) -> str:
    return json.dumps(
        {"passed": all(r.passed for r in reports), "suites": [r.to_dict() for r in reports]}, indent=2
    )
