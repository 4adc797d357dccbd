import numpy as np
import pytest
from scipy import stats

from freeangles.laws import arcsine_law, boxplus_bernoulli, uniform_angle_law
from freeangles.montecarlo import (
    DENSE_MAX_N,
    ExperimentConfig,
    EmpiricalDistribution,
    convergence_report,
    detect_atoms,
    distances,
    empirical_spectrum,
    freedman_diaconis_bins,
    histogram,
    ks_distance,
    limit_law_for,
    per_trial_distributions,
    trial_samples,
    trial_values,
    w1_distance,
)


# --- configuration ------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=0, k=0, l=0),
        dict(n=10, k=11, l=3),
        dict(n=10, k=3, l=-1),
        dict(n=10, k=3, l=3, trials=0),
        dict(n=10, k=3, l=3, field="quaternion"),
        dict(n=10, k=3, l=3, path="magic"),
        dict(n=10, k=3, l=3, workers=0),
        dict(n=10, k=3, l=3, target="p*q"),
        dict(n=DENSE_MAX_N + 1, k=3, l=3, path="dense-oracle"),
    ],
)
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_config_roundtrip_and_unknown_keys():
    c = ExperimentConfig(n=20, k=7, l=9, trials=3, seed=5, target="p + q*p*q", field="complex")
    assert ExperimentConfig.from_json(c.to_json()) == c
    with pytest.raises(ValueError, match="unknown config keys"):
        ExperimentConfig.from_dict({**c.to_dict(), "bogus": 1})


def test_with_n_floors_fractions():
    c = ExperimentConfig(n=10, k=1, l=1).with_n(333, 0.3, 0.6)
    assert (c.n, c.k, c.l) == (333, 99, 199)


def test_zero_dimensional_subspace_gives_pure_atom():
    emp = empirical_spectrum(ExperimentConfig(n=12, k=0, l=5, target="sum"))
    # P = 0, so p + q has eigenvalue 1 five times and 0 seven times
    assert np.allclose(emp.samples, [0] * 7 + [1] * 5, atol=1e-12)
    assert emp.total_mass == pytest.approx(1.0)
    angles = empirical_spectrum(ExperimentConfig(n=12, k=0, l=5, target="angles"))
    assert angles.count == 0


# --- trials ---------------------------------------------------------------------


@pytest.mark.parametrize("target", ["angles", "pqp", "sum", "commutator", "anticommutator", "p_plus_qpq"])
@pytest.mark.parametrize("field", ["real", "complex"])
def test_exact_path_matches_dense_oracle(target, field):
    cfg = ExperimentConfig(n=100, k=37, l=58, seed=11, field=field, target=target)
    dense = ExperimentConfig(**{**cfg.to_dict(), "path": "dense-oracle"})
    a, b = trial_values(cfg, 0), trial_values(dense, 0)
    assert a.shape == b.shape
    assert np.max(np.abs(np.sort(a) - np.sort(b))) <= 1e-9


def test_same_seed_same_samples():
    cfg = ExperimentConfig(n=60, k=20, l=30, trials=4, seed=99, target="anticommutator")
    a = empirical_spectrum(cfg).samples
    b = empirical_spectrum(cfg).samples
    assert np.array_equal(a, b)
    other = empirical_spectrum(ExperimentConfig(**{**cfg.to_dict(), "seed": 100})).samples
    assert not np.array_equal(a, other)


def test_parallel_trials_identical_to_serial():
    cfg = ExperimentConfig(n=80, k=30, l=25, trials=6, seed=3, target="pqp")
    par = ExperimentConfig(**{**cfg.to_dict(), "workers": 4})
    for s, p in zip(trial_samples(cfg), trial_samples(par)):
        assert np.array_equal(s, p)


def test_trial_stream_independent_of_trial_count():
    short = ExperimentConfig(n=40, k=10, l=15, trials=2, seed=8, target="sum")
    long = ExperimentConfig(**{**short.to_dict(), "trials": 5})
    for a, b in zip(trial_samples(short), trial_samples(long)):
        assert np.array_equal(a, b)


@pytest.mark.parametrize("target", ["pqp", "sum", "commutator", "anticommutator", "p_plus_qpq"])
def test_eigenvalue_targets_have_unit_mass(target):
    emp = empirical_spectrum(ExperimentConfig(n=70, k=20, l=45, trials=3, target=target))
    assert emp.count == 210
    assert emp.total_mass == pytest.approx(1.0, abs=1e-12)


def test_angle_target_mass_is_r_over_n():
    cfg = ExperimentConfig(n=90, k=30, l=70, trials=3, target="angles")
    emp = empirical_spectrum(cfg)
    assert cfg.r == 20
    assert emp.total_mass == pytest.approx(20 / 90, abs=1e-12)
    assert np.all((emp.samples > 0) & (emp.samples <= np.pi / 2))


def test_generic_angle_counts():
    hits = 0
    for seed in range(100):
        cfg = ExperimentConfig(n=30, k=9, l=14, seed=seed, target="angles")
        hits += trial_values(cfg, 0).size == cfg.r
    assert hits >= 99


def test_per_trial_distributions_each_normalized():
    dists = per_trial_distributions(ExperimentConfig(n=50, k=10, l=20, trials=3, target="sum"))
    assert len(dists) == 3
    assert all(d.total_mass == pytest.approx(1.0) for d in dists)


# --- distances ------------------------------------------------------------------


def test_ks_exact_for_matching_atom():
    law = boxplus_bernoulli(0.0, 0.0)  # single atom at 0
    emp = EmpiricalDistribution(np.zeros(10), 0.1)
    assert ks_distance(emp, law) <= 0.1
    assert ks_distance(emp, law) == pytest.approx(0.0, abs=1e-15)
    assert w1_distance(emp, law) == pytest.approx(0.0, abs=1e-15)


def test_ks_detects_mass_deficit():
    law = arcsine_law(0.0, 1.0)
    emp = EmpiricalDistribution(np.linspace(0.01, 0.99, 50), 0.01)  # mass 1/2
    assert ks_distance(emp, law) >= 0.5 - 1e-12


def test_ks_and_w1_against_scipy_for_arcsine_samples():
    rng = np.random.default_rng(1)
    x = stats.arcsine.rvs(size=100_000, random_state=rng)
    emp = EmpiricalDistribution(x, 1.0 / x.size)
    law = arcsine_law(0.0, 1.0)
    ks = ks_distance(emp, law)
    ref = stats.kstest(x, stats.arcsine.cdf).statistic
    assert ks == pytest.approx(ref, abs=1e-9)
    assert ks <= 0.01
    # W1 between a sample and its own law is of order n^{-1/2}
    assert w1_distance(emp, law) <= 0.01


def test_w1_of_shifted_atom():
    law = boxplus_bernoulli(0.0, 0.0)
    emp = EmpiricalDistribution(np.full(4, 0.25), 0.25)
    assert w1_distance(emp, law) == pytest.approx(0.25, rel=1e-12)


def test_uniform_angles_under_half_dimensions():
    cfg = ExperimentConfig(n=400, k=200, l=200, trials=2, seed=4, target="angles")
    emp = empirical_spectrum(cfg)
    probability = EmpiricalDistribution(emp.samples, 1.0 / emp.count)
    assert ks_distance(probability, uniform_angle_law()) <= 0.05
    # ambient normalization against the angle law of mass 1/2
    assert ks_distance(emp, limit_law_for("angles", 0.5, 0.5)) <= 0.025


def test_limit_law_for_unknown_or_unsupported():
    with pytest.raises(ValueError):
        limit_law_for("p_plus_qpq", 0.3, 0.5)
    with pytest.raises(ValueError):
        limit_law_for("nonsense", 0.5, 0.5)


# --- convergence ----------------------------------------------------------------


def test_sum_convergence_decreases():
    base = ExperimentConfig(n=100, k=30, l=60, trials=2, seed=2, target="sum")
    rep = convergence_report(base, [100, 400, 1600], 0.3, 0.6)
    w1 = [row[2] for row in rep.rows]
    assert w1[0] > w1[1] > w1[2]
    assert rep.to_csv().splitlines()[0] == "n,ks,w1"


def test_full_subspace_limit_is_exact():
    # alpha = 1 makes p the identity, so p + q has atoms at 1 and 2 only
    base = ExperimentConfig(n=50, k=50, l=20, target="sum")
    rep = convergence_report(base, [50, 200], 1.0, 0.4)
    for _, ks, w1 in rep.rows:
        assert ks <= 1e-12 and w1 <= 1e-12


@pytest.mark.slow
def test_angle_distance_shrinks_with_n():
    wins = 0
    for batch in range(10):
        ks = []
        for n in (200, 800):
            cfg = ExperimentConfig(n=10, k=1, l=1, trials=2, seed=1000 + batch, target="angles")
            emp = empirical_spectrum(cfg.with_n(n, 0.3, 0.6))
            ks.append(ks_distance(emp, limit_law_for("angles", 0.3, 0.6)))
        wins += ks[1] < ks[0]
    assert wins >= 8


def test_distances_report():
    emp = empirical_spectrum(ExperimentConfig(n=200, k=100, l=100, target="p_plus_qpq"))
    rep = distances(emp, limit_law_for("p_plus_qpq", 0.5, 0.5))
    assert rep.sample_count == 200
    assert 0 < rep.ks < 0.1 and 0 < rep.w1 < 0.05


# --- histograms -----------------------------------------------------------------


def test_histogram_area_equals_mass():
    emp = empirical_spectrum(ExperimentConfig(n=120, k=40, l=30, trials=2, target="angles"))
    h = histogram(emp)
    assert h.area == pytest.approx(emp.total_mass, rel=1e-12)
    assert h.counts.sum() == emp.count


def test_histogram_edges_avoid_atoms():
    emp = empirical_spectrum(ExperimentConfig(n=100, k=30, l=60, target="sum"))
    atoms = detect_atoms(emp.samples)
    assert atoms.size >= 1  # eigenvalue 1 from the excess of q
    for bins in (5, 10, 20, 40, 80):
        h = histogram(emp, bins, (0.0, 2.0))
        for a in atoms:
            assert np.min(np.abs(h.edges - a)) > 1e-9
        assert h.area == pytest.approx(emp.total_mass, rel=1e-12)


def test_detect_atoms_and_bins():
    s = np.array([0.0, 0.0, 0.3, 0.5, 0.5 + 1e-12, 0.9])
    assert np.allclose(detect_atoms(s), [0.0, 0.5])
    assert freedman_diaconis_bins(np.array([1.0, 1.0])) == 1
    assert freedman_diaconis_bins(np.linspace(0, 1, 1000)) >= 10


def test_empirical_csv_roundtrip():
    emp = EmpiricalDistribution(np.array([0.3, 0.1, 0.2]), 0.5)
    back = EmpiricalDistribution.from_csv(emp.to_csv(), 0.5)
    assert np.array_equal(back.samples, emp.samples)
    assert emp.to_csv().splitlines()[0] == "value"
