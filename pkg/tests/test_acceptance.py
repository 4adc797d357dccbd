"""Acceptance criteria, one test per criterion, at full sizes.

Each test runs its verification suite and records a one-line verdict that is
printed in the terminal summary under "acceptance criteria".
"""
import time

import pytest

from freeangles.verify import run_suite


def _run(name):
    t0 = time.perf_counter()
    rep = run_suite(name, quick=False)
    return rep, time.perf_counter() - t0


def _summary(checks):
    return "; ".join(f"{c.name} = {c.value:.3g} (limit {c.threshold:g})" for c in checks)


def _judge(record, criterion, name, extra=None, keep=lambda c: True, note=""):
    rep, took = _run(name)
    checks = [c for c in rep.checks if keep(c)]
    ok = all(c.passed for c in checks) and (extra is None or extra(took))
    record(criterion, ok, f"{name} suite, {took:.1f} s: {_summary(checks)}{note}")
    failed = [c.name for c in checks if not c.passed]
    assert not failed, failed
    return took


def test_criterion_01_closed_form_spectra(record):
    took = _judge(record, 1, "closed-forms", extra=lambda t: t < 30)
    assert took < 30


def test_criterion_02_generic_block_spectrum(record):
    _judge(record, 2, "generic-spectrum")


def test_criterion_03_angle_recovery(record):
    _judge(record, 3, "angle-recovery")


def test_criterion_04_mass_identities(record):
    _judge(record, 4, "masses")


def test_criterion_05_moments(record):
    _judge(record, 5, "moments")


def test_criterion_06_uniform_angles(record):
    took = _judge(record, 6, "uniform-angles", extra=lambda t: t < 60)
    assert took < 60


def test_criterion_07_p_plus_qpq_histogram(record):
    _judge(record, 7, "figure")


def test_criterion_08_dual_path_laws(record):
    _judge(record, 8, "dual-path")


def _literal_commutator(c):
    return "[-1, 1]" in c.name


def test_criterion_09_arcsine_special_cases(record):
    # the product, sum and corrected [-1/2, 1/2] commutator checks
    _judge(record, 9, "special-cases", keep=lambda c: not _literal_commutator(c))


@pytest.mark.xfail(strict=True, reason="i(PQ - QP) has eigenvalues +-cos t sin t, so its law lives on [-1/2, 1/2]")
def test_criterion_09_commutator_arcsine_on_unit_interval(record):
    _judge(record, 9, "special-cases", keep=_literal_commutator,
           note=" [expected failure: the law is arcsine on [-1/2, 1/2], checked above]")


def test_criterion_10_determinism(record):
    _judge(record, 10, "determinism")
