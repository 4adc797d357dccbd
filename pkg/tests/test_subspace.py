import json

import numpy as np
import pytest
import scipy.linalg

from freeangles.subspace import (
    PrincipalAngleSpectrum,
    Subspace,
    generic_dims,
    haar_subspace,
    haar_unitary,
    planted_pair,
    principal_angles,
    principal_vectors,
    projector,
    rng_stream,
)


def line(theta, field="real"):
    return Subspace.from_spanning(np.array([[np.cos(theta)], [np.sin(theta)]]), field)


def test_zero_dimensional_subspace():
    E = haar_subspace(3, 0, seed=5)
    assert E.n == 3 and E.k == 0
    assert E.basis.shape == (3, 0)
    assert np.array_equal(projector(E), np.zeros((3, 3)))


@pytest.mark.parametrize("field", ["real", "complex"])
def test_full_space_basis_is_unitary(field):
    E = haar_subspace(3, 3, seed=11, field=field)
    B = E.basis
    assert np.allclose(B.conj().T @ B, np.eye(3), atol=1e-12)
    assert np.allclose(B @ B.conj().T, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("field", ["real", "complex"])
def test_orthonormal_basis(field):
    E = haar_subspace(50, 20, seed=7, field=field)
    assert E.orthonormality_error() <= 1e-12
    assert np.iscomplexobj(E.basis) == (field == "complex")


def test_sampling_is_deterministic_and_seed_dependent():
    a = haar_subspace(30, 10, seed=3, field="complex").basis
    b = haar_subspace(30, 10, seed=3, field="complex").basis
    c = haar_subspace(30, 10, seed=4, field="complex").basis
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_trial_streams_are_keyed_by_xor():
    assert rng_stream(12, 5).random() == rng_stream(12 ^ 5).random()


def test_invalid_dimensions():
    with pytest.raises(ValueError):
        haar_subspace(3, 4)
    with pytest.raises(ValueError):
        haar_subspace(0, 0)
    with pytest.raises(ValueError):
        haar_subspace(3, 1, field="quaternion")


def test_non_orthonormal_basis_rejected():
    with pytest.raises(ValueError):
        Subspace(np.array([[1.0], [1.0]]))


def test_projector_of_coordinate_axis():
    E = Subspace(np.array([[1.0], [0.0]]))
    assert np.array_equal(projector(E), np.array([[1.0, 0.0], [0.0, 0.0]]))


@pytest.mark.parametrize("field", ["real", "complex"])
def test_projector_identities(field):
    E = haar_subspace(40, 13, seed=2, field=field)
    P = projector(E)
    assert np.max(np.abs(P @ P - P)) <= 1e-12
    assert np.max(np.abs(P - P.conj().T)) <= 1e-12
    assert abs(np.trace(P).real - 13) <= 1e-10


def test_identical_subspaces_have_zero_angles():
    E = haar_subspace(20, 6, seed=1)
    spec = principal_angles(E, E)
    assert np.all(spec.angles <= 1e-14)
    assert spec.dim_intersection == 6


@pytest.mark.parametrize("theta", [0.0, 1e-6, 0.3, np.pi / 4, 1.2, np.pi / 2 - 1e-9, np.pi / 2])
@pytest.mark.parametrize("field", ["real", "complex"])
def test_two_lines_in_the_plane(theta, field):
    spec = principal_angles(line(0.0, field), line(theta, field))
    assert spec.angles.shape == (1,)
    assert abs(spec.angles[0] - theta) <= 1e-12


def test_matches_scipy_subspace_angles():
    for seed in range(5):
        E = haar_subspace(30, 8, seed=seed)
        F = haar_subspace(30, 12, seed=100 + seed)
        ours = principal_angles(E, F).angles
        ref = np.sort(scipy.linalg.subspace_angles(E.basis, F.basis))
        assert np.max(np.abs(ours - ref)) <= 1e-12


@pytest.mark.parametrize("field", ["real", "complex"])
def test_planted_angles_recovered(field):
    angles = [0.0, 1e-7, 0.25, 0.9, np.pi / 2]
    E, F = planted_pair(17, angles, extra_f=4, seed=3, field=field)
    assert np.max(np.abs(principal_angles(E, F).angles - angles)) <= 1e-10


def test_planted_pads_on_both_sides_add_right_angles():
    E, F = planted_pair(12, [0.4], extra_e=2, extra_f=3, seed=0)
    got = principal_angles(E, F).angles
    assert np.allclose(got, [0.4, np.pi / 2, np.pi / 2], atol=1e-12)


def test_swap_invariance():
    E = haar_subspace(25, 7, seed=8, field="complex")
    F = haar_subspace(25, 11, seed=9, field="complex")
    assert np.allclose(principal_angles(E, F).angles, principal_angles(F, E).angles, atol=1e-13)


def test_rotation_invariance():
    E = haar_subspace(25, 7, seed=8)
    F = haar_subspace(25, 11, seed=9)
    U = haar_unitary(25, seed=10)
    a = principal_angles(E, F).angles
    b = principal_angles(E.rotated(U), F.rotated(U)).angles
    assert np.max(np.abs(a - b)) <= 1e-12


def test_mismatched_pairs_rejected():
    with pytest.raises(ValueError):
        principal_angles(haar_subspace(5, 2), haar_subspace(6, 2))
    with pytest.raises(ValueError):
        principal_angles(haar_subspace(5, 2), haar_subspace(5, 2, field="complex"))


@pytest.mark.parametrize("k,l", [(0, 3), (3, 0), (0, 0)])
def test_empty_angle_list(k, l):
    spec = principal_angles(haar_subspace(6, k, seed=1), haar_subspace(6, l, seed=2))
    assert spec.angles.shape == (0,)
    assert spec.dim_intersection == 0
    assert spec.nonzero_angles.shape == (0,)


def test_angles_are_sorted_clamped_and_finite():
    for seed in range(20):
        rng = rng_stream(seed)
        n = int(rng.integers(1, 30))
        k, l = int(rng.integers(0, n + 1)), int(rng.integers(0, n + 1))
        spec = principal_angles(haar_subspace(n, k, rng), haar_subspace(n, l, rng))
        a = spec.angles
        assert a.shape == (min(k, l),)
        assert np.all(np.isfinite(a))
        assert np.all(np.diff(a) >= 0)
        assert np.all((a >= 0) & (a <= np.pi / 2))
        assert np.all((spec.cosines >= 0) & (spec.cosines <= 1))
        assert spec.dim_intersection + spec.nonzero_angles.size == min(k, l)


def test_equal_lines_give_parallel_principal_vectors():
    E = line(0.4, "complex")
    F = Subspace(E.basis * np.exp(0.7j), "complex")
    pv = principal_vectors(E, F)
    overlap = np.vdot(pv.e_basis[:, 0], pv.f_basis[:, 0])
    assert abs(overlap.imag) <= 1e-12 and abs(overlap.real - 1) <= 1e-12


def test_two_lines_principal_vectors():
    pv = principal_vectors(line(0.0), line(0.9))
    assert abs(np.vdot(pv.e_basis[:, 0], pv.f_basis[:, 0]) - np.cos(0.9)) <= 1e-12


@pytest.mark.parametrize("field", ["real", "complex"])
def test_gram_pattern(field):
    E = haar_subspace(40, 10, seed=21, field=field)
    F = haar_subspace(40, 15, seed=22, field=field)
    pv = principal_vectors(E, F)
    G = pv.gram()
    target = np.zeros((10, 15))
    target[np.arange(10), np.arange(10)] = np.cos(pv.angles.angles)
    assert np.max(np.abs(G - target)) <= 1e-10


def test_generic_dims_examples():
    assert generic_dims(10, 4, 5) == (9, 0, 4)
    assert generic_dims(10, 7, 8) == (10, 5, 2)
    assert generic_dims(2 * 13, 13, 13) == (26, 0, 13)


@pytest.mark.parametrize("n,k,l", [(10, 7, 8), (10, 4, 5), (9, 3, 6), (12, 12, 5)])
def test_generic_intersection_almost_surely(n, k, l):
    _, m, r = generic_dims(n, k, l)
    hits = 0
    for trial in range(1000):
        rng = rng_stream(99, trial)
        spec = principal_angles(haar_subspace(n, k, rng), haar_subspace(n, l, rng), tol_zero=1e-8)
        a = spec.angles
        hits += spec.dim_intersection == m and np.sum((a > 1e-8) & (a < np.pi / 2 - 1e-8)) == r
    assert hits >= 990


@pytest.mark.parametrize("field", ["real", "complex"])
def test_json_roundtrip(field):
    E = haar_subspace(6, 3, seed=4, field=field)
    text = E.to_json()
    back = Subspace.from_json(text)
    assert np.array_equal(back.basis, E.basis)
    assert back.field == field
    if field == "complex":
        basis = json.loads(text)["basis"]
        assert len(basis) == 6 and len(basis[0]) == 3 and len(basis[0][0]) == 2
    spec = principal_angles(E, haar_subspace(6, 4, seed=5, field=field))
    again = PrincipalAngleSpectrum.from_json(spec.to_json())
    assert np.array_equal(again.angles, spec.angles)
    assert again.dim_intersection == spec.dim_intersection
