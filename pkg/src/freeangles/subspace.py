"""Random subspaces of K^n and the principal angles between pairs of them.

A subspace is stored through an orthonormal basis (an ``n x k`` matrix).
Angles are computed from the singular values of the cross-Gram matrix of two
bases, with small angles recovered from the sines of the residual so that
zero angles come out at roundoff level instead of ~1e-8.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal

import numpy as np

Field = Literal["real", "complex"]
FIELDS = ("real", "complex")

DEFAULT_TOL_ZERO = 1e-8
ORTHONORMAL_TOL = 1e-10


def rng_stream(seed: int, trial: int = 0) -> np.random.Generator:
    """PCG64 generator for trial ``trial`` of a run seeded by ``seed``.

    Streams are keyed by ``seed XOR trial`` so that trials can be evaluated in
    any order (or in parallel) with identical results.
    """
    key = (int(seed) ^ int(trial)) & 0xFFFF_FFFF_FFFF_FFFF
    return np.random.Generator(np.random.PCG64(key))


def _check_field(field: str) -> None:
    if field not in FIELDS:
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")


def gaussian_matrix(rng: np.random.Generator, n: int, k: int, field: Field = "real") -> np.ndarray:
    """Standard Gaussian ``n x k`` matrix; complex entries have E|z|^2 = 1."""
    _check_field(field)
    if field == "real":
        return rng.standard_normal((n, k))
    re = rng.standard_normal((n, k))
    im = rng.standard_normal((n, k))
    return (re + 1j * im) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A ``k``-dimensional subspace of K^n given by an orthonormal basis."""

    basis: np.ndarray
    field: Field = "real"

    def __post_init__(self):
        _check_field(self.field)
        b = np.asarray(self.basis)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-d array")
        n, k = b.shape
        if n < 1 or k > n:
            raise ValueError(f"invalid dimensions n={n}, k={k}")
        if self.field == "real" and np.iscomplexobj(b) and np.any(b.imag != 0):
            raise ValueError("complex basis given for a real subspace")
        b = (b if self.field == "complex" else b.real).astype(complex if self.field == "complex" else float)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        err = self.orthonormality_error()
        if err > ORTHONORMAL_TOL:
            raise ValueError(f"basis columns are not orthonormal (max Gram error {err:.2e})")

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_spanning(cls, vectors, field: Field = "real") -> "Subspace":
        """Orthonormalize the columns of ``vectors`` (assumed independent)."""
        v = np.asarray(vectors, dtype=complex if field == "complex" else float)
        if v.shape[1] == 0:
            return cls(np.zeros((v.shape[0], 0)), field)
        q, _ = np.linalg.qr(v)
        return cls(q, field)

    def orthonormality_error(self) -> float:
        if self.k == 0:
            return 0.0
        g = self.basis.conj().T @ self.basis
        return float(np.max(np.abs(g - np.eye(self.k))))

    def rotated(self, u: np.ndarray) -> "Subspace":
        """Image of the subspace under the unitary ``u``."""
        field = "complex" if self.field == "complex" or np.iscomplexobj(u) else "real"
        return Subspace(np.asarray(u) @ self.basis, field)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "field": self.field, "basis": _matrix_to_json(self.basis)}

    @classmethod
    def from_dict(cls, d: dict) -> "Subspace":
        basis = _matrix_from_json(d["basis"], d["n"], d["k"], d["field"])
        return cls(basis, d["field"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Subspace":
        return cls.from_dict(json.loads(text))


def _matrix_to_json(a: np.ndarray) -> list:
    if np.iscomplexobj(a):
        return [[[float(z.real), float(z.imag)] for z in row] for row in a]
    return [[float(x) for x in row] for row in a]


def _matrix_from_json(rows, n: int, k: int, field: str) -> np.ndarray:
    if field == "complex":
        out = np.zeros((n, k), dtype=complex)
        for i, row in enumerate(rows):
            for j, (re, im) in enumerate(row):
                out[i, j] = complex(re, im)
        return out
    return np.asarray(rows, dtype=float).reshape(n, k)


def haar_subspace(n: int, k: int, seed: int | np.random.Generator = 0, field: Field = "real") -> Subspace:
    """Haar-distributed random element of the Grassmannian G_{n,k}.

    The span of ``k`` i.i.d. standard Gaussian vectors, orthonormalized by
    Householder QR. ``seed`` may be an integer or an existing generator.
    """
    if n < 1:
        raise ValueError(f"ambient dimension must be positive, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"subspace dimension {k} outside [0, {n}]")
    rng = seed if isinstance(seed, np.random.Generator) else rng_stream(seed)
    if k == 0:
        return Subspace(np.zeros((n, 0)), field)
    g = gaussian_matrix(rng, n, k, field)
    q, _ = np.linalg.qr(g)
    return Subspace(q, field)


def haar_unitary(n: int, seed: int | np.random.Generator = 0, field: Field = "real") -> np.ndarray:
    """Haar orthogonal/unitary matrix (QR of Ginibre with phase correction)."""
    rng = seed if isinstance(seed, np.random.Generator) else rng_stream(seed)
    q, r = np.linalg.qr(gaussian_matrix(rng, n, n, field))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def projector(E: Subspace) -> np.ndarray:
    """Orthogonal projection onto ``E`` as a dense ``n x n`` matrix."""
    b = E.basis
    return b @ b.conj().T


@dataclass(frozen=True, eq=False)
class PrincipalAngleSpectrum:
    """Principal angles (radians, nondecreasing) between two subspaces."""

    angles: np.ndarray
    n: int
    k: int
    l: int
    tol_zero: float = DEFAULT_TOL_ZERO

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)
        if a.shape != (min(self.k, self.l),):
            raise ValueError("expected min(k, l) angles")

    @property
    def dim_intersection(self) -> int:
        return int(np.count_nonzero(self.angles <= self.tol_zero))

    @property
    def nonzero_angles(self) -> np.ndarray:
        return self.angles[self.angles > self.tol_zero]

    @property
    def cosines(self) -> np.ndarray:
        return np.cos(self.angles)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "l": self.l,
            "tol_zero": self.tol_zero,
            "dim_intersection": self.dim_intersection,
            "angles": [float(t) for t in self.angles],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PrincipalAngleSpectrum":
        return cls(np.asarray(d["angles"], dtype=float), d["n"], d["k"], d["l"], d["tol_zero"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PrincipalAngleSpectrum":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class PrincipalVectorPair:
    """Bases ``e`` of E and ``f`` of F with ``<e_i, f_j> = delta_ij cos(theta_i)``."""

    e_basis: np.ndarray
    f_basis: np.ndarray
    angles: PrincipalAngleSpectrum

    def gram(self) -> np.ndarray:
        return self.e_basis.conj().T @ self.f_basis


def _check_pair(E: Subspace, F: Subspace) -> None:
    if E.n != F.n:
        raise ValueError(f"ambient dimensions differ: {E.n} != {F.n}")
    if E.field != F.field:
        raise ValueError(f"fields differ: {E.field} != {F.field}")


def _angles_from_svd(E: Subspace, F: Subspace, s: np.ndarray) -> np.ndarray:
    cos = np.clip(s, 0.0, 1.0)
    theta = np.arccos(cos)
    small = cos**2 >= 0.5
    if np.any(small):
        # sines are the singular values of (I - P_E) B_F, taken on the smaller side
        a, b = (E.basis, F.basis) if F.k <= E.k else (F.basis, E.basis)
        resid = b - a @ (a.conj().T @ b)
        resid -= a @ (a.conj().T @ resid)
        sines = np.clip(np.linalg.svd(resid, compute_uv=False)[::-1], 0.0, 1.0)
        theta = np.where(small, np.arcsin(sines), theta)
    # cosines come out descending, so angles are ascending up to roundoff at the switch
    return np.maximum.accumulate(np.clip(theta, 0.0, np.pi / 2))


def principal_angles(E: Subspace, F: Subspace, tol_zero: float = DEFAULT_TOL_ZERO) -> PrincipalAngleSpectrum:
    """Principal angles between ``E`` and ``F``.

    Cosines are the singular values of ``B_E^H B_F``; angles at or below
    45 degrees are taken instead from the sines, the singular values of
    ``(I - P_E) B_F``, which keeps tiny angles accurate to roundoff.

    Parameters
    ----------
    E, F : Subspace
        Subspaces of the same ambient space over the same field.
    tol_zero : float
        Angles ``<= tol_zero`` count towards ``dim(E & F)``.

    Returns
    -------
    PrincipalAngleSpectrum
        ``min(k, l)`` angles in ``[0, pi/2]``, nondecreasing. Empty when
        either subspace is zero-dimensional.
    """
    _check_pair(E, F)
    r = min(E.k, F.k)
    if r == 0:
        return PrincipalAngleSpectrum(np.zeros(0), E.n, E.k, F.k, tol_zero)
    s = np.linalg.svd(E.basis.conj().T @ F.basis, compute_uv=False)
    theta = _angles_from_svd(E, F, s)
    return PrincipalAngleSpectrum(theta, E.n, E.k, F.k, tol_zero)


def principal_vectors(E: Subspace, F: Subspace, tol_zero: float = DEFAULT_TOL_ZERO) -> PrincipalVectorPair:
    """Principal vectors of the pair, ordered by nondecreasing angle.

    Returns full orthonormal bases of ``E`` (``k`` columns) and ``F``
    (``l`` columns); the first ``min(k, l)`` columns pair up.
    """
    _check_pair(E, F)
    k, l = E.k, F.k
    if min(k, l) == 0:
        spec = PrincipalAngleSpectrum(np.zeros(0), E.n, k, l, tol_zero)
        return PrincipalVectorPair(E.basis.copy(), F.basis.copy(), spec)
    u, s, vh = np.linalg.svd(E.basis.conj().T @ F.basis, full_matrices=True)
    theta = _angles_from_svd(E, F, s)
    spec = PrincipalAngleSpectrum(theta, E.n, k, l, tol_zero)
    return PrincipalVectorPair(E.basis @ u, F.basis @ vh.conj().T, spec)


def generic_dims(n: int, k: int, l: int) -> tuple[int, int, int]:
    """Almost-sure ``(dim(E+F), dim(E&F), #nonzero angles)`` for independent Haar E, F."""
    if not (0 <= k <= n and 0 <= l <= n):
        raise ValueError("need 0 <= k, l <= n")
    return min(k + l, n), max(k + l - n, 0), min(k, l, n - k, n - l)


def planted_pair(
    n: int,
    angles,
    extra_e: int = 0,
    extra_f: int = 0,
    seed: int | np.random.Generator | None = 0,
    field: Field = "real",
) -> tuple[Subspace, Subspace]:
    """Pair of subspaces whose principal angles are exactly ``angles``.

    Builds ``e_i`` and ``f_i = cos(t_i) e_i + sin(t_i) g_i`` on orthonormal
    ``(e_i, g_i)`` columns, pads E with ``extra_e`` and F with ``extra_f``
    further orthonormal directions, then rotates everything by a random
    unitary (``seed=None`` skips the rotation). Extra directions are
    orthogonal to both planes, so they add right angles when both pads are
    nonzero; with one pad empty the angle list is unchanged.
    """
    t = np.asarray(angles, dtype=float)
    r = t.shape[0]
    if 2 * r + extra_e + extra_f > n:
        raise ValueError("not enough room in the ambient space")
    dtype = complex if field == "complex" else float
    eye = np.eye(n, dtype=dtype)
    e = eye[:, :r]
    g = eye[:, r : 2 * r]
    f = e * np.cos(t) + g * np.sin(t)
    pe = eye[:, 2 * r : 2 * r + extra_e]
    pf = eye[:, 2 * r + extra_e : 2 * r + extra_e + extra_f]
    be = np.hstack([e, pe])
    bf = np.hstack([f, pf])
    if seed is not None:
        u = haar_unitary(n, seed, field)
        be, bf = u @ be, u @ bf
    return Subspace(be, field), Subspace(bf, field)
