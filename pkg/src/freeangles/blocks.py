"""Exact spectra of polynomials in two projections from principal angles.

``P_E`` and ``P_F`` are jointly block diagonal: one-dimensional blocks on
which ``(P, Q)`` act as ``(1, 1)``, ``(1, 0)``, ``(0, 1)`` or ``(0, 0)``, and
one 2x2 block per nonzero principal angle. The spectrum of any self-adjoint
``pi(P_E, P_F)`` is read off blockwise.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .ncpoly import NCPolynomial, evaluate, angle_block_projections
from .subspace import PrincipalAngleSpectrum

MERGE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Block multiplicities of the pair ``(P_E, P_F)``."""

    n: int
    k: int
    l: int
    m: int
    nonzero_angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.nonzero_angles, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "nonzero_angles", a)
        counts = (self.count_10, self.count_01, self.count_00, self.m)
        if min(counts) < 0:
            raise ValueError(
                f"inconsistent block counts for n={self.n}, k={self.k}, l={self.l}, "
                f"m={self.m}, {self.r} nonzero angles"
            )

    @property
    def r(self) -> int:
        return self.nonzero_angles.shape[0]

    @property
    def count_11(self) -> int:
        return self.m

    @property
    def count_10(self) -> int:
        return self.k - self.m - self.r

    @property
    def count_01(self) -> int:
        return self.l - self.m - self.r

    @property
    def count_00(self) -> int:
        return self.n - self.k - self.l + self.m


def block_structure(n: int, k: int, l: int, angles: PrincipalAngleSpectrum) -> BlockDecomposition:
    """Block multiplicities; angles ``<= angles.tol_zero`` count as intersection."""
    if (angles.n, angles.k, angles.l) != (n, k, l):
        raise ValueError("angle spectrum does not come from subspaces of these dimensions")
    return BlockDecomposition(n, k, l, angles.dim_intersection, angles.nonzero_angles)


def blocks_from_angles(n: int, k: int, l: int, nonzero_angles, m: int) -> BlockDecomposition:
    return BlockDecomposition(n, k, l, m, np.asarray(nonzero_angles, dtype=float))


@dataclass(frozen=True, eq=False)
class SpectrumWithMultiplicity:
    """Distinct eigenvalues (increasing) with their multiplicities."""

    eigenvalues: np.ndarray
    multiplicities: np.ndarray

    @classmethod
    def from_values(cls, values, tol: float = MERGE_TOL) -> "SpectrumWithMultiplicity":
        """Merge sorted values lying within ``tol`` of the first of their run."""
        v = np.sort(np.asarray(values, dtype=float))
        if v.size == 0:
            return cls(np.zeros(0), np.zeros(0, dtype=int))
        starts = [0]
        for i in range(1, v.size):
            if v[i] - v[starts[-1]] > tol:
                starts.append(i)
        bounds = starts + [v.size]
        eig = np.array([v[a:b].mean() for a, b in zip(bounds[:-1], bounds[1:])])
        mult = np.diff(bounds)
        return cls(eig, mult)

    @classmethod
    def from_pairs(cls, pairs, tol: float = MERGE_TOL) -> "SpectrumWithMultiplicity":
        vals = [np.full(int(mult), float(lam)) for lam, mult in pairs if mult > 0]
        return cls.from_values(np.concatenate(vals) if vals else [], tol)

    @property
    def size(self) -> int:
        return int(self.multiplicities.sum())

    def values(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, sorted."""
        return np.repeat(self.eigenvalues, self.multiplicities)

    def multiplicity_of(self, lam: float, tol: float = 1e-9) -> int:
        hit = np.abs(self.eigenvalues - lam) <= tol
        return int(self.multiplicities[hit].sum())

    def to_json(self) -> str:
        return json.dumps([[float(e), int(m)] for e, m in zip(self.eigenvalues, self.multiplicities)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eigenvalue", "multiplicity"])
        for e, m in zip(self.eigenvalues, self.multiplicities):
            w.writerow([repr(float(e)), int(m)])
        return buf.getvalue()


def _hermitian_2x2_eigs(blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = blocks[..., 0, 0].real
    d = blocks[..., 1, 1].real
    b = blocks[..., 0, 1]
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), np.abs(b))
    return mean - rad, mean + rad


def block_eigenvalues(poly: NCPolynomial, theta) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper eigenvalue of ``poly`` on each 2x2 angle block."""
    p, q = angle_block_projections(theta)
    return _hermitian_2x2_eigs(evaluate(poly, p, q))


def exact_spectrum(poly: NCPolynomial, blocks: BlockDecomposition) -> SpectrumWithMultiplicity:
    """Spectrum of ``poly(P_E, P_F)`` with multiplicities, from the blocks alone."""
    if not poly.is_self_adjoint(tol=1e-14):
        raise ValueError(f"polynomial {poly} is not self-adjoint")
    pairs = [
        (poly.scalar_value(1, 1).real, blocks.count_11),
        (poly.scalar_value(1, 0).real, blocks.count_10),
        (poly.scalar_value(0, 1).real, blocks.count_01),
        (poly.scalar_value(0, 0).real, blocks.count_00),
    ]
    parts = [np.full(mult, lam) for lam, mult in pairs if mult > 0]
    if blocks.r:
        lo, hi = block_eigenvalues(poly, blocks.nonzero_angles)
        parts += [lo, hi]
    vals = np.concatenate(parts) if parts else np.zeros(0)
    return SpectrumWithMultiplicity.from_values(vals)


# Closed forms for the four basic polynomials. None of them needs k <= l:
# the (1,0) and (0,1) block classes enter symmetrically.


def spectrum_pqp(blocks: BlockDecomposition) -> SpectrumWithMultiplicity:
    """Spectrum of ``PQP`` (equal to that of ``QPQ``).

    ``{0 x (n - min(k, l))} + {cos^2 t_i} + {1 x m}``.
    """
    c = np.cos(blocks.nonzero_angles)
    zeros = blocks.n - min(blocks.k, blocks.l)
    return SpectrumWithMultiplicity.from_values(
        np.concatenate([np.zeros(zeros), c * c, np.ones(blocks.m)])
    )


def spectrum_sum(blocks: BlockDecomposition) -> SpectrumWithMultiplicity:
    """Spectrum of ``P + Q``; the eigenvalue 1 has multiplicity ``|l - k|``."""
    c = np.cos(blocks.nonzero_angles)
    return SpectrumWithMultiplicity.from_values(
        np.concatenate(
            [
                np.zeros(blocks.count_00),
                1 - c,
                np.ones(abs(blocks.l - blocks.k)),
                1 + c,
                np.full(blocks.m, 2.0),
            ]
        )
    )


def spectrum_commutator(blocks: BlockDecomposition) -> SpectrumWithMultiplicity:
    """Spectrum of ``i(PQ - QP)``, symmetric about zero."""
    t = blocks.nonzero_angles
    cs = np.cos(t) * np.sin(t)
    return SpectrumWithMultiplicity.from_values(np.concatenate([-cs, np.zeros(blocks.n - 2 * blocks.r), cs]))


def spectrum_anticommutator(blocks: BlockDecomposition) -> SpectrumWithMultiplicity:
    """Spectrum of ``PQ + QP``; zero has multiplicity ``n - m - 2r``."""
    c = np.cos(blocks.nonzero_angles)
    return SpectrumWithMultiplicity.from_values(
        np.concatenate(
            [c * c - c, np.zeros(blocks.n - blocks.m - 2 * blocks.r), c * c + c, np.full(blocks.m, 2.0)]
        )
    )


def rho_plus_minus(c):
    """Eigenvalues ``(rho_-, rho_+)`` of ``A + BAB`` for rank-one A, B with ``cos^2 = c``."""
    c = np.asarray(c, dtype=float)
    root = np.sqrt(5 * c * c - 2 * c + 1)
    hi = 0.5 * (1 + c + root)
    # product of the roots is c(1 - c); avoids cancellation in the small root
    lo = c * (1 - c) / hi
    return lo, hi


def eigs_p_plus_qpq(theta) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalue pair of ``p + qpq`` on the angle-``theta`` block."""
    t = np.asarray(theta, dtype=float)
    if np.any((t < 0) | (t > np.pi / 2)):
        raise ValueError("angles must lie in [0, pi/2]")
    return rho_plus_minus(np.cos(t) ** 2)
