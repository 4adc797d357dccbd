"""Limit laws of polynomials in two free projections.

A :class:`SpectralLaw` is a finite list of atoms plus absolutely continuous
pieces, each piece carrying a closed-form density on a compact interval.
Densities may blow up at the interval ends (algebraically, as strongly as
``|x - a|^(-3/4)`` for ``p + qpq``), so every piece is integrated in a
variable ``u`` with ``x = a + L sin^2((pi/2) sin^2 u)``: the composed
substitution flattens such endpoint singularities into bounded integrands.
Pieces may supply their density as a function of the offset from either
end, which keeps the integrand accurate closer to the edge than ``x``
itself can be represented.

Constructors follow the free-probability results for free projections with
traces ``alpha`` and ``beta``; the principal-angle law uses the ambient
normalization (total mass ``min(alpha, beta, 1 - alpha, 1 - beta)``).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .subspace import rng_stream

HALF_PI = np.pi / 2
_N_PANELS = 512
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_ATOM_MERGE = 1e-12


# --- substitution helpers ---------------------------------------------------


def _offsets(u, L):
    """Left and right offsets ``x - a`` and ``b - x`` at substitution variable ``u``."""
    left = L * np.sin(HALF_PI * np.sin(u) ** 2) ** 2
    right = L * np.sin(HALF_PI * np.cos(u) ** 2) ** 2
    return left, right


def _jacobian(u, L):
    return L * HALF_PI * np.sin(2 * u) * np.sin(np.pi * np.sin(u) ** 2)


def _u_of_x(x, a, b):
    L = b - a
    x = np.clip(np.asarray(x, dtype=float), a, b)
    wl = np.clip((x - a) / L, 0.0, 1.0)
    wr = np.clip((b - x) / L, 0.0, 1.0)
    ul = np.arcsin(np.sqrt(np.arcsin(np.sqrt(wl)) / HALF_PI))
    ur = np.arccos(np.sqrt(np.arcsin(np.sqrt(wr)) / HALF_PI))
    return np.where(wl <= 0.5, ul, ur)


class ACPiece:
    """Absolutely continuous part of a law on ``[a, b]``.

    Parameters
    ----------
    a, b : float
        Support interval, ``a < b``.
    density : callable
        Vectorized density in ``x``; only evaluated strictly inside ``(a, b)``.
    mass : float, optional
        Known total mass. Computed by quadrature when omitted.
    left, right : callable, optional
        Density as a function of ``x - a`` and ``b - x`` respectively.
    kind, params :
        Labels for serialization.
    """

    def __init__(
        self,
        a: float,
        b: float,
        density: Callable,
        mass: float | None = None,
        kind: str = "custom",
        params: dict | None = None,
        left: Callable | None = None,
        right: Callable | None = None,
    ):
        if not b > a:
            raise ValueError(f"empty support interval [{a}, {b}]")
        self.a = float(a)
        self.b = float(b)
        self._density = density
        self._left = left
        self._right = right
        self.kind = kind
        self.params = dict(params or {})
        self._mass = None if mass is None else float(mass)

    def __repr__(self):
        return f"ACPiece({self.kind}, [{self.a:.6g}, {self.b:.6g}], mass={self.mass:.6g})"

    @property
    def mass(self) -> float:
        return self._mass if self._mass is not None else self.quadrature_mass

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x > self.a) & (x < self.b)
        out = np.zeros(x.shape)
        if np.any(inside):
            out[inside] = self._density(x[inside])
        return out

    def _density_at_offsets(self, left, right):
        # choose the accurate representation side by side
        use_left = left <= right
        out = np.empty(np.shape(left))
        if np.any(use_left):
            t = left[use_left]
            out[use_left] = self._left(t) if self._left else self._density(self.a + t)
        if np.any(~use_left):
            s = right[~use_left]
            out[~use_left] = self._right(s) if self._right else self._density(self.b - s)
        return out

    def _integrand(self, u):
        L = self.b - self.a
        left, right = _offsets(u, L)
        return self._density_at_offsets(left, right) * _jacobian(u, L)

    @cached_property
    def _panels(self):
        edges = np.linspace(0.0, HALF_PI, _N_PANELS + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = self._integrand(nodes.ravel()).reshape(nodes.shape)
        panel_int = (vals * _GL_W[None, :]).sum(axis=1) * half
        cum = np.concatenate([[0.0], np.cumsum(panel_int)])
        return edges, cum

    @property
    def quadrature_mass(self) -> float:
        """Total mass from the panel table."""
        return float(self._panels[1][-1])

    def adaptive_mass(self) -> float:
        """Total mass by adaptive QUADPACK quadrature (independent check)."""
        val, _ = integrate.quad(lambda u: float(self._integrand(np.array([u]))[0]), 0.0, HALF_PI,
                                epsabs=1e-13, epsrel=1e-12, limit=500)
        return val

    def _partial(self, lo, hi):
        # Gauss-Legendre on [lo, hi] per entry, vectorized
        mid = 0.5 * (hi + lo)
        half = 0.5 * (hi - lo)
        nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = self._integrand(nodes.ravel()).reshape(nodes.shape)
        return (vals * _GL_W[None, :]).sum(axis=1) * half

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        edges, cum = self._panels
        out = np.where(x >= self.b, cum[-1], 0.0)
        inside = (x > self.a) & (x < self.b)
        if np.any(inside):
            u = _u_of_x(x[inside], self.a, self.b)
            j = np.clip(np.searchsorted(edges, u, side="right") - 1, 0, _N_PANELS - 1)
            out[inside] = cum[j] + self._partial(edges[j], u)
        return out[0] if scalar else out

    def quantile(self, m) -> np.ndarray:
        """Inverse of :meth:`cdf` for masses in ``[0, quadrature_mass]``."""
        m = np.atleast_1d(np.asarray(m, dtype=float))
        edges, cum = self._panels
        j = np.clip(np.searchsorted(cum, m, side="right") - 1, 0, _N_PANELS - 1)
        lo = edges[j].copy()
        hi = edges[j + 1].copy()
        target = m - cum[j]
        base = edges[j]
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            below = self._partial(base, mid) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        u = 0.5 * (lo + hi)
        left, right = _offsets(u, self.b - self.a)
        return np.where(left <= right, self.a + left, self.b - right)

    def expect(self, g: Callable) -> float:
        """Integral of ``g(x)`` against the density."""
        edges, _ = self._panels
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        u = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        left, right = _offsets(u, self.b - self.a)
        x = np.where(left <= right, self.a + left, self.b - right)
        w = (np.broadcast_to(half[:, None], (_N_PANELS, _GL_X.size)) * _GL_W[None, :]).ravel()
        return float(np.sum(g(x) * self._integrand(u) * w))

    def scaled(self, c: float) -> "ACPiece":
        return ScaledPiece(self, c)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "mass": self.mass, "kind": self.kind, "params": self.params}


class ScaledPiece(ACPiece):
    """``c`` times another piece; distribution function and quantiles delegate."""

    def __init__(self, base: ACPiece, c: float):
        if not c > 0:
            raise ValueError("scale factor must be positive")
        self.base = base
        self.c = float(c)
        super().__init__(base.a, base.b, lambda x: self.c * base._density(x), c * base.mass,
                         base.kind, {**base.params, "scale": self.c * base.params.get("scale", 1.0)})

    def _density_at_offsets(self, left, right):
        return self.c * self.base._density_at_offsets(left, right)

    def density(self, x):
        return self.c * self.base.density(x)

    def cdf(self, x):
        return self.c * self.base.cdf(x)

    def quantile(self, m):
        return self.base.quantile(np.asarray(m, dtype=float) / self.c)

    @property
    def quadrature_mass(self) -> float:
        return self.c * self.base.quadrature_mass

    def expect(self, g):
        return self.c * self.base.expect(g)


# --- laws -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralLaw:
    """Atoms plus absolutely continuous pieces; possibly sub-probability."""

    atoms: tuple = ()
    pieces: tuple = ()
    name: str = "custom"
    params: dict | None = None

    def __post_init__(self):
        locs: list[float] = []
        masses: list[float] = []
        for loc, mass in sorted((float(l), float(m)) for l, m in self.atoms):
            if mass < 0:
                raise ValueError("atom masses must be nonnegative")
            if mass == 0:
                continue
            if locs and abs(loc - locs[-1]) <= _ATOM_MERGE:
                masses[-1] += mass
            else:
                locs.append(loc)
                masses.append(mass)
        object.__setattr__(self, "atoms", tuple(zip(locs, masses)))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "params", dict(self.params or {}))

    @property
    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    @property
    def ac_mass(self) -> float:
        return float(sum(p.mass for p in self.pieces))

    @property
    def total_mass(self) -> float:
        return self.atom_mass + self.ac_mass

    def support(self) -> list[tuple[float, float]]:
        """Union of the piece intervals and atom locations, as merged intervals."""
        ivs = sorted([(p.a, p.b) for p in self.pieces] + [(l, l) for l, _ in self.atoms])
        out: list[list[float]] = []
        for a, b in ivs:
            if out and a <= out[-1][1] + 1e-12:
                out[-1][1] = max(out[-1][1], b)
            else:
                out.append([a, b])
        return [tuple(iv) for iv in out]

    @property
    def bounds(self) -> tuple[float, float]:
        sup = self.support()
        if not sup:
            raise ValueError("law has empty support")
        return sup[0][0], sup[-1][1]

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for p in self.pieces:
            out = out + p.density(x)
        return out

    def cdf(self, x) -> np.ndarray:
        """Right-continuous, unnormalized distribution function."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for loc, mass in self.atoms:
            out = out + mass * (x >= loc)
        for p in self.pieces:
            out = out + p.cdf(x)
        return out

    def atom_mass_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for loc, mass in self.atoms:
            out = out + mass * (np.abs(x - loc) <= _ATOM_MERGE)
        return out

    def cdf_left(self, x) -> np.ndarray:
        """Left limit of :meth:`cdf`."""
        return self.cdf(x) - self.atom_mass_at(x)

    def moment(self, k: int) -> float:
        if k < 0:
            raise ValueError("moment order must be nonnegative")
        val = sum(m * l**k for l, m in self.atoms)
        val += sum(p.expect(lambda x: x**k) for p in self.pieces)
        return float(val)

    def mean(self) -> float:
        return self.moment(1)

    def sample(self, count: int, seed: int | np.random.Generator = 0) -> np.ndarray:
        """i.i.d. draws from the normalized law (inverse CDF per component)."""
        total = self.total_mass
        if not total > 0:
            raise ValueError("cannot sample from a zero-mass law")
        rng = seed if isinstance(seed, np.random.Generator) else rng_stream(seed)
        weights = np.array([m for _, m in self.atoms] + [p.mass for p in self.pieces])
        comp = rng.choice(weights.size, size=count, p=weights / weights.sum())
        levels = rng.random(count)
        out = np.empty(count)
        na = len(self.atoms)
        for i, (loc, _) in enumerate(self.atoms):
            out[comp == i] = loc
        for i, p in enumerate(self.pieces):
            sel = comp == na + i
            if np.any(sel):
                out[sel] = p.quantile(levels[sel] * p.quadrature_mass)
        return out

    def scaled(self, c: float) -> "SpectralLaw":
        return SpectralLaw(
            tuple((l, c * m) for l, m in self.atoms),
            tuple(p.scaled(c) for p in self.pieces),
            self.name,
            {**self.params, "scale": c * self.params.get("scale", 1.0)},
        )

    def normalized(self) -> "SpectralLaw":
        return self.scaled(1.0 / self.total_mass)

    def ac_part(self) -> "SpectralLaw":
        return SpectralLaw((), self.pieces, self.name + "_ac", self.params)

    def __add__(self, other: "SpectralLaw") -> "SpectralLaw":
        return SpectralLaw(self.atoms + other.atoms, self.pieces + other.pieces, "sum")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "total_mass": self.total_mass,
            "atoms": [[l, m] for l, m in self.atoms],
            "pieces": [p.to_dict() for p in self.pieces],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def density_grid(self, points: int = 1001) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(x, density, cdf)`` on ``points`` interior nodes per piece.

        Nodes are uniform in the quadrature variable, so they cluster at the
        piece ends where the density may be singular.
        """
        xs = []
        for p in self.pieces:
            u = np.linspace(0.0, HALF_PI, points + 2)[1:-1]
            left, right = _offsets(u, p.b - p.a)
            xs.append(np.where(left <= right, p.a + left, p.b - right))
        x = np.unique(np.concatenate(xs)) if xs else np.zeros(0)
        return x, self.density(x), self.cdf(x)

    def density_grid_csv(self, points: int = 1001) -> str:
        x, d, F = self.density_grid(points)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "density", "cdf"])
        for row in zip(x, d, F):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def atoms_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["location", "mass"])
        for l, m in self.atoms:
            w.writerow([repr(l), repr(m)])
        return buf.getvalue()


def law_from_dict(d: dict) -> SpectralLaw:
    """Rebuild a named law from :meth:`SpectralLaw.to_dict` output."""
    name = d["name"]
    params = dict(d.get("params") or {})
    scale = params.pop("scale", 1.0)
    if name not in LAWS:
        raise ValueError(f"cannot rebuild law {name!r}")
    law = LAWS[name](**params)
    return law if scale == 1.0 else law.scaled(scale)


# --- Bernoulli parameters and edges ----------------------------------------------


@dataclass(frozen=True)
class BernoulliParams:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @property
    def r(self) -> float:
        """Mass of the principal-angle law, ``min(alpha, beta, 1-alpha, 1-beta)``."""
        a, b = self.alpha, self.beta
        return min(a, b, 1 - a, 1 - b)

    @property
    def degenerate(self) -> bool:
        return self.r <= 0


@dataclass(frozen=True)
class BoxtimesEdges:
    """Support ``[phi_minus, phi_plus]`` of the continuous part of ``B(a) [x] B(b)``.

    ``one_minus_phi_plus`` is stored separately; it is computed as a square and
    so keeps full relative accuracy when ``phi_plus`` is close to 1.
    """

    phi_minus: float
    phi_plus: float
    one_minus_phi_plus: float

    @classmethod
    def of(cls, p: BernoulliParams) -> "BoxtimesEdges":
        a, b = p.alpha, p.beta
        u = np.sqrt(b * (1 - a))
        v = np.sqrt(a * (1 - b))
        w = np.sqrt(a * b)
        z = np.sqrt((1 - a) * (1 - b))
        phm, php, omp = (u - v) ** 2, (u + v) ** 2, (w - z) ** 2
        # both forms of phi_plus are exact in theory; keep the better-conditioned one
        if php > 0.5:
            php = 1 - omp
        else:
            omp = 1 - php
        # degenerate supports (a or b in {0, 1}) collapse to a point; rounding
        # must not invert the interval
        phm = min(phm, php)
        return cls(float(phm), float(php), float(omp))


@dataclass(frozen=True)
class BoxplusEdges:
    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float

    @classmethod
    def of(cls, p: BernoulliParams) -> "BoxplusEdges":
        u = np.sqrt(p.beta * (1 - p.alpha))
        v = np.sqrt(p.alpha * (1 - p.beta))
        return cls(float(1 - u - v), float(1 - u + v), float(1 + u - v), float(1 + u + v))


def boxtimes_edges(alpha: float, beta: float) -> BoxtimesEdges:
    return BoxtimesEdges.of(BernoulliParams(alpha, beta))


def boxplus_edges(alpha: float, beta: float) -> BoxplusEdges:
    return BoxplusEdges.of(BernoulliParams(alpha, beta))


# --- named laws --------------------------------------------------------------------


def _boxtimes_piece(p: BernoulliParams) -> ACPiece:
    e = BoxtimesEdges.of(p)
    phm, php, omp = e.phi_minus, e.phi_plus, e.one_minus_phi_plus
    width = php - phm

    def core(xm, px, x, omx):
        return np.sqrt(np.maximum(px * xm, 0.0)) / (2 * np.pi * x * omx)

    return ACPiece(
        phm,
        php,
        lambda x: core(x - phm, php - x, x, 1 - x),
        mass=p.r,
        kind="boxtimes",
        params={"alpha": p.alpha, "beta": p.beta},
        left=lambda t: core(t, width - t, phm + t, (1 - phm) - t),
        right=lambda s: core(width - s, s, php - s, omp + s),
    )


def boxtimes_bernoulli(alpha: float, beta: float) -> SpectralLaw:
    """Free multiplicative convolution of ``B(alpha)`` and ``B(beta)`` (law of ``pqp``).

    Atoms ``1 - min(alpha, beta)`` at 0 and ``max(alpha + beta - 1, 0)`` at
    1, plus a continuous part of mass ``min(alpha, beta, 1-alpha, 1-beta)``
    on ``[phi_-, phi_+]`` with density
    ``sqrt((phi_+ - x)(x - phi_-)) / (2 pi x (1 - x))``.
    """
    p = BernoulliParams(alpha, beta)
    atoms = ((0.0, 1 - min(alpha, beta)), (1.0, max(alpha + beta - 1, 0.0)))
    pieces = () if p.degenerate else (_boxtimes_piece(p),)
    return SpectralLaw(atoms, pieces, "boxtimes", {"alpha": alpha, "beta": beta})


def angle_law(alpha: float, beta: float) -> SpectralLaw:
    """Limit law of the nonzero principal angles, weight ``1/n`` per angle.

    Density ``sqrt((phi_+ - cos^2 t)(cos^2 t - phi_-)) / (pi sin t cos t)`` on
    ``[arccos sqrt(phi_+), arccos sqrt(phi_-)]``; no atoms.
    """
    p = BernoulliParams(alpha, beta)
    params = {"alpha": alpha, "beta": beta}
    if p.degenerate:
        return SpectralLaw((), (), "angles", params)
    e = BoxtimesEdges.of(p)
    lo = float(np.arcsin(np.sqrt(e.one_minus_phi_plus)))
    hi = float(np.arccos(np.sqrt(e.phi_minus)))

    # cos^2 t - cos^2 hi = sin(hi - t) sin(hi + t), and likewise at lo
    def core(t, dlo, dhi):
        num = np.sin(dlo) * np.sin(t + lo) * np.sin(dhi) * np.sin(hi + t)
        return np.sqrt(np.maximum(num, 0.0)) / (np.pi * np.sin(t) * np.cos(t))

    piece = ACPiece(
        lo,
        hi,
        lambda t: core(t, t - lo, hi - t),
        mass=p.r,
        kind="angles",
        params=params,
        left=lambda d: core(lo + d, d, (hi - lo) - d),
        right=lambda d: core(hi - d, (hi - lo) - d, d),
    )
    return SpectralLaw((), (piece,), "angles", params)


def _boxplus_pieces(p: BernoulliParams) -> tuple[ACPiece, ACPiece]:
    e = BoxtimesEdges.of(p)
    sp, sm = np.sqrt(e.phi_plus), np.sqrt(e.phi_minus)
    width = sp - sm
    one_minus_sp = e.one_minus_phi_plus / (1 + sp)
    params = {"alpha": p.alpha, "beta": p.beta}

    # density of nu in terms of y = |t - 1| with dp = sqrt(phi+) - y, dm = y - sqrt(phi-)
    def core(y, dp, dm):
        num = dp * (sp + y) * dm * (y + sm)
        ratio = np.sqrt(np.maximum(num, 0.0)) / y
        return ratio / (np.pi * (one_minus_sp + dp) * (1 + y))

    lower = ACPiece(
        1 - sp,
        1 - sm,
        lambda t: core(1 - t, sp - (1 - t), (1 - t) - sm),
        mass=p.r,
        kind="boxplus",
        params=params,
        left=lambda d: core(sp - d, d, width - d),
        right=lambda d: core(sm + d, width - d, d),
    )
    upper = ACPiece(
        1 + sm,
        1 + sp,
        lambda t: core(t - 1, sp - (t - 1), (t - 1) - sm),
        mass=p.r,
        kind="boxplus",
        params=params,
        left=lambda d: core(sm + d, width - d, d),
        right=lambda d: core(sp - d, d, width - d),
    )
    return lower, upper


def boxplus_bernoulli(alpha: float, beta: float) -> SpectralLaw:
    """Free additive convolution of ``B(alpha)`` and ``B(beta)`` (law of ``p + q``).

    Atoms at 0, 1, 2 and a continuous part of mass ``2 min(alpha, beta,
    1-alpha, 1-beta)`` on ``[g1, min(g2, g3)] u [max(g2, g3), g4]``.
    """
    p = BernoulliParams(alpha, beta)
    atoms = (
        (0.0, max(1 - alpha - beta, 0.0)),
        (1.0, abs(alpha - beta)),
        (2.0, max(alpha + beta - 1, 0.0)),
    )
    pieces = () if p.degenerate else _boxplus_pieces(p)
    return SpectralLaw(atoms, pieces, "boxplus", {"alpha": alpha, "beta": beta})


def arcsine_law(a: float, b: float, mass: float = 1.0) -> SpectralLaw:
    """Arcsine law on ``[a, b]`` scaled to ``mass``."""
    L = b - a

    def core(t, s):
        return mass / (np.pi * np.sqrt(t * s))

    piece = ACPiece(
        a, b, lambda x: core(x - a, b - x), mass, "arcsine", {"a": a, "b": b, "mass": mass},
        left=lambda t: core(t, L - t), right=lambda s: core(L - s, s),
    )
    return SpectralLaw((), (piece,), "arcsine", {"a": a, "b": b, "mass": mass})


def arcsine_cdf(x, a: float, b: float, mass: float = 1.0) -> np.ndarray:
    w = np.clip((np.asarray(x, dtype=float) - a) / (b - a), 0.0, 1.0)
    return mass * (2 / np.pi) * np.arcsin(np.sqrt(w))


def uniform_law(a: float, b: float, mass: float = 1.0) -> SpectralLaw:
    h = mass / (b - a)
    piece = ACPiece(a, b, lambda x: np.full(np.shape(x), h), mass, "uniform", {"a": a, "b": b, "mass": mass})
    return SpectralLaw((), (piece,), "uniform", {"a": a, "b": b, "mass": mass})


def uniform_angle_law() -> SpectralLaw:
    """Uniform probability law on ``[0, pi/2]``: principal angles of half-dimensional
    subspaces, normalized by the subspace dimension."""
    return uniform_law(0.0, HALF_PI)


# --- pushforward ---------------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    """A strictly monotone map on ``[lo, hi]`` with its inverse.

    ``inverse`` and ``inverse_derivative`` act on image points. ``edges``
    optionally maps ``"lo"``/``"hi"`` to a function ``t -> (d, dx/dy)`` for
    the image point ``t`` above the lower (below the upper) end of the branch
    image, where ``d >= 0`` is the distance of the preimage from the domain
    end mapped there. Supply it where the image or preimage point cannot be
    represented accurately near that end, such as at a fold of the map.
    """

    lo: float
    hi: float
    fn: Callable
    inverse: Callable
    inverse_derivative: Callable
    edges: dict | None = None

    def contains(self, x, tol: float = 1e-12):
        return (x >= self.lo - tol) & (x <= self.hi + tol)

    def image(self) -> tuple[float, float]:
        y = self.fn(np.array([self.lo, self.hi]))
        return float(min(y)), float(max(y))

    def direction(self) -> int:
        xs = np.linspace(self.lo, self.hi, 65)
        d = np.diff(self.fn(xs))
        if np.all(d > 0):
            return 1
        if np.all(d < 0):
            return -1
        raise ValueError(f"branch map is not strictly monotone on [{self.lo}, {self.hi}]")


def _finite(v):
    return np.where(np.isfinite(v), v, 0.0)


class PushforwardPiece(ACPiece):
    """Image of ``source`` restricted to ``[x_lo, x_hi]`` under a monotone branch.

    The distribution function, quantiles, mass and moments are computed
    through the source; the density follows from the chain rule. The density
    is reported as zero at image points within rounding of a fold, where the
    inverse derivative is not representable.
    """

    def __init__(self, source: ACPiece, x_lo: float, x_hi: float, branch: Branch, direction: int):
        self.source = source
        self.x_lo = x_lo
        self.x_hi = x_hi
        self.branch = branch
        self.direction = direction
        y0, y1 = float(branch.fn(np.array([x_lo]))[0]), float(branch.fn(np.array([x_hi]))[0])
        a, b = (y0, y1) if direction > 0 else (y1, y0)
        self._src_lo = float(source.cdf(x_lo))
        self._src_hi = float(source.cdf(x_hi))

        def dens(y):
            with np.errstate(divide="ignore", invalid="ignore"):
                return _finite(source.density(branch.inverse(y)) * np.abs(branch.inverse_derivative(y)))

        L_src = source.b - source.a

        def edge(fn, end):
            # end: domain point mapped to this image end
            step = 1.0 if end == branch.lo else -1.0

            def f(t):
                with np.errstate(divide="ignore", invalid="ignore"):
                    d, dx = fn(t)
                    d = np.asarray(d, dtype=float)
                    if end == source.a:
                        rho = source._density_at_offsets(d, L_src - d)
                    elif end == source.b:
                        rho = source._density_at_offsets(L_src - d, d)
                    else:
                        rho = source.density(end + step * d)
                    return _finite(rho * np.abs(dx))
            return f

        img_lo, img_hi = branch.image()
        end_lo, end_hi = (branch.lo, branch.hi) if direction > 0 else (branch.hi, branch.lo)
        edges = branch.edges or {}
        left = edge(edges["lo"], end_lo) if "lo" in edges and abs(a - img_lo) <= 1e-15 else None
        right = edge(edges["hi"], end_hi) if "hi" in edges and abs(b - img_hi) <= 1e-15 else None
        super().__init__(
            a, b, dens, mass=self._src_hi - self._src_lo, kind="pushforward",
            params={"source": source.kind, **source.params}, left=left, right=right,
        )

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        out = np.where(y >= self.b, self.mass, 0.0)
        inside = (y > self.a) & (y < self.b)
        if np.any(inside):
            x = np.clip(self.branch.inverse(y[inside]), self.x_lo, self.x_hi)
            Fx = self.source.cdf(x)
            out[inside] = Fx - self._src_lo if self.direction > 0 else self._src_hi - Fx
        out = np.clip(out, 0.0, self.mass)
        return out[0] if scalar else out

    def quantile(self, m):
        m = np.atleast_1d(np.asarray(m, dtype=float))
        src_m = self._src_lo + m if self.direction > 0 else self._src_hi - m
        x = np.clip(self.source.quantile(src_m), self.x_lo, self.x_hi)
        return self.branch.fn(x)

    @property
    def quadrature_mass(self) -> float:
        # sampling draws from mass in [0, self.mass] through the source
        return self.mass

    def table_mass(self) -> float:
        """Mass of the chain-rule density by panel quadrature."""
        return ACPiece.quadrature_mass.fget(self)

    @cached_property
    def _restricted_source(self) -> ACPiece:
        src = self.source
        left = src._left if self.x_lo == src.a else None
        right = src._right if self.x_hi == src.b else None
        if left is None and self.x_lo == src.a:
            left = lambda t: src._density(src.a + t)  # noqa: E731
        return ACPiece(self.x_lo, self.x_hi, src._density, kind=src.kind, left=left, right=right)

    def expect(self, g: Callable) -> float:
        return self._restricted_source.expect(lambda x: g(self.branch.fn(x)))


def _check_coverage(law: SpectralLaw, branches: Sequence[Branch]) -> None:
    ivs = sorted((br.lo, br.hi) for br in branches)
    for p in law.pieces:
        reach = p.a
        for lo, hi in ivs:
            if lo <= reach + 1e-12:
                reach = max(reach, hi)
        if reach < p.b - 1e-12:
            raise ValueError(f"branches leave a gap in [{p.a}, {p.b}] near {reach}")
    for loc, _ in law.atoms:
        if not any(br.contains(loc) for br in branches):
            raise ValueError(f"atom at {loc} is not covered by any branch")


def pushforward(law: SpectralLaw, branches: Sequence[Branch], name: str = "pushforward") -> SpectralLaw:
    """Image of ``law`` under a piecewise strictly monotone map.

    Each branch is one monotone piece of the map. Atoms move to their images
    (using the first branch containing them); every continuous piece splits
    along the branch intervals, and each part becomes a
    :class:`PushforwardPiece`. Total mass is preserved.
    """
    if not branches:
        raise ValueError("need at least one branch")
    directions = [br.direction() for br in branches]
    _check_coverage(law, branches)
    atoms = []
    for loc, mass in law.atoms:
        br = next(b for b in branches if b.contains(loc))
        atoms.append((float(br.fn(np.array([loc]))[0]), mass))
    pieces = []
    for p in law.pieces:
        for br, d in zip(branches, directions):
            lo, hi = max(p.a, br.lo), min(p.b, br.hi)
            if hi - lo > 1e-15:
                pieces.append(PushforwardPiece(p, lo, hi, br, d))
    return SpectralLaw(tuple(atoms), tuple(pieces), name)


def identity_branch(lo: float, hi: float) -> Branch:
    return Branch(lo, hi, lambda x: np.asarray(x, dtype=float), lambda y: np.asarray(y, dtype=float),
                  lambda y: np.ones(np.shape(y)))


# commutator: x -> +-sqrt(x(1 - x)) on [0, 1/2] and [1/2, 1]


def _chi_branches(sign: int) -> list[Branch]:
    def fn(x):
        x = np.asarray(x, dtype=float)
        return sign * np.sqrt(np.maximum(x * (1 - x), 0.0))

    def root(y):
        return np.sqrt(np.maximum((1 - 2 * np.abs(y)) * (1 + 2 * np.abs(y)), 0.0))

    def inv_lo(y):
        return 2 * y * y / (1 + root(y))

    def dinv(y):
        return 2 * y / root(y)

    # the fold |y| = 1/2 maps to x = 1/2; y = 0 maps to x = 0 or 1
    fold, zero = ("hi", "lo") if sign > 0 else ("lo", "hi")

    def near_fold(t):
        y = sign * (0.5 - t)
        rt = 2 * np.sqrt(t * (1 - t))
        return 0.5 * rt, 2 * y / rt

    def near_zero(t):
        return inv_lo(t), 2 * t / root(t)

    edges = {fold: near_fold, zero: near_zero}
    return [
        Branch(0.0, 0.5, fn, inv_lo, dinv, edges=edges),
        Branch(0.5, 1.0, fn, lambda y: 1 - inv_lo(y), lambda y: -dinv(y), edges=edges),
    ]


def commutator_law(alpha: float, beta: float) -> SpectralLaw:
    """Law of ``i(pq - qp)``.

    An atom ``max(|2 alpha - 1|, |2 beta - 1|)`` at zero plus the images of
    the continuous part of ``B(alpha) [x] B(beta)`` under
    ``x -> +-sqrt(x (1 - x))``.
    """
    p = BernoulliParams(alpha, beta)
    params = {"alpha": alpha, "beta": beta}
    atom = SpectralLaw(((0.0, max(abs(2 * alpha - 1), abs(2 * beta - 1))),))
    if p.degenerate:
        return SpectralLaw(((0.0, 1.0),), (), "commutator", params)
    mu = SpectralLaw((), (_boxtimes_piece(p),))
    law = atom + pushforward(mu, _chi_branches(+1)) + pushforward(mu, _chi_branches(-1))
    return SpectralLaw(law.atoms, law.pieces, "commutator", params)


# anticommutator: t -> t^2 - t, decreasing on [0, 1/2], increasing on [1/2, 2]


def _quadratic_branches() -> list[Branch]:
    def fn(t):
        t = np.asarray(t, dtype=float)
        return t * t - t

    def root(x):
        return np.sqrt(np.maximum(1 + 4 * np.asarray(x, dtype=float), 0.0))

    def near_fold(s):
        # x = -1/4 + s maps back to t = 1/2 -+ sqrt(s)
        rt = 2 * np.sqrt(s)
        return 0.5 * rt, 1 / rt

    def near_zero(s):
        # x = -s, t = s (1 + O(s))
        return 2 * s / (1 + np.sqrt(1 - 4 * s)), 1 / np.sqrt(1 - 4 * s)

    def near_two(s):
        # x = 2 - s, t = 2 - (3 - sqrt(9 - 4 s)) / 2
        r = np.sqrt(9 - 4 * s)
        return 2 * s / (3 + r), 1 / r

    return [
        Branch(0.0, 0.5, fn, lambda x: -2 * x / (1 + root(x)), lambda x: -1 / root(x),
               edges={"lo": near_fold, "hi": near_zero}),
        Branch(0.5, 2.0, fn, lambda x: (1 + root(x)) / 2, lambda x: 1 / root(x),
               edges={"lo": near_fold, "hi": near_two}),
    ]


def anticommutator_law(alpha: float, beta: float) -> SpectralLaw:
    """Law of ``pq + qp`` as the image of ``B(alpha) [+] B(beta)`` under ``t -> t^2 - t``."""
    BernoulliParams(alpha, beta)
    law = pushforward(boxplus_bernoulli(alpha, beta), _quadratic_branches())
    return SpectralLaw(law.atoms, law.pieces, "anticommutator", {"alpha": alpha, "beta": beta})


def anticommutator_density_half(x) -> np.ndarray:
    """Closed-form density of ``pq + qp`` for ``alpha = beta = 1/2``.

    On ``[-1/4, 0]`` both monotone branches of ``t^2 - t`` contribute, on
    ``[0, 2]`` only the increasing one.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    neg = (x > -0.25) & (x < 0)
    pos = (x > 0) & (x < 2)
    out[neg] = _u_neg(x[neg] + 0.25, x[neg])
    out[pos] = _u_pos(x[pos], 2 - x[pos])
    return out


def _u_neg(t, x=None):
    # x = t - 1/4, S = sqrt(1 + 4x) = 2 sqrt(t); pass x directly near x = 0
    x = t - 0.25 if x is None else x
    S = 2 * np.sqrt(t)
    minus = 4 * x * (x - 2) / (1 - 2 * x + S)  # = 1 - 2x - S
    plus = 1 - 2 * x + S
    return np.sqrt(2) / (np.pi * S) * (1 / np.sqrt(minus) + 1 / np.sqrt(plus))


def _u_pos(x, s):
    # s = 2 - x; 1 - 2x + S = 4 x (2 - x) / (S - 1 + 2x)
    S = np.sqrt(1 + 4 * x)
    plus = 4 * x * s / (S - 1 + 2 * x)
    return np.sqrt(2) / (np.pi * S * np.sqrt(plus))


def anticommutator_law_half() -> SpectralLaw:
    """Closed-form law of ``pq + qp`` at ``alpha = beta = 1/2``."""
    neg = ACPiece(
        -0.25, 0.0, lambda x: _u_neg(x + 0.25), 0.5, "anticommutator_half", {},
        left=_u_neg, right=lambda s: _u_neg(0.25 - s, -s),
    )
    pos = ACPiece(
        0.0, 2.0, lambda x: _u_pos(x, 2 - x), 0.5, "anticommutator_half", {},
        left=lambda t: _u_pos(t, 2 - t), right=lambda s: _u_pos(2 - s, s),
    )
    return SpectralLaw((), (neg, pos), "anticommutator_half")


# p + qpq at alpha = beta = 1/2


def _zeta(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.maximum((1 - 5 * x) * (1 - x), 0.0))


def _qpq_low(x, zeta):
    return (
        1
        / (2 * np.pi * zeta * np.sqrt(2 * x))
        * ((3 - 5 * x + zeta) / np.sqrt(3 - 3 * x + zeta) + (3 - 5 * x - zeta) / np.sqrt(3 - 3 * x - zeta))
    )


def _qpq_high(x, zeta, shifted):
    # shifted = 3 - 3x + zeta, passed in where it cancels
    return (5 * x - 3 - zeta) / (2 * np.pi * zeta * np.sqrt(2 * x) * np.sqrt(shifted))


def p_plus_qpq_density(x) -> np.ndarray:
    """Closed-form density of ``p + qpq`` for ``alpha = beta = 1/2``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    lo = (x > 0) & (x < 0.2)
    hi = (x > 1) & (x < 2)
    out[lo] = _qpq_low(x[lo], _zeta(x[lo]))
    z = _zeta(x[hi])
    out[hi] = _qpq_high(x[hi], z, 3 - 3 * x[hi] + z)
    return out


def _qpq_high_left(t):
    x = 1 + t
    z = np.sqrt(t * (4 + 5 * t))
    return _qpq_high(x, z, z - 3 * t)


def _qpq_high_right(s):
    x = 2 - s
    z = np.sqrt((9 - 5 * s) * (1 - s))
    return _qpq_high(x, z, 4 * s * (1 - s) / (z + 3 - 3 * s))


def p_plus_qpq_law() -> SpectralLaw:
    """Closed-form law of ``p + qpq`` for free ``B(1/2)`` projections; support ``[0, 1/5] u [1, 2]``."""
    low = ACPiece(
        0.0, 0.2, lambda x: _qpq_low(x, _zeta(x)), 0.5, "p_plus_qpq", {},
        right=lambda s: _qpq_low(0.2 - s, np.sqrt(5 * s * (0.8 + s))),
    )
    high = ACPiece(
        1.0, 2.0, lambda x: p_plus_qpq_density(x), 0.5, "p_plus_qpq", {},
        left=_qpq_high_left, right=_qpq_high_right,
    )
    return SpectralLaw((), (low, high), "p_plus_qpq")


def _rho_branches() -> tuple[list[Branch], list[Branch]]:
    """Monotone branches of ``rho_+`` and ``rho_-`` as maps of ``c = cos^2``."""

    def zeta(lam):
        return _zeta(lam)

    def rho_plus(c):
        c = np.asarray(c, dtype=float)
        return 0.5 * (1 + c + np.sqrt(5 * c * c - 2 * c + 1))

    def rho_minus(c):
        c = np.asarray(c, dtype=float)
        return c * (1 - c) / rho_plus(c)

    # inverses: c = (1 - lam +- zeta(lam)) / 2, dc/dlam = (-1 +- (5 lam - 3) / zeta) / 2
    def plus_edge(t, side):
        if side == "lo":  # lam = 1 + t, c near 0
            z = np.sqrt(t * (4 + 5 * t))
            return 0.5 * (z - t), 0.5 * (-1 + (2 + 5 * t) / z)
        lam = 2 - t  # c near 1; 1 - c = (1 + lam - z) / 2
        z = np.sqrt((9 - 5 * t) * (1 - t))
        return (4 * t - 2 * t * t) / (3 - t + z), 0.5 * (-1 + (5 * lam - 3) / z)

    up = Branch(
        0.0, 1.0, rho_plus,
        lambda lam: 0.5 * (1 - lam + zeta(lam)),
        lambda lam: 0.5 * (-1 + (5 * lam - 3) / zeta(lam)),
        edges={"lo": lambda t: plus_edge(t, "lo"), "hi": lambda t: plus_edge(t, "hi")},
    )

    def small_root(lam):
        # (1 - lam - zeta) / 2 without cancellation
        z = zeta(lam)
        return 2 * lam * (1 - lam) / (1 - lam + z)

    def near_fold(side_sign):
        # lam = 1/5 - s, zeta = sqrt(5 s (4/5 + s)), c = 2/5 + (s + side_sign * zeta) / 2
        def f(s):
            lam = 0.2 - s
            z = np.sqrt(5 * s * (0.8 + s))
            return 0.5 * (z + side_sign * s), 0.5 * (-1 + side_sign * (5 * lam - 3) / z)
        return f

    def near_zero(side_sign):
        # lam = t; c = small_root(t) or 1 - small_root(t) - t
        def f(t):
            d = small_root(t) + (t if side_sign > 0 else 0.0)
            return d, 0.5 * (-1 + side_sign * (5 * t - 3) / zeta(t))
        return f

    down_lo = Branch(
        0.0, 0.4, rho_minus, small_root,
        lambda lam: 0.5 * (-1 - (5 * lam - 3) / zeta(lam)),
        edges={"lo": near_zero(-1), "hi": near_fold(-1)},
    )
    down_hi = Branch(
        0.4, 1.0, rho_minus,
        lambda lam: 1 - small_root(lam) - lam,
        lambda lam: 0.5 * (-1 + (5 * lam - 3) / zeta(lam)),
        edges={"lo": near_zero(+1), "hi": near_fold(+1)},
    )
    return [up], [down_lo, down_hi]


def p_plus_qpq_pushforward() -> SpectralLaw:
    """Law of ``p + qpq`` at ``alpha = beta = 1/2`` as images of the continuous part
    of ``B(1/2) [x] B(1/2)`` under both eigenvalue branches."""
    mu = boxtimes_bernoulli(0.5, 0.5).ac_part()
    up, down = _rho_branches()
    law = pushforward(mu, up) + pushforward(mu, down)
    return SpectralLaw(law.atoms, law.pieces, "p_plus_qpq_pushforward")


LAWS = {
    "boxtimes": boxtimes_bernoulli,
    "angles": angle_law,
    "boxplus": boxplus_bernoulli,
    "commutator": commutator_law,
    "anticommutator": anticommutator_law,
    "anticommutator_half": anticommutator_law_half,
    "p_plus_qpq": p_plus_qpq_law,
    "p_plus_qpq_pushforward": p_plus_qpq_pushforward,
    "arcsine": arcsine_law,
    "uniform": uniform_law,
}
