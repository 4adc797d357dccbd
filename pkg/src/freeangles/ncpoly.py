"""Polynomials in two noncommuting self-adjoint letters ``p`` and ``q``.

Words are strings over ``"PQ"`` (the empty string is the unit) and
coefficients are complex. Text form::

    p*q*p            pqp
    i*(p*q - q*p)    commutator, self-adjoint
    p + q*p*q
    (p + q)^2 - (p + q)

A coefficient may be a real literal, ``i``, or a literal with an ``i`` suffix
(``2.5i``). Letters are case-insensitive.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

MAX_DEGREE = 64


class NCParseError(ValueError):
    """Syntax error in a polynomial string; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


def _check_word(w: str) -> None:
    if any(c not in "PQ" for c in w):
        raise ValueError(f"words must use letters P and Q only, got {w!r}")


@dataclass(frozen=True, eq=False)
class NCPolynomial:
    """Finite map from ``P``/``Q`` words to nonzero complex coefficients."""

    terms: Mapping[str, complex]

    def __post_init__(self):
        clean = {}
        for w, c in self.terms.items():
            _check_word(w)
            c = complex(c)
            if c != 0:
                clean[w] = clean.get(w, 0) + c
        clean = {w: clean[w] for w in sorted(clean) if clean[w] != 0}
        object.__setattr__(self, "terms", clean)

    # construction helpers
    @classmethod
    def letter(cls, name: str) -> "NCPolynomial":
        return cls({name.upper(): 1})

    @classmethod
    def constant(cls, c: complex) -> "NCPolynomial":
        return cls({"": c})

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return NCPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: dict[str, complex] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return NCPolynomial(out)

    def __rmul__(self, other):
        return _coerce(other) * self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("powers must be nonnegative integers")
        out = NCPolynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self) -> "NCPolynomial":
        """Reverse every word and conjugate every coefficient."""
        return NCPolynomial({w[::-1]: c.conjugate() for w, c in self.terms.items()})

    def is_self_adjoint(self, tol: float = 0.0) -> bool:
        adj = self.adjoint().terms
        if set(adj) != set(self.terms):
            return False
        return all(abs(adj[w] - c) <= tol for w, c in self.terms.items())

    def scalar_value(self, p: float, q: float) -> complex:
        """Value with ``p`` and ``q`` replaced by commuting scalars."""
        return sum((c * p ** w.count("P") * q ** w.count("Q") for w, c in self.terms.items()), 0j)

    def __str__(self):
        return format_ncpoly(self)

    def __repr__(self):
        return f"NCPolynomial({format_ncpoly(self)!r})"

    def to_dict(self) -> dict:
        return {w: [c.real, c.imag] for w, c in self.terms.items()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "NCPolynomial":
        return cls({w: complex(re, im) for w, (re, im) in d.items()})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "NCPolynomial":
        return cls.from_dict(json.loads(text))


def _coerce(x) -> NCPolynomial:
    if isinstance(x, NCPolynomial):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return NCPolynomial.constant(complex(x))
    raise TypeError(f"cannot combine NCPolynomial with {type(x).__name__}")


P = NCPolynomial.letter("P")
Q = NCPolynomial.letter("Q")


def is_self_adjoint(poly: NCPolynomial) -> bool:
    return poly.is_self_adjoint()


# --- printing -----------------------------------------------------------


def _format_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}i"
    sign = "+" if c.imag >= 0 or np.isnan(c.imag) else "-"
    return f"({c.real!r}{sign}{abs(c.imag)!r}i)"


def format_ncpoly(poly: NCPolynomial) -> str:
    """Canonical text form; ``parse_ncpoly`` inverts it exactly."""
    if not poly.terms:
        return "0"
    parts = []
    for w, c in poly.terms.items():
        letters = "*".join(w.lower())
        if not w:
            parts.append(_format_coeff(c))
        elif c == 1:
            parts.append(letters)
        else:
            parts.append(f"{_format_coeff(c)}*{letters}")
    return " + ".join(parts)


# --- parsing ------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i)?
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise NCParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("num") is not None:
            v = float(m.group("num"))
            out.append(("num", 1j * v if m.group("imag") else complex(v), pos))
        elif m.group("name") is not None:
            name = m.group("name")
            if name.lower() not in ("p", "q", "i"):
                raise NCParseError(f"unknown letter {name!r}", pos)
            out.append(("name", name.lower(), pos))
        elif m.group("op") is not None:
            out.append(("op", m.group("op"), pos))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise NCParseError(f"expected {op!r}", pos)

    def expr(self) -> NCPolynomial:
        # expr := ['+'|'-'] term (('+'|'-') term)*
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        out = sign * self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                out = out + t if val == "+" else out - t
            else:
                return out

    def term(self) -> NCPolynomial:
        out = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                out = self._checked(out * self.factor())
            else:
                return out

    def factor(self) -> NCPolynomial:
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or val.imag != 0 or val.real != int(val.real) or val.real < 1:
                raise NCParseError("exponent must be a positive integer", pos)
            k = int(val.real)
            if k * base.degree > MAX_DEGREE:
                raise NCParseError(f"degree exceeds {MAX_DEGREE}", pos)
            base = base**k
        return base

    def atom(self) -> NCPolynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return NCPolynomial.constant(val)
        if kind == "name":
            if val == "i":
                return NCPolynomial.constant(1j)
            return NCPolynomial.letter(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise NCParseError("unexpected end of input", pos)
        raise NCParseError(f"unexpected {val!r}", pos)

    def _checked(self, poly: NCPolynomial) -> NCPolynomial:
        if poly.degree > MAX_DEGREE:
            raise NCParseError(f"degree exceeds {MAX_DEGREE}", self.peek()[2])
        return poly


def parse_ncpoly(text: str) -> NCPolynomial:
    """Parse the text form into a canonical ``NCPolynomial``."""
    parser = _Parser(text)
    poly = parser.expr()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise NCParseError(f"unexpected {val!r}", pos)
    return poly


# --- evaluation ------------------------------------------------------------


def _word_products(words, a: np.ndarray, b: np.ndarray, eye: np.ndarray) -> dict:
    # shared prefixes are multiplied once
    cache = {"": eye}
    for w in sorted(words, key=len):
        for j in range(1, len(w) + 1):
            pre = w[:j]
            if pre not in cache:
                cache[pre] = cache[w[: j - 1]] @ (a if pre[-1] == "P" else b)
    return cache


def evaluate(poly: NCPolynomial, a, b) -> np.ndarray:
    """Substitute square matrices ``a`` for ``p`` and ``b`` for ``q``.

    Also accepts stacks of matrices of shape ``(..., d, d)``; the unit is
    the identity of matching shape. Output is real only when the inputs and
    all coefficients are real.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"need square matrices of equal size, got {a.shape} and {b.shape}")
    real = not (np.iscomplexobj(a) or np.iscomplexobj(b)) and all(c.imag == 0 for c in poly.terms.values())
    dtype = float if real else complex
    eye = np.broadcast_to(np.eye(a.shape[-1], dtype=dtype), a.shape)
    prods = _word_products(poly.terms, a, b, eye)
    out = np.zeros(a.shape, dtype=dtype)
    for w, c in poly.terms.items():
        out = out + (c.real if real else c) * prods[w]
    return out


def angle_block_projections(theta) -> tuple[np.ndarray, np.ndarray]:
    """The ``2 x 2`` actions of P and Q on ``span(e_i, g_i)``.

    Vectorized over ``theta``; returns arrays of shape ``theta.shape + (2, 2)``.
    """
    t = np.asarray(theta, dtype=float)
    if np.any((t < 0) | (t > np.pi / 2)) or np.any(np.isnan(t)):
        raise ValueError("angles must lie in [0, pi/2]")
    c, s = np.cos(t), np.sin(t)
    p = np.zeros(t.shape + (2, 2))
    p[..., 0, 0] = 1.0
    q = np.empty(t.shape + (2, 2))
    q[..., 0, 0] = c * c
    q[..., 0, 1] = q[..., 1, 0] = c * s
    q[..., 1, 1] = s * s
    return p, q


def evaluate_on_angle_block(poly: NCPolynomial, theta) -> np.ndarray:
    """``poly`` evaluated on the 2x2 block pair for angle ``theta`` (vectorized)."""
    p, q = angle_block_projections(theta)
    return evaluate(poly, p, q)
