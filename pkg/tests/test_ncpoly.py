import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeangles.blocks import rho_plus_minus
from freeangles.ncpoly import (
    MAX_DEGREE,
    NCParseError,
    NCPolynomial,
    P,
    Q,
    angle_block_projections,
    evaluate,
    evaluate_on_angle_block,
    format_ncpoly,
    is_self_adjoint,
    parse_ncpoly,
)
from freeangles.subspace import haar_subspace, projector


def test_parse_single_word():
    assert parse_ncpoly("p*q*p").terms == {"PQP": 1}


def test_parse_commutator():
    assert parse_ncpoly("i*(p*q - q*p)").terms == {"PQ": 1j, "QP": -1j}


def test_parse_p_plus_qpq():
    assert parse_ncpoly("p + q*p*q").terms == {"P": 1, "QPQ": 1}


def test_parse_merges_like_terms_and_drops_zeros():
    assert parse_ncpoly("p*q + 2*p*q - 3*p*q + q").terms == {"Q": 1}
    assert parse_ncpoly("p - p").terms == {}


def test_parse_powers_constants_and_imaginary_literals():
    assert parse_ncpoly("(p + q)^2 - (p + q)") == P * P + P * Q + Q * P + Q * Q - P - Q
    assert parse_ncpoly("2.5i*p + 1e-3").terms == {"": 1e-3, "P": 2.5j}
    assert parse_ncpoly("-p^3") == -(P * P * P)
    assert parse_ncpoly("P*Q") == P * Q


@pytest.mark.parametrize(
    "text,pos",
    [("p*x", 2), ("p + ", 4), ("p)", 1), ("(p + q", 6), ("p^0", 2), ("p^1.5", 2), ("p $ q", 2)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(NCParseError) as info:
        parse_ncpoly(text)
    assert info.value.pos == pos


def test_unknown_letter():
    with pytest.raises(NCParseError, match="unknown letter"):
        parse_ncpoly("p*r")


def test_degree_cap():
    parse_ncpoly(f"p^{MAX_DEGREE}")
    with pytest.raises(NCParseError, match="degree"):
        parse_ncpoly(f"p^{MAX_DEGREE + 1}")
    with pytest.raises(NCParseError, match="degree"):
        parse_ncpoly("*".join(["p"] * (MAX_DEGREE + 1)))


def test_self_adjointness_examples():
    assert not is_self_adjoint(NCPolynomial({"PQ": 1}))
    assert is_self_adjoint(NCPolynomial({"PQ": 1j, "QP": -1j}))
    assert is_self_adjoint(NCPolynomial({"PQP": 1}))
    assert not is_self_adjoint(NCPolynomial({"P": 1j}))


def test_print_parse_examples():
    poly = NCPolynomial({"": 2, "PQ": 1.5 - 2e-5j, "QQ": -3})
    assert format_ncpoly(poly) == "2.0 + (1.5-2e-05i)*p*q + -3.0*q*q"
    assert parse_ncpoly(format_ncpoly(poly)) == poly
    assert format_ncpoly(NCPolynomial({})) == "0"


def test_json_roundtrip():
    poly = parse_ncpoly("i*(p*q - q*p) + 0.5*p")
    assert NCPolynomial.from_json(poly.to_json()) == poly
    assert poly.to_dict()["PQ"] == [0.0, 1.0]


words = st.text(alphabet="PQ", max_size=5)
coeffs = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)
polys = st.dictionaries(words, coeffs, max_size=6).map(NCPolynomial)


@settings(max_examples=200, deadline=None)
@given(polys)
def test_parse_inverts_print(poly):
    assert parse_ncpoly(format_ncpoly(poly)) == poly


def _pair(n=7, seed=0):
    return projector(haar_subspace(n, 3, seed)), projector(haar_subspace(n, 4, seed + 1))


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_evaluation_is_linear(a, b):
    A, B = _pair()
    lhs = evaluate(a + b, A, B)
    rhs = evaluate(a, A, B) + evaluate(b, A, B)
    scale = 1 + sum(abs(c) for c in a.terms.values()) + sum(abs(c) for c in b.terms.values())
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * scale


@settings(max_examples=100, deadline=None)
@given(polys)
def test_self_adjoint_part_evaluates_hermitian(poly):
    sa = 0.5 * (poly + poly.adjoint())
    assert sa.is_self_adjoint(tol=1e-9 * (1 + max((abs(c) for c in poly.terms.values()), default=0)))
    A, B = _pair()
    M = evaluate(sa, A, B)
    scale = 1 + sum(abs(c) for c in poly.terms.values())
    assert np.max(np.abs(M - M.conj().T)) <= 1e-12 * scale


def test_unit_evaluates_to_identity():
    A, B = _pair()
    assert np.array_equal(evaluate(NCPolynomial.constant(1), A, B), np.eye(7))


def test_sum_of_letters():
    A, B = _pair()
    assert np.allclose(evaluate(P + Q, A, B), A + B, atol=0)


def test_evaluate_size_mismatch():
    with pytest.raises(ValueError):
        evaluate(P, np.eye(2), np.eye(3))


def test_pqp_on_angle_block():
    for theta in np.linspace(0, np.pi / 2, 11):
        eig = np.linalg.eigvalsh(evaluate_on_angle_block(parse_ncpoly("p*q*p"), theta))
        assert np.allclose(eig, [0, np.cos(theta) ** 2], atol=1e-14)


def test_angle_block_eigenvalues():
    t = np.linspace(0, np.pi / 2, 25)
    c = np.cos(t)
    s = np.linalg.eigvalsh(evaluate_on_angle_block(P + Q, t))
    assert np.allclose(s, np.stack([1 - c, 1 + c], axis=-1), atol=1e-14)
    a = np.linalg.eigvalsh(evaluate_on_angle_block(P * Q + Q * P, t))
    assert np.allclose(a, np.stack([c * c - c, c * c + c], axis=-1), atol=1e-14)
    r = np.linalg.eigvalsh(evaluate_on_angle_block(parse_ncpoly("p + q*p*q"), t))
    c2 = c * c
    expected = np.stack([(1 + c2 - np.sqrt(5 * c2**2 - 2 * c2 + 1)) / 2, (1 + c2 + np.sqrt(5 * c2**2 - 2 * c2 + 1)) / 2], -1)
    assert np.allclose(r, expected, atol=1e-14)
    assert np.allclose(np.stack(rho_plus_minus(c2), -1), expected, atol=1e-15)


def test_angle_block_projections_are_projections():
    p, q = angle_block_projections(0.7)
    for m in (p, q):
        assert np.allclose(m @ m, m, atol=1e-15)
        assert np.isclose(np.trace(m), 1.0)


@pytest.mark.parametrize("theta", [-0.1, np.pi / 2 + 1e-6, np.nan])
def test_angle_out_of_range(theta):
    with pytest.raises(ValueError):
        evaluate_on_angle_block(P, theta)
