import pytest
from hypothesis import given, settings, strategies as st

from intersective.number_field import (AlgInt, FieldDesc, FieldMismatchError, OmegaKind,
                                       format_element, nf_mul, nf_norm, parse_element,
                                       parse_field)

from conftest import GAUSS, QQ, SQRT5

ints = st.integers(-10**6, 10**6)
fields = st.sampled_from([QQ, GAUSS, SQRT5, FieldDesc.quadratic(-3), FieldDesc.quadratic(2),
                          FieldDesc.quadratic(-5), FieldDesc.quadratic(13)])


@st.composite
def triples(draw):
    F = draw(fields)
    mk = lambda: F(draw(ints), draw(ints) if not F.is_rational else 0)
    return F, mk(), mk(), mk()


def test_field_descriptors():
    assert GAUSS.omega_kind is OmegaKind.SQRT_D and GAUSS.min_poly_of_omega == (0, -1)
    assert GAUSS.disc == -4
    assert SQRT5.omega_kind is OmegaKind.HALF_TRACE and SQRT5.min_poly_of_omega == (1, 1)
    assert SQRT5.disc == 5
    assert QQ.degree == 1 and GAUSS.degree == 2
    with pytest.raises(ValueError):
        FieldDesc.quadratic(12)
    with pytest.raises(ValueError):
        FieldDesc.quadratic(1)


@pytest.mark.parametrize("text", ["Q", "Q(sqrt -1)", "Q(sqrt 5)", "Q(sqrt -163)"])
def test_field_text_round_trip(text):
    assert str(parse_field(text)) == text


def test_worked_products_and_norms():
    i = GAUSS.omega()
    assert nf_mul(1 + i, 1 - i, GAUSS) == GAUSS(2)
    w = SQRT5.omega()
    assert nf_mul(2 + w, 3 - w, SQRT5) == SQRT5(5)
    assert nf_norm(GAUSS(3, 4), GAUSS) == 25
    assert nf_norm(w, SQRT5) == -1
    assert nf_norm(SQRT5.one(), SQRT5) == 1


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatchError):
        nf_mul(GAUSS(1, 1), SQRT5(1, 1), GAUSS)


@settings(max_examples=400, deadline=None)
@given(triples())
def test_ring_laws(data):
    F, x, y, z = data
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * F.one() == x


@settings(max_examples=400, deadline=None)
@given(triples())
def test_norm_multiplicative_and_conjugation(data):
    F, x, y, _ = data
    assert (x * y).norm() == x.norm() * y.norm()
    assert x.conjugate().conjugate() == x
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert (x + y).conjugate() == x.conjugate() + y.conjugate()
    assert (x * x.conjugate()) == F(x.norm())


def test_norm_against_complex_embedding():
    for F in (GAUSS, SQRT5, FieldDesc.quadratic(-7)):
        x = F(7, -3)
        s = complex(x.a) + x.b * F.omega_complex()
        conj = complex(x.a) + x.b * (F.min_poly_of_omega[0] - F.omega_complex())
        assert abs((s * conj).real - x.norm()) < 1e-9


def test_element_text_round_trip():
    for F in (GAUSS, SQRT5, QQ):
        for x in (F(3, -4) if not F.is_rational else F(3), F(0), F(-12)):
            assert parse_element(format_element(x), F) == x
    assert parse_element("1+2*i", GAUSS) == GAUSS(1, 2)
    assert parse_element("-(w+1)", SQRT5) == SQRT5(-1, -1)
