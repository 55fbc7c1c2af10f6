import pytest
from gmpy2 import mpq

from conftest import random_field_element, random_symmetric_form
from perfectforms.formspace import (
    FormOverF,
    RationalGram,
    evaluate,
    evaluation_vector,
    is_positive_definite,
    restriction_of_scalars,
    scaled_trace_form,
    sym_basis,
    tensor_with_An,
    vector_to_field,
)
from perfectforms.linalg import dot
from perfectforms.qfield import field, rational_field
from perfectforms.shortvec import minimal_vectors

A2 = [[1, mpq(1, 2)], [mpq(1, 2), 1]]


def alpha(d, p, q):
    return field(d).from_sqrt_coords(p, q)


ALPHA5 = (5, mpq(1, 2), mpq(-1, 10))
ALPHA2 = (2, mpq(1, 2), mpq(-1, 4))
ALPHA3 = (3, mpq(1, 2), mpq(-1, 4))


def kron(a, b):
    return [[a[i][j] * b[k][l] for j in range(len(a)) for l in range(len(b))]
            for i in range(len(a)) for k in range(len(b))]


def as_rows(g):
    return [list(r) for r in g.entries]


def test_sym_basis_order():
    B = sym_basis(field(5), 2)
    assert B.dim == 6
    assert B.describe() == ["E11", "w*E11", "(E12+E21)", "w*(E12+E21)", "E22", "w*E22"]
    assert sym_basis(rational_field(), 2).dim == 3
    assert sym_basis(field(2), 3).dim == 12


def test_evaluate_seed_form_e1():
    f = tensor_with_An(alpha(*ALPHA5), 2)
    assert evaluate(f, (1, 0, 0, 0)) == 1


def test_evaluate_constant_one():
    for d in (2, 5, 13):
        F = field(d)
        f = FormOverF(F, [[F.one, F.zero], [F.zero, F.zero]])
        assert evaluate(f, (1, 0, 0, 0)) == 2


def test_evaluate_unary_at_omega():
    f = scaled_trace_form(alpha(*ALPHA5))
    F = field(5)
    assert evaluate(f, (F.omega,)) == 1
    assert evaluate(f, (0, 1)) == 1


def test_evaluate_rejects_non_integral():
    F = field(5)
    f = scaled_trace_form(F.one)
    with pytest.raises(ValueError):
        evaluate(f, (F(mpq(1, 2), 0),))


@pytest.mark.parametrize("a, expected", [
    (ALPHA5, [[1, 0], [0, 1]]),
    (ALPHA2, [[1, -1], [-1, 2]]),
    (ALPHA3, [[1, mpq(-3, 2)], [mpq(-3, 2), 3]]),
])
def test_scaled_trace_form_grams(a, expected):
    g = scaled_trace_form(alpha(*a)).gram()
    assert as_rows(g) == [[mpq(x) for x in r] for r in expected]


def test_zero_form_restricts_to_zero():
    for d in (2, 5):
        g = restriction_of_scalars(FormOverF.zero(field(d), 2))
        assert all(x == 0 for r in g.entries for x in r)


@pytest.mark.parametrize("a", [ALPHA5, ALPHA2, ALPHA3])
def test_tensor_gram_is_kronecker(a):
    phi = as_rows(scaled_trace_form(alpha(*a)).gram())
    f = tensor_with_An(alpha(*a), 2)
    # component-major coordinates: A_2 on the outside, phi inside
    assert as_rows(f.gram()) == kron(A2, phi)


def test_tensor_rational_mode_is_A2():
    Q = rational_field()
    f = tensor_with_An(Q.one, 2)
    assert as_rows(f.gram()) == [[mpq(x) for x in r] for r in A2]


def test_tensor_off_diagonal_convention():
    a = alpha(*ALPHA5)
    f = tensor_with_An(a, 3)
    assert f[0, 0] == a and f[0, 1] == a * mpq(1, 2) and f[2, 1] == a * mpq(1, 2)


def test_positive_definite_examples():
    assert is_positive_definite(tensor_with_An(alpha(*ALPHA5), 2))
    F = field(2)
    assert not is_positive_definite(FormOverF(F, [[F.omega]]))
    assert not is_positive_definite(FormOverF.zero(F, 2))


def test_scaled_trace_definite_iff_totally_positive(rng):
    for d in (2, 3, 5, 13):
        F = field(d)
        for _ in range(50):
            a = random_field_element(F, rng)
            if a.is_zero():
                continue
            assert is_positive_definite(scaled_trace_form(a)) == a.is_totally_positive()


def test_evaluation_vector_examples():
    F5, F2 = field(5), field(2)
    assert evaluation_vector((1, 0, 0, 0), F5, 2) == (2, 1, 0, 0, 0, 0)
    assert evaluation_vector((0, 0, 1, 0), F2, 2) == (0, 0, 0, 0, 2, 0)
    for d in (2, 5, 13):
        F = field(d)
        assert evaluation_vector((1, 0, 0, 0), F, 2) == evaluation_vector((-1, 0, 0, 0), F, 2)
    with pytest.raises(ValueError):
        evaluation_vector((0, 0, 0, 0), F5, 2)


def test_three_evaluation_routes_agree(rng):
    """evaluate == Gram quadratic value == c(v) . coords on 1000 random (f, v)."""
    ds = [None, 2, 3, 5, 13, 57]
    for k in range(1000):
        F = field(ds[k % len(ds)])
        n = 2 if k % 3 else 3
        f = random_symmetric_form(F, rng, n)
        v = tuple(rng.randint(-4, 4) for _ in range(n * F.degree))
        if not any(v):
            continue
        e = evaluate(f, v)
        assert f.gram().value(v) == e
        assert dot(evaluation_vector(v, F, n), f.coords()) == e


def test_positive_definite_routes_agree(rng):
    """Embedding-minor route and rational-Gram route agree on 1000 random forms."""
    seen = {True: 0, False: 0}
    for k in range(1000):
        F = field((2, 3, 5, 13)[k % 4])
        f = random_symmetric_form(F, rng, 2, bound=3)
        # shift towards definiteness half of the time
        if k % 2:
            t = F(rng.randint(2, 12), 0)
            f = FormOverF(F, [[f[0, 0] + t, f[0, 1]], [f[1, 0], f[1, 1] + t]])
        seen[is_positive_definite(f)] += 1  # "both" raises on disagreement
    assert seen[True] > 50 and seen[False] > 50


def test_tensor_minimum_is_product(rng):
    """m(phi_alpha (x) A_2) = m(phi_alpha) m(A_2), by separate enumerations."""
    from perfectforms.seed import initial_alpha
    for d in (2, 3, 5, 13):
        a = initial_alpha(d).alpha
        m_phi = minimal_vectors(scaled_trace_form(a).gram()).minimum
        m_a2 = minimal_vectors(A2).minimum
        m_f = minimal_vectors(tensor_with_An(a, 2).gram()).minimum
        assert m_f == m_phi * m_a2


def test_tensor_minimal_vectors_are_simple_tensors():
    from perfectforms.seed import initial_alpha
    from perfectforms.shortvec import canonical_sign
    for d in (2, 3, 5, 13):
        F = field(d)
        a = initial_alpha(d).alpha
        etas = minimal_vectors(scaled_trace_form(a).gram()).field_vectors(F)
        expected = set()
        for (eta,) in etas:
            for vec in ((eta, F.zero), (F.zero, eta), (eta, -eta)):
                coords = tuple(int(c) for x in vec for c in (x.a, x.b))
                expected.add(canonical_sign(coords))
        got = set(minimal_vectors(tensor_with_An(a, 2).gram()).vectors)
        assert got == expected


def test_form_json_roundtrip(rng):
    for d in (None, 2, 13):
        F = field(d)
        f = random_symmetric_form(F, rng, 2)
        assert FormOverF.from_json(F, f.to_json()) == f
        g = f.gram()
        assert RationalGram.from_json(g.to_json()) == g


def test_from_coords_roundtrip(rng):
    F = field(13)
    f = random_symmetric_form(F, rng, 2)
    assert FormOverF.from_coords(F, 2, f.coords()) == f


def test_transform_matches_substitution(rng):
    from conftest import random_gl2
    F = field(5)
    f = random_symmetric_form(F, rng, 2)
    for _ in range(20):
        U = random_gl2(F, rng)
        g = f.transform(U)
        for _ in range(5):
            v = vector_to_field(F, [rng.randint(-3, 3) for _ in range(4)])
            Uv = tuple(sum((U[i][j] * v[j] for j in range(2)), F.zero) for i in range(2))
            assert evaluate(g, v) == evaluate(f, Uv)
