from fractions import Fraction

import numpy as np
import pytest
from sympy import Poly, QQ

from errors import InvalidSupport, SchemaError
from exact_poly import (T, T1, T2, CyclotomicElement, SparsePoly, cyclotomic_rank,
                        divided_difference, fulton_intersection_number, root_of_unity,
                        sylvester_resultant)
from lattice_core import INFINITE


def _poly(expr):
    return Poly(expr, T1, T2, domain=QQ)


def _random_through_origin(rng, degree=3):
    monomials = [(i, d - i) for d in range(1, degree + 1) for i in range(d + 1)]
    chosen = rng.choice(len(monomials), size=int(rng.integers(1, 4)), replace=False)
    terms = {monomials[k]: int(rng.integers(1, 4)) * int(rng.choice([-1, 1])) for k in chosen}
    return SparsePoly(terms, 2).to_poly(T1, T2)


def test_sparse_poly_normalizes_terms():
    f = SparsePoly({(1, 0): Fraction(1, 2), (0, 1): 0}, 2)
    assert f.terms == {(1, 0): Fraction(1, 2)}
    assert f.degree() == 1
    assert SparsePoly({}, 1).is_zero
    with pytest.raises(SchemaError):
        SparsePoly({(1, 2): 1}, 1)


def test_sparse_poly_round_trip_through_sympy():
    f = SparsePoly({(2, 1): 3, (0, 0): Fraction(-1, 2)}, 2)
    assert SparsePoly.from_poly(f.to_poly()) == f


def test_divided_difference():
    F = divided_difference(SparsePoly.univariate({3: 1}))
    assert F.terms == {(0, 2): 1, (1, 1): 1, (2, 0): 1}
    G = divided_difference(SparsePoly.univariate({1: 5, 2: 1}))
    assert G.terms == {(0, 0): 5, (0, 1): 1, (1, 0): 1}
    with pytest.raises(InvalidSupport):
        divided_difference(SparsePoly.univariate({-1: 1}))


@pytest.mark.parametrize("F, G, expected", [
    (T1, T2, 1),
    (T2 - T1 ** 2, T2, 2),
    (T2 ** 2 - T1 ** 3, T2, 3),
    (T2 ** 2 - T1 ** 3, T1, 2),
    (T1 + 1, T2, 0),
    (T1, T1 * T2, INFINITE),
])
def test_intersection_examples(F, G, expected):
    assert fulton_intersection_number(_poly(F), _poly(G)) == expected


def test_intersection_of_zero_polynomial():
    with pytest.raises(InvalidSupport):
        fulton_intersection_number(_poly(T1 - T1), _poly(T2))


def test_intersection_axioms():
    rng = np.random.default_rng(3)
    for _ in range(50):
        F, G, H = (_random_through_origin(rng) for _ in range(3))
        A = _random_through_origin(rng, degree=2) + _poly(int(rng.integers(-2, 3)))
        value = fulton_intersection_number(F, G)
        assert fulton_intersection_number(G, F) == value
        if not (G + A * F).is_zero:
            assert fulton_intersection_number(F, G + A * F) == value
        parts = [value, fulton_intersection_number(F, H)]
        if INFINITE not in parts:
            assert fulton_intersection_number(F, G * H) == sum(parts)


def test_sylvester_resultant():
    assert sylvester_resultant(T ** 2 + 1, T - 2) == 5
    assert sylvester_resultant(T ** 2 - 1, T - 1) == 0
    f = SparsePoly.univariate({0: -4, 2: 1})
    assert sylvester_resultant(f, T + 2) == 0
    with pytest.raises(InvalidSupport):
        sylvester_resultant(T, 3 + 0 * T)


def test_roots_of_unity():
    i = root_of_unity(4, 1)
    assert i * i == -1
    assert i.inverse() == root_of_unity(4, 3)
    assert root_of_unity(2, 1) == root_of_unity(4, 2)
    w = root_of_unity(3, 1)
    assert 1 + w + w * w == 0
    assert (w / w) == 1
    with pytest.raises(ZeroDivisionError):
        (w - w).inverse()
    with pytest.raises(SchemaError):
        CyclotomicElement(0, Poly(1, T, domain=QQ))


def test_cyclotomic_rank():
    one, w = root_of_unity(3, 0), root_of_unity(3, 1)
    assert cyclotomic_rank([[one, one], [one, w]]) == 2
    assert cyclotomic_rank([[one, w], [w, w * w]]) == 1
    assert cyclotomic_rank([[one, root_of_unity(4, 1)], [one, root_of_unity(2, 1)]]) == 2
    assert cyclotomic_rank([]) == 0
