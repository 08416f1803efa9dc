from functools import reduce
from math import gcd

import numpy as np
import pytest

from errors import InvalidSupport, NotInjective
from lattice_core import INFINITE, SupportSet
from sparse_delta import (branch_count, delta_oracle, delta_sparse, is_zero_nondegenerate,
                          j_sequence, make_degenerate_coefficients, milnor_number,
                          prepare_supports, random_support_pair, sample_coefficients,
                          sample_nondegenerate_coefficients)


@pytest.mark.parametrize("B1, B2, delta, milnor, js", [
    ((2,), (3,), 1, 2, (1,)),
    ((4,), (6, 7), 8, 16, (2, 1)),
    ((2, 3), (4, 5), 2, 4, (2, 1)),
    ((1,), (5, 9), 0, 0, (1,)),
    ((0, 2), (0, 3), 1, 2, (1,)),
])
def test_delta_sparse(B1, B2, delta, milnor, js):
    result = delta_sparse(B1, B2)
    assert (result.delta, result.milnor, result.j_sequence) == (delta, milnor, js)
    assert result.branches == 1


def test_delta_accepts_support_sets():
    assert delta_sparse(SupportSet.line([2]), SupportSet.line([3])).delta == 1


def test_rescaling():
    assert prepare_supports((2,), (4, 6)) == ((1,), (2, 3), 2)
    assert delta_sparse((2,), (4, 6)).rescaled_by == 2
    with pytest.raises(NotInjective):
        delta_sparse((2,), (4, 6), rescale=False)


@pytest.mark.parametrize("B1, B2", [((0,), (2,)), ((-1, 2), (3,))])
def test_invalid_supports(B1, B2):
    with pytest.raises(InvalidSupport):
        prepare_supports(B1, B2)


def test_j_sequence_stops_at_one():
    assert j_sequence((6,), (9, 10, 11)) == (3, 1)
    assert j_sequence((4,), (8, 10, 11)) == (4, 4, 2, 1)


def test_milnor_number():
    assert milnor_number(3, 1) == 6
    assert milnor_number(3, 2) == 5
    assert branch_count((2,), (3,)) == 1


def test_nondegeneracy():
    assert is_zero_nondegenerate({2: 1, 3: 1}, {4: 1, 5: 1})
    check = is_zero_nondegenerate({2: 1, 3: 1}, {4: 1, 5: 2})
    assert not check
    assert check.witness == 2
    # coprime leading exponents are always nondegenerate
    assert is_zero_nondegenerate({2: 1}, {3: -7})
    with pytest.raises(InvalidSupport):
        is_zero_nondegenerate({0: 1}, {4: 1})


def test_oracle_examples():
    assert delta_oracle({2: 1}, {3: 1}) == 1
    assert delta_oracle({2: 1, 3: 1}, {4: 1, 5: 1}) == 2
    assert delta_oracle({2: 1, 3: 1}, {4: 1, 5: 2}) > 2
    assert delta_oracle({4: 1}, {6: 1, 7: 1}) == 8


def test_oracle_of_a_non_injective_germ():
    assert delta_oracle({2: 1}, {4: 1}) is INFINITE


def test_sampling():
    rng = np.random.default_rng(1)
    coefficients = sample_coefficients((1, 4, 9), rng)
    assert set(coefficients) == {1, 4, 9}
    assert all(coefficients.values())
    f1, f2 = sample_nondegenerate_coefficients((2, 3), (4, 5), rng)
    assert is_zero_nondegenerate(f1, f2)
    for _ in range(20):
        B1, B2 = random_support_pair(rng)
        assert 1 <= len(B1) <= 4 and 1 <= len(B2) <= 4
        assert max(B1 + B2) <= 15 and min(B1 + B2) >= 1
        assert reduce(gcd, B1 + B2) == 1


def test_degenerate_construction():
    rng = np.random.default_rng(2)
    assert make_degenerate_coefficients((2,), (3,), rng) is None
    f1, f2 = make_degenerate_coefficients((2, 3), (4, 5), rng)
    assert not is_zero_nondegenerate(f1, f2)
    assert delta_oracle(f1, f2) > delta_sparse((2, 3), (4, 5)).delta


def _oracle_agrees(rng, pairs):
    for _ in range(pairs):
        B1, B2 = random_support_pair(rng)
        f1, f2 = sample_nondegenerate_coefficients(B1, B2, rng)
        assert delta_oracle(f1, f2) == delta_sparse(B1, B2).delta, (B1, B2, f1, f2)


def test_formula_matches_oracle():
    _oracle_agrees(np.random.default_rng(17), 20)


@pytest.mark.slow
def test_formula_matches_oracle_on_many_pairs():
    _oracle_agrees(np.random.default_rng(20240220), 100)


@pytest.mark.slow
def test_degenerate_inputs_exceed_the_formula():
    rng = np.random.default_rng(8)
    found = 0
    while found < 10:
        B1, B2 = random_support_pair(rng)
        coefficients = make_degenerate_coefficients(B1, B2, rng)
        if coefficients is None:
            continue
        found += 1
        oracle = delta_oracle(*coefficients)
        assert oracle is INFINITE or oracle > delta_sparse(B1, B2).delta, (B1, B2)
