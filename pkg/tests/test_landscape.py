import itertools

import pytest

from plastigen.landscape import (NOT_FOUND, FitnessParams, Phenotype, TrialOverflow,
                                 fitness_from_trials, is_perfect)

P = FitnessParams()


@pytest.mark.parametrize("t, f", [(0, 1.0), (1000, 20.0), (250, 5.75), (NOT_FOUND, 20.0)])
def test_fitness_values(t, f):
    assert fitness_from_trials(t, P) == f


def test_fitness_monotone_and_bounded():
    values = [fitness_from_trials(t, P) for t in range(P.T + 1)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert min(values) == 1.0 and max(values) == 20.0


@pytest.mark.parametrize("t", [-1, 1001])
def test_fitness_rejects_out_of_range(t):
    with pytest.raises((TrialOverflow, ValueError)):
        fitness_from_trials(t, P)


def test_overflow_type():
    with pytest.raises(TrialOverflow):
        fitness_from_trials(1001, P)


def test_is_perfect():
    assert is_perfect("1" * 20, P)
    assert is_perfect(Phenotype("1" * 20), P)
    assert not is_perfect("1" * 19, P)
    assert not is_perfect("11111111110111111111", P)


def test_default_target():
    assert P.target == "1" * 20 and P.worst == 20.0


@pytest.mark.parametrize("kwargs", [dict(L=0), dict(T=0), dict(L=3, target="1111"),
                                    dict(L=2, target="12")])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        FitnessParams(**kwargs)


def test_phenotype_rejects_plastic():
    with pytest.raises(ValueError):
        Phenotype("1?0")


def test_literal_zero_never_reaches_target():
    """Exhaustive: no resolution of a phenome holding a literal 0 is the target."""
    small = FitnessParams(L=4)
    for n in range(1, 7):
        for ph in itertools.product("01?", repeat=n):
            if "0" not in ph:
                continue
            q = [i for i, c in enumerate(ph) if c == "?"]
            for bits in itertools.product("01", repeat=len(q)):
                s = list(ph)
                for i, b in zip(q, bits):
                    s[i] = b
                assert not is_perfect("".join(s), small)
