import numpy as np
import pytest

from shxga.benchmarks import make_objective
from shxga.core import EvalCounter, Individual, evaluate, make_rng


def test_evaluate_at_sphere_optimum_counts_once():
    obj = make_objective("sphere", 10)
    counter = EvalCounter()
    ind = Individual(np.zeros(10))
    assert evaluate(ind, obj, counter) == 0.0
    assert counter.count == 1


def test_second_evaluate_hits_cache():
    obj = make_objective("sphere", 10)
    counter = EvalCounter()
    ind = Individual(np.zeros(10))
    evaluate(ind, obj, counter)
    assert evaluate(ind, obj, counter) == 0.0
    assert counter.count == 1
    assert ind.fitness == 0.0


def test_rosenbrock_optimum_is_all_ones():
    obj = make_objective("rosenbrock", 10)
    counter = EvalCounter()
    assert evaluate(Individual(np.ones(10)), obj, counter) == 0.0


def test_counter_counts_distinct_individuals():
    obj = make_objective("sphere", 3)
    counter = EvalCounter()
    inds = [Individual(np.full(3, i)) for i in range(7)]
    for ind in inds:
        evaluate(ind, obj, counter)
    for ind in inds:
        evaluate(ind, obj, counter)  # all cached
    assert counter.count == 7


def test_dimension_mismatch_rejected():
    obj = make_objective("sphere", 10)
    with pytest.raises(ValueError, match="expects 10"):
        evaluate(Individual(np.zeros(4)), obj, EvalCounter())


def test_genes_are_frozen_and_copied():
    source = np.ones(5)
    ind = Individual(source)
    source[0] = 99.0  # caller's array stays independent
    assert ind.genes[0] == 1.0
    with pytest.raises(ValueError):
        ind.genes[0] = 2.0


def test_same_seed_same_stream():
    a = make_rng(123)
    b = make_rng(123)
    assert np.array_equal(a.random(100), b.random(100))
    assert np.array_equal(
        a.choice(50, size=10, replace=False), b.choice(50, size=10, replace=False)
    )


def test_different_seeds_differ():
    assert not np.array_equal(make_rng(1).random(16), make_rng(2).random(16))
