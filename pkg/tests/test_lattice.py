import math

import pytest

from dimred.errors import SizeError
from dimred.lattice import (SIZE_CAPS, count_direct, count_tree_sum, fixed_animals, tree_shape,
                            unit_steps)


@pytest.mark.parametrize("d, n, c", [(2, 1, 1), (2, 2, 2), (2, 3, 6), (2, 4, 22), (3, 2, 3)])
def test_known_counts(d, n, c):
    assert count_tree_sum(d, n).count == c
    assert count_direct(d, n).count == c


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("n", range(1, 7))
def test_methods_agree(d, n):
    tree = count_tree_sum(d, n)
    assert tree.count == count_direct(d, n).count
    assert tree.raw_total % math.factorial(n) == 0


def test_one_dimension_is_a_line():
    # connected n-site sets in Z are segments, each with one spanning tree
    for n in range(1, 6):
        assert count_tree_sum(1, n).count == count_direct(1, n).count == 1


def test_growth_in_the_plane():
    counts = [count_tree_sum(2, n).count for n in range(1, 9)]
    assert all(b > a for a, b in zip(counts, counts[1:]))


@pytest.mark.parametrize("d, n, fixed", [(2, 4, 19), (2, 5, 63), (3, 3, 15)])
def test_fixed_animal_counts(d, n, fixed):
    assert len(fixed_animals(d, n)) == fixed


def test_tree_shape_ignores_labels():
    path_a = tree_shape(4, [(1, 2), (2, 3), (3, 4)])
    path_b = tree_shape(4, [(3, 1), (1, 4), (4, 2)])
    star = tree_shape(4, [(1, 2), (1, 3), (1, 4)])
    assert path_a == path_b != star


def test_caps_and_arguments():
    for d, cap in SIZE_CAPS.items():
        with pytest.raises(SizeError):
            count_tree_sum(d, cap + 1)
    with pytest.raises(SizeError):
        count_direct(4, 2)
    with pytest.raises(ValueError):
        count_direct(2, 0)
    assert len(unit_steps(3)) == 6
