import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locallim.errors import ContractViolation
from locallim.rng import PoissonBuffer, derive_seed, reference_stream, root_stream, uniform_ints
from locallim.trees import PlaneTree, ahu_code


def draws(g, k=8):
    return g.random(k).tolist()


def test_derive_seed_examples():
    assert draws(derive_seed(7, 3)) == draws(derive_seed(7, 3))
    assert draws(derive_seed(7, 1)) != draws(derive_seed(7, 2))
    assert draws(derive_seed(7, 1)) != draws(derive_seed(8, 1))


def test_reserved_streams_distinct():
    a = draws(derive_seed(5, 0))
    assert draws(root_stream(5, 0)) != a
    assert draws(reference_stream(5, 0)) != a
    assert draws(root_stream(5, 0)) != draws(reference_stream(5, 0))


def test_large_master_seed():
    assert draws(derive_seed(2**64 - 1, 0)) == draws(derive_seed(2**64 - 1, 0))


@given(st.integers(0, 50), st.integers(1, 1000), st.integers(0, 40))
def test_uniform_ints_range(low, span, size):
    xs = uniform_ints(derive_seed(1, 0), low, low + span, size)
    assert len(xs) == size and all(low <= x < low + span for x in xs)


def test_uniform_ints_balanced():
    xs = np.array(uniform_ints(derive_seed(2, 0), 0, 5, 100_000))
    freq = np.bincount(xs, minlength=5) / xs.size
    assert np.all(np.abs(freq - 0.2) < 0.005)


def test_poisson_buffer_mean():
    p = PoissonBuffer(derive_seed(3, 0), 1.0, block=1000)
    xs = [p() for _ in range(20_000)]
    assert abs(np.mean(xs) - 1.0) < 0.03


def test_plane_tree_round_trip():
    t = PlaneTree((3, 0, 2, 0), 2)
    assert str(t) == "2:3,0,2,0"
    assert PlaneTree.parse(str(t)) == t
    assert t.size == 6 and t.k == 4
    assert PlaneTree.parse("3:0") == PlaneTree((0,), 3)


@pytest.mark.parametrize("bad", ["2:1", "1:1,0", "x:1", "1:-1", "2:2,0"])
def test_plane_tree_rejects(bad):
    with pytest.raises(ContractViolation):
        PlaneTree.parse(bad)


def test_plane_tree_children():
    assert PlaneTree((2, 1, 0), 2).children() == [[1, 2], [3], [], []]


def test_ahu_ignores_child_order():
    a = PlaneTree((2, 1, 0), 2).code()
    b = PlaneTree((2, 0, 1), 2).code()
    c = PlaneTree((1, 2), 2).code()
    assert a == b != c
    assert ahu_code({0: [1], 1: []}, [0, 1]) == b"T(())"
