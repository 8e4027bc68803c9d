"""Numeric backend: the store, the evaluator, and its brute-force check."""

import random

import numpy as np
import pytest

from lambeksem.diagram import (
    box,
    cap,
    compose,
    cup,
    frobenius_network,
    spider,
    tensor_par,
)
from lambeksem.tensor import (
    TensorError,
    TensorStore,
    closed_form_1d,
    eval_diagram,
    oracle_eval,
)
from conftest import random_diagram

N = ("N", False)
Nd = ("N", True)
S = ("S", False)


def test_store_is_deterministic():
    # frozen draws; these bytes must never change across runs or platforms
    s0 = TensorStore({"N": 2, "S": 2}, seed=0)
    np.testing.assert_array_equal(
        s0.get("Bob", ("N",)),
        np.array([0.2767138884007567, 0.21526283926332945]),
    )
    s7 = TensorStore({"N": 2, "S": 2}, seed=7)
    np.testing.assert_array_equal(
        s7.get("Bob", ("N",)),
        np.array([0.5925599268387697, 0.04509534888188382]),
    )
    again = TensorStore({"N": 2, "S": 2}, seed=0)
    np.testing.assert_array_equal(again.get("Bob", ("N",)), s0.get("Bob", ("N",)))


def test_different_names_and_seeds_differ():
    s = TensorStore({"N": 4}, seed=0)
    assert not np.array_equal(s.get("alice", ("N",)), s.get("bob", ("N",)))
    other = TensorStore({"N": 4}, seed=1)
    assert not np.array_equal(s.get("alice", ("N",)), other.get("alice", ("N",)))


def test_store_shape_discipline():
    s = TensorStore({"N": 3, "S": 2})
    arr = s.get("f", ("N", "S"))
    assert arr.shape == (3, 2)
    with pytest.raises(TensorError):
        s.get("f", ("S", "N"))
    with pytest.raises(TensorError):
        s.get("g", ("Q",))
    with pytest.raises(TensorError):
        s.set("h", ("N",), np.zeros((2,)))


def test_store_json_round_trip_is_bit_exact():
    s = TensorStore({"N": 3, "S": 2}, seed=9)
    s.get("w", ("N", "S"))
    s.get("v", ("S",))
    back = TensorStore.from_json(s.to_json())
    assert back.dims == s.dims and back.seed == s.seed
    for name, t in s.tensors.items():
        np.testing.assert_array_equal(back.get(name, t.spaces), t.array)
    assert back.to_json() == s.to_json()


def test_strict_store_refuses_to_generate():
    s = TensorStore({"N": 2}, generate=False)
    with pytest.raises(TensorError, match="not in the store"):
        s.get("missing", ("N",))
    s.set("present", ("N",), np.array([1.0, 2.0]))
    np.testing.assert_array_equal(s.get("present", ("N",)), [1.0, 2.0])


def test_spider_tensor_semantics():
    # a spider is the generalized Kronecker delta: copy when fanning out,
    # pointwise multiply when fanning in
    st = TensorStore({"N": 3}, seed=2)
    v = st.get("v", ("N",))
    w = st.get("w", ("N",))
    word_v = box("v", (), (N,))
    word_w = box("w", (), (N,))
    merged = compose(tensor_par(word_v, word_w), spider("N", 2, 1))
    out = eval_diagram(merged, st)
    np.testing.assert_allclose(out.array, v * w, rtol=1e-15)
    copied = eval_diagram(compose(word_v, spider("N", 1, 2)), st)
    np.testing.assert_allclose(copied.array, np.diag(v), rtol=0, atol=0)


def test_cup_cap_semantics():
    st = TensorStore({"N": 4}, seed=3)
    v = st.get("v", ("N",))
    w = st.get("w", ("N",))
    paired = compose(
        tensor_par(box("v", (), (N,)), box("w", (), (Nd,))), cup("N")
    )
    out = eval_diagram(paired, st)
    assert out.spaces == ()
    np.testing.assert_allclose(out.array, np.dot(v, w), rtol=1e-15)
    loop = compose(cap("N"), cup("N"))
    val = eval_diagram(loop, st)
    assert val.spaces == ()
    np.testing.assert_allclose(val.array, 4.0, rtol=0)


def test_eval_matches_oracle_on_random_diagrams():
    rng = random.Random(13)
    st = TensorStore({"N": 3, "S": 2}, seed=17)
    for i in range(80):
        d = random_diagram(rng, max_nodes=4, tag=f"o{i}")
        fast = eval_diagram(d, st)
        slow = oracle_eval(d, st)
        assert fast.spaces == slow.spaces
        np.testing.assert_allclose(fast.array, slow.array, rtol=1e-9, atol=1e-12)


def test_oracle_budget():
    st = TensorStore({"N": 3}, seed=1)
    d = box("big", (), (N,) * 8)
    with pytest.raises(TensorError, match="budget|enumerate"):
        oracle_eval(d, st, budget=10)


def test_closed_form_with_unit_vectors():
    # all-ones word vectors and matrices reduce the closed form to pure
    # counting, which is checkable by hand
    st = TensorStore({"N": 2, "S": 2}, generate=False)
    ones = np.ones
    st.set("papers", ("N",), ones(2))
    st.set("Bob", ("N",), ones(2))
    st.set("rejected", ("N", "S", "N"), ones((2, 2, 2)))
    st.set("reading", ("N", "S", "N"), ones((2, 2, 2)))
    out = closed_form_1d(st)
    assert out.spaces == ("N",)
    np.testing.assert_allclose(out.array, [4.0, 4.0], rtol=0)


def test_closed_form_seeded_reference():
    st = TensorStore({"N": 4, "S": 3}, seed=7)
    out = closed_form_1d(st)
    assert out.spaces == ("N",)
    again = closed_form_1d(TensorStore({"N": 4, "S": 3}, seed=7))
    np.testing.assert_array_equal(out.array, again.array)


def test_missing_dimension_is_an_error():
    st = TensorStore({"N": 2})
    d = box("f", (), (S,))
    with pytest.raises(TensorError):
        eval_diagram(d, st)


def test_index_budget_is_reported():
    st = TensorStore({"N": 2}, seed=0)
    d = box("b0", (), (N,) * 2)
    for i in range(30):
        d = tensor_par(d, box(f"b{i + 1}", (), (N,) * 2))
    with pytest.raises(TensorError, match="52"):
        eval_diagram(d, st)


def test_network_evaluation_shapes():
    st = TensorStore({"N": 3, "S": 2}, seed=5)
    d = frobenius_network(
        """
        out h o gap sv
        spider N : h o gap
        spider S : sv
        """,
        out_types=(N, N, Nd, S),
    )
    out = eval_diagram(d, st)
    assert out.spaces == ("N", "N", "N", "S")
    assert out.array.shape == (3, 3, 3, 2)
    # the triple spider leg is a copied basis: nonzero only on the diagonal
    for i in range(3):
        for j in range(3):
            if i != j:
                assert np.all(out.array[i, j] == 0)
