import itertools

import numpy as np
import pytest

from support import metric_for

from chernlab.groups import (ConjugationAction, FiniteGroup, GeneratingSet, GroupError, cyclic_group,
                             direct_product, group_from_json, group_to_json, parse_group_spec,
                             symmetric_group, word_metric)


def test_cyclic_multiply():
    z4 = cyclic_group(4)
    assert z4.multiply(1, 3) == 0
    assert z4.multiply(1, 1) == 2


def test_sym3_transpositions_compose_to_three_cycle():
    s3 = symmetric_group(3)
    a, b = s3.index_of("(0 1)"), s3.index_of("(1 2)")
    ab = s3.multiply(a, b)
    # (0 1)∘(1 2): 0->0->1, 1->2->2, 2->1->0
    assert s3.labels[ab] == "(0 1 2)"
    assert s3.element_order(ab) == 3


def test_table_validation():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [0, 1]])
    with pytest.raises(GroupError):
        FiniteGroup([[1, 0], [0, 1]])
    with pytest.raises(IndexError):
        cyclic_group(3).multiply(0, 3)


def test_non_associative_table_rejected():
    # a Latin square with identity 0 that is not a group table (order 5 loop)
    t = [[0, 1, 2, 3, 4],
         [1, 0, 3, 4, 2],
         [2, 4, 0, 1, 3],
         [3, 2, 4, 0, 1],
         [4, 3, 1, 2, 0]]
    with pytest.raises(GroupError):
        FiniteGroup(t)


def test_word_metric_examples():
    z6 = cyclic_group(6)
    m = word_metric(GeneratingSet.create(z6, [1]))
    assert m(0, 3) == 3
    assert m(2, 2) == 0
    m2 = word_metric(GeneratingSet.create(z6, [1, 2]))
    assert m2(0, 3) == 2


def test_generating_set_symmetrized_and_checked():
    z6 = cyclic_group(6)
    gs = GeneratingSet.create(z6, [1])
    assert gs.generators == frozenset({1, 5})
    with pytest.raises(GroupError):
        GeneratingSet.create(z6, [2])


@pytest.mark.parametrize("spec", ["cyclic:5", "sym:3", "product:[cyclic:2,cyclic:3]"])
def test_word_metric_axioms(spec):
    m = metric_for(spec)
    g = m.group
    els = list(g.elements())
    for x, y in itertools.product(els, els):
        assert m(x, y) == m(y, x)
        assert (m(x, y) == 0) == (x == y)
        assert m(x, y) == m.length(g.multiply(g.inverse(x), y))
        for z in els:
            assert m(x, z) <= m(x, y) + m(y, z)
            assert m(g.multiply(z, x), g.multiply(z, y)) == m(x, y)


def test_element_orders():
    z6, s3 = cyclic_group(6), symmetric_group(3)
    assert z6.element_order(0) == 1
    assert z6.element_order(1) == 6
    assert s3.element_order(s3.index_of("(0 1 2)")) == 3
    for g in s3.elements():
        assert s3.order % s3.element_order(g) == 0


def test_conjugacy_orbits():
    s3 = symmetric_group(3)
    assert s3.conjugacy_orbit(s3.identity_index) == {s3.identity_index}
    trans = {s3.index_of(x) for x in ("(0 1)", "(1 2)", "(0 2)")}
    assert s3.conjugacy_orbit(s3.index_of("(0 1)")) == trans
    z5 = cyclic_group(5)
    assert all(z5.conjugacy_orbit(g) == {g} for g in z5.elements())


def test_conjugation_is_an_action():
    s3 = symmetric_group(3)
    act = ConjugationAction(s3)
    for a, b, x in itertools.product(s3.elements(), repeat=3):
        assert act.act(s3.multiply(a, b), x) == act.act(a, act.act(b, x))
    assert sorted(len(o) for o in act.orbits()) == [1, 2, 3]


def test_direct_product_and_specs():
    g = parse_group_spec("product:[cyclic:2,sym:3]")
    assert g.order == 12
    assert not g.is_abelian()
    assert direct_product(cyclic_group(2), cyclic_group(3)).is_abelian()
    with pytest.raises(GroupError):
        parse_group_spec("dihedral:4")
    with pytest.raises(GroupError):
        parse_group_spec("cyclic:x")


def test_group_json_roundtrip():
    g = symmetric_group(3)
    back = group_from_json(group_to_json(g))
    assert back == g and back.labels == g.labels
    assert group_from_json("cyclic:3") == cyclic_group(3)
    assert np.array_equal(group_from_json(group_to_json(cyclic_group(4))).mult_table,
                          cyclic_group(4).mult_table)
