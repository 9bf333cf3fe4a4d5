import random
from fractions import Fraction

import pytest
from support import metric_for

from chernlab.chains import Theory
from chernlab.chern import (ChernError, IdempotentPair, MatrixKernel, ScaleError, averaging_idempotent,
                            block_sum, character_projection, chern_class_compare, chern_torsion_free,
                            chern_twisted, compare_by_degree, conjugate_pair, constant_kernel, convolve,
                            cyclic_characters, is_idempotent_pair, mat_inverse, mat_mul, identity,
                            pair_from_json, pair_to_json, propagation, random_invertible, shift_by_units,
                            support_diameter, trivial_pair, truncation_coherent, unit_kernel)
from chernlab.groups import trivial_group
from chernlab.scalars import QI

HALF = Fraction(1, 2)


@pytest.fixture
def z2():
    m = metric_for("cyclic:2")
    return m.group, m


@pytest.fixture
def z2_pair(z2):
    G, m = z2
    return IdempotentPair(averaging_idempotent(G, m))


def test_unit_is_two_sided(z2):
    G, m = z2
    k = MatrixKernel(G, 2, {0: [[1, 2], [3, 4]], 1: [[0, QI(0, 1)], [5, 0]]}, m)
    e = unit_kernel(G, 2, m)
    assert convolve(e, k) == k and convolve(k, e) == k


def test_z2_averaging_is_idempotent(z2):
    G, m = z2
    s = averaging_idempotent(G, m)
    assert s.values == {0: ((HALF,),), 1: ((HALF,),)}
    assert convolve(s, s) == s


def test_convolution_propagation_subadditive():
    m = metric_for("cyclic:6")
    G = m.group
    a = MatrixKernel(G, 1, {0: [[1]], 1: [[2]]}, m)
    b = MatrixKernel(G, 1, {2: [[1]], 5: [[3]]}, m)
    assert propagation(a * b) <= propagation(a) + propagation(b)


def test_propagation_examples():
    m = metric_for("cyclic:6")
    G = m.group
    assert propagation(unit_kernel(G, 1, m)) == 0
    assert propagation(MatrixKernel(G, 1, {0: [[1]], 1: [[1]]}, m)) == 1
    assert propagation(MatrixKernel(G, 1, {0: [[1]], 3: [[1]]}, m)) == 3


def test_idempotent_pair_examples(z2, z2_pair):
    G, m = z2
    zero = MatrixKernel(G, 2, {}, m)
    assert is_idempotent_pair(IdempotentPair(zero, [[1, 0], [0, 0]]))
    assert is_idempotent_pair(z2_pair)
    assert not is_idempotent_pair(IdempotentPair(constant_kernel(G, [[HALF]], m)))
    assert not is_idempotent_pair(IdempotentPair(MatrixKernel(G, 1, {}, m), [[2]]))


def test_kernel_shape_checked(z2):
    G, m = z2
    with pytest.raises(ChernError):
        MatrixKernel(G, 2, {0: [[1]]}, m)
    with pytest.raises(ChernError):
        MatrixKernel(G, 1, {2: [[1]]}, m)


def test_torsion_free_on_trivial_group():
    m = metric_for("cyclic:1")
    G = m.group
    rank1 = IdempotentPair(MatrixKernel(G, 2, {0: [[1, 1], [0, 0]]}, m))
    c = chern_torsion_free(rank1, 0, 0)
    assert c.components[0].coeffs == {(0,): 1}
    rank2 = IdempotentPair(unit_kernel(G, 3, m) - constant_kernel(G, [[0, 0, 0], [0, 0, 0], [0, 0, 1]], m))
    assert chern_torsion_free(rank2, 0, 0).components[0].coeffs == {(0,): 2}
    zero = IdempotentPair(MatrixKernel(G, 1, {}, m))
    assert all(c.is_zero() for c in chern_torsion_free(zero, 2, 0).components.values())


def test_twisted_agrees_with_torsion_free_on_trivial_group():
    m = metric_for("cyclic:1")
    p = IdempotentPair(unit_kernel(m.group, 2, m))
    tf, tw = chern_torsion_free(p, 0, 0), chern_twisted(p, 0, 0)
    assert {k[0]: v for k, v in tf.components[0].coeffs.items()} == \
           {tw.space.base_vertex(k[0]): v for k, v in tw.components[0].coeffs.items()}


def test_twisted_degree_zero_values(z2_pair):
    c = chern_twisted(z2_pair, 0, 1)
    assert c.ordered_terms == {(g, (v,)): HALF for g in (0, 1) for v in (0, 1)}
    for v in (0, 1):
        assert sum(c.ordered_terms[(g, (v,))] for g in (0, 1)) == 1
    T = c.space
    chain = c.components[0]
    assert chain.coeffs[(T.vertex(0, 0),)] == HALF and chain.coeffs[(T.vertex(0, 1),)] == HALF
    # at g the two vertices are one class [v]_{λ,g} = [g v]_{λ,g}
    g_terms = {k: v for k, v in chain.coeffs.items() if T.component_of(k[0]) == 1}
    assert list(g_terms.values()) == [1]


def test_scale_guard(z2_pair):
    with pytest.raises(ScaleError):
        chern_torsion_free(z2_pair, 2, 2)
    with pytest.raises(ChernError):
        chern_twisted(z2_pair, 1, 5)


def test_non_idempotent_rejected(z2):
    G, m = z2
    with pytest.raises(ChernError):
        chern_torsion_free(IdempotentPair(constant_kernel(G, [[2]], m)), 0, 0)


@pytest.mark.parametrize("n", [0, 2])
@pytest.mark.parametrize("twisted", [False, True])
def test_cycle_and_invariance(z2_pair, n, twisted):
    c = (chern_twisted if twisted else chern_torsion_free)(z2_pair, n, n + 1)
    for comp in c.components.values():
        assert comp.degree == 0 or not comp.boundary()
        assert comp.is_invariant()


def test_support_diameter_examples(z2, z2_pair):
    G, m = z2
    delta = IdempotentPair(unit_kernel(G, 1, m))
    assert support_diameter(chern_torsion_free(delta, 0, 0)) == 0
    assert support_diameter(chern_twisted(z2_pair, 0, 1)) == 0
    c = chern_torsion_free(z2_pair, 2, 3)
    assert support_diameter(c) <= 3 * propagation(z2_pair.q)


def test_conjugation_invariance(z2_pair):
    rng = random.Random(7)
    G = z2_pair.group
    p = block_sum(z2_pair, IdempotentPair(MatrixKernel(G, 1, {}, z2_pair.q.metric)))
    u = random_invertible(2, rng)
    assert mat_mul(u, mat_inverse(u)) == identity(2)
    pc = conjugate_pair(p, u)
    assert is_idempotent_pair(pc)
    for twisted in (False, True):
        f = chern_twisted if twisted else chern_torsion_free
        assert chern_class_compare(f(p, 2, 3), f(pc, 2, 3))


def test_rank_shift_detected_in_degree_zero(z2_pair):
    G, m = z2_pair.group, z2_pair.q.metric
    bigger = block_sum(z2_pair, trivial_pair(G, 1, m))
    big, small = chern_torsion_free(bigger, 2, 3), chern_torsion_free(z2_pair, 2, 3)
    assert compare_by_degree(big, small) == {0: False, 2: True}
    assert chern_class_compare(big, shift_by_units(small, 1))
    assert not chern_class_compare(big, shift_by_units(small, 2))


def test_block_sum_additivity(z2_pair):
    G, m = z2_pair.group, z2_pair.q.metric
    other = trivial_pair(G, 2, m)
    both = chern_torsion_free(block_sum(z2_pair, other), 2, 3)
    a, b = chern_torsion_free(z2_pair, 2, 3), chern_torsion_free(other, 2, 3)
    for k in both.components:
        assert both.components[k] == a.components[k] + b.components[k]


def test_truncation_coherence(z2_pair):
    assert all(truncation_coherent(chern_torsion_free(z2_pair, 2, 3), chern_torsion_free(z2_pair, 0, 1)).values())


def test_z4_characters_give_orthogonal_projections():
    m = metric_for("cyclic:4")
    G = m.group
    projs = [character_projection(G, chi, m) for chi in cyclic_characters(G)]
    for i, p in enumerate(projs):
        assert is_idempotent_pair(IdempotentPair(p))
        for j, q in enumerate(projs):
            if i != j:
                assert (p * q).is_zero()
    total = projs[0] + projs[1] + projs[2] + projs[3]
    assert total == unit_kernel(G, 1, m)


def test_characters_need_gaussian_roots():
    m = metric_for("cyclic:3")
    with pytest.raises(ChernError):
        cyclic_characters(m.group)


def test_kernel_json_roundtrip(z2):
    G, m = z2
    p = IdempotentPair(MatrixKernel(G, 2, {0: [[HALF, QI(0, 1)], [0, 0]], 1: [[1, 0], [0, QI(-1, 2)]]}, m),
                       [[1, 0], [0, 0]])
    obj = pair_to_json(p)
    assert obj["terms"][1]["matrix"][1][1] == "-1+2*i"
    back = pair_from_json(obj, metric=m)
    assert back.q == p.q and back.q0 == p.q0


def test_trivial_group_kernel_has_zero_propagation():
    G = trivial_group()
    m = metric_for("cyclic:1")
    assert propagation(unit_kernel(G, 1, m), m) == 0


def test_chern_class_json(z2_pair):
    obj = chern_twisted(z2_pair, 0, 1).to_json()
    assert obj["kind"] == "twisted" and obj["components"]["0"]["theory"] == Theory.TWISTED_CYCLIC.value
