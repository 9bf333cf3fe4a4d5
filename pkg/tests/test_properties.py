"""Randomized invariants: ∂² = 0, projection/boundary commutation, canonical forms, map equivariance."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st
from support import metric_for, rips_for

from chernlab import chain_maps as cm
from chernlab.chains import (Chain, Theory, get_chain_complex, invariant_projection, permutation_sign,
                             random_chain)
from chernlab.chern import (IdempotentPair, MatrixKernel, averaging_idempotent, block_sum,
                            chern_class_compare, chern_torsion_free, chern_twisted, conjugate_pair,
                            convolve, is_idempotent_pair, propagation, random_invertible,
                            support_diameter)
from chernlab.complexes import build_twisted_space
from chernlab.homology import assemble_boundary
from chernlab.linalg import rank
from chernlab.scalars import QI

SETTINGS = settings(max_examples=25, deadline=None)
SPECS = ["cyclic:3", "cyclic:4", "cyclic:5", "sym:3", "product:[cyclic:2,cyclic:2]"]

spaces = st.tuples(st.sampled_from(SPECS), st.integers(0, 2), st.integers(0, 2**32 - 1))


def _complex(theory, spec, d):
    X = rips_for(spec, d, 3)
    if theory is Theory.TWISTED_CYCLIC:
        return get_chain_complex(build_twisted_space(X, d), theory)
    return get_chain_complex(X, theory)


@SETTINGS
@given(spaces, st.sampled_from(list(Theory)), st.integers(1, 3))
def test_boundary_squared_on_random_chains(space, theory, k):
    spec, d, seed = space
    cx = _complex(theory, spec, d)
    z = random_chain(cx, k, random.Random(seed))
    assert z.boundary().boundary().is_zero()


@SETTINGS
@given(spaces, st.sampled_from([Theory.SIMPLICIAL, Theory.CYCLIC, Theory.ORDERED_REDUCED]), st.integers(1, 3))
def test_projection_commutes_with_boundary(space, theory, k):
    spec, d, seed = space
    cx = get_chain_complex(rips_for(spec, d, 3), theory, False)
    z = random_chain(cx, k, random.Random(seed))
    assert invariant_projection(z).boundary() == invariant_projection(z.boundary())
    p = invariant_projection(z)
    assert invariant_projection(p.transport(cx)) == p


@SETTINGS
@given(spaces, st.sampled_from(list(Theory)), st.integers(0, 3), st.data())
def test_canonical_form_is_consistent(space, theory, k, data):
    spec, d, _ = space
    cx = _complex(theory, spec, d)
    tuples = cx.ordered_tuples(k)
    t = data.draw(st.sampled_from(tuples))
    canon = cx.canonicalize(t)
    if canon is None:
        return
    key, sign = canon
    assert cx.canonicalize(key) == (key, 1)
    if cx.cyclic_like:
        # one (twisted) rotation changes the sign by (-1)^k
        tw = cx.twist or tuple(range(cx.complex.vertex_count))
        rotated = (tw[t[-1]],) + t[:-1]
        assert cx.canonicalize(rotated) == (key, sign * (-1) ** k)
    elif cx.oriented:
        perm = data.draw(st.permutations(range(k + 1)))
        shuffled = tuple(t[i] for i in perm)
        assert cx.canonicalize(shuffled) == (key, sign * permutation_sign(perm))


@SETTINGS
@given(spaces, st.sampled_from(["chi", "phi_diag", "phi_drop2", "psi"]), st.integers(0, 3))
def test_comparison_maps_are_equivariant(space, name, k):
    spec, d, seed = space
    X = rips_for(spec, d, 3)
    f = getattr(cm, name)(X, equivariant=False)
    rng = random.Random(seed)
    z = random_chain(f.source, k, rng)
    gamma = rng.randrange(X.group.order)
    assert f(z.act(gamma)) == f(z).act(gamma)
    assert f(z).boundary() == f(z.boundary())


@SETTINGS
@given(spaces, st.sampled_from(list(Theory)), st.integers(1, 3))
def test_rank_independent_of_basis_order(space, theory, k):
    spec, d, seed = space
    cx = _complex(theory, spec, d)
    m = assemble_boundary(cx, k)
    rng = random.Random(seed)
    rows = list(range(len(m.rows)))
    rng.shuffle(rows)
    cols = list(m.columns)
    rng.shuffle(cols)
    shuffled = [{rows[i]: v for i, v in c.items()} for c in cols]
    assert rank(shuffled) == rank(m.columns)


def _random_kernel(group, m, rng, support):
    return MatrixKernel(group, m, {
        g: [[QI(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(m)] for _ in range(m)]
        for g in support})


@SETTINGS
@given(st.sampled_from(SPECS), st.integers(0, 2**32 - 1))
def test_convolution_associative(spec, seed):
    G = metric_for(spec).group
    rng = random.Random(seed)
    a, b, c = (_random_kernel(G, 2, rng, rng.sample(range(G.order), 2)) for _ in range(3))
    assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["cyclic:2", "cyclic:3", "sym:3"]), st.integers(0, 2**32 - 1), st.sampled_from([0, 2]))
def test_conjugates_keep_class_cycle_and_locality(spec, seed, n):
    m = metric_for(spec)
    p = IdempotentPair(averaging_idempotent(m.group, m))
    p2 = block_sum(p, IdempotentPair(MatrixKernel(m.group, 1, {}, m)))
    pc = conjugate_pair(p2, random_invertible(2, random.Random(seed)))
    assert is_idempotent_pair(pc)
    d = (n + 1) * propagation(pc.q)
    for f in (chern_torsion_free, chern_twisted):
        c, cc = f(p2, n, d), f(pc, n, d)
        assert support_diameter(cc) <= d
        assert all(comp.degree == 0 or not comp.boundary() for comp in cc.components.values())
        assert chern_class_compare(c, cc)


def test_random_chain_respects_equivariance():
    X = rips_for("sym:3", 1, 3)
    cx = get_chain_complex(X, Theory.INVARIANT)
    z = random_chain(cx, 1, random.Random(1))
    assert isinstance(z, Chain) and z.is_invariant()
