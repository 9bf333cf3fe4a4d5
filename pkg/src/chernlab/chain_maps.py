"""Comparison maps between the chain theories, and a chain-map checker.

Covers the ordered-to-cyclic map, the collapse maps from ordered chains to
oriented chains and their direct sum, the quotient of twisted chains by
coordinatewise powers of g, and the averaging map back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .chains import (Chain, ChainComplex, ChainComplexBase, ChainError, Orbit, Theory,
                     _add_into, chain_to_json, get_chain_complex)
from .complexes import SimplicialComplex, TwistedSpace, build_power_quotient, build_rips, build_twisted_space
from .homology import HomologyResult, homology
from .linalg import Echelon


class ChainMap:
    """A linear map of chain complexes given on basis keys.

    ``key_image(key)`` returns a dict of target keys (already canonical) to
    coefficients; a source chain of degree k lands in degree ``k + shift``.
    """

    def __init__(self, name: str, source: ChainComplexBase, target: ChainComplexBase,
                 key_image: Callable[[tuple], dict], shift: int = 0):
        self.name = name
        self.source = source
        self.target = target
        self.shift = shift
        self._key_image = key_image
        self._cache: dict = {}

    def __repr__(self):
        return f"ChainMap({self.name}: {self.source.describe()} -> {self.target.describe()}, shift={self.shift})"

    def image_key(self, key) -> dict:
        if key not in self._cache:
            self._cache[key] = {k: v for k, v in self._key_image(key).items() if v}
        return self._cache[key]

    def __call__(self, chain: Chain) -> Chain:
        if chain.space is not self.source:
            raise ChainError(f"{self.name} expects chains of {self.source.describe()}")
        acc: dict = {}
        for key, c in chain.coeffs.items():
            _add_into(acc, self.image_key(key), c)
        return Chain(self.target, chain.degree + self.shift, acc)

    def matrix(self, k: int) -> list[dict]:
        """Columns: images of the source coordinate basis in target coordinates."""
        return [self(z).coordinates() for z in self.source.basis_chains(k)]

    def compose(self, other: ChainMap) -> ChainMap:
        """self ∘ other."""
        if other.target is not self.source:
            raise ChainError("cannot compose: target/source mismatch")

        def image(key):
            acc: dict = {}
            for k2, c in other.image_key(key).items():
                _add_into(acc, self.image_key(k2), c)
            return acc

        return ChainMap(f"{self.name}∘{other.name}", other.source, self.target, image,
                        self.shift + other.shift)


# verification -------------------------------------------------------------


@dataclass
class DegreeCheck:
    degree: int
    passed: bool
    checked: int
    witness: Chain | None = None
    discrepancy: Chain | None = None

    def to_json(self) -> dict:
        out = {"degree": self.degree, "passed": self.passed, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = chain_to_json(self.witness)
            out["discrepancy"] = chain_to_json(self.discrepancy)
        return out


@dataclass
class ChainMapReport:
    name: str
    degrees: list[DegreeCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(d.passed for d in self.degrees)

    def to_json(self) -> dict:
        return {"map": self.name, "passed": self.passed, "degrees": [d.to_json() for d in self.degrees]}


def verify_chain_map(f: ChainMap, degrees) -> ChainMapReport:
    """Check ∂f = f∂ exactly on every source basis element of each degree."""
    report = ChainMapReport(f.name)
    for k in degrees:
        checked = 0
        result = DegreeCheck(k, True, 0)
        for key in f.source.basis(k):
            z = Chain(f.source, k, {key: 1})
            lhs = f(z).boundary()
            rhs = f(z.boundary())
            checked += 1
            if lhs.coeffs != rhs.coeffs:
                diff = Chain(f.target, lhs.degree, lhs.coeffs)
                _add_into(diff.coeffs, rhs.coeffs, -1)
                result = DegreeCheck(k, False, checked, z, Chain(f.target, lhs.degree, diff.coeffs))
                break
        else:
            result = DegreeCheck(k, True, checked)
        report.degrees.append(result)
    return report


# direct sums ---------------------------------------------------------------


class ShiftedSum(ChainComplexBase):
    """⊕_{j>=0} C[2j]: degree n holds C_n ⊕ C_{n-2} ⊕ ...; keys are (j, key)."""

    def __init__(self, base: ChainComplex):
        self.base = base
        self.theory = f"sum({base.describe()})"
        self.group = base.group
        self.equivariant = base.equivariant

    def describe(self) -> str:
        return self.theory

    def require_degree(self, k: int) -> None:
        self.base.require_degree(k)

    def key_degree(self, key) -> int:
        j, inner = key
        return len(inner) - 1 + 2 * j

    def basis(self, k: int) -> list:
        return [(j, b) for j in range(k // 2 + 1) for b in self.base.basis(k - 2 * j)]

    def orbits(self, k: int) -> list[Orbit]:
        cache = self.__dict__.setdefault("_orbit_cache", {})
        if k not in cache:
            cache[k] = [Orbit((j, o.rep), {(j, m): s for m, s in o.members.items()})
                        for j in range(k // 2 + 1) for o in self.base.orbits(k - 2 * j)]
        return cache[k]

    def canonicalize(self, key):
        j, inner = key
        canon = self.base.canonicalize(inner)
        if canon is None:
            return None
        return (j, canon[0]), canon[1]

    def boundary_key(self, key) -> dict:
        j, inner = key
        return {(j, k2): c for k2, c in self.base.boundary_key(inner).items()}

    def act_key(self, gamma: int, key):
        j, inner = key
        image = self.base.act_key(gamma, inner)
        if image is None:
            return None
        return (j, image[0]), image[1]

    def component(self, chain: Chain, j: int) -> Chain:
        """The C_{n-2j} summand of a chain in degree n."""
        return Chain(self.base, chain.degree - 2 * j,
                     {inner: c for (jj, inner), c in chain.coeffs.items() if jj == j})


# ordered -> cyclic / oriented -------------------------------------------


def _ordered_source(space, equivariant: bool = True) -> ChainComplex:
    return get_chain_complex(space, Theory.ORDERED_REDUCED, equivariant)


def _oriented_target(space, equivariant: bool) -> ChainComplex:
    return get_chain_complex(space, Theory.INVARIANT if equivariant else Theory.SIMPLICIAL)


def _single(canon) -> dict:
    return {} if canon is None else {canon[0]: canon[1]}


def chi(space, equivariant: bool = True) -> ChainMap:
    """(v0..vk) ↦ [v0..vk]_λ."""
    src = _ordered_source(space, equivariant)
    tgt = get_chain_complex(space, Theory.CYCLIC, equivariant)
    return ChainMap("chi", src, tgt, lambda key: _single(tgt.canonicalize(key)))


def collapse_smallest_pair(t: tuple):
    """Drop the lexicographically smallest repeated pair (i, j).

    Returns ``(shorter tuple, (-1)**(j-i+1))`` or None when all entries differ.
    """
    n = len(t)
    for i in range(n):
        for j in range(i + 1, n):
            if t[i] == t[j]:
                return t[:i] + t[i + 1:j] + t[j + 1:], (-1) ** (j - i + 1)
    return None


def iterated_collapse(t: tuple, times: int):
    sign = 1
    for _ in range(times):
        step = collapse_smallest_pair(t)
        if step is None:
            return None
        t, s = step
        sign *= s
    return t, sign


def phi(space, drop: int, equivariant: bool = True) -> ChainMap:
    """Ordered chains to oriented chains of degree k - 2*drop (collapse ``drop`` times)."""
    if drop < 0:
        raise ValueError("drop must be non-negative")
    src = _ordered_source(space, equivariant)
    tgt = _oriented_target(space, equivariant)

    def image(key):
        if len(key) - 1 - 2 * drop < 0:
            return {}
        step = iterated_collapse(key, drop)
        if step is None:
            return {}
        t, sign = step
        canon = tgt.canonicalize(t)
        return {} if canon is None else {canon[0]: sign * canon[1]}

    return ChainMap(f"phi[-{2 * drop}]", src, tgt, image, shift=-2 * drop)


def phi_diag(space, equivariant: bool = True) -> ChainMap:
    return phi(space, 0, equivariant)


def phi_drop2(space, equivariant: bool = True) -> ChainMap:
    return phi(space, 1, equivariant)


def phi_general(space, k: int, l: int, equivariant: bool = True) -> ChainMap:
    if l < 0 or l > k or (k - l) % 2:
        raise ValueError(f"phi_{k},{l} needs 0 <= l <= k with k - l even")
    return phi(space, (k - l) // 2, equivariant)


def psi(space, equivariant: bool = True) -> ChainMap:
    """⊕_j phi with drop j, landing in the shifted sum ⊕_j C_{n-2j}."""
    src = _ordered_source(space, equivariant)
    tgt_base = _oriented_target(space, equivariant)
    cache = tgt_base.__dict__.setdefault("_shifted_sum", None)
    if cache is None:
        cache = tgt_base.__dict__["_shifted_sum"] = ShiftedSum(tgt_base)
    target = cache
    parts = {}

    def image(key):
        out = {}
        k = len(key) - 1
        for j in range(k // 2 + 1):
            if j not in parts:
                parts[j] = phi(space, j, equivariant)
            for inner, c in parts[j].image_key(key).items():
                out[(j, inner)] = c
        return out

    return ChainMap("psi", src, target, image)


# twisted quotient and averaging ---------------------------------------------


def quotient_map(T: TwistedSpace, Q: TwistedSpace | None = None) -> ChainMap:
    """Twisted cyclic chains of X̂_r to cyclic chains of the <g>-orbit quotient."""
    Q = Q or build_power_quotient(T)
    src = get_chain_complex(T, Theory.TWISTED_CYCLIC)
    tgt = get_chain_complex(Q, Theory.TWISTED_CYCLIC)
    X, group = T.base, T.group
    from .complexes import power_orbit_rep
    vmap = []
    for g, v in T.pairs:
        vmap.append(Q.vertex(g, power_orbit_rep(group, X, g, v)))

    def image(key):
        return _single(tgt.canonicalize(tuple(vmap[v] for v in key)))

    return ChainMap("quotient", src, tgt, image)


def quotient_by_power_translation(chain: Chain, Q: TwistedSpace | None = None) -> Chain:
    T = chain.space.twisted_space
    if T is None or chain.space.theory is not Theory.TWISTED_CYCLIC:
        raise ChainError("expected a twisted cyclic chain")
    cache = T.__dict__.setdefault("_quotient_map", {})
    if id(Q) not in cache:
        cache[id(Q)] = quotient_map(T, Q)
    return cache[id(Q)](chain)


def averaging_scale(T: TwistedSpace):
    """Smallest Rips scale containing every coordinatewise <g>-translate of X_{g,r}'s simplices."""
    X, group = T.base, T.group
    best = 0
    for g, sub in T.components:
        orbit = {}
        for v in sub.vertices:
            orb, w = [v], X.action[g][v]
            while w != v:
                orb.append(w)
                w = X.action[g][w]
            orbit[v] = orb
        for s in sub.simplices(1):
            u, w = s
            for a in orbit[u]:
                for b in orbit[w]:
                    best = max(best, X.vertex_metric[a, b])
        for v in sub.vertices:
            for a in orbit[v]:
                for b in orbit[v]:
                    best = max(best, X.vertex_metric[a, b])
    return Fraction(best)


def enlarge_rips(X: SimplicialComplex, d, max_dim: int | None = None) -> SimplicialComplex:
    """Rips complex of the same group and metric at scale d."""
    from .groups import WordMetric
    import numpy as np
    group = X.group
    metric = WordMetric(group, np.asarray(X.vertex_metric, dtype=np.int64))
    if max_dim is None:
        max_dim = X.complete_through if X.complete_through != math.inf else group.order - 1
    return build_rips(group, metric, d, max_dim)


def averaging_target(T: TwistedSpace, rips_scale) -> TwistedSpace:
    """T itself when the averaged simplices fit at ``rips_scale``, else X̂_r of a larger Rips complex."""
    need = averaging_scale(T)
    if need <= Fraction(rips_scale):
        return T
    return build_twisted_space(enlarge_rips(T.base, need), T.r)


def averaging_psi(Q: TwistedSpace, target: TwistedSpace) -> ChainMap:
    """(g, [[v0]..[vk]]) ↦ (g, n_g^-(k+1) Σ_{i0..ik} [g^i0 v0, ..., g^ik vk]_{λ,g})."""
    src = get_chain_complex(Q, Theory.TWISTED_CYCLIC)
    tgt = get_chain_complex(target, Theory.TWISTED_CYCLIC)
    X, group = target.base, target.group
    powers: dict = {}

    def orbit(g, v):
        if (g, v) not in powers:
            n = group.element_order(g)
            seq, w = [], v
            for _ in range(n):
                w = X.action[g][w]
                seq.append(w)  # g^1 v, ..., g^n v
            powers[(g, v)] = seq
        return powers[(g, v)]

    def image(key):
        g = Q.component_of(key[0])
        base = [Q.base_vertex(v) for v in key]
        n = group.element_order(g)
        weight = Fraction(1, n ** len(key))
        acc: dict = {}
        choices = [orbit(g, v) for v in base]

        def rec(i, prefix):
            if i == len(choices):
                canon = tgt.canonicalize(prefix, g)
                if canon is not None:
                    _add_into(acc, {canon[0]: canon[1] * weight})
                return
            for w in choices[i]:
                rec(i + 1, prefix + (w,))

        rec(0, ())
        return acc

    return ChainMap("averaging", src, tgt, image)


def inclusion(source: ChainComplex, target: ChainComplex) -> ChainMap:
    """Identity on vertex labels; for X̂_r ⊂ X̂'_r the labels are translated via (g, v)."""
    if source.twisted_space is not None:
        S, T = source.twisted_space, target.twisted_space

        def image(key):
            return _single(target.canonicalize(tuple(T.vertex(*S.pairs[v]) for v in key)))
    else:
        def image(key):
            return _single(target.canonicalize(key))

    return ChainMap("inclusion", source, target, image)


# induced maps on homology -------------------------------------------------


def induced_matrix(f: ChainMap, source: HomologyResult, target: HomologyResult) -> list[list]:
    """Matrix of f_* in the cycle bases; entry [i][j] is the i-th coordinate of f(z_j)."""
    if source.complex is not f.source or target.complex is not f.target:
        raise ChainError("homology results do not match the map's complexes")
    cols = [target.coordinates(f(z)) for z in source.cycle_basis]
    return [[cols[j][i] for j in range(len(cols))] for i in range(target.betti)]


def matrix_rank(mat: list[list]) -> int:
    ech = Echelon()
    for row in mat:
        ech.add({j: v for j, v in enumerate(row) if v})
    return ech.rank


def is_isomorphism(mat: list[list], source_dim: int, target_dim: int) -> bool:
    return source_dim == target_dim and matrix_rank(mat) == source_dim


def induces_isomorphism(f: ChainMap, degree: int) -> tuple[bool, list[list], int, int]:
    src = homology(f.source, degree)
    tgt = homology(f.target, degree + f.shift)
    mat = induced_matrix(f, src, tgt)
    return is_isomorphism(mat, src.betti, tgt.betti), mat, src.betti, tgt.betti
