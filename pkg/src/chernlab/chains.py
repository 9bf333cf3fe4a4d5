"""Chain groups for the five theories and their boundary maps.

A :class:`ChainComplex` pairs a space with a theory. Basis keys are tuples of
(flattened) vertex indices:

* ``simplicial`` / ``invariant``: sorted vertex tuples (oriented simplices).
* ``cyclic``: least rotation of an ordered simplex, classes modulo
  ``[v0..vk] = (-1)^k [vk, v0..v(k-1)]``.
* ``ordered_reduced``: ordered simplices; in odd degree the constant tuples
  are quotiented out.
* ``twisted_cyclic``: as ``cyclic`` but the wrapped vertex is moved by the
  twist ``(g, v) -> (g, g v)`` of a :class:`TwistedSpace`.

Equivariant complexes hold Γ-invariant chains. A :class:`Chain` always stores
its full canonical expansion; orbit coordinates are derived on demand.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from .complexes import ComplexError, SimplicialComplex, TwistedSpace
from .scalars import format_scalar, parse_scalar, simplify


class Theory(str, Enum):
    SIMPLICIAL = "simplicial"
    INVARIANT = "invariant"
    CYCLIC = "cyclic"
    ORDERED_REDUCED = "ordered_reduced"
    TWISTED_CYCLIC = "twisted_cyclic"


_DEFAULT_EQUIVARIANT = {
    Theory.SIMPLICIAL: False,
    Theory.INVARIANT: True,
    Theory.CYCLIC: False,
    Theory.ORDERED_REDUCED: True,
    Theory.TWISTED_CYCLIC: True,
}


class ChainError(ValueError):
    pass


def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Orbit:
    """Γ-orbit of a basis key; ``members[key]`` is the sign of key in the orbit sum."""

    rep: tuple
    members: Mapping[tuple, int]


class ChainComplexBase:
    """Shared machinery: orbits, coordinates and chain construction."""

    theory: str
    group = None
    equivariant: bool = False

    def basis(self, k: int) -> list:
        raise NotImplementedError

    def boundary_key(self, key) -> dict:
        raise NotImplementedError

    def act_key(self, gamma: int, key):
        raise NotImplementedError

    def require_degree(self, k: int) -> None:
        pass

    def orbits(self, k: int) -> list[Orbit]:
        """Orbit basis of the invariant chains in degree k (forced-zero orbits dropped)."""
        cache = self.__dict__.setdefault("_orbit_cache", {})
        if k in cache:
            return cache[k]
        out = []
        if self.group is None or not self.equivariant:
            out = [Orbit(b, {b: 1}) for b in self.basis(k)]
        else:
            seen = set()
            for key in self.basis(k):
                if key in seen:
                    continue
                members, dead = {}, False
                for gamma in self.group.elements():
                    image = self.act_key(gamma, key)
                    if image is None:
                        dead = True
                        continue
                    k2, s = image
                    if members.setdefault(k2, s) != s:
                        dead = True
                seen.update(members)
                if not dead:
                    out.append(Orbit(key, members))
        cache[k] = out
        return out

    def coordinate_basis(self, k: int) -> list:
        """Keys indexing coordinates in degree k (orbit reps when equivariant)."""
        if self.equivariant and self.group is not None:
            return [o.rep for o in self.orbits(k)]
        return list(self.basis(k))

    def basis_chains(self, k: int) -> list[Chain]:
        return [Chain(self, k, dict(o.members)) for o in self.orbits(k)]

    def chain(self, terms, degree: int | None = None) -> Chain:
        """Build a chain from ``{ordering: coeff}`` or an iterable of pairs."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        deg = degree
        for ordering, c in items:
            ordering = tuple(ordering)
            if deg is None:
                deg = self.key_degree(ordering)
            canon = self.canonicalize(ordering)
            if canon is None or not c:
                continue
            key, s = canon
            acc[key] = acc.get(key, 0) + s * c
        if deg is None:
            raise ChainError("cannot infer the degree of an empty chain")
        return Chain(self, deg, acc)

    def zero(self, degree: int) -> Chain:
        return Chain(self, degree, {})

    def key_degree(self, key) -> int:
        return len(key) - 1

    def canonicalize(self, ordering):
        raise NotImplementedError

    def from_coordinates(self, k: int, vec: Mapping[int, object]) -> Chain:
        """Inverse of :meth:`Chain.coordinates`."""
        orbs = self.orbits(k)
        acc: dict = {}
        for i, c in vec.items():
            if c:
                for key, s in orbs[i].members.items():
                    acc[key] = acc.get(key, 0) + s * c
        return Chain(self, k, acc)

    def coordinate_index(self, k: int) -> dict:
        cache = self.__dict__.setdefault("_coord_index", {})
        if k not in cache:
            cache[k] = {key: i for i, key in enumerate(self.coordinate_basis(k))}
        return cache[k]

    def describe(self) -> str:
        return f"{self.theory}{'/Γ' if self.equivariant else ''}"


class ChainComplex(ChainComplexBase):
    """Chains of one theory on one space."""

    def __init__(self, space, theory: Theory | str, equivariant: bool | None = None):
        theory = Theory(theory)
        if isinstance(space, TwistedSpace):
            self.twisted_space = space
            self.complex: SimplicialComplex = space.complex
        elif isinstance(space, SimplicialComplex):
            self.twisted_space = None
            self.complex = space
        else:
            raise ChainError(f"unsupported space {space!r}")
        if theory is Theory.TWISTED_CYCLIC and self.twisted_space is None:
            raise ChainError("twisted_cyclic chains live on a TwistedSpace")
        if theory is Theory.INVARIANT and equivariant is False:
            raise ChainError("invariant chains are equivariant by definition")
        self.space = space
        self.theory = theory
        self.equivariant = _DEFAULT_EQUIVARIANT[theory] if equivariant is None else bool(equivariant)
        self.group = self.complex.group if self.complex.action is not None else None
        if theory is Theory.TWISTED_CYCLIC:
            self.twist = space.twist
            inv = [0] * len(self.twist)
            for i, j in enumerate(self.twist):
                inv[j] = i
            self.twist_inv = tuple(inv)
        else:
            self.twist = self.twist_inv = None
        self._tuples: dict[int, list] = {}
        self._classes: dict[int, dict] = {}

    def __repr__(self):
        return f"ChainComplex({self.describe()}, {self.complex!r})"

    @property
    def oriented(self) -> bool:
        return self.theory in (Theory.SIMPLICIAL, Theory.INVARIANT)

    @property
    def cyclic_like(self) -> bool:
        return self.theory in (Theory.CYCLIC, Theory.TWISTED_CYCLIC)

    def require_degree(self, k: int) -> None:
        self.complex.require_degree(k)

    def with_equivariance(self, equivariant: bool) -> ChainComplex:
        if self.theory in (Theory.SIMPLICIAL, Theory.INVARIANT):
            theory = Theory.INVARIANT if equivariant else Theory.SIMPLICIAL
            return get_chain_complex(self.space, theory)
        return get_chain_complex(self.space, self.theory, equivariant)

    # ordered simplices ------------------------------------------------

    def ordered_tuples(self, k: int) -> list[tuple[int, ...]]:
        """All (k+1)-tuples of vertices spanning a simplex, repetitions allowed."""
        if k in self._tuples:
            return self._tuples[k]
        cx = self.complex
        verts = cx.vertices
        ext: dict = {}
        out = []

        def extensions(S):
            if S not in ext:
                ext[S] = [w for w in verts if w in S or cx.has_simplex(S + (w,))]
            return ext[S]

        def rec(prefix, S):
            if len(prefix) == k + 1:
                out.append(prefix)
                return
            for w in extensions(S):
                rec(prefix + (w,), S if w in S else tuple(sorted(S + (w,))))

        if k >= 0:
            for v in verts:
                rec((v,), (v,))
        out.sort()
        self._tuples[k] = out
        return out

    def _class_table(self, k: int) -> dict:
        """Map each ordered k-simplex to (class rep, sign) or None for zero classes."""
        if k in self._classes:
            return self._classes[k]
        table: dict = {}
        flip = -1 if k % 2 else 1
        cx = self.complex
        tw = self.twist
        tw_inv = self.twist_inv
        for start in self.ordered_tuples(k):
            if start in table:
                continue
            sign = {start: 1}
            dead = False
            queue = deque([start])
            while queue:
                x = queue.popleft()
                if tw is None:
                    nbrs = [x[-1:] + x[:-1], x[1:] + x[:1]]
                else:
                    nbrs = [(tw[x[-1]],) + x[:-1], x[1:] + (tw_inv[x[0]],)]
                    nbrs = [y for y in nbrs if cx.has_simplex(y)]
                for y in nbrs:
                    s = flip * sign[x]
                    if y not in sign:
                        sign[y] = s
                        queue.append(y)
                    elif sign[y] != s:
                        dead = True
            if dead:
                for x in sign:
                    table[x] = None
            else:
                rep = min(sign)
                sr = sign[rep]
                for x, s in sign.items():
                    table[x] = (rep, s * sr)
        self._classes[k] = table
        return table

    # canonical forms --------------------------------------------------

    def to_flat(self, ordering, g: int | None = None) -> tuple[int, ...]:
        """Translate base-vertex orderings (with component g) to flat indices."""
        if g is None:
            return tuple(int(v) for v in ordering)
        if self.twisted_space is None:
            raise ChainError("component index given for an untwisted space")
        try:
            return tuple(self.twisted_space.vertex(g, int(v)) for v in ordering)
        except KeyError:
            raise ChainError(f"ordering {ordering!r} is not in component {g}") from None

    def canonicalize(self, ordering, g: int | None = None):
        """Return ``(key, sign)`` with ``[ordering] = sign * [key]``, or None for zero."""
        x = self.to_flat(ordering, g)
        k = len(x) - 1
        if k < 0:
            raise ChainError("empty ordering")
        if not self.complex.has_simplex(x):
            raise ChainError(f"ordering {x!r} does not lie in a simplex")
        if self.oriented:
            if len(set(x)) != len(x):
                return None
            return tuple(sorted(x)), permutation_sign(x)
        if self.theory is Theory.ORDERED_REDUCED:
            if k % 2 and len(set(x)) == 1:
                return None
            return x, 1
        return self._class_table(k)[x]

    def basis(self, k: int) -> list:
        if k < 0:
            return []
        if self.oriented:
            return list(self.complex.simplices(k))
        if self.theory is Theory.ORDERED_REDUCED:
            tuples = self.ordered_tuples(k)
            if k % 2:
                return [x for x in tuples if len(set(x)) > 1]
            return list(tuples)
        cache = self.__dict__.setdefault("_basis_cache", {})
        if k not in cache:
            table = self._class_table(k)
            cache[k] = sorted({v[0] for v in table.values() if v is not None})
        return cache[k]

    def boundary_key(self, key) -> dict:
        k = len(key) - 1
        out: dict = {}
        if k == 0:
            return out
        for i in range(k + 1):
            face = key[:i] + key[i + 1:]
            canon = self.canonicalize(face)
            if canon is None:
                continue
            fk, s = canon
            c = out.get(fk, 0) + (s if i % 2 == 0 else -s)
            if c:
                out[fk] = c
            else:
                out.pop(fk, None)
        return out

    def act_key(self, gamma: int, key):
        p = self.complex.action[gamma]
        return self.canonicalize(tuple(p[v] for v in key))

    def key_to_base(self, key) -> tuple[int | None, tuple[int, ...]]:
        if self.twisted_space is None:
            return None, tuple(key)
        ts = self.twisted_space
        return ts.component_of(key[0]), tuple(ts.base_vertex(v) for v in key)


def get_chain_complex(space, theory: Theory | str, equivariant: bool | None = None) -> ChainComplex:
    """Cached :class:`ChainComplex` for ``(space, theory, equivariant)``."""
    theory = Theory(theory)
    eq = _DEFAULT_EQUIVARIANT[theory] if equivariant is None else bool(equivariant)
    cache = space.__dict__.setdefault("_chain_complexes", {})
    if (theory, eq) not in cache:
        cache[(theory, eq)] = ChainComplex(space, theory, eq)
    return cache[(theory, eq)]


def _add_into(acc: dict, other: Mapping, scale=1) -> None:
    for k, v in other.items():
        c = acc.get(k, 0) + scale * v
        if c:
            acc[k] = c
        else:
            acc.pop(k, None)


class Chain:
    """An immutable chain: canonical key -> nonzero coefficient."""

    __slots__ = ("space", "degree", "coeffs")

    def __init__(self, space: ChainComplexBase, degree: int, coeffs: Mapping):
        self.space = space
        self.degree = degree
        self.coeffs = {k: simplify(v) for k, v in coeffs.items() if v}

    @property
    def theory(self):
        return self.space.theory

    def __repr__(self):
        body = " + ".join(f"{format_scalar(c)}*{list(k)}" for k, c in sorted(self.coeffs.items()))
        return f"Chain<{self.space.describe()}, deg {self.degree}>({body or '0'})"

    def _compatible(self, other: Chain) -> None:
        if not isinstance(other, Chain):
            raise TypeError("expected a Chain")
        if other.space is not self.space or other.degree != self.degree:
            raise ChainError("chains from different theories or degrees")

    def __add__(self, other: Chain) -> Chain:
        self._compatible(other)
        acc = dict(self.coeffs)
        _add_into(acc, other.coeffs)
        return Chain(self.space, self.degree, acc)

    def __sub__(self, other: Chain) -> Chain:
        self._compatible(other)
        acc = dict(self.coeffs)
        _add_into(acc, other.coeffs, -1)
        return Chain(self.space, self.degree, acc)

    def __neg__(self) -> Chain:
        return Chain(self.space, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __mul__(self, scalar) -> Chain:
        return Chain(self.space, self.degree, {k: scalar * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return chain_equal(self, other)

    __hash__ = None

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def boundary(self) -> Chain:
        return boundary(self)

    def act(self, gamma: int) -> Chain:
        acc: dict = {}
        for key, c in self.coeffs.items():
            image = self.space.act_key(gamma, key)
            if image is not None:
                k2, s = image
                _add_into(acc, {k2: s * c})
        return Chain(self.space, self.degree, acc)

    def is_invariant(self) -> bool:
        group = self.space.group
        if group is None:
            return True
        return all(self.act(g) == self for g in group.elements())

    def coordinates(self) -> dict[int, object]:
        """Sparse coordinates in the space's (orbit) basis."""
        index = self.space.coordinate_index(self.degree)
        out = {}
        for key, c in self.coeffs.items():
            if key in index:
                out[index[key]] = c
        return out

    def terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.coeffs.items())

    def transport(self, space: ChainComplexBase) -> Chain:
        """Re-express the chain in another complex sharing its vertex labels."""
        return space.chain(self.coeffs.items(), self.degree)


def boundary(chain: Chain) -> Chain:
    """Alternating face map, re-canonicalized; degree 0 maps to the zero chain in degree -1."""
    acc: dict = {}
    if chain.degree > 0:
        for key, c in chain.coeffs.items():
            _add_into(acc, chain.space.boundary_key(key), c)
    return Chain(chain.space, chain.degree - 1, acc)


def chain_equal(a: Chain, b: Chain) -> bool:
    if not isinstance(a, Chain) or not isinstance(b, Chain):
        return NotImplemented
    if a.space.theory != b.space.theory or a.degree != b.degree:
        raise ChainError("chain_equal needs chains of the same theory and degree")
    if a.space is not b.space:
        return False
    return a.coeffs == b.coeffs


def invariant_projection(chain: Chain) -> Chain:
    """Average over the group; the result lives in the equivariant version of the theory."""
    src = chain.space
    group = src.group
    if group is None:
        raise ChainError("the underlying complex carries no group action")
    target = src.with_equivariance(True) if isinstance(src, ChainComplex) else src
    acc: dict = {}
    for g in group.elements():
        _add_into(acc, chain.act(g).coeffs, Fraction(1, group.order))
    return Chain(target, chain.degree, acc)


def random_chain(cx: ChainComplexBase, k: int, rng, density: float = 0.5, span: int = 3) -> Chain:
    """Random integer chain; invariant complexes get a random orbit combination."""
    if cx.equivariant and cx.group is not None:
        vec = {i: rng.randint(-span, span) for i in range(len(cx.orbits(k))) if rng.random() < density}
        return cx.from_coordinates(k, vec)
    coeffs = {b: rng.randint(-span, span) for b in cx.basis(k) if rng.random() < density}
    return Chain(cx, k, coeffs)


# JSON --------------------------------------------------------------------


def chain_to_json(chain: Chain) -> dict:
    cx = chain.space
    terms = []
    for key, c in chain.terms():
        entry: dict = {}
        if isinstance(cx, ChainComplex):
            g, simplex = cx.key_to_base(key)
            if g is not None:
                entry["g"] = g
            entry["simplex"] = list(simplex)
        else:
            entry["simplex"] = [list(k) if isinstance(k, tuple) else k for k in key]
        entry["coeff"] = format_scalar(c)
        terms.append(entry)
    return {"theory": str(cx.theory.value if isinstance(cx.theory, Theory) else cx.theory),
            "equivariant": cx.equivariant, "degree": chain.degree, "terms": terms}


def chain_from_json(obj: Mapping, space) -> Chain:
    cx = get_chain_complex(space, obj["theory"], obj.get("equivariant"))
    acc: dict = {}
    for t in obj["terms"]:
        canon = cx.canonicalize(t["simplex"], t.get("g"))
        if canon is None:
            continue
        key, s = canon
        _add_into(acc, {key: s * parse_scalar(t["coeff"])})
    return Chain(cx, obj["degree"], acc)


def theories() -> Iterable[Theory]:
    return list(Theory)


__all__ = [
    "Chain", "ChainComplex", "ChainComplexBase", "ChainError", "ComplexError", "Orbit", "Theory",
    "boundary", "chain_equal", "chain_from_json", "chain_to_json", "get_chain_complex",
    "invariant_projection", "permutation_sign", "random_chain",
]
