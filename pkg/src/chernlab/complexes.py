"""Rips complexes, the subcomplexes X_{g,r} and the twisted spaces built from them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .groups import FiniteGroup, WordMetric, group_from_json, group_to_json

DEFAULT_MAX_DIM = 4
GLOBAL_DIM_CAP = 8


class ComplexError(ValueError):
    pass


class SimplicialComplex:
    """A finite simplicial complex with sorted-tuple simplices.

    ``complete_through`` is the largest dimension up to which the simplex list is
    exhaustive; it is finite only for complexes truncated by ``max_dim``.
    ``action[g]`` is the vertex permutation of group element ``g``.
    """

    def __init__(self, vertex_count: int, simplices, *, vertex_metric=None,
                 group: FiniteGroup | None = None, action=None,
                 complete_through=math.inf, close: bool = True):
        self.vertex_count = int(vertex_count)
        found = {tuple(sorted(s)) for s in simplices}
        for s in found:
            if len(set(s)) != len(s) or not s:
                raise ComplexError(f"bad simplex {s!r}")
            if s[0] < 0 or s[-1] >= self.vertex_count:
                raise ComplexError(f"simplex {s!r} uses an unknown vertex")
        if close:
            for s in list(found):
                for k in range(1, len(s)):
                    found.update(itertools.combinations(s, k))
        else:
            for s in found:
                if len(s) > 1 and any(f not in found for f in itertools.combinations(s, len(s) - 1)):
                    raise ComplexError(f"complex is not closed under faces at {s!r}")
        top = max((len(s) for s in found), default=0)
        self.simplices_by_dim: list[list[tuple[int, ...]]] = [[] for _ in range(top)]
        for s in found:
            self.simplices_by_dim[len(s) - 1].append(s)
        for layer in self.simplices_by_dim:
            layer.sort()
        self._simplex_set = frozenset(found)
        self.complete_through = complete_through
        self.vertex_metric = None if vertex_metric is None else np.asarray(vertex_metric, dtype=object)
        self.group = group
        self.action = None
        if action is not None:
            if group is None:
                raise ComplexError("an action needs a group")
            self.action = tuple(tuple(int(v) for v in p) for p in action)
            if len(self.action) != group.order:
                raise ComplexError("action needs one vertex permutation per group element")
            for g, p in enumerate(self.action):
                if sorted(p) != list(range(self.vertex_count)):
                    raise ComplexError(f"action of element {g} is not a permutation")
            for s in found:
                for p in self.action:
                    if tuple(sorted(p[v] for v in s)) not in self._simplex_set:
                        raise ComplexError("group action does not map simplices to simplices")

    def __repr__(self):
        counts = [len(layer) for layer in self.simplices_by_dim]
        return f"SimplicialComplex(vertex_count={self.vertex_count}, f_vector={counts})"

    @property
    def dimension(self) -> int:
        return len(self.simplices_by_dim) - 1

    def simplices(self, k: int) -> list[tuple[int, ...]]:
        if 0 <= k < len(self.simplices_by_dim):
            return self.simplices_by_dim[k]
        return []

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices(0)]

    @property
    def f_vector(self) -> list[int]:
        return [len(layer) for layer in self.simplices_by_dim]

    def has_simplex(self, vertices) -> bool:
        return tuple(sorted(set(vertices))) in self._simplex_set

    def all_simplices(self):
        return self._simplex_set

    def is_subcomplex_of(self, other: SimplicialComplex) -> bool:
        return self._simplex_set <= other._simplex_set

    def act(self, g: int, v: int) -> int:
        if self.action is None:
            raise ComplexError("complex carries no group action")
        return self.action[g][v]

    def act_simplex(self, g: int, simplex) -> tuple[int, ...]:
        return tuple(sorted(self.action[g][v] for v in simplex))

    def distance(self, u: int, v: int):
        if self.vertex_metric is None:
            raise ComplexError("complex carries no vertex metric")
        return self.vertex_metric[u, v]

    def require_degree(self, k: int) -> None:
        if k > self.complete_through:
            raise ComplexError(
                f"degree {k} exceeds the enumerated dimension cap {self.complete_through}")

    def __eq__(self, other):
        return (isinstance(other, SimplicialComplex)
                and self.vertex_count == other.vertex_count
                and self._simplex_set == other._simplex_set)

    def __hash__(self):
        return hash((self.vertex_count, self._simplex_set))

    @cached_property
    def trivial_action(self) -> bool:
        return self.action is None or all(p == tuple(range(self.vertex_count)) for p in self.action)


def _cliques(vertex_count: int, adjacent, max_dim: int):
    """Enumerate cliques of size <= max_dim+2; report whether the top size is empty."""
    layers = [[(v,) for v in range(vertex_count)]]
    nbrs = [{w for w in range(v + 1, vertex_count) if adjacent(v, w)} for v in range(vertex_count)]
    for _ in range(max_dim + 1):
        nxt = []
        for s in layers[-1]:
            common = set.intersection(*(nbrs[v] for v in s)) if s else set()
            for w in sorted(common):
                if w > s[-1]:
                    nxt.append(s + (w,))
        layers.append(nxt)
        if not nxt:
            break
    overflow = len(layers) > max_dim + 1 and bool(layers[max_dim + 1])
    return [s for layer in layers[: max_dim + 1] for s in layer], overflow


def build_rips(group: FiniteGroup, metric: WordMetric, d, max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplex:
    """Rips complex P_d(group): a vertex set spans a simplex iff its diameter is <= d."""
    if max_dim < 0:
        raise ComplexError("max_dim must be non-negative")
    if max_dim > GLOBAL_DIM_CAP:
        raise ComplexError(f"max_dim {max_dim} exceeds the global cap {GLOBAL_DIM_CAP}")
    d = Fraction(d)
    if d < 0:
        raise ComplexError("Rips scale must be non-negative")
    dist = metric.distances
    simplices, overflow = _cliques(group.order, lambda u, v: dist[u, v] <= d, max_dim)
    action = [group.left_translation(g) for g in group.elements()]
    return SimplicialComplex(group.order, simplices, vertex_metric=dist.tolist(), group=group,
                             action=action, complete_through=max_dim if overflow else math.inf,
                             close=False)


def _require_metric_action(X: SimplicialComplex) -> None:
    if X.vertex_metric is None or X.action is None:
        raise ComplexError("X must carry both a vertex metric and a group action")


def build_fixed_subcomplex(X: SimplicialComplex, g: int, r) -> SimplicialComplex:
    """X_{g,r}: simplices all of whose vertices v satisfy d(v, g v) <= r."""
    _require_metric_action(X)
    r = Fraction(r)
    good = {v for v in X.vertices if X.vertex_metric[v, X.action[g][v]] <= r}
    kept = [s for s in X.all_simplices() if all(v in good for v in s)]
    return SimplicialComplex(X.vertex_count, kept, vertex_metric=X.vertex_metric,
                             complete_through=X.complete_through, close=False)


def _pointwise_fixed(X: SimplicialComplex, g: int) -> SimplicialComplex:
    if X.action is None:
        raise ComplexError("X must carry a group action")
    p = X.action[g]
    kept = [s for s in X.all_simplices() if all(p[v] == v for v in s)]
    return SimplicialComplex(X.vertex_count, kept, vertex_metric=X.vertex_metric,
                             complete_through=X.complete_through, close=False)


@dataclass(eq=False)
class TwistedSpace:
    """A subspace of Γ_fin × X, flattened into one complex with vertices (g, v).

    ``complex`` carries the diagonal action γ·(g, v) = (γgγ⁻¹, γv). ``twist`` is
    the vertex map (g, v) ↦ (g, g v) used by g-cyclic rotations; for
    power-quotient spaces it is the identity.
    """

    base: SimplicialComplex
    components: list[tuple[int, SimplicialComplex]]
    complex: SimplicialComplex
    pairs: list[tuple[int, int]]
    twist: tuple[int, ...]
    kind: str
    r: Fraction | None = None
    index: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def group(self) -> FiniteGroup:
        return self.base.group

    def component_of(self, vertex: int) -> int:
        return self.pairs[vertex][0]

    def base_vertex(self, vertex: int) -> int:
        return self.pairs[vertex][1]

    def vertex(self, g: int, v: int) -> int:
        return self.index[(g, v)]

    def component(self, g: int) -> SimplicialComplex | None:
        for h, sub in self.components:
            if h == g:
                return sub
        return None


def _flatten(base: SimplicialComplex, components, kind: str, r=None, vertex_rep=None) -> TwistedSpace:
    group = base.group
    rep = vertex_rep or (lambda g, v: v)
    pairs = sorted({(g, v) for g, sub in components for v in sub.vertices})
    index = {p: i for i, p in enumerate(pairs)}
    simplices = [tuple(index[(g, v)] for v in s) for g, sub in components for s in sub.all_simplices()]
    action = []
    for gamma in group.elements():
        perm = []
        for g, v in pairs:
            h = group.conjugate(gamma, g)
            perm.append(index[(h, rep(h, base.action[gamma][v]))])
        action.append(perm)
    if kind == "quotient":
        twist = tuple(range(len(pairs)))
    else:
        twist = tuple(index[(g, base.action[g][v])] for g, v in pairs)
    complete = min((sub.complete_through for _, sub in components), default=math.inf)
    flat = SimplicialComplex(len(pairs), simplices, group=group, action=action,
                             complete_through=complete, close=False)
    return TwistedSpace(base, list(components), flat, pairs, twist, kind,
                        None if r is None else Fraction(r), index)


def build_twisted_space(X: SimplicialComplex, r) -> TwistedSpace:
    """X̂_r = {(g, x) : x ∈ X_{g,r}}, one component per g with X_{g,r} nonempty."""
    _require_metric_action(X)
    comps = []
    for g in X.group.finite_order_elements():
        sub = build_fixed_subcomplex(X, g, r)
        if sub.vertices:
            comps.append((g, sub))
    return _flatten(X, comps, "twisted", r)


def build_fixed_point_space(X: SimplicialComplex) -> TwistedSpace:
    """X̂ = {(g, x) : g x = x}; every g gets a component, possibly empty."""
    if X.action is None:
        raise ComplexError("X must carry a group action")
    comps = [(g, _pointwise_fixed(X, g)) for g in X.group.finite_order_elements()]
    return _flatten(X, comps, "fixed")


def power_orbit_rep(group: FiniteGroup, X: SimplicialComplex, g: int, v: int) -> int:
    """Least vertex in the orbit of v under the cyclic group generated by g."""
    best, w = v, X.action[g][v]
    while w != v:
        best = min(best, w)
        w = X.action[g][w]
    return best


def build_power_quotient(T: TwistedSpace) -> TwistedSpace:
    """Collapse each component X_{g,r} along orbits of the cyclic group <g>.

    Vertices of the result are (g, least vertex of a <g>-orbit); simplices are
    images of simplices of X_{g,r}.
    """
    if T.kind == "quotient":
        raise ComplexError("space is already a power quotient")
    X, group = T.base, T.group

    def rep(g, v):
        return power_orbit_rep(group, X, g, v)

    comps = []
    for g, sub in T.components:
        images = {tuple(sorted({rep(g, v) for v in s})) for s in sub.all_simplices()}
        comps.append((g, SimplicialComplex(X.vertex_count, images,
                                           complete_through=sub.complete_through, close=False)))
    return _flatten(X, comps, "quotient", T.r, vertex_rep=rep)


# JSON --------------------------------------------------------------------


def _metric_value(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def complex_to_json(X: SimplicialComplex) -> dict:
    out = {
        "vertices": X.vertex_count,
        "simplices": {str(k): [list(s) if k else s[0] for s in layer]
                      for k, layer in enumerate(X.simplices_by_dim)},
    }
    if X.vertex_metric is not None:
        out["metric"] = [[_metric_value(x) for x in row] for row in X.vertex_metric]
    if X.action is not None:
        out["action"] = {"group": group_to_json(X.group), "perms": [list(p) for p in X.action]}
    if X.complete_through != math.inf:
        out["complete_through"] = X.complete_through
    return out


def complex_from_json(obj: dict) -> SimplicialComplex:
    simplices = []
    for key, layer in obj.get("simplices", {}).items():
        for s in layer:
            simplices.append((s,) if isinstance(s, int) else tuple(s))
    metric = None
    if "metric" in obj:
        metric = [[Fraction(x) for x in row] for row in obj["metric"]]
    group = action = None
    if "action" in obj:
        group = group_from_json(obj["action"]["group"])
        action = obj["action"]["perms"]
    return SimplicialComplex(obj["vertices"], simplices, vertex_metric=metric, group=group,
                             action=action, complete_through=obj.get("complete_through", math.inf))
