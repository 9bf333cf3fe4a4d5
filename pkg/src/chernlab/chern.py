"""Matrix-valued group kernels, idempotent pairs and their Chern character chains.

A kernel k on Γ × Γ with k(x, y) = s_{x⁻¹y} is stored by its values s_g, which
are m×m matrices over Q(i). Matrices are tuples of row tuples.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .chain_maps import ShiftedSum
from .chains import Chain, ChainComplex, Theory, _add_into, chain_to_json, get_chain_complex
from .complexes import SimplicialComplex, TwistedSpace, build_rips, build_twisted_space, GLOBAL_DIM_CAP
from .groups import FiniteGroup, WordMetric, group_from_json, group_to_json
from .homology import class_equal
from .scalars import QI, format_scalar, parse_scalar, simplify


class ChernError(ValueError):
    pass


class ScaleError(ChernError):
    pass


# small exact matrices ------------------------------------------------------

Matrix = tuple


def mat(rows) -> Matrix:
    return tuple(tuple(simplify(x) for x in row) for row in rows)


def identity(m: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(m)) for i in range(m))


def zeros(m: int) -> Matrix:
    return tuple((0,) * m for _ in range(m))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(simplify(sum((x * y for x, y in zip(row, col)), 0)) for col in cols) for row in a)


def mat_add(a: Matrix, b: Matrix, scale=1) -> Matrix:
    return tuple(tuple(simplify(x + scale * y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Matrix, c) -> Matrix:
    return tuple(tuple(simplify(c * x) for x in row) for row in a)


def mat_is_zero(a: Matrix) -> bool:
    return not any(x for row in a for x in row)


def trace(a: Matrix):
    return simplify(sum((a[i][i] for i in range(len(a))), 0))


def mat_inverse(a: Matrix) -> Matrix:
    """Exact Gauss-Jordan inverse; raises ChernError if singular."""
    m = len(a)
    aug = [list(row) + [1 if i == j else 0 for j in range(m)] for i, row in enumerate(a)]
    for c in range(m):
        piv = next((r for r in range(c, m) if aug[r][c]), None)
        if piv is None:
            raise ChernError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = Fraction(1) / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(m):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return mat(row[m:] for row in aug)


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    ma, mb = len(a), len(b)
    top = [tuple(row) + (0,) * mb for row in a]
    bottom = [(0,) * ma + tuple(row) for row in b]
    return tuple(top + bottom)


# kernels --------------------------------------------------------------------


class MatrixKernel:
    """Γ-invariant kernel k(x, y) = s_{x⁻¹y} with finitely many nonzero s_g."""

    def __init__(self, group: FiniteGroup, m: int, values: Mapping[int, object] | None = None,
                 metric: WordMetric | None = None):
        self.group = group
        self.m = int(m)
        self.metric = metric
        self.values: dict[int, Matrix] = {}
        for g, s in (values or {}).items():
            g = int(g)
            if not 0 <= g < group.order:
                raise ChernError(f"group index {g} out of range")
            s = mat(s)
            if len(s) != self.m or any(len(row) != self.m for row in s):
                raise ChernError(f"value at {g} is not {self.m}x{self.m}")
            if not mat_is_zero(s):
                self.values[g] = s

    def __repr__(self):
        return f"MatrixKernel(m={self.m}, support={sorted(self.values)})"

    def __eq__(self, other):
        return (isinstance(other, MatrixKernel) and self.group == other.group
                and self.m == other.m and self.values == other.values)

    __hash__ = None

    def _like(self, values) -> MatrixKernel:
        return MatrixKernel(self.group, self.m, values, self.metric)

    def value(self, g: int) -> Matrix:
        return self.values.get(g, zeros(self.m))

    def __call__(self, x: int, y: int) -> Matrix:
        return self.value(self.group.multiply(self.group.inverse(x), y))

    @property
    def support(self) -> list[int]:
        return sorted(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def _check(self, other: MatrixKernel) -> None:
        if other.group != self.group or other.m != self.m:
            raise ChernError("kernels over different groups or matrix sizes")

    def __add__(self, other: MatrixKernel) -> MatrixKernel:
        self._check(other)
        out = dict(self.values)
        for g, s in other.values.items():
            out[g] = mat_add(out[g], s) if g in out else s
        return self._like(out)

    def __sub__(self, other: MatrixKernel) -> MatrixKernel:
        return self + other.scale(-1)

    def scale(self, c) -> MatrixKernel:
        return self._like({g: mat_scale(s, c) for g, s in self.values.items()})

    def __mul__(self, other: MatrixKernel) -> MatrixKernel:
        return convolve(self, other)

    def left(self, a: Matrix) -> MatrixKernel:
        """Constant matrix times the kernel: (a k)(x, y) = a k(x, y)."""
        return self._like({g: mat_mul(a, s) for g, s in self.values.items()})

    def right(self, a: Matrix) -> MatrixKernel:
        return self._like({g: mat_mul(s, a) for g, s in self.values.items()})

    def propagation(self, metric: WordMetric | None = None) -> int:
        return propagation(self, metric)


def convolve(k1: MatrixKernel, k2: MatrixKernel) -> MatrixKernel:
    """(s * t)_g = Σ_h s_h t_{h⁻¹g}."""
    k1._check(k2)
    group = k1.group
    out: dict = {}
    for h, s in k1.values.items():
        for u, t in k2.values.items():
            g = group.multiply(h, u)
            prod = mat_mul(s, t)
            out[g] = mat_add(out[g], prod) if g in out else prod
    return k1._like(out)


def _metric_of(k: MatrixKernel, metric):
    metric = metric or k.metric
    if metric is None:
        raise ChernError("a word metric is required")
    if metric.group != k.group:
        raise ChernError("metric and kernel use different groups")
    return metric


def propagation(k: MatrixKernel, metric: WordMetric | None = None) -> int:
    metric = _metric_of(k, metric)
    return max((metric.length(g) for g in k.values), default=0)


def constant_kernel(group: FiniteGroup, a, metric=None) -> MatrixKernel:
    a = mat(a)
    return MatrixKernel(group, len(a), {group.identity_index: a}, metric)


def unit_kernel(group: FiniteGroup, m: int, metric=None) -> MatrixKernel:
    return constant_kernel(group, identity(m), metric)


def averaging_idempotent(group: FiniteGroup, metric=None) -> MatrixKernel:
    """(1/|Γ|) Σ_g δ_g, a rank-one projection in the group algebra."""
    c = Fraction(1, group.order)
    return MatrixKernel(group, 1, {g: ((c,),) for g in group.elements()}, metric)


def cyclic_characters(group: FiniteGroup) -> list[dict[int, object]]:
    """Characters g ↦ ω^{jg} of Z/n (n | 4) with values in Q(i); element index g ↔ residue g."""
    n = group.order
    roots = {1: 1, 2: -1, 4: QI(0, 1)}
    if n not in roots:
        raise ChernError("Q(i)-valued characters exist only for Z/1, Z/2, Z/4")
    for a in group.elements():
        for b in group.elements():
            if group.multiply(a, b) != (a + b) % n:
                raise ChernError("group is not presented as Z/n with residue indexing")
    omega = roots[n]
    out = []
    for j in range(n):
        chi, acc = {}, 1
        step = 1
        for _ in range(j):
            step = step * omega
        for g in range(n):
            chi[g] = simplify(acc)
            acc = acc * step
        out.append(chi)
    return out


def character_projection(group: FiniteGroup, chi: Mapping[int, object], metric=None) -> MatrixKernel:
    """p_χ = (1/|Γ|) Σ_g conj(χ(g)) δ_g."""
    c = Fraction(1, group.order)
    return MatrixKernel(group, 1, {g: ((simplify(c * v.conjugate()),),) for g, v in chi.items()}, metric)


# idempotent pairs -----------------------------------------------------------


@dataclass
class IdempotentPair:
    """q̃ = q + q0 with q a kernel and q0 a constant matrix; represents [q̃] - [q0]."""

    q: MatrixKernel
    q0: Matrix = None

    def __post_init__(self):
        self.q0 = zeros(self.q.m) if self.q0 is None else mat(self.q0)
        if len(self.q0) != self.q.m:
            raise ChernError("q0 has the wrong size")

    @property
    def group(self) -> FiniteGroup:
        return self.q.group

    @property
    def m(self) -> int:
        return self.q.m


def is_idempotent_pair(p: IdempotentPair) -> bool:
    """q0² = q0 and q*q = q - q0 q - q q0, exactly."""
    if mat_mul(p.q0, p.q0) != p.q0:
        return False
    return convolve(p.q, p.q) == p.q - p.q.left(p.q0) - p.q.right(p.q0)


def conjugate_pair(p: IdempotentPair, u) -> IdempotentPair:
    """(u q u⁻¹, u q0 u⁻¹) for a constant invertible u."""
    u = mat(u)
    ui = mat_inverse(u)
    return IdempotentPair(p.q.left(u).right(ui), mat_mul(mat_mul(u, p.q0), ui))


def block_sum(p1: IdempotentPair, p2: IdempotentPair) -> IdempotentPair:
    if p1.group != p2.group:
        raise ChernError("block sum of pairs over different groups")
    g = p1.group
    values = {}
    for h in set(p1.q.values) | set(p2.q.values):
        values[h] = block_diag(p1.q.value(h), p2.q.value(h))
    q = MatrixKernel(g, p1.m + p2.m, values, p1.q.metric or p2.q.metric)
    return IdempotentPair(q, block_diag(p1.q0, p2.q0))


def trivial_pair(group: FiniteGroup, rank: int = 1, metric=None) -> IdempotentPair:
    """q = δ_e ⊗ I_rank, q0 = 0: the class of a free module of that rank."""
    return IdempotentPair(unit_kernel(group, rank, metric))


def random_invertible(m: int, rng: random.Random, span: int = 3) -> Matrix:
    """Random m×m matrix over Q(i) with small Gaussian-integer entries, retried until invertible."""
    while True:
        a = mat([[QI(rng.randint(-span, span), rng.randint(-span, span)) for _ in range(m)]
                 for _ in range(m)])
        try:
            mat_inverse(a)
        except ChernError:
            continue
        return a


# Rips complexes and twisted spaces are shared so classes can be compared directly

_SPACE_CACHE: dict = {}


def _rips(metric: WordMetric, d, max_dim: int) -> SimplicialComplex:
    key = ("rips", id(metric.group), metric.distances.tobytes(), Fraction(d), max_dim)
    if key not in _SPACE_CACHE:
        _SPACE_CACHE[key] = (metric, build_rips(metric.group, metric, d, max_dim))
    return _SPACE_CACHE[key][1]


def _twisted(X: SimplicialComplex, r) -> TwistedSpace:
    key = ("twisted", id(X), Fraction(r))
    if key not in _SPACE_CACHE:
        _SPACE_CACHE[key] = (X, build_twisted_space(X, r))
    return _SPACE_CACHE[key][1]


def clear_space_cache() -> None:
    _SPACE_CACHE.clear()


# Chern characters -----------------------------------------------------------


@dataclass
class ChernClass:
    """Chern character chain of an idempotent pair.

    ``components[k]`` is the degree-k chain; the torsion-free character has one
    component per even k ≤ n, the twisted character a single component in degree n.
    ``ordered_terms`` keeps the raw trace value of every ordered tuple that entered
    the sum, keyed by ``(g, base vertices)`` (g is None for the torsion-free case).
    """

    kind: str
    n: int
    rips_scale: Fraction
    twist_scale: Fraction | None
    components: dict[int, Chain]
    propagation: int
    space: object = field(repr=False)
    ordered_terms: dict = field(default_factory=dict, repr=False)

    @property
    def chain(self) -> Chain:
        """The torsion-free character as one chain of ⊕_k C_{n-2k}; the twisted one as is."""
        if self.kind == "twisted":
            return self.components[self.n]
        top = self.components[self.n].space
        total = _shifted(top)
        acc = {}
        for k, c in self.components.items():
            j = (self.n - k) // 2
            for key, v in c.coeffs.items():
                acc[(j, key)] = v
        return Chain(total, self.n, acc)

    def to_json(self) -> dict:
        return {
            "kind": self.kind, "n": self.n,
            "rips_scale": format_scalar(self.rips_scale),
            "twist_scale": None if self.twist_scale is None else format_scalar(self.twist_scale),
            "propagation": self.propagation,
            "components": {str(k): chain_to_json(c) for k, c in sorted(self.components.items())},
        }


def _shifted(cx: ChainComplex) -> ShiftedSum:
    cache = cx.__dict__.setdefault("_shifted_sum", None)
    if cache is None:
        cache = cx.__dict__["_shifted_sum"] = ShiftedSum(cx)
    return cache


def _check_inputs(p: IdempotentPair, n: int, d, metric) -> tuple[WordMetric, int, Fraction]:
    if n < 0 or n % 2:
        raise ChernError(f"n must be a non-negative even integer, got {n}")
    if not is_idempotent_pair(p):
        raise ChernError("input is not an idempotent pair")
    metric = _metric_of(p.q, metric)
    prop = propagation(p.q, metric)
    d = Fraction(d)
    if d < (n + 1) * prop:
        raise ScaleError(f"Rips scale {d} is below (n+1)*propagation = {(n + 1) * prop}")
    if n + 1 > GLOBAL_DIM_CAP:
        raise ChernError(f"degree {n} needs dimensions above the global cap {GLOBAL_DIM_CAP}")
    return metric, prop, d


def _cyclic_trace(q: MatrixKernel, xs: tuple, closing: int):
    """tr(q(x0,x1) q(x1,x2) ... q(xk, closing))."""
    acc = None
    pts = xs + (closing,)
    for a, b in zip(pts, pts[1:]):
        s = q(a, b)
        if mat_is_zero(s):
            return 0
        acc = s if acc is None else mat_mul(acc, s)
        if mat_is_zero(acc):
            return 0
    return trace(acc)


def _require_cycle(c: Chain, what: str) -> None:
    if c.degree > 0 and c.boundary():
        raise ChernError(f"{what} is not a cycle")


def chern_torsion_free(p: IdempotentPair, n: int, d, metric: WordMetric | None = None) -> ChernClass:
    """Σ_{k even ≤ n} Σ_{(x0..xk)} tr(q(x0,x1)···q(xk,x0)) [x0..xk] on P_d(Γ)."""
    metric, prop, d = _check_inputs(p, n, d, metric)
    X = _rips(metric, d, n + 1)
    cx = get_chain_complex(X, Theory.INVARIANT)
    components, terms = {}, {}
    for k in range(0, n + 1, 2):
        acc: dict = {}
        for xs in cx.ordered_tuples(k):
            if len(set(xs)) != len(xs):
                continue
            val = _cyclic_trace(p.q, xs, xs[0])
            if not val:
                continue
            terms[(None, xs)] = val
            key, s = cx.canonicalize(xs)
            _add_into(acc, {key: s * val})
        chain = Chain(cx, k, acc)
        _require_cycle(chain, f"degree-{k} Chern component")
        components[k] = chain
    return ChernClass("torsion_free", n, d, None, components, prop, X, terms)


def chern_twisted(p: IdempotentPair, n: int, d, metric: WordMetric | None = None) -> ChernClass:
    """Σ_g (g, Σ_{(x0..xn)} tr(q(x0,x1)···q(xn,g⁻¹x0)) [x0..xn]_{λ,g}) on (P_d)^_d."""
    metric, prop, d = _check_inputs(p, n, d, metric)
    group = p.group
    X = _rips(metric, d, n + 1)
    T = _twisted(X, d)
    cx = get_chain_complex(T, Theory.TWISTED_CYCLIC)
    acc: dict = {}
    terms = {}
    for flat in cx.ordered_tuples(n):
        g = T.component_of(flat[0])
        xs = tuple(T.base_vertex(v) for v in flat)
        val = _cyclic_trace(p.q, xs, group.multiply(group.inverse(g), xs[0]))
        if not val:
            continue
        terms[(g, xs)] = val
        canon = cx.canonicalize(flat)
        if canon is not None:
            _add_into(acc, {canon[0]: canon[1] * val})
    chain = Chain(cx, n, acc)
    _require_cycle(chain, "twisted Chern chain")
    return ChernClass("twisted", n, d, d, {n: chain}, prop, T, terms)


def chern(p: IdempotentPair, n: int, d, metric=None, twisted: bool = False) -> ChernClass:
    return (chern_twisted if twisted else chern_torsion_free)(p, n, d, metric)


def support_diameter(c: ChernClass) -> Fraction:
    """Largest word-metric diameter of the vertex set of a single nonzero term."""
    if c.kind == "twisted":
        T: TwistedSpace = c.space
        X = T.base
    else:
        X = c.space
    best = Fraction(0)
    for chain in c.components.values():
        for key in chain.coeffs:
            verts = [T.base_vertex(v) for v in key] if c.kind == "twisted" else list(key)
            for a in verts:
                for b in verts:
                    best = max(best, Fraction(X.vertex_metric[a, b]))
    return best


def unit_class(c: ChernClass, degree: int = 0) -> Chain:
    """Degree-0 character of the rank-one trivial pair on the same space."""
    if degree != 0:
        raise ChernError("the trivial pair only contributes in degree 0")
    if c.kind == "twisted":
        T = c.space
        cx = get_chain_complex(T, Theory.TWISTED_CYCLIC)
        e = T.group.identity_index
        return cx.chain({(T.vertex(e, v),): 1 for v in T.component(e).vertices}, 0)
    cx = get_chain_complex(c.space, Theory.INVARIANT)
    return cx.chain({(v,): 1 for v in c.space.vertices}, 0)


def shift_by_units(c: ChernClass, r) -> ChernClass:
    """The same class plus r times the degree-0 unit class."""
    comps = dict(c.components)
    if 0 not in comps:
        raise ChernError("class has no degree-0 component")
    comps[0] = comps[0] + unit_class(c) * r
    return ChernClass(c.kind, c.n, c.rips_scale, c.twist_scale, comps, c.propagation, c.space)


def _aligned(c1: ChernClass, c2: ChernClass) -> dict[int, tuple[Chain, Chain]]:
    if c1.kind != c2.kind or c1.n != c2.n:
        raise ChernError("classes of different kinds or degrees")
    if c1.rips_scale != c2.rips_scale or c1.twist_scale != c2.twist_scale:
        raise ScaleError("classes were computed at different scales")
    out = {}
    for k, a in c1.components.items():
        b = c2.components[k]
        if b.space is not a.space:
            if c1.kind == "twisted" or a.space.complex != b.space.complex:
                raise ChernError("classes live on different complexes")
            b = b.transport(a.space)
        out[k] = (a, b)
    return out


def compare_by_degree(c1: ChernClass, c2: ChernClass) -> dict[int, bool]:
    """Per degree, whether the two components are homologous."""
    return {k: class_equal(a, b) for k, (a, b) in sorted(_aligned(c1, c2).items())}


def chern_class_compare(c1: ChernClass, c2: ChernClass) -> bool:
    return all(compare_by_degree(c1, c2).values())


def truncate(c: ChernClass, n: int) -> dict[int, Chain]:
    """π_{n',n}: keep the components of degree ≤ n."""
    if c.kind == "twisted":
        raise ChernError("the twisted character has a single degree; truncation does not apply")
    return {k: ch for k, ch in c.components.items() if k <= n}


def truncation_coherent(c_big: ChernClass, c_small: ChernClass) -> dict[int, bool]:
    """Componentwise equality of π(c_big) and c_small, transported into c_big's complex."""
    out = {}
    for k, ch in truncate(c_big, c_small.n).items():
        small = c_small.components[k].transport(ch.space)
        out[k] = small.coeffs == ch.coeffs
    return out


# JSON -----------------------------------------------------------------------


def _matrix_to_json(a: Matrix) -> list[list[str]]:
    return [[format_scalar(x) for x in row] for row in a]


def _matrix_from_json(rows) -> Matrix:
    return mat([[parse_scalar(x) for x in row] for row in rows])


def pair_to_json(p: IdempotentPair) -> dict:
    out = {"group": group_to_json(p.group), "m": p.m,
           "terms": [{"g": g, "matrix": _matrix_to_json(s)} for g, s in sorted(p.q.values.items())]}
    if not mat_is_zero(p.q0):
        out["q0"] = _matrix_to_json(p.q0)
    return out


def pair_from_json(obj, group: FiniteGroup | None = None, metric=None) -> IdempotentPair:
    """Read a kernel file; an optional ``q0`` matrix completes the pair."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if group is None:
        if "group" not in obj:
            raise ChernError("kernel JSON needs a group")
        group = group_from_json(obj["group"])
    m = int(obj["m"])
    values = {}
    for t in obj.get("terms", []):
        g = t["g"]
        if isinstance(g, str):
            g = group.index_of(g)
        s = _matrix_from_json(t["matrix"])
        values[int(g)] = mat_add(values[int(g)], s) if int(g) in values else s
    q = MatrixKernel(group, m, values, metric)
    q0 = _matrix_from_json(obj["q0"]) if "q0" in obj else None
    return IdempotentPair(q, q0)
