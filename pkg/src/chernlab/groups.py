"""Finite groups given by multiplication tables, word metrics and conjugation."""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

ASSOCIATIVITY_CHECK_CAP = 64


class GroupError(ValueError):
    pass


class FiniteGroup:
    """A finite group stored extensionally.

    Elements are the indices ``0 .. order-1``; ``mult_table[g, h]`` is the
    index of ``g*h``.
    """

    def __init__(self, mult_table, identity_index: int = 0, labels=None,
                 check_cap: int = ASSOCIATIVITY_CHECK_CAP):
        table = np.asarray(mult_table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupError("mult_table must be a nonempty square array")
        n = table.shape[0]
        if not 0 <= identity_index < n:
            raise GroupError("identity index out of range")
        full = np.arange(n)
        if not (np.array_equal(table[identity_index], full)
                and np.array_equal(table[:, identity_index], full)):
            raise GroupError("identity row/column is not the identity permutation")
        for i in range(n):
            if not (np.array_equal(np.sort(table[i]), full)
                    and np.array_equal(np.sort(table[:, i]), full)):
                raise GroupError("mult_table is not a Latin square")
        if n <= check_cap:
            # (gh)k == g(hk) for all triples, vectorised over k
            left = table[table[:, :, None], np.arange(n)[None, None, :]]
            right = table[np.arange(n)[:, None, None], table[None, :, :]]
            if not np.array_equal(left, right):
                raise GroupError("mult_table is not associative")
        table.setflags(write=False)
        self.mult_table = table
        self.order = n
        self.identity_index = int(identity_index)
        if labels is not None and len(labels) != n:
            raise GroupError("labels must have one entry per element")
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def __eq__(self, other):
        return (isinstance(other, FiniteGroup)
                and self.identity_index == other.identity_index
                and np.array_equal(self.mult_table, other.mult_table))

    def __hash__(self):
        return hash((self.order, self.identity_index, self.mult_table.tobytes()))

    def _check(self, g):
        if not (isinstance(g, (int, np.integer)) and 0 <= g < self.order):
            raise IndexError(f"group element {g!r} out of range for order {self.order}")

    @property
    def identity(self) -> int:
        return self.identity_index

    def elements(self):
        return range(self.order)

    def multiply(self, g: int, h: int) -> int:
        self._check(g)
        self._check(h)
        return int(self.mult_table[g, h])

    @cached_property
    def inverses(self) -> tuple[int, ...]:
        e = self.identity_index
        return tuple(int(np.nonzero(self.mult_table[g] == e)[0][0]) for g in range(self.order))

    def inverse(self, g: int) -> int:
        self._check(g)
        return self.inverses[g]

    def power(self, g: int, k: int) -> int:
        self._check(g)
        if k < 0:
            g, k = self.inverses[g], -k
        x = self.identity_index
        for _ in range(k):
            x = int(self.mult_table[x, g])
        return x

    def element_order(self, g: int) -> int:
        """Least n >= 1 with g^n = e."""
        self._check(g)
        x, n = g, 1
        while x != self.identity_index:
            x = int(self.mult_table[x, g])
            n += 1
        return n

    def conjugate(self, gamma: int, x: int) -> int:
        """gamma * x * gamma^-1."""
        t = self.mult_table
        return int(t[t[gamma, x], self.inverses[gamma]])

    def conjugacy_orbit(self, g: int) -> frozenset[int]:
        self._check(g)
        return frozenset(self.conjugate(c, g) for c in range(self.order))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult_table, self.mult_table.T))

    def finite_order_elements(self) -> list[int]:
        # every element of a finite group has finite order
        return list(range(self.order))

    def left_translation(self, g: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.mult_table[g])

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GroupError(f"no element labelled {label!r}") from None


# constructors -----------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group order must be positive")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, 0, [str(i) for i in range(n)])


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def cycle_notation(perm) -> str:
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc, i = [], start
        while i not in seen:
            seen.add(i)
            cyc.append(i)
            i = perm[i]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


def permutation_group(perms) -> FiniteGroup:
    """Group of permutations (tuples of images); product is composition p∘q."""
    perms = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    if len(index) != len(perms):
        raise GroupError("duplicate permutations")
    ident = tuple(range(len(perms[0])))
    if ident not in index:
        raise GroupError("permutation set lacks the identity")
    table = np.empty((len(perms), len(perms)), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            comp = tuple(p[q[k]] for k in range(len(q)))
            if comp not in index:
                raise GroupError("permutation set is not closed under composition")
            table[i, j] = index[comp]
    return FiniteGroup(table, index[ident], [cycle_notation(p) for p in perms])


def symmetric_group(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("symmetric group degree must be positive")
    return permutation_group(itertools.permutations(range(n)))


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    na, nb = a.order, b.order
    ta, tb = a.mult_table, b.mult_table
    # element (i, j) -> i*nb + j
    table = (ta[:, None, :, None] * nb + tb[None, :, None, :]).reshape(na * nb, na * nb)
    labels = [f"({la},{lb})" for la in a.labels for lb in b.labels]
    return FiniteGroup(table, a.identity_index * nb + b.identity_index, labels)


# generating sets and word metrics ---------------------------------------


@dataclass(frozen=True)
class GeneratingSet:
    group: FiniteGroup
    generators: frozenset[int]

    @classmethod
    def create(cls, group: FiniteGroup, generators) -> GeneratingSet:
        """Symmetrize ``generators`` and check that they generate ``group``."""
        gens = set()
        for g in generators:
            group._check(g)
            gens.add(int(g))
            gens.add(group.inverse(int(g)))
        gens.discard(group.identity_index)
        out = cls(group, frozenset(gens))
        if len(out.cayley_distances()) != group.order:
            raise GroupError("generators do not generate the group")
        return out

    def cayley_distances(self) -> dict[int, int]:
        """BFS word lengths from the identity (only reachable elements)."""
        t = self.group.mult_table
        dist = {self.group.identity_index: 0}
        queue = deque([self.group.identity_index])
        order = sorted(self.generators)
        while queue:
            x = queue.popleft()
            for s in order:
                y = int(t[x, s])
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist


@dataclass(frozen=True, eq=False)
class WordMetric:
    group: FiniteGroup
    distances: np.ndarray = field(repr=False)

    def __call__(self, x: int, y: int) -> int:
        return int(self.distances[x, y])

    def length(self, g: int) -> int:
        return int(self.distances[self.group.identity_index, g])

    @property
    def diameter(self) -> int:
        return int(self.distances.max())


def word_metric(gen: GeneratingSet) -> WordMetric:
    """Left-invariant word metric d(x, y) = |x^-1 y|."""
    group = gen.group
    lengths = gen.cayley_distances()
    if len(lengths) != group.order:
        raise GroupError("generators do not generate the group")
    ell = np.array([lengths[g] for g in range(group.order)], dtype=np.int64)
    inv = np.array(group.inverses, dtype=np.int64)
    dist = ell[group.mult_table[inv[:, None], np.arange(group.order)[None, :]]]
    dist.setflags(write=False)
    return WordMetric(group, dist)


def default_generators(group: FiniteGroup, spec: str | None = None) -> list[int]:
    """Standard generators for groups built from shorthand strings."""
    if spec is not None:
        kind, _, arg = spec.partition(":")
        if kind == "cyclic":
            return [1] if group.order > 1 else []
        if kind == "sym":
            n = int(arg)
            gens = []
            for i in range(n - 1):
                perm = list(range(n))
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                gens.append(group.index_of(cycle_notation(perm)))
            return gens
        if kind == "product":
            parts = _split_product(arg)
            a, b = parse_group_spec(parts[0]), parse_group_spec(parts[1])
            ga, gb = default_generators(a, parts[0]), default_generators(b, parts[1])
            return ([x * b.order + b.identity_index for x in ga]
                    + [a.identity_index * b.order + y for y in gb])
    return [g for g in group.elements() if g != group.identity_index]


# conjugation ------------------------------------------------------------


@dataclass(frozen=True)
class ConjugationAction:
    """gamma . x = gamma x gamma^-1 on the finite-order elements."""

    group: FiniteGroup

    def act(self, gamma: int, x: int) -> int:
        return self.group.conjugate(gamma, x)

    def orbit(self, x: int) -> frozenset[int]:
        return self.group.conjugacy_orbit(x)

    def orbits(self) -> list[frozenset[int]]:
        seen, out = set(), []
        for g in self.group.finite_order_elements():
            if g not in seen:
                orb = self.orbit(g)
                seen |= orb
                out.append(orb)
        return out


# shorthand specs and JSON ----------------------------------------------


def _split_product(arg: str) -> list[str]:
    arg = arg.strip()
    if not (arg.startswith("[") and arg.endswith("]")):
        raise GroupError(f"product spec must be bracketed: {arg!r}")
    body, depth, parts, cur = arg[1:-1], 0, [], []
    for ch in body:
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            continue
        depth += ch == "["
        depth -= ch == "]"
        cur.append(ch)
    parts.append("".join(cur).strip())
    if len(parts) != 2:
        raise GroupError("product spec takes exactly two factors")
    return parts


def parse_group_spec(spec: str) -> FiniteGroup:
    """Build a group from ``cyclic:N``, ``sym:N`` or ``product:[A,B]``."""
    kind, _, arg = spec.strip().partition(":")
    try:
        if kind == "cyclic":
            return cyclic_group(int(arg))
        if kind == "sym":
            return symmetric_group(int(arg))
        if kind == "product":
            a, b = _split_product(arg)
            return direct_product(parse_group_spec(a), parse_group_spec(b))
    except ValueError as exc:
        raise GroupError(f"malformed group spec {spec!r}: {exc}") from exc
    raise GroupError(f"unknown group spec {spec!r}")


def group_to_json(group: FiniteGroup) -> dict:
    return {"order": group.order, "mult_table": group.mult_table.tolist(),
            "identity": group.identity_index, "labels": list(group.labels)}


def group_from_json(obj) -> FiniteGroup:
    if isinstance(obj, str):
        text = obj.strip()
        if text.startswith("{"):
            obj = json.loads(text)
        else:
            return parse_group_spec(text)
    group = FiniteGroup(obj["mult_table"], obj.get("identity", 0), obj.get("labels"))
    if "order" in obj and obj["order"] != group.order:
        raise GroupError("declared order does not match mult_table")
    return group
