"""Finite permutation groups, subgroup classes and G-sets.

Elements are stored as image tuples and referred to by their index in a
breadth-first enumeration from the identity, so element 0 is always the
identity. The product ``g * h`` means "apply ``h`` first, then ``g``".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, TypeVar

import numpy as np

DEFAULT_MAX_ORDER = 10080

Permutation = tuple[int, ...]
T = TypeVar("T")


class GroupTooLarge(ValueError):
    pass


class NotAHomomorphism(ValueError):
    """Generator images do not extend consistently to the whole group."""


def check_permutation(images: Sequence[int], degree: int | None = None) -> Permutation:
    perm = tuple(int(x) for x in images)
    n = len(perm) if degree is None else degree
    if len(perm) != n:
        raise ValueError(f"permutation {list(perm)} has length {len(perm)}, expected {n}")
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{list(perm)} is not a bijection on 0..{n - 1}")
    return perm


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return p∘q, i.e. x -> p[q[x]]."""
    return tuple(p[x] for x in q)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def cycle_notation(p: Permutation) -> str:
    seen = set()
    cycles = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = p[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = p[x]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


class PermGroup:
    """A finite group given by permutation generators.

    Use :func:`make_group` to build one; the constructor expects the closure
    to have been computed already.
    """

    def __init__(
        self,
        degree: int,
        generators: Sequence[Permutation],
        elements: Sequence[Permutation],
        tree: Sequence[tuple[int, int]],
        name: str | None = None,
    ) -> None:
        self.degree = degree
        self.generators = tuple(generators)
        self.elements = tuple(elements)
        self.name = name
        # tree[i] = (parent, generator) with elements[i] = elements[parent] * generators[generator]
        self._tree = tuple(tree)
        self._index = {p: i for i, p in enumerate(self.elements)}
        self.generator_indices = tuple(self._index[s] for s in self.generators)

    def __repr__(self) -> str:
        label = self.name or "PermGroup"
        return f"<{label} degree={self.degree} order={self.order}>"

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, perm: Sequence[int]) -> int:
        try:
            return self._index[tuple(perm)]
        except KeyError:
            raise ValueError(f"{list(perm)} is not an element of {self!r}") from None

    def mul(self, i: int, j: int) -> int:
        return self._index[compose(self.elements[i], self.elements[j])]

    def inv(self, i: int) -> int:
        return self._index[inverse(self.elements[i])]

    @cached_property
    def multiplication_table(self) -> np.ndarray:
        """``table[i, j]`` is the index of ``elements[i] * elements[j]``."""
        n = self.order
        perms = np.array(self.elements, dtype=np.int64).reshape(n, self.degree)
        # encode each permutation as an integer key for vectorised lookup
        weights = self.degree ** np.arange(self.degree, dtype=np.int64)
        keys = perms @ weights
        order = np.argsort(keys)
        sorted_keys = keys[order]
        table = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            products = perms[i][perms]  # row j: elements[i] ∘ elements[j]
            table[i] = order[np.searchsorted(sorted_keys, products @ weights)]
        return table

    @cached_property
    def inverses(self) -> np.ndarray:
        return np.array([self.inv(i) for i in range(self.order)], dtype=np.int64)

    def extend(
        self,
        generator_images: Sequence[T],
        identity: T,
        combine: Callable[[T, T], T],
        agree: Callable[[T, T], bool],
    ) -> list[T]:
        """Extend a map on generators to every element along the breadth-first tree.

        ``combine(a, b)`` must realise the image of a product. Every edge of the
        Cayley graph is then checked with ``agree``, which is enough to prove
        the result is a homomorphism.
        """
        if len(generator_images) != len(self.generators):
            raise ValueError(
                f"expected {len(self.generators)} generator images, got {len(generator_images)}"
            )
        values: list[T] = [identity]
        for parent, gen in self._tree[1:]:
            values.append(combine(values[parent], generator_images[gen]))
        for i in range(self.order):
            for s, s_idx in enumerate(self.generator_indices):
                target = self.mul(i, s_idx)
                if not agree(combine(values[i], generator_images[s]), values[target]):
                    raise NotAHomomorphism(
                        f"relation fails at element {i} times generator {s}"
                    )
        return values

    @cached_property
    def _classes(self) -> tuple[tuple[int, ...], ...]:
        conj = [
            [self._index[compose(compose(s, g), inverse(s))] for g in self.elements]
            for s in self.generators
        ]
        label = [-1] * self.order
        classes: list[tuple[int, ...]] = []
        for start in range(self.order):
            if label[start] >= 0:
                continue
            members = {start}
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for table in conj:
                    y = table[x]
                    if y not in members:
                        members.add(y)
                        queue.append(y)
            for m in members:
                label[m] = len(classes)
            classes.append(tuple(sorted(members)))
        return tuple(classes)

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        """Conjugacy classes as sorted index tuples, ordered by least member."""
        return list(self._classes)

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.empty(self.order, dtype=np.int64)
        for k, cls in enumerate(self._classes):
            out[list(cls)] = k
        return out


def make_group(
    degree: int,
    generators: Sequence[Sequence[int]],
    name: str | None = None,
    max_order: int = DEFAULT_MAX_ORDER,
) -> PermGroup:
    """Close ``generators`` under composition.

    Elements are listed breadth-first from the identity, expanding each
    element by right multiplication with the generators in the given order.
    """
    if degree < 1:
        raise ValueError("degree must be positive")
    gens = [check_permutation(g, degree) for g in generators]
    identity = tuple(range(degree))
    elements = [identity]
    tree = [(-1, -1)]
    seen = {identity: 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for k, s in enumerate(gens):
            p = compose(elements[i], s)
            if p in seen:
                continue
            if len(elements) >= max_order:
                raise GroupTooLarge(f"group order exceeds the cap of {max_order} elements")
            seen[p] = len(elements)
            elements.append(p)
            tree.append((i, k))
            queue.append(seen[p])
    return PermGroup(degree, gens, elements, tree, name=name)


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return make_group(1, [], name="S1")
    cycle = list(range(1, n)) + [0]
    swap = [1, 0] + list(range(2, n))
    return make_group(n, [swap, cycle], name=f"S{n}")


def cyclic_group(n: int) -> PermGroup:
    gens = [] if n == 1 else [list(range(1, n)) + [0]]
    return make_group(n, gens, name=f"Z{n}")


def dihedral_group(n: int) -> PermGroup:
    """Symmetries of a regular n-gon (order 2n)."""
    rot = list(range(1, n)) + [0]
    refl = [n - 1 - i for i in range(n)]
    return make_group(n, [rot, refl], name=f"D{2 * n}")


def quaternion_group() -> PermGroup:
    """Q8 acting regularly on itself (degree 8)."""
    # elements 1,i,j,k,-1,-i,-j,-k labelled 0..7; left multiplication by i and j
    left_i = [1, 4, 3, 6, 5, 0, 7, 2]
    left_j = [2, 7, 4, 1, 6, 3, 0, 5]
    return make_group(8, [left_i, left_j], name="Q8")


@dataclass(frozen=True)
class Subgroup:
    group: PermGroup = field(compare=False, repr=False)
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __len__(self) -> int:
        return len(self.members)


def is_subgroup(G: PermGroup, members: Sequence[int]) -> bool:
    s = set(members)
    if 0 not in s:
        return False
    table = G.multiplication_table
    return all(int(table[a, b]) in s for a in s for b in s)


def closure(G: PermGroup, gens: Sequence[int]) -> frozenset[int]:
    """Subgroup generated by the given element indices."""
    table = G.multiplication_table
    gens = [g for g in set(gens) if g != 0]
    members = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = int(table[x, s])
            if y not in members:
                members.add(y)
                queue.append(y)
    return frozenset(members)


def _conjugation_maps(G: PermGroup) -> np.ndarray:
    # maps[k][x] = index of s x s^-1 for the k-th generator s
    table = G.multiplication_table
    maps = [table[table[s], G.inverses[s]] for s in G.generator_indices]
    return np.array(maps, dtype=np.int64).reshape(len(maps), G.order)


def conjugacy_class_of_subgroup(G: PermGroup, members: frozenset[int]) -> set[frozenset[int]]:
    maps = _conjugation_maps(G)
    orbit = {members}
    queue = deque([members])
    while queue:
        H = queue.popleft()
        idx = np.fromiter(H, dtype=np.int64)
        for m in maps:
            K = frozenset(int(x) for x in m[idx])
            if K not in orbit:
                orbit.add(K)
                queue.append(K)
    return orbit


def all_subgroups(G: PermGroup, max_order: int = DEFAULT_MAX_ORDER) -> set[frozenset[int]]:
    """Every subgroup of G, by joining cyclic subgroups until nothing new appears."""
    if G.order > max_order:
        raise GroupTooLarge(f"group order {G.order} exceeds the cap of {max_order}")
    cyclic = {closure(G, [g]) for g in range(G.order)}
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        fresh = []
        for H in frontier:
            for C in cyclic:
                if C <= H:
                    continue
                J = closure(G, list(H | C))
                if J not in found:
                    found.add(J)
                    fresh.append(J)
        frontier = fresh
    return found


def subgroups_up_to_conjugacy(G: PermGroup, max_order: int = DEFAULT_MAX_ORDER) -> list[Subgroup]:
    """One representative per conjugacy class of subgroups.

    The representative is the lexicographically least member of its class
    (as a sorted index tuple); classes are ordered by subgroup order, then
    by representative.
    """
    remaining = all_subgroups(G, max_order)
    reps = []
    while remaining:
        H = next(iter(remaining))
        orbit = conjugacy_class_of_subgroup(G, H)
        remaining -= orbit
        reps.append(min(tuple(sorted(K)) for K in orbit))
    reps.sort(key=lambda t: (len(t), t))
    return [Subgroup(G, t) for t in reps]


@dataclass(frozen=True)
class GSet:
    """A finite set {0..size-1} with a group action.

    ``action[g]`` is the permutation of points induced by element index g.
    """

    group: PermGroup = field(repr=False)
    size: int
    action: np.ndarray = field(repr=False)
    provenance: str = "user"

    def __post_init__(self) -> None:
        action = np.asarray(self.action, dtype=np.int64).reshape(self.group.order, self.size)
        action.setflags(write=False)
        object.__setattr__(self, "action", action)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GSet):
            return NotImplemented
        return (
            self.group is other.group
            and self.size == other.size
            and np.array_equal(self.action, other.action)
        )

    __hash__ = None  # type: ignore[assignment]

    def check(self) -> None:
        """Raise NotAHomomorphism unless the action respects the group law."""
        G = self.group
        if self.size and not np.array_equal(self.action[0], np.arange(self.size)):
            raise NotAHomomorphism("identity does not act trivially")
        table = G.multiplication_table
        for g in range(G.order):
            for h in range(G.order):
                if not np.array_equal(self.action[g][self.action[h]], self.action[table[g, h]]):
                    raise NotAHomomorphism(f"action(g{g})∘action(g{h}) != action(g{g}*g{h})")


def gset_from_generators(
    G: PermGroup, generator_actions: Sequence[Sequence[int]], size: int | None = None
) -> GSet:
    """Build a G-set from the permutations assigned to each generator."""
    if size is None:
        if not generator_actions:
            raise ValueError("size is required when the group has no generators")
        size = len(generator_actions[0])
    gens = [check_permutation(p, size) for p in generator_actions]
    images = G.extend(gens, tuple(range(size)), compose, lambda a, b: a == b)
    return GSet(G, size, np.array(images, dtype=np.int64).reshape(G.order, size), "user")


def coset_space(G: PermGroup, H: Subgroup | Sequence[int]) -> GSet:
    """Left cosets xH with G acting by left multiplication.

    Cosets are numbered in order of their least member index.
    """
    members = list(H.members if isinstance(H, Subgroup) else sorted(set(H)))
    if not is_subgroup(G, members):
        raise ValueError("H is not a subgroup of G")
    table = G.multiplication_table
    coset_of = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for x in range(G.order):
        if coset_of[x] < 0:
            coset_of[table[x, members]] = len(reps)
            reps.append(x)
    action = coset_of[table[:, reps]]
    return GSet(G, len(reps), action, "coset-space")


def disjoint_union(X: GSet, Y: GSet) -> GSet:
    if X.group is not Y.group:
        raise ValueError("G-sets are over different groups")
    action = np.concatenate([X.action, Y.action + X.size], axis=1)
    return GSet(X.group, X.size + Y.size, action, "disjoint-union")


def fixed_point_count(X: GSet, g: int) -> int:
    return int(np.count_nonzero(X.action[g] == np.arange(X.size)))
