"""Finite presheaves over a small shape category, their homs and colimits.

Everything here is desk-scale: components are indexed sets {0..k-1} with
explicit action tables, and all searches are exhaustive backtracking with a
deterministic (lexicographic) output order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from ._util import Budget


# ---------------------------------------------------------------------------
# Shape categories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeCategory:
    """A finite category of shapes, given by generators and (here: no) relations.

    ``arrows`` are generating arrows (name, src, dst).  ``hom_table`` is the
    complete enumeration of morphisms per (src, dst) as composites of
    generator names (the two bundled instances are free on their graphs, so
    the table is tiny and relations are empty).  ``assign_order`` lists the
    objects in the order a backtracking search should assign images: objects
    whose elements constrain others (edges before vertices) come first.
    """

    name: str
    objects: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    hom_table: dict[tuple[str, str], tuple[tuple[str, ...], ...]]
    assign_order: tuple[str, ...]

    def obj_index(self, obj: str) -> int:
        return self.objects.index(obj)

    def arrow(self, name: str) -> tuple[str, str, str]:
        for a in self.arrows:
            if a[0] == name:
                return a
        raise KeyError(name)


TERMINAL = ShapeCategory(
    name="terminal",
    objects=("*",),
    arrows=(),
    relations=(),
    hom_table={("*", "*"): ((),)},
    assign_order=("*",),
)

# 0 ⇉ 1 with arrows sigma, tau; presheaves over it are directed multigraphs
# (component "0" = vertices, component "1" = edges, actions = source/target).
G1 = ShapeCategory(
    name="g1",
    objects=("0", "1"),
    arrows=(("sigma", "0", "1"), ("tau", "0", "1")),
    relations=(),
    hom_table={
        ("0", "0"): ((),),
        ("1", "1"): ((),),
        ("0", "1"): (("sigma",), ("tau",)),
        ("1", "0"): (),
    },
    assign_order=("1", "0"),
)


# ---------------------------------------------------------------------------
# Presheaves and their maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FinPresheaf:
    """A finite presheaf: per shape object a set {0..k-1}, per generating
    arrow u: c -> c' an action table X(u): X(c') -> X(c)."""

    shape: ShapeCategory
    sizes: tuple[int, ...]
    actions: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        assert len(self.sizes) == len(self.shape.objects)
        assert len(self.actions) == len(self.shape.arrows)
        for (name, src, dst), table in zip(self.shape.arrows, self.actions):
            assert len(table) == self.size(dst), f"action {name} wrong length"
            lim = self.size(src)
            assert all(0 <= v < lim for v in table), f"action {name} out of range"

    def size(self, obj: str) -> int:
        return self.sizes[self.shape.obj_index(obj)]

    def act(self, arrow_name: str) -> tuple[int, ...]:
        for (name, _, _), table in zip(self.shape.arrows, self.actions):
            if name == arrow_name:
                return table
        raise KeyError(arrow_name)

    def elements(self) -> Iterator[tuple[str, int]]:
        for obj, n in zip(self.shape.objects, self.sizes):
            for i in range(n):
                yield obj, i

    def total(self) -> int:
        return sum(self.sizes)

    def is_empty(self) -> bool:
        return all(n == 0 for n in self.sizes)


def make_set(n: int) -> FinPresheaf:
    """The n-element set as a presheaf over the terminal shape."""
    return FinPresheaf(TERMINAL, (n,), ())


def make_graph(num_vertices: int, edges: tuple[tuple[int, int], ...]) -> FinPresheaf:
    """A directed multigraph with the given (source, target) edge list."""
    src = tuple(e[0] for e in edges)
    tgt = tuple(e[1] for e in edges)
    return FinPresheaf(G1, (num_vertices, len(edges)), (src, tgt))


def graph_edges(x: FinPresheaf) -> list[tuple[int, int]]:
    assert x.shape is G1
    return list(zip(x.act("sigma"), x.act("tau")))


@dataclass(frozen=True)
class PresheafMap:
    """A natural transformation between presheaves over the same shape."""

    dom: FinPresheaf
    cod: FinPresheaf
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        assert self.dom.shape is self.cod.shape
        for obj, part in zip(self.dom.shape.objects, self.parts):
            assert len(part) == self.dom.size(obj)
            lim = self.cod.size(obj)
            assert all(0 <= v < lim for v in part)

    def part(self, obj: str) -> tuple[int, ...]:
        return self.parts[self.dom.shape.obj_index(obj)]

    def __call__(self, obj: str, i: int) -> int:
        return self.part(obj)[i]

    def commutes(self) -> bool:
        for (name, src, dst), table in zip(self.dom.shape.arrows, self.dom.actions):
            f_src = self.part(src)
            f_dst = self.part(dst)
            cod_table = self.cod.act(name)
            for x in range(self.dom.size(dst)):
                if f_src[table[x]] != cod_table[f_dst[x]]:
                    return False
        return True

    def then(self, other: "PresheafMap") -> "PresheafMap":
        """Diagrammatic composite self; other."""
        assert self.cod == other.dom
        parts = tuple(
            tuple(other.parts[k][v] for v in self.parts[k])
            for k in range(len(self.parts))
        )
        return PresheafMap(self.dom, other.cod, parts)

    def is_bijective(self) -> bool:
        return all(
            len(set(part)) == len(part) == self.cod.size(obj)
            for obj, part in zip(self.dom.shape.objects, self.parts)
        )


def identity_map(x: FinPresheaf) -> PresheafMap:
    return PresheafMap(x, x, tuple(tuple(range(n)) for n in x.sizes))


# ---------------------------------------------------------------------------
# Hom-set enumeration
# ---------------------------------------------------------------------------

def _iter_homs(
    x: FinPresheaf,
    y: FinPresheaf,
    budget: Optional[Budget],
    bijective_only: bool,
) -> Iterator[dict[tuple[str, int], int]]:
    shape = x.shape
    order = [(obj, i) for obj in shape.assign_order for i in range(x.size(obj))]
    # constraints[obj, i] holds (arrow, source element) pairs forcing images of
    # lower elements once (obj, i) is assigned.
    assigned: dict[tuple[str, int], int] = {}
    used: dict[str, set[int]] = {obj: set() for obj in shape.objects}

    def propagate(obj: str, i: int, val: int, trail: list[tuple[str, int]]) -> bool:
        for (name, src, dst), table in zip(shape.arrows, x.actions):
            if dst != obj:
                continue
            key = (src, table[i])
            forced = y.act(name)[val]
            if key in assigned:
                if assigned[key] != forced:
                    return False
            else:
                if bijective_only and forced in used[src]:
                    return False
                assigned[key] = forced
                used[src].add(forced)
                trail.append(key)
        return True

    def rec(pos: int) -> Iterator[dict[tuple[str, int], int]]:
        if budget is not None:
            budget.spend()
        if pos == len(order):
            yield dict(assigned)
            return
        obj, i = order[pos]
        if (obj, i) in assigned:
            yield from rec(pos + 1)
            return
        for val in range(y.size(obj)):
            if bijective_only and val in used[obj]:
                continue
            assigned[(obj, i)] = val
            used[obj].add(val)
            trail: list[tuple[str, int]] = []
            if propagate(obj, i, val, trail):
                yield from rec(pos + 1)
            for key in trail:
                used[key[0]].discard(assigned[key])
                del assigned[key]
            used[obj].discard(val)
            del assigned[(obj, i)]

    yield from rec(0)


def _assignment_to_map(x: FinPresheaf, y: FinPresheaf, a: dict[tuple[str, int], int]) -> PresheafMap:
    parts = tuple(
        tuple(a[(obj, i)] for i in range(x.size(obj)))
        for obj in x.shape.objects
    )
    return PresheafMap(x, y, parts)


def hom_set(x: FinPresheaf, y: FinPresheaf, budget: Optional[Budget] = None) -> list[PresheafMap]:
    """All presheaf maps x -> y, sorted lexicographically by component tables."""
    assert x.shape is y.shape
    maps = [_assignment_to_map(x, y, a) for a in _iter_homs(x, y, budget, False)]
    maps.sort(key=lambda f: f.parts)
    return maps


def is_isomorphic(x: FinPresheaf, y: FinPresheaf, budget: Optional[Budget] = None) -> Optional[PresheafMap]:
    """Search for an isomorphism x -> y; None if the presheaves differ."""
    if x.shape is not y.shape or x.sizes != y.sizes:
        return None
    for a in _iter_homs(x, y, budget, True):
        f = _assignment_to_map(x, y, a)
        if f.is_bijective():
            return f
    return None


# ---------------------------------------------------------------------------
# Colimits: coproducts, pushouts, wide pushouts
# ---------------------------------------------------------------------------

@dataclass
class Coproduct:
    presheaf: FinPresheaf
    injections: list[PresheafMap]


def coproduct(xs: list[FinPresheaf], shape: ShapeCategory = None) -> Coproduct:
    """Pointwise disjoint union.  The empty coproduct needs an explicit shape."""
    if not xs:
        assert shape is not None, "empty coproduct needs a shape"
        empty = FinPresheaf(shape, (0,) * len(shape.objects), tuple(() for _ in shape.arrows))
        return Coproduct(empty, [])
    shape = xs[0].shape
    sizes = tuple(sum(x.size(obj) for x in xs) for obj in shape.objects)
    offsets: list[dict[str, int]] = []
    running = {obj: 0 for obj in shape.objects}
    for x in xs:
        offsets.append(dict(running))
        for obj in shape.objects:
            running[obj] += x.size(obj)
    actions = []
    for k, (name, src, dst) in enumerate(shape.arrows):
        table: list[int] = []
        for x, off in zip(xs, offsets):
            table.extend(off[src] + v for v in x.actions[k])
        actions.append(tuple(table))
    total = FinPresheaf(shape, sizes, tuple(actions))
    injections = [
        PresheafMap(x, total, tuple(
            tuple(off[obj] + i for i in range(x.size(obj)))
            for obj in shape.objects))
        for x, off in zip(xs, offsets)
    ]
    return Coproduct(total, injections)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


@dataclass
class Pushout:
    presheaf: FinPresheaf
    inj1: PresheafMap
    inj2: PresheafMap
    _factor: Callable[[PresheafMap, PresheafMap], PresheafMap] = field(repr=False)

    def factor(self, p: PresheafMap, q: PresheafMap) -> PresheafMap:
        """The unique mediating map for a test cocone (p, q)."""
        return self._factor(p, q)


def pushout(f: PresheafMap, g: PresheafMap) -> Pushout:
    """Pointwise pushout of X <-f- Z -g-> Y with its universal property."""
    assert f.dom == g.dom
    z, x, y = f.dom, f.cod, g.cod
    shape = x.shape
    ufs: dict[str, _UnionFind] = {}
    for obj in shape.objects:
        uf = _UnionFind(x.size(obj) + y.size(obj))
        for i in range(z.size(obj)):
            uf.union(f(obj, i), x.size(obj) + g(obj, i))
        ufs[obj] = uf
    # canonical numbering: classes ordered by least member (X elems then Y elems)
    class_index: dict[str, dict[int, int]] = {}
    sizes = []
    for obj in shape.objects:
        roots: list[int] = []
        for i in range(x.size(obj) + y.size(obj)):
            r = ufs[obj].find(i)
            if r not in roots:
                roots.append(r)
        class_index[obj] = {r: k for k, r in enumerate(roots)}
        sizes.append(len(roots))

    def cls(obj: str, raw: int) -> int:
        return class_index[obj][ufs[obj].find(raw)]

    actions = []
    for k, (name, src, dst) in enumerate(shape.arrows):
        # act on a class via any representative; consistent because f, g commute
        table = [0] * sizes[shape.obj_index(dst)]
        for i in range(x.size(dst)):
            table[cls(dst, i)] = cls(src, x.actions[k][i])
        for j in range(y.size(dst)):
            table[cls(dst, x.size(dst) + j)] = cls(src, x.size(src) + y.actions[k][j])
        actions.append(tuple(table))
    p = FinPresheaf(shape, tuple(sizes), tuple(actions))
    inj1 = PresheafMap(x, p, tuple(
        tuple(cls(obj, i) for i in range(x.size(obj))) for obj in shape.objects))
    inj2 = PresheafMap(y, p, tuple(
        tuple(cls(obj, x.size(obj) + j) for j in range(y.size(obj))) for obj in shape.objects))

    def factor(pc: PresheafMap, qc: PresheafMap) -> PresheafMap:
        assert pc.dom == x and qc.dom == y and pc.cod == qc.cod
        assert f.then(pc) == g.then(qc), "not a cocone over the span"
        parts = []
        for obj in shape.objects:
            part = [0] * p.size(obj)
            for i in range(x.size(obj)):
                part[cls(obj, i)] = pc(obj, i)
            for j in range(y.size(obj)):
                part[cls(obj, x.size(obj) + j)] = qc(obj, j)
            parts.append(tuple(part))
        out = PresheafMap(p, pc.cod, tuple(parts))
        assert out.commutes()
        return out

    return Pushout(p, inj1, inj2, factor)


@dataclass
class WidePushout:
    presheaf: FinPresheaf
    injections: list[PresheafMap]  # one per leg codomain
    apex: PresheafMap  # common composite from the legs' domain


def wide_pushout(legs: list[PresheafMap]) -> WidePushout:
    """Iterated pushout of legs h_i: Z -> X_i over their common domain."""
    assert legs, "wide pushout needs at least one leg"
    z = legs[0].dom
    assert all(h.dom == z for h in legs)
    colim = legs[0].cod
    injections = [identity_map(colim)]
    apex = legs[0]
    for h in legs[1:]:
        po = pushout(apex, h)
        injections = [inj.then(po.inj1) for inj in injections]
        injections.append(po.inj2)
        apex = h.then(po.inj2)
        colim = po.presheaf
    return WidePushout(colim, injections, apex)


# ---------------------------------------------------------------------------
# Arity families: FIN (finite cardinals in Set) and DELTA0 (paths in Grph)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArityHom:
    """A morphism between arity objects, in canonical form.

    kind "map": data is the tuple of images of a function src -> dst.
    kind "shift": data is the offset k embedding the path [src] at vertex k
    of [dst].
    """

    kind: str
    src: int
    dst: int
    data: tuple

    @property
    def key(self) -> tuple:
        return (self.kind, self.src, self.dst, self.data)

    def is_identity(self) -> bool:
        if self.src != self.dst:
            return False
        if self.kind == "map":
            return self.data == tuple(range(self.src))
        return self.data == (0,)


def compose_homs(h1: ArityHom, h2: ArityHom) -> ArityHom:
    """Diagrammatic composite h1; h2."""
    assert h1.dst == h2.src and h1.kind == h2.kind
    if h1.kind == "map":
        return ArityHom("map", h1.src, h2.dst, tuple(h2.data[v] for v in h1.data))
    return ArityHom("shift", h1.src, h2.dst, (h1.data[0] + h2.data[0],))


class ArityFamily:
    """A dense full subcategory of presheaves used as operation arities."""

    kind: str
    shape: ShapeCategory

    def realize(self, a: int) -> FinPresheaf:
        raise NotImplementedError

    def homs(self, a: int, b: int) -> list[ArityHom]:
        raise NotImplementedError

    def identity(self, a: int) -> ArityHom:
        raise NotImplementedError

    def hom_map(self, h: ArityHom) -> PresheafMap:
        raise NotImplementedError

    def format_arity(self, a: int) -> str:
        raise NotImplementedError


class _FinFamily(ArityFamily):
    """Finite cardinals n inside finite sets; homs are all functions."""

    kind = "fin"
    shape = TERMINAL

    def realize(self, a: int) -> FinPresheaf:
        return make_set(a)

    def homs(self, a: int, b: int) -> list[ArityHom]:
        return [ArityHom("map", a, b, images)
                for images in itertools.product(range(b), repeat=a)]

    def identity(self, a: int) -> ArityHom:
        return ArityHom("map", a, a, tuple(range(a)))

    def hom_map(self, h: ArityHom) -> PresheafMap:
        return PresheafMap(self.realize(h.src), self.realize(h.dst), (h.data,))

    def format_arity(self, a: int) -> str:
        return str(a)


class _Delta0Family(ArityFamily):
    """Path graphs [n] inside directed multigraphs; homs are shifts."""

    kind = "graph"
    shape = G1

    def realize(self, a: int) -> FinPresheaf:
        return make_graph(a + 1, tuple((i, i + 1) for i in range(a)))

    def homs(self, a: int, b: int) -> list[ArityHom]:
        return [ArityHom("shift", a, b, (k,)) for k in range(b - a + 1)]

    def identity(self, a: int) -> ArityHom:
        return ArityHom("shift", a, a, (0,))

    def hom_map(self, h: ArityHom) -> PresheafMap:
        k = h.data[0]
        verts = tuple(k + i for i in range(h.src + 1))
        edges = tuple(k + i for i in range(h.src))
        return PresheafMap(self.realize(h.src), self.realize(h.dst), (verts, edges))

    def format_arity(self, a: int) -> str:
        return f"[{a}]"


FIN = _FinFamily()
DELTA0 = _Delta0Family()


def family_by_name(name: str) -> ArityFamily:
    if name == "fin":
        return FIN
    if name == "graph":
        return DELTA0
    raise KeyError(name)


# ---------------------------------------------------------------------------
# Nerves: arity-indexed families of sets
# ---------------------------------------------------------------------------

@dataclass
class ArityIndexedFamily:
    """A contravariant family over the arity objects: per arity a finite set
    (of given size, with optional element labels), per arity hom an action
    F(b) -> F(a)."""

    family: ArityFamily
    arities: tuple[int, ...]
    sizes: dict[int, int]
    acts: dict[tuple, tuple[int, ...]]  # ArityHom.key -> table F(dst) -> F(src)
    labels: dict[int, tuple[str, ...]] = field(default_factory=dict)

    def act(self, h: ArityHom) -> tuple[int, ...]:
        return self.acts[h.key]

    def label(self, a: int, i: int) -> str:
        if a in self.labels:
            return self.labels[a][i]
        return str(i)

    def validate(self) -> bool:
        """Contravariant functoriality over all composable pairs of homs."""
        fam = self.family
        for a in self.arities:
            ida = fam.identity(a)
            if self.acts[ida.key] != tuple(range(self.sizes[a])):
                return False
        for a in self.arities:
            for b in self.arities:
                for c in self.arities:
                    for h1 in fam.homs(a, b):
                        for h2 in fam.homs(b, c):
                            comp = compose_homs(h1, h2)
                            t1, t2 = self.act(h1), self.act(h2)
                            if self.act(comp) != tuple(t1[t2[i]] for i in range(self.sizes[c])):
                                return False
        return True


def nerve(family: ArityFamily, x: FinPresheaf, arities: list[int],
          budget: Optional[Budget] = None) -> ArityIndexedFamily:
    """The restricted nerve of x: a |-> hom(K a, x) with precomposition."""
    homs = {a: hom_set(family.realize(a), x, budget) for a in arities}
    index = {a: {f.parts: i for i, f in enumerate(homs[a])} for a in arities}
    acts: dict[tuple, tuple[int, ...]] = {}
    for a in arities:
        for b in arities:
            for h in family.homs(a, b):
                hm = family.hom_map(h)
                acts[h.key] = tuple(index[a][hm.then(f).parts] for f in homs[b])
    return ArityIndexedFamily(
        family=family,
        arities=tuple(arities),
        sizes={a: len(homs[a]) for a in arities},
        acts=acts,
        labels={},
    )


# ---------------------------------------------------------------------------
# Density presentations
# ---------------------------------------------------------------------------

def density_diagrams(family: ArityFamily, a: int) -> list[dict]:
    """The bundled density-presentation diagrams with designated colimit a.

    FIN: binary (and nullary) coproduct splits a = p + q.
    DELTA0: the wide pushout of a copies of [1] over [0], for a >= 1.
    """
    out = []
    if family.kind == "fin":
        if a == 0:
            out.append({"kind": "coproduct", "parts": []})
        for p in range(1, a):
            out.append({"kind": "coproduct", "parts": [p, a - p]})
        if a == 1:
            out.append({"kind": "coproduct", "parts": [1]})
    else:
        if a >= 1:
            out.append({"kind": "wide_pushout", "legs": a})
    return out


def density_presentation_sound(family: ArityFamily, a: int) -> bool:
    """Check each bundled diagram's colimit, computed pointwise, is iso to K(a)."""
    target = family.realize(a)
    for diag in density_diagrams(family, a):
        if diag["kind"] == "coproduct":
            cop = coproduct([family.realize(p) for p in diag["parts"]], shape=family.shape)
            got = cop.presheaf
        else:
            point = family.realize(0)
            tau = PresheafMap(point, family.realize(1), ((1,), ()))
            sigma = PresheafMap(point, family.realize(1), ((0,), ()))
            # glue target of copy i to source of copy i+1
            legs = []
            n = diag["legs"]
            if n == 1:
                got = family.realize(1)
            else:
                # iterated: apex chain built manually to glue consecutively
                colim = family.realize(1)
                boundary = tau  # target vertex of the path built so far
                for _ in range(n - 1):
                    po = pushout(boundary, sigma)
                    boundary = tau.then(po.inj2)
                    colim = po.presheaf
                got = colim
        if is_isomorphic(got, target) is None:
            return False
    return True
