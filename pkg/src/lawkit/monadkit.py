"""Computable monads on finite presheaves, Kleisli arity categories, and the
pushout/arity probes used by the comparison experiments.

Each monad exposes its value on an object (a finite presheaf with element
labels and an exactness flag), its unit, and Kleisli extension; the functor
action is the extension of unit-postcomposed maps.  Truncated instances
raise TruncationError when an operation leaves the computed window.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from ._util import Budget
from .base import (
    DELTA0,
    FIN,
    G1,
    TERMINAL,
    ArityHom,
    FinPresheaf,
    PresheafMap,
    Pushout,
    graph_edges,
    hom_set,
    make_graph,
    make_set,
    pushout,
)
from .pretheory import Pretheory, Signature, make_signature


class TruncationError(RuntimeError):
    """An operation needed an element beyond the truncation window."""


@dataclass
class MonadValue:
    carrier: FinPresheaf
    unit: PresheafMap
    labels: dict[tuple[str, int], str]
    exact: bool
    data: dict = field(default_factory=dict)

    def label(self, obj: str, i: int) -> str:
        return self.labels.get((obj, i), f"{obj}{i}")


def _default_labels(x: FinPresheaf, prefix: str = "") -> dict[tuple[str, int], str]:
    if x.shape is G1:
        names = {}
        for i in range(x.size("0")):
            names[("0", i)] = f"{prefix}v{i}"
        for i in range(x.size("1")):
            names[("1", i)] = f"{prefix}e{i}"
        return names
    return {("*", i): f"{prefix}x{i}" for i in range(x.size("*"))}


class ComputableMonad:
    """Base class: subclasses implement _value and kleisli."""

    name = "abstract"
    shape = G1

    def __init__(self):
        self._cache: dict[tuple, MonadValue] = {}

    def at(self, x: FinPresheaf, labels: Optional[dict] = None) -> MonadValue:
        key = (x.sizes, x.actions, tuple(sorted(labels.items())) if labels else None)
        if key not in self._cache:
            self._cache[key] = self._value(x, labels or _default_labels(x))
        return self._cache[key]

    def _value(self, x: FinPresheaf, labels: dict) -> MonadValue:
        raise NotImplementedError

    def kleisli(self, f: PresheafMap, tx: MonadValue, ty: MonadValue) -> PresheafMap:
        """Extend f: X -> T(Y) to T(X) -> T(Y)."""
        raise NotImplementedError

    def map(self, f: PresheafMap, tx: MonadValue, ty: MonadValue) -> PresheafMap:
        """T(f): T(X) -> T(Y) for f: X -> Y."""
        return self.kleisli(f.then(ty.unit), tx, ty)


class IdentityMonad(ComputableMonad):
    name = "identity"

    def __init__(self, shape=G1):
        super().__init__()
        self.shape = shape

    def _value(self, x, labels):
        from .base import identity_map
        return MonadValue(x, identity_map(x), dict(labels), True)

    def kleisli(self, f, tx, ty):
        return f


# ---------------------------------------------------------------------------
# Graph monads
# ---------------------------------------------------------------------------

def _graph_is_dag(x: FinPresheaf) -> bool:
    n = x.size("0")
    adj = {v: [] for v in range(n)}
    for s, t in graph_edges(x):
        adj[s].append(t)
    state = [0] * n

    def dfs(v):
        state[v] = 1
        for w in adj[v]:
            if state[w] == 1 or (state[w] == 0 and not dfs(w)):
                return False
        state[v] = 2
        return True

    return all(state[v] != 0 or dfs(v) for v in range(n))


def _graph_is_forest(x: FinPresheaf) -> bool:
    """Acyclic as an undirected multigraph (no loops, no multiedges, no cycles)."""
    n = x.size("0")
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s, t in graph_edges(x):
        rs, rt = find(s), find(t)
        if rs == rt:
            return False
        parent[rs] = rt
    return True


class FreeCategoryMonad(ComputableMonad):
    """Paths monad: T(X) has X's vertices and one edge per path (identity
    paths included).  Exact on DAGs; otherwise truncated at max_len."""

    name = "free-category"

    def __init__(self, max_len: int = 6):
        super().__init__()
        self.max_len = max_len

    def _paths(self, x: FinPresheaf) -> list[tuple]:
        exact = _graph_is_dag(x)
        limit = x.size("1") * x.size("0") + 1 if exact else self.max_len
        edges = graph_edges(x)
        paths = [((), v) for v in range(x.size("0"))]  # (edge tuple, start vertex)
        frontier = list(paths)
        for _ in range(limit):
            nxt = []
            for p, start in frontier:
                end = edges[p[-1]][1] if p else start
                for e, (s, t) in enumerate(edges):
                    if s == end:
                        nxt.append((p + (e,), start))
            paths.extend(nxt)
            frontier = nxt
            if not frontier:
                break
        return paths

    def _value(self, x, labels):
        paths = self._paths(x)
        paths.sort(key=lambda p: (len(p[0]), p))
        edges = graph_edges(x)
        src = []
        tgt = []
        names = {}
        for i in range(x.size("0")):
            names[("0", i)] = labels.get(("0", i), f"v{i}")
        for i, (p, start) in enumerate(paths):
            end = edges[p[-1]][1] if p else start
            src.append(start)
            tgt.append(end)
            if p:
                names[("1", i)] = "∘".join(
                    labels.get(("1", e), f"e{e}") for e in reversed(p))
            else:
                names[("1", i)] = f"id_{names[('0', start)]}"
        carrier = FinPresheaf(G1, (x.size("0"), len(paths)), (tuple(src), tuple(tgt)))
        index = {p: i for i, p in enumerate(paths)}
        unit = PresheafMap(x, carrier, (
            tuple(range(x.size("0"))),
            tuple(index[((e,), edges[e][0])] for e in range(x.size("1"))),
        ))
        return MonadValue(carrier, unit, names, exact=_graph_is_dag(x),
                          data={"paths": paths, "index": index})

    def kleisli(self, f, tx, ty):
        ypaths = ty.data["paths"]
        yindex = ty.data["index"]
        v_part = tuple(f("0", v) for v in range(tx.carrier.size("0")))
        e_part = []
        for p, start in tx.data["paths"]:
            if not p:
                out = ((), f("0", start))
            else:
                segs = [ypaths[f("1", e)] for e in p]
                glued = tuple(e for seg, _ in segs for e in seg)
                out = (glued, segs[0][1])
            idx = yindex.get(out)
            if idx is None:
                raise TruncationError("path left the truncation window")
            e_part.append(idx)
        return PresheafMap(tx.carrier, ty.carrier, (v_part, tuple(e_part)))


class FreeGroupoidMonad(ComputableMonad):
    """Fundamental-groupoid monad via reduced zigzag words; exact on forests,
    truncated at max_len otherwise."""

    name = "free-groupoid"

    def __init__(self, max_len: int = 6):
        super().__init__()
        self.max_len = max_len

    def _words(self, x: FinPresheaf) -> list[tuple]:
        exact = _graph_is_forest(x)
        limit = x.size("0") + x.size("1") if exact else self.max_len
        edges = graph_edges(x)
        words = [((), v) for v in range(x.size("0"))]
        frontier = list(words)
        for _ in range(limit):
            nxt = []
            for w, start in frontier:
                if w:
                    e, d = w[-1]
                    end = edges[e][1] if d > 0 else edges[e][0]
                else:
                    end = start
                for e, (s, t) in enumerate(edges):
                    for d in (1, -1):
                        if (s if d > 0 else t) != end:
                            continue
                        if w and w[-1] == (e, -d):
                            continue  # immediate cancellation
                        nxt.append((w + ((e, d),), start))
            words.extend(nxt)
            frontier = nxt
            if not frontier:
                break
        return words

    def _value(self, x, labels):
        words = self._words(x)
        words.sort(key=lambda p: (len(p[0]), p))
        edges = graph_edges(x)

        def endpoint(w, start):
            if not w:
                return start
            e, d = w[-1]
            return edges[e][1] if d > 0 else edges[e][0]

        src, tgt, names = [], [], {}
        for i in range(x.size("0")):
            names[("0", i)] = labels.get(("0", i), f"v{i}")
        for i, (w, start) in enumerate(words):
            src.append(start)
            tgt.append(endpoint(w, start))
            if w:
                bits = []
                for e, d in reversed(w):
                    nm = labels.get(("1", e), f"e{e}")
                    bits.append(nm if d > 0 else nm + "⁻¹")
                names[("1", i)] = "∘".join(bits)
            else:
                names[("1", i)] = f"id_{names[('0', start)]}"
        carrier = FinPresheaf(G1, (x.size("0"), len(words)), (tuple(src), tuple(tgt)))
        index = {w: i for i, w in enumerate(words)}
        unit = PresheafMap(x, carrier, (
            tuple(range(x.size("0"))),
            tuple(index[(((e, 1),), edges[e][0])] for e in range(x.size("1"))),
        ))
        return MonadValue(carrier, unit, names, exact=_graph_is_forest(x),
                          data={"words": words, "index": index})

    @staticmethod
    def _reduce(seq):
        out = []
        for step in seq:
            if out and out[-1] == (step[0], -step[1]):
                out.pop()
            else:
                out.append(step)
        return tuple(out)

    def kleisli(self, f, tx, ty):
        ywords = ty.data["words"]
        yindex = ty.data["index"]
        v_part = tuple(f("0", v) for v in range(tx.carrier.size("0")))
        e_part = []
        for w, start in tx.data["words"]:
            seq = []
            for e, d in w:
                target_word, tstart = ywords[f("1", e)]
                seg = target_word if d > 0 else tuple((ee, -dd) for ee, dd in reversed(target_word))
                seq.extend(seg)
            red = self._reduce(seq)
            out = (red, v_part[start])
            idx = yindex.get(out)
            if idx is None:
                raise TruncationError("zigzag word left the truncation window")
            e_part.append(idx)
        return PresheafMap(tx.carrier, ty.carrier, (v_part, tuple(e_part)))


class PointingMonad(ComputableMonad):
    """P X = X + X_1 . [0]: freely adjoin an isolated vertex u(e) per edge."""

    name = "pointing"

    def _value(self, x, labels):
        nv, ne = x.size("0"), x.size("1")
        src, tgt = x.act("sigma"), x.act("tau")
        carrier = make_graph(nv + ne, tuple(zip(src, tgt)))
        names = dict(labels)
        for e in range(ne):
            names[("0", nv + e)] = f"u({labels.get(('1', e), 'e%d' % e)})"
        unit = PresheafMap(x, carrier, (tuple(range(nv)), tuple(range(ne))))
        return MonadValue(carrier, unit, names, True, data={"nv": nv, "ne": ne})

    def kleisli(self, f, tx, ty):
        nv, ne = tx.data["nv"], tx.data["ne"]
        ynv = ty.data["nv"]
        v_part = [0] * (nv + ne)
        for v in range(nv):
            v_part[v] = f("0", v)
        e_part = [f("1", e) for e in range(ne)]
        for e in range(ne):
            v_part[nv + e] = ynv + f("1", e)
        return PresheafMap(tx.carrier, ty.carrier, (tuple(v_part), tuple(e_part)))


class FreeInvolutionMonad(ComputableMonad):
    """Q X = X + X_1 . [1]: freely adjoin a disjoint edge i(e) per edge."""

    name = "free-involution"

    def _value(self, x, labels):
        nv, ne = x.size("0"), x.size("1")
        src, tgt = list(x.act("sigma")), list(x.act("tau"))
        for e in range(ne):
            src.append(nv + 2 * e)
            tgt.append(nv + 2 * e + 1)
        carrier = make_graph(nv + 2 * ne, tuple(zip(src, tgt)))
        names = dict(labels)
        for e in range(ne):
            base = labels.get(("1", e), f"e{e}")
            names[("1", ne + e)] = f"i({base})"
            names[("0", nv + 2 * e)] = f"s(i({base}))"
            names[("0", nv + 2 * e + 1)] = f"t(i({base}))"
        unit = PresheafMap(x, carrier, (tuple(range(nv)), tuple(range(ne))))
        return MonadValue(carrier, unit, names, True, data={"nv": nv, "ne": ne})

    def kleisli(self, f, tx, ty):
        nv, ne = tx.data["nv"], tx.data["ne"]
        ynv, yne = ty.data["nv"], ty.data["ne"]

        def flip(g: int) -> int:
            return g + yne if g < yne else g - yne

        v_part = [0] * (nv + 2 * ne)
        e_part = [0] * (2 * ne)
        for v in range(nv):
            v_part[v] = f("0", v)
        ysrc, ytgt = ty.carrier.act("sigma"), ty.carrier.act("tau")
        for e in range(ne):
            g = f("1", e)
            e_part[e] = g
            e_part[ne + e] = flip(g)
            v_part[nv + 2 * e] = ysrc[flip(g)]
            v_part[nv + 2 * e + 1] = ytgt[flip(g)]
        return PresheafMap(tx.carrier, ty.carrier, (tuple(v_part), tuple(e_part)))


class InvolutiveGraphMonad(ComputableMonad):
    """The involutive-graph monad: T X keeps X's vertices and adds a reversed
    copy i(e) of each edge (its algebras have s i = t)."""

    name = "involutive"

    def _value(self, x, labels):
        nv, ne = x.size("0"), x.size("1")
        src, tgt = list(x.act("sigma")), list(x.act("tau"))
        for e in range(ne):
            src.append(x.act("tau")[e])
            tgt.append(x.act("sigma")[e])
        carrier = make_graph(nv, tuple(zip(src, tgt)))
        names = dict(labels)
        for e in range(ne):
            base = labels.get(("1", e), f"e{e}")
            names[("1", ne + e)] = f"i({base})"
        unit = PresheafMap(x, carrier, (tuple(range(nv)), tuple(range(ne))))
        return MonadValue(carrier, unit, names, True, data={"nv": nv, "ne": ne})

    def kleisli(self, f, tx, ty):
        nv, ne = tx.data["nv"], tx.data["ne"]
        yne = ty.data["ne"]

        def flip(g: int) -> int:
            return g + yne if g < yne else g - yne

        v_part = tuple(f("0", v) for v in range(nv))
        e_part = [0] * (2 * ne)
        for e in range(ne):
            g = f("1", e)
            e_part[e] = g
            e_part[ne + e] = flip(g)
        return PresheafMap(tx.carrier, ty.carrier, (v_part, tuple(e_part)))


# ---------------------------------------------------------------------------
# Set monads
# ---------------------------------------------------------------------------

class FreeMonoidMonad(ComputableMonad):
    """Word monad on Set, truncated at word length max_len."""

    name = "free-monoid"
    shape = TERMINAL

    def __init__(self, max_len: int = 6):
        super().__init__()
        self.max_len = max_len

    def _value(self, x, labels):
        n = x.size("*")
        words = []
        for k in range(self.max_len + 1):
            words.extend(itertools.product(range(n), repeat=k))
        carrier = make_set(len(words))
        index = {w: i for i, w in enumerate(words)}
        names = {("*", i): "·".join(labels.get(("*", v), f"x{v}") for v in w) or "1"
                 for i, w in enumerate(words)}
        unit = PresheafMap(x, carrier, (tuple(index[(v,)] for v in range(n)),))
        return MonadValue(carrier, unit, names, exact=(n == 0),
                          data={"words": words, "index": index})

    def kleisli(self, f, tx, ty):
        yindex = ty.data["index"]
        ywords = ty.data["words"]
        part = []
        for w in tx.data["words"]:
            flat = tuple(v for x in w for v in ywords[f("*", x)])
            idx = yindex.get(flat)
            if idx is None:
                raise TruncationError("word left the truncation window")
            part.append(idx)
        return PresheafMap(tx.carrier, ty.carrier, (tuple(part),))


class SignatureTermMonad(ComputableMonad):
    """Free monad on a signature, realised as depth-truncated terms.

    Terms are leaves of X or nodes (arity a, element of Sigma(a), input map);
    a node of edge shape has the endpoint nodes of its boundary as source and
    target, so the construction works uniformly over Set and Grph.
    """

    def __init__(self, sig: Signature, depth: int = 3):
        super().__init__()
        self.sig = sig
        self.depth = depth
        self.shape = sig.family.shape
        self.name = f"free-signature-monad(depth={depth})"

    def _value(self, x, labels):
        fam = self.sig.family
        shape = self.shape
        # terms[obj] maps term key -> index; keys: ("leaf", i) or
        # ("node", a, (obj_s, s), input key tuple)
        terms: dict[str, list] = {obj: [] for obj in shape.objects}
        index: dict[tuple[str, tuple], int] = {}

        def add(obj: str, key: tuple) -> int:
            if (obj, key) in index:
                return index[(obj, key)]
            i = len(terms[obj])
            terms[obj].append(key)
            index[(obj, key)] = i
            return i

        for obj, i in x.elements():
            add(obj, ("leaf", i))
        def carrier_now() -> FinPresheaf:
            sizes = tuple(len(terms[obj]) for obj in shape.objects)
            actions = []
            for name, src, dst in shape.arrows:
                table = []
                for key in terms[dst]:
                    table.append(index[(src, _boundary(key, name))])
                actions.append(tuple(table))
            return FinPresheaf(shape, sizes, tuple(actions))

        def _boundary(key: tuple, arrow: str) -> tuple:
            if key[0] == "leaf":
                tab = x.act(arrow)
                return ("leaf", tab[key[1]])
            _, a, (obj_s, s), inp = key
            sig_part = self.sig.part(a)
            tab = sig_part.act(arrow)
            arrow_src = next(ar[1] for ar in shape.arrows if ar[0] == arrow)
            return ("node", a, (arrow_src, tab[s]), inp)

        added = True
        for _ in range(self.depth):
            snapshot = carrier_now()
            added = False
            for a in self.sig.support():
                sig_part = self.sig.part(a)
                for pm in hom_set(fam.realize(a), snapshot):
                    inp_key = tuple(
                        (obj, pm(obj, i)) for obj, i in fam.realize(a).elements())
                    for obj_s, s in sig_part.elements():
                        key = ("node", a, (obj_s, s), inp_key)
                        if (obj_s, key) not in index:
                            add(obj_s, key)
                            added = True
            if not added:
                break
        carrier = carrier_now()
        names = {}
        for obj in shape.objects:
            for i, key in enumerate(terms[obj]):
                names[(obj, i)] = self._term_label(obj, key, labels, terms)
        unit = PresheafMap(x, carrier, tuple(
            tuple(index[(obj, ("leaf", i))] for i in range(x.size(obj)))
            for obj in shape.objects))
        return MonadValue(carrier, unit, names, exact=not added,
                          data={"terms": terms, "index": index})

    def _term_label(self, obj, key, labels, terms, depth=0):
        if key[0] == "leaf":
            return labels.get((obj, key[1]), f"{obj}{key[1]}")
        if depth > 6:
            return "..."
        _, a, (obj_s, s), inp = key
        args = ",".join(
            self._term_label(o, terms[o][i], labels, terms, depth + 1)
            for o, i in inp)
        return f"op{a}.{obj_s}{s}({args})"

    def kleisli(self, f, tx, ty):
        fam = self.sig.family
        shape = self.shape
        yindex = ty.data["index"]
        yterms = ty.data["terms"]
        memo: dict[tuple[str, int], int] = {}

        def follow(obj: str, i: int) -> int:
            if (obj, i) in memo:
                return memo[(obj, i)]
            key = tx.data["terms"][obj][i]
            if key[0] == "leaf":
                res = f(obj, key[1])
            else:
                _, a, (obj_s, s), inp = key
                out_inp = tuple((o, follow(o, j)) for o, j in inp)
                nkey = ("node", a, (obj_s, s),
                        tuple((o, j) for o, j in out_inp))
                if (obj_s, nkey) not in yindex:
                    raise TruncationError("term left the truncation window")
                res = yindex[(obj_s, nkey)]
            memo[(obj, i)] = res
            return res

        parts = tuple(
            tuple(follow(obj, i) for i in range(tx.carrier.size(obj)))
            for obj in shape.objects)
        return PresheafMap(tx.carrier, ty.carrier, parts)


def free_monad_from_signature(sig: Signature, depth: int = 3) -> ComputableMonad:
    """The free monad on a signature as a depth-truncated term monad; the
    empty signature gives the identity monad."""
    if not sig.support():
        return IdentityMonad(sig.family.shape)
    return SignatureTermMonad(sig, depth)


# ---------------------------------------------------------------------------
# Builtin registry
# ---------------------------------------------------------------------------

def builtin(name: str, **kwargs) -> ComputableMonad:
    table: dict[str, Callable[[], ComputableMonad]] = {
        "identity": lambda: IdentityMonad(G1),
        "identity-fin": lambda: IdentityMonad(TERMINAL),
        "free-category": lambda: FreeCategoryMonad(**kwargs),
        "free-groupoid": lambda: FreeGroupoidMonad(**kwargs),
        "pointing": lambda: PointingMonad(),
        "free-involution": lambda: FreeInvolutionMonad(),
        "involutive": lambda: InvolutiveGraphMonad(),
        "free-monoid": lambda: FreeMonoidMonad(**kwargs),
    }
    if name not in table:
        raise KeyError(f"unknown builtin monad {name!r}")
    return table[name]()


# ---------------------------------------------------------------------------
# Kleisli arity categories
# ---------------------------------------------------------------------------

@dataclass
class KleisliTable:
    """hom(a, b) = hom(K a, T(K b)) with Kleisli composition."""

    monad: ComputableMonad
    family: object
    window: tuple[int, ...]
    values: dict[int, MonadValue]
    homs: dict[tuple[int, int], list[PresheafMap]]
    exact: dict[int, bool]

    def size(self, a: int, b: int) -> int:
        return len(self.homs[(a, b)])

    def identity(self, a: int) -> int:
        unit = self.values[a].unit
        return self.homs[(a, a)].index(unit)

    def compose(self, a: int, b: int, c: int, f_idx: int, g_idx: int) -> int:
        f = self.homs[(a, b)][f_idx]
        g = self.homs[(b, c)][g_idx]
        ext = self.monad.kleisli(g, self.values[b], self.values[c])
        return self.homs[(a, c)].index(f.then(ext))


def arity_category(monad: ComputableMonad, family, window: list[int],
                   budget: Optional[Budget] = None) -> KleisliTable:
    values = {b: monad.at(family.realize(b)) for b in window}
    homs = {}
    for a in window:
        ka = family.realize(a)
        for b in window:
            homs[(a, b)] = hom_set(ka, values[b].carrier, budget)
    return KleisliTable(monad, family, tuple(sorted(window)), values, homs,
                        {b: values[b].exact for b in window})


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

@dataclass
class PushoutProbe:
    """A pushout square in graphs, built by base.pushout so the square is a
    genuine pushout by construction."""

    z: FinPresheaf
    x: FinPresheaf
    y: FinPresheaf
    f: PresheafMap
    g: PresheafMap
    po: Pushout
    labels: dict[tuple[str, int], str]
    x_labels: dict[tuple[str, int], str]
    y_labels: dict[tuple[str, int], str]
    z_labels: dict[tuple[str, int], str]


def groupoid_pushout_probe() -> PushoutProbe:
    """The span [1] <-tau- [0] -tau-> [1] whose pushout is a -r-> b <-s- c."""
    point = DELTA0.realize(0)
    interval = DELTA0.realize(1)
    tau = PresheafMap(point, interval, ((1,), ()))
    po = pushout(tau, tau)
    labels = {("0", 0): "a", ("0", 1): "b", ("0", 2): "c",
              ("1", 0): "r", ("1", 1): "s"}
    return PushoutProbe(
        z=point, x=interval, y=interval, f=tau, g=tau, po=po, labels=labels,
        x_labels={("0", 0): "a", ("0", 1): "b", ("1", 0): "r"},
        y_labels={("0", 0): "c", ("0", 1): "b", ("1", 0): "s"},
        z_labels={("0", 0): "b"},
    )


@dataclass
class PreservationReport:
    monad: str
    injective: bool
    surjective: bool
    domain_sizes: dict[str, int]
    codomain_sizes: dict[str, int]
    missing: list[dict]
    collapsed: list[dict]

    @property
    def preserved(self) -> bool:
        return self.injective and self.surjective


def pushout_preservation(monad: ComputableMonad, probe: PushoutProbe) -> PreservationReport:
    """Compare T X +_{T Z} T Y with T(pushout) along the canonical map."""
    tz = monad.at(probe.z, probe.z_labels)
    tx = monad.at(probe.x, probe.x_labels)
    ty = monad.at(probe.y, probe.y_labels)
    tp = monad.at(probe.po.presheaf, probe.labels)
    tf = monad.map(probe.f, tz, tx)
    tg = monad.map(probe.g, tz, ty)
    q = pushout(tf, tg)
    t_inj1 = monad.map(probe.po.inj1, tx, tp)
    t_inj2 = monad.map(probe.po.inj2, ty, tp)
    cmp_map = q.factor(t_inj1, t_inj2)
    missing = []
    collapsed = []
    for obj in q.presheaf.shape.objects:
        part = cmp_map.part(obj)
        hit: dict[int, int] = {}
        for i, v in enumerate(part):
            if v in hit:
                collapsed.append({"component": obj, "elements": (hit[v], i),
                                  "image": tp.label(obj, v)})
            hit[v] = i
        for v in range(tp.carrier.size(obj)):
            if v not in hit:
                src_v, tgt_v = None, None
                if obj == "1":
                    src_v = tp.label("0", tp.carrier.act("sigma")[v])
                    tgt_v = tp.label("0", tp.carrier.act("tau")[v])
                missing.append({"component": obj, "element": tp.label(obj, v),
                                "src": src_v, "tgt": tgt_v})
    dom_sizes = {obj: q.presheaf.size(obj) for obj in q.presheaf.shape.objects}
    cod_sizes = {obj: tp.carrier.size(obj) for obj in tp.carrier.shape.objects}
    return PreservationReport(monad.name, not collapsed, not missing,
                              dom_sizes, cod_sizes, missing, collapsed)


@dataclass
class ArityProbeReport:
    monad: str
    arity: int
    total: int
    hit: int
    unhit: list[str]

    @property
    def passed(self) -> bool:
        return not self.unhit


def nerve_arity_probe(monad: ComputableMonad, probe: PushoutProbe,
                      arity: int, budget: Optional[Budget] = None) -> ArityProbeReport:
    """Joint surjectivity of postcomposition by the probe's two pushout legs
    on maps from the realized arity (Prop.-style counterexample probe)."""
    tx = monad.at(probe.x, probe.x_labels)
    ty = monad.at(probe.y, probe.y_labels)
    tp = monad.at(probe.po.presheaf, probe.labels)
    t_inj1 = monad.map(probe.po.inj1, tx, tp)
    t_inj2 = monad.map(probe.po.inj2, ty, tp)
    ka = DELTA0.realize(arity)
    targets = hom_set(ka, tp.carrier, budget)
    hit = set()
    for leg_val, t_inj in ((tx, t_inj1), (ty, t_inj2)):
        for f in hom_set(ka, leg_val.carrier, budget):
            hit.add(f.then(t_inj).parts)
    unhit = []
    for f in targets:
        if f.parts not in hit:
            cells = ", ".join(tp.label("1", f("1", e)) for e in range(ka.size("1")))
            unhit.append(f"({cells})")
    return ArityProbeReport(monad.name, arity, len(targets),
                            len(targets) - len(unhit), unhit)


# ---------------------------------------------------------------------------
# Census formulas, Catalan terms, factorisations, coequaliser experiment
# ---------------------------------------------------------------------------

def hom_census_formulas(which: str, n: int, x: FinPresheaf,
                        budget: Optional[Budget] = None) -> dict:
    """Direct |Grph([n], TX)| for T in {P, Q} against the closed forms."""
    assert which in ("P", "Q")
    monad = PointingMonad() if which == "P" else FreeInvolutionMonad()
    tx = monad.at(x)
    direct = len(hom_set(DELTA0.realize(n), tx.carrier, budget))
    g0 = x.size("0")
    g1 = x.size("1")
    gn = len(hom_set(DELTA0.realize(n), x, budget))
    if which == "P":
        closed = g0 + g1 if n == 0 else gn
    else:
        if n == 0:
            closed = g0 + 2 * g1
        elif n == 1:
            closed = 2 * g1
        else:
            closed = gn
    return {"monad": which, "n": n, "direct": direct, "closed": closed,
            "match": direct == closed}


def binary_trees(leaves: int, max_nodes: int):
    """All binary trees over `leaves` labelled leaves with <= max_nodes
    internal nodes, yielded as (internal node count, nested tuple)."""

    def shapes(n: int):
        if n == 0:
            yield "leaf"
            return
        for i in range(n):
            for left in shapes(i):
                for right in shapes(n - 1 - i):
                    yield (left, right)

    def decorate(shape, labels):
        if shape == "leaf":
            for v in labels:
                yield v
            return
        left, right = shape
        for l in decorate(left, labels):
            for r in decorate(right, labels):
                yield (l, r)

    labels = list(range(leaves))
    for n in range(max_nodes + 1):
        for shape in shapes(n):
            for tree in decorate(shape, labels):
                yield n, tree


CATALAN = (1, 1, 2, 5, 14, 42, 132, 429)


def catalan_census(set_size: int, max_nodes: int = 6) -> dict:
    """Counts of binary-tree terms per internal node count against the
    Catalan closed form C_n * |X|^(n+1)."""
    counts = {n: 0 for n in range(max_nodes + 1)}
    for n, _tree in binary_trees(set_size, max_nodes):
        counts[n] += 1
    closed = {n: CATALAN[n] * set_size ** (n + 1) for n in range(max_nodes + 1)}
    return {"size": set_size, "counts": counts, "closed": closed,
            "match": counts == closed,
            "total": sum(counts.values())}


def factor_through(h: PresheafMap, y: FinPresheaf,
                   budget: Optional[Budget] = None) -> Optional[tuple[PresheafMap, PresheafMap]]:
    """Search hom(X, Y) x hom(Y, Z) for a factorisation of h through y."""
    for p in hom_set(h.dom, y, budget):
        for q in hom_set(y, h.cod, budget):
            if p.then(q) == h:
                return (p, q)
    return None


def all_graphs(max_vertices: int, max_edges: int):
    for v in range(max_vertices + 1):
        for e in range(max_edges + 1):
            if v == 0 and e > 0:
                continue
            for edges in itertools.product(
                    itertools.product(range(v), repeat=2), repeat=e):
                yield make_graph(v, edges)


def coequalizer_experiment(max_vertices: int = 3, max_edges: int = 3) -> dict:
    """Enumerate P-algebra and Q-algebra structures on all small graphs and
    verify that Q-structures equalised by the two comparison functors
    (s after i = t) are exactly the involutive-graph structures."""
    rows = []
    agg: dict[tuple[int, int], list[int]] = {}
    ok = True
    for x in all_graphs(max_vertices, max_edges):
        nv, ne = x.size("0"), x.size("1")
        src, tgt = x.act("sigma"), x.act("tau")
        p_structs = nv ** ne
        q_structs = 0
        equalised = 0
        involutive = 0
        for i_map in itertools.product(range(ne), repeat=ne):
            if any(i_map[i_map[e]] != e for e in range(ne)):
                continue
            q_structs += 1
            si_t = all(src[i_map[e]] == tgt[e] for e in range(ne))
            if si_t:
                equalised += 1
                # a Q-structure with s i = t also satisfies t i = s
                if all(tgt[i_map[e]] == src[e] for e in range(ne)):
                    involutive += 1
        if equalised != involutive:
            ok = False
        rows.append({"vertices": nv, "edges": list(map(list, graph_edges(x))),
                     "p": p_structs, "q": q_structs,
                     "equalised": equalised, "involutive": involutive})
        a = agg.setdefault((nv, ne), [0, 0, 0, 0, 0])
        a[0] += 1
        a[1] += p_structs
        a[2] += q_structs
        a[3] += equalised
        a[4] += involutive
    aggregate = [
        {"vertices": v, "edges": e, "graphs": c[0], "p": c[1], "q": c[2],
         "equalised": c[3], "involutive": c[4]}
        for (v, e), c in sorted(agg.items())
    ]
    return {"ok": ok, "aggregate": aggregate, "graph_count": len(rows)}
