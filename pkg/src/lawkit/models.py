"""Concrete models of a pretheory, their enumeration and separation, nerve
criteria for arity-indexed families, and bounded free models.

A concrete model is a carrier presheaf X together with, for each generator
g: a -> b, a function hom(K b, X) -> hom(K a, X) extending the nerve of X.
Interpretations are stored as index tables over the canonical hom-set bases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from ._util import Budget, BudgetExceededError
from .base import (
    ArityFamily,
    ArityHom,
    ArityIndexedFamily,
    FinPresheaf,
    PresheafMap,
    hom_set,
    make_graph,
    make_set,
)
from .pretheory import (
    BaseLetter,
    GenLetter,
    Pretheory,
    Word,
    reduce_word,
)


# ---------------------------------------------------------------------------
# Hom bases for a carrier
# ---------------------------------------------------------------------------

class ModelBasis:
    """Canonical hom-set bases hom(K a, X) for the arities a pretheory uses."""

    def __init__(self, family: ArityFamily, carrier: FinPresheaf,
                 budget: Optional[Budget] = None):
        self.family = family
        self.carrier = carrier
        self.budget = budget
        self.homs: dict[int, list[PresheafMap]] = {}
        self.index: dict[int, dict[tuple, int]] = {}
        self._base_tables: dict[tuple, tuple[int, ...]] = {}

    def ensure(self, a: int) -> None:
        if a not in self.homs:
            maps = hom_set(self.family.realize(a), self.carrier, self.budget)
            self.homs[a] = maps
            self.index[a] = {f.parts: i for i, f in enumerate(maps)}

    def size(self, a: int) -> int:
        self.ensure(a)
        return len(self.homs[a])

    def base_table(self, h: ArityHom) -> tuple[int, ...]:
        """Precomposition by K(h): a table hom(K dst, X) -> hom(K src, X)."""
        if h.key not in self._base_tables:
            self.ensure(h.src)
            self.ensure(h.dst)
            hm = self.family.hom_map(h)
            self._base_tables[h.key] = tuple(
                self.index[h.src][hm.then(f).parts] for f in self.homs[h.dst]
            )
        return self._base_tables[h.key]


# ---------------------------------------------------------------------------
# Concrete models
# ---------------------------------------------------------------------------

@dataclass
class ConcreteModel:
    pretheory: Pretheory
    carrier: FinPresheaf
    interp: dict[str, tuple[int, ...]]
    basis: ModelBasis = field(repr=False)

    def key(self) -> tuple:
        return tuple(self.interp[g] for g, _, _ in self.pretheory.generators)


def _letter_table(m: ConcreteModel, l) -> tuple[int, ...]:
    if isinstance(l, GenLetter):
        return m.interp[l.name]
    return m.basis.base_table(l.hom)


def evaluate_word(m: ConcreteModel, w: Word) -> tuple[int, ...]:
    """The function hom(K dst, X) -> hom(K src, X) computed by w, as an index
    table over the canonical bases (identity word gives the identity table)."""
    m.basis.ensure(w.src)
    m.basis.ensure(w.dst)
    table = tuple(range(m.basis.size(w.dst)))
    for l in reversed(w.letters):
        outer = _letter_table(m, l)
        table = tuple(outer[v] for v in table)
    return table


def check_model(p: Pretheory, m: ConcreteModel) -> tuple[bool, list[int]]:
    """True iff every equation evaluates equally; returns violated indices."""
    if m.pretheory.family is not p.family or m.pretheory.generators != p.generators:
        raise ValueError("candidate's generators do not match the pretheory")
    bad = [k for k, (lhs, rhs) in enumerate(p.equations)
           if evaluate_word(m, lhs) != evaluate_word(m, rhs)]
    return (not bad, bad)


# ---------------------------------------------------------------------------
# Model enumeration with pointwise constraint propagation
# ---------------------------------------------------------------------------

def _word_tables(m: ConcreteModel, letters, start_table):
    table = start_table
    for l in reversed(letters):
        outer = _letter_table(m, l)
        table = tuple(outer[v] for v in table)
    return table


def _single_occurrence_split(eq, gname):
    """If gname occurs exactly once across both sides, return
    (pre, suf, other_side) for the side containing it, else None."""
    lhs, rhs = eq
    occs = []
    for side, other in ((lhs, rhs), (rhs, lhs)):
        for j, l in enumerate(side.letters):
            if isinstance(l, GenLetter) and l.name == gname:
                occs.append((side, other, j))
    if len(occs) != 1:
        return None
    side, other, j = occs[0]
    return side.letters[:j], side.letters[j + 1:], other


def iter_models(p: Pretheory, carrier: FinPresheaf,
                budget: Optional[Budget] = None) -> Iterator[ConcreteModel]:
    """All concrete models on the carrier, via backtracking over generator
    interpretations.  Equations pin interpretations pointwise as soon as all
    their other letters are assigned, which keeps the bundled presentations
    tractable; the final assignment is re-checked in full."""
    basis = ModelBasis(p.family, carrier, budget)
    for _, a, b in p.generators:
        basis.ensure(a)
        basis.ensure(b)
    for lhs, rhs in p.equations:
        basis.ensure(lhs.src)
        basis.ensure(lhs.dst)
    model = ConcreteModel(p, carrier, {}, basis)
    gen_of = {g: (a, b) for g, a, b in p.generators}

    def assigned_letters(letters) -> bool:
        return all(not isinstance(l, GenLetter) or l.name in model.interp
                   for l in letters)

    def candidates(gname: str) -> Optional[list[list[int]]]:
        a, b = gen_of[gname]
        npts = basis.size(b)
        target = basis.size(a)
        cand: list[Optional[set[int]]] = [None] * npts
        for eq in p.equations:
            split = _single_occurrence_split(eq, gname)
            if split is None:
                continue
            pre, suf, other = split
            if not assigned_letters(pre) or not assigned_letters(suf) \
                    or not assigned_letters(other.letters):
                continue
            dst = other.dst
            idt = tuple(range(basis.size(dst)))
            suf_t = _word_tables(model, suf, idt)
            other_t = _word_tables(model, other.letters, idt)
            pre_t = _word_tables(model, pre, tuple(range(target)))
            for q in range(basis.size(dst)):
                y, t = suf_t[q], other_t[q]
                ok = {z for z in range(target) if pre_t[z] == t}
                cand[y] = ok if cand[y] is None else (cand[y] & ok)
        return [sorted(c) if c is not None else list(range(target)) for c in cand]

    def ready_equations() -> list[int]:
        return [k for k, (lhs, rhs) in enumerate(p.equations)
                if assigned_letters(lhs.letters) and assigned_letters(rhs.letters)]

    results_order = [g for g, _, _ in p.generators]

    def rec(remaining: list[str]) -> Iterator[ConcreteModel]:
        if budget is not None:
            budget.spend()
        if not remaining:
            ok, _ = check_model(p, model)
            if ok:
                yield ConcreteModel(p, carrier, dict(model.interp), basis)
            return
        best, best_cands, best_size = None, None, None
        for g in remaining:
            cands = candidates(g)
            size = 1
            for c in cands:
                size *= len(c)
                if best_size is not None and size >= best_size:
                    break
            if best_size is None or size < best_size:
                best, best_cands, best_size = g, cands, size
        rest = [g for g in remaining if g != best]
        checked_before = set(ready_equations())
        for choice in itertools.product(*best_cands):
            if budget is not None:
                budget.spend()
            model.interp[best] = tuple(choice)
            ok = True
            for k in ready_equations():
                if k in checked_before:
                    continue
                lhs, rhs = p.equations[k]
                if evaluate_word(model, lhs) != evaluate_word(model, rhs):
                    ok = False
                    break
            if ok:
                yield from rec(rest)
            del model.interp[best]

    yield from rec(list(results_order))


def enumerate_models(p: Pretheory, carrier: FinPresheaf,
                     budget: Optional[Budget] = None) -> list[ConcreteModel]:
    """All models on the carrier in deterministic (interpretation-table) order."""
    try:
        found = list(iter_models(p, carrier, budget))
    except BudgetExceededError:
        raise
    found.sort(key=lambda m: m.key())
    return found


# ---------------------------------------------------------------------------
# Carrier zoos and model separation
# ---------------------------------------------------------------------------

def carriers_upto(family: ArityFamily, bound: int) -> list[FinPresheaf]:
    """All carriers with every component of size <= bound, in a fixed order."""
    if family.kind == "fin":
        return [make_set(n) for n in range(bound + 1)]
    out = []
    for v in range(bound + 1):
        for e in range(bound + 1):
            if v == 0 and e > 0:
                continue
            for edges in itertools.product(
                    itertools.product(range(v), repeat=2), repeat=e):
                out.append(make_graph(v, edges))
    return out


def model_separates(p: Pretheory, w1: Word, w2: Word, size_bound: int = 2,
                    budget: Optional[Budget] = None) -> Optional[ConcreteModel]:
    """A model on which the two parallel words evaluate differently, if one
    exists within the size bound."""
    if (w1.src, w1.dst) != (w2.src, w2.dst):
        raise ValueError("words must be parallel")
    for carrier in carriers_upto(p.family, size_bound):
        for m in iter_models(p, carrier, budget):
            if evaluate_word(m, w1) != evaluate_word(m, w2):
                return m
    return None


class ModelZoo:
    """All models on carriers up to a size bound, with cached word evaluation;
    used for inequality certificates."""

    def __init__(self, p: Pretheory, size_bound: int = 2,
                 budget: Optional[Budget] = None):
        self.pretheory = p
        self.size_bound = size_bound
        self.models: list[ConcreteModel] = []
        for carrier in carriers_upto(p.family, size_bound):
            self.models.extend(enumerate_models(p, carrier, budget))
        self._cache: dict[tuple, tuple] = {}

    def eval_profile(self, w: Word) -> tuple:
        w = reduce_word(w)
        key = (w.src, w.dst, tuple(l.sort_key for l in w.letters))
        if key not in self._cache:
            self._cache[key] = tuple(evaluate_word(m, w) for m in self.models)
        return self._cache[key]

    def separated(self, w1: Word, w2: Word) -> bool:
        return self.eval_profile(w1) != self.eval_profile(w2)


# ---------------------------------------------------------------------------
# Nerve criteria
# ---------------------------------------------------------------------------

@dataclass
class NerveVerdict:
    ok: bool
    witness: Optional[dict]

    def __bool__(self) -> bool:
        return self.ok


def _product_compare(F: ArityIndexedFamily, n: int, p: int) -> Optional[dict]:
    """Compare F(n) -> F(p) x F(n-p) along the coproduct injections."""
    q = n - p
    i1 = ArityHom("map", p, n, tuple(range(p)))
    i2 = ArityHom("map", q, n, tuple(range(p, n)))
    t1, t2 = F.act(i1), F.act(i2)
    image: dict[tuple[int, int], int] = {}
    for u in range(F.sizes[n]):
        key = (t1[u], t2[u])
        if key in image:
            return {"arity": n, "split": (p, q), "kind": "not-injective",
                    "elements": (image[key], u)}
        image[key] = u
    for pair in itertools.product(range(F.sizes[p]), range(F.sizes[q])):
        if pair not in image:
            return {"arity": n, "split": (p, q), "kind": "not-surjective",
                    "tuple": pair}
    return None


def segal_fibre_tuples(F: ArityIndexedFamily, n: int) -> list[tuple[int, ...]]:
    """Tuples in F([1]) x_{F([0])} ... x_{F([0])} F([1]) (n factors)."""
    s = F.act(ArityHom("shift", 0, 1, (0,)))
    t = F.act(ArityHom("shift", 0, 1, (1,)))
    tuples: list[tuple[int, ...]] = [()]
    for k in range(n):
        nxt = []
        for tup in tuples:
            for x in range(F.sizes[1]):
                if k == 0 or t[tup[-1]] == s[x]:
                    nxt.append(tup + (x,))
        tuples = nxt
    return tuples


def segal_compare(F: ArityIndexedFamily, n: int) -> Optional[dict]:
    """The comparison F([n]) -> iterated fibre product; None when bijective."""
    assert n >= 1
    edges = [ArityHom("shift", 1, n, (k,)) for k in range(n)]
    tables = [F.act(e) for e in edges]
    image: dict[tuple[int, ...], int] = {}
    for u in range(F.sizes[n]):
        key = tuple(tab[u] for tab in tables)
        if key in image:
            return {"arity": n, "kind": "not-injective", "elements": (image[key], u)}
        image[key] = u
    for tup in segal_fibre_tuples(F, n):
        if tup not in image:
            return {"arity": n, "kind": "not-surjective", "tuple": tup}
    return None


def segal_check(F: ArityIndexedFamily, n: int) -> bool:
    """Whether the Segal comparison at [n] is a bijection."""
    return segal_compare(F, n) is None


def is_nerve(family: ArityFamily, F: ArityIndexedFamily) -> NerveVerdict:
    """Decide whether the family satisfies the density-presentation limit
    condition on its represented arities (product condition over fin via all
    binary splits plus the empty product; Segal condition over graphs)."""
    if family.kind == "fin":
        if 0 in F.arities and F.sizes[0] != 1:
            return NerveVerdict(False, {"arity": 0, "kind": "empty-product",
                                        "size": F.sizes[0]})
        for n in F.arities:
            for p in range(1, n):
                if p in F.arities and (n - p) in F.arities:
                    w = _product_compare(F, n, p)
                    if w is not None:
                        return NerveVerdict(False, w)
        return NerveVerdict(True, None)
    for n in F.arities:
        if n >= 1 and 0 in F.arities and 1 in F.arities:
            w = segal_compare(F, n)
            if w is not None:
                return NerveVerdict(False, w)
    return NerveVerdict(True, None)


def mutate_family(F: ArityIndexedFamily, a: int, op: str, idx: int) -> ArityIndexedFamily:
    """Remove or duplicate one element of F(a), patching the actions out of
    F(a).  Actions into F(a) are dropped (the Segal checker never uses them
    for a >= 2)."""
    assert op in ("remove", "duplicate")
    sizes = dict(F.sizes)
    sizes[a] = sizes[a] + (1 if op == "duplicate" else -1)
    acts: dict[tuple, tuple[int, ...]] = {}
    for key, table in F.acts.items():
        _, src, dst, _ = key
        if dst == a:
            if op == "remove":
                acts[key] = table[:idx] + table[idx + 1:]
            else:
                acts[key] = table + (table[idx],)
        elif src == a:
            continue
        else:
            acts[key] = table
    labels = dict(F.labels)
    labels.pop(a, None)
    return ArityIndexedFamily(F.family, F.arities, sizes, acts, labels)


# ---------------------------------------------------------------------------
# Bounded free models
# ---------------------------------------------------------------------------

class _UF:
    def __init__(self):
        self.parent: list[int] = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i


@dataclass
class _App:
    gen: str
    inputs: tuple[int, ...]          # element ids, one per K(b)-element
    outputs: tuple[int, ...]         # element ids, one per K(a)-element
    weight: int


class FreeModel:
    """The bounded free concrete model on a carrier: formal terms (leaves and
    generator applications) quotiented by the presentation's equations, with
    applications created up to a weight bound.

    The weight of a leaf is 1; the weight of an application is the sum of the
    weights of its input's edge-level components (element-level over a
    one-object shape), floored at 1.  ``depth`` D admits weights <= D + 1, so
    over Set the free monoid model on n holds exactly the words of length
    <= D + 1.  ``saturated`` certifies the model is the exact free model.
    """

    def __init__(self, p: Pretheory, carrier: FinPresheaf, depth: int,
                 budget: Optional[Budget] = None,
                 leaf_labels: Optional[dict[tuple[str, int], str]] = None):
        self.pretheory = p
        self.base = carrier
        self.depth = depth
        self.cap = depth + 1
        self.budget = budget or Budget()
        self.family = p.family
        self.shape = p.family.shape
        self._leaf_labels = leaf_labels or {}

        self._uf = _UF()
        self._obj: list[str] = []
        self._weight: list[int] = []
        self._kind: list[tuple] = []      # ("leaf", obj, i) | ("app", app_id, obj, t)
        self._act: list[dict[str, int]] = []
        self._apps: list[_App] = []
        self._app_index: dict[tuple, int] = {}
        self._index_dirty = False
        self._deferred = False

        self._leaf_ids: dict[tuple[str, int], int] = {}
        for obj, i in carrier.elements():
            self._leaf_ids[(obj, i)] = self._new_element(obj, 1, ("leaf", obj, i))
        for k, (name, src, dst) in enumerate(self.shape.arrows):
            for i in range(carrier.size(dst)):
                e = self._leaf_ids[(dst, i)]
                self._act[e][name] = self._leaf_ids[(src, carrier.actions[k][i])]
        self._realize_cache: dict[int, FinPresheaf] = {}
        self._elems_cache: dict[int, list] = {}
        self._perm_cache: dict[tuple, tuple[int, ...]] = {}
        self._maps_cache: dict[int, list] = {}
        self._run()
        self._finalize()

    # -- low-level element/union machinery ---------------------------------

    def _new_element(self, obj: str, weight: int, kind: tuple) -> int:
        self.budget.spend()
        eid = self._uf.add()
        self._obj.append(obj)
        self._weight.append(weight)
        self._kind.append(kind)
        self._act.append({})
        return eid

    def _unite(self, a: int, b: int) -> bool:
        queue = [(a, b)]
        merged = False
        while queue:
            x, y = queue.pop()
            rx, ry = self._uf.find(x), self._uf.find(y)
            if rx == ry:
                continue
            if ry < rx:
                rx, ry = ry, rx
            self._uf.parent[ry] = rx
            merged = True
            self._index_dirty = True
            self._weight[rx] = min(self._weight[rx], self._weight[ry])
            for name, img in self._act[ry].items():
                if name in self._act[rx]:
                    queue.append((self._act[rx][name], img))
                else:
                    self._act[rx][name] = img
        return merged

    def _ensure_app_index(self) -> None:
        """Rekey applications by current class roots, merging colliding ones."""
        while self._index_dirty:
            self._index_dirty = False
            index: dict[tuple, int] = {}
            for app_id, app in enumerate(self._apps):
                key = (app.gen, tuple(self._uf.find(e) for e in app.inputs))
                if key in index:
                    other = self._apps[index[key]]
                    for e1, e2 in zip(other.outputs, app.outputs):
                        self._unite(e1, e2)
                else:
                    index[key] = app_id
            self._app_index = index

    def _class_weight(self, eid: int) -> int:
        return self._weight[self._uf.find(eid)]

    # -- rebuild: canonical classes and the quotient presheaf ---------------

    def _rebuild(self) -> None:
        """Recompute canonical classes and the quotient presheaf."""
        self._maps_cache = {}
        self._ensure_app_index()
        roots: dict[int, int] = {}
        for eid in range(len(self._obj)):
            r = self._uf.find(eid)
            if r not in roots:
                roots[r] = len(roots)
        by_obj: dict[str, list[int]] = {obj: [] for obj in self.shape.objects}
        for r in sorted(roots, key=lambda r: (self._weight[r], r)):
            by_obj[self._obj[r]].append(r)
        self._class_of_root: dict[int, int] = {}
        self._class_roots: dict[str, list[int]] = by_obj
        for obj, rs in by_obj.items():
            for k, r in enumerate(rs):
                self._class_of_root[r] = k
        sizes = tuple(len(by_obj[obj]) for obj in self.shape.objects)
        actions = []
        for (name, src, dst) in self.shape.arrows:
            table = []
            for r in by_obj[dst]:
                img = self._act[r][name]
                table.append(self._class_of_root[self._uf.find(img)])
            actions.append(tuple(table))
        self.carrier = FinPresheaf(self.shape, sizes, tuple(actions))

    def class_of(self, eid: int) -> int:
        return self._class_of_root[self._uf.find(eid)]

    def _class_rep(self, obj: str, cls: int) -> int:
        return self._class_roots[obj][cls]

    # -- weight-bounded enumeration of maps K(b) -> quotient ----------------

    def _realize(self, a: int) -> FinPresheaf:
        if a not in self._realize_cache:
            self._realize_cache[a] = self.family.realize(a)
        return self._realize_cache[a]

    def _elems(self, a: int) -> list[tuple[str, int]]:
        if a not in self._elems_cache:
            self._elems_cache[a] = list(self._realize(a).elements())
        return self._elems_cache[a]

    def _letter_perm(self, hom) -> tuple[int, ...]:
        """For a base letter h: positions in K(h.dst).elements() of each
        K(h.src)-element's image under the realisation of h."""
        if hom.key not in self._perm_cache:
            hm = self.family.hom_map(hom)
            pos = {e: k for k, e in enumerate(self._elems(hom.dst))}
            self._perm_cache[hom.key] = tuple(
                pos[(obj, hm(obj, t))] for obj, t in self._elems(hom.src))
        return self._perm_cache[hom.key]

    def _weight_objs(self) -> str:
        return self.shape.assign_order[0]

    def _bounded_maps(self, b: int) -> list[tuple[int, ...]]:
        """Maps K(b) -> carrier with component weight sum <= cap, as tuples of
        class indices aligned with K(b).elements().  Cached per rebuild."""
        if b in self._maps_cache:
            return self._maps_cache[b]
        kb = self._realize(b)
        elems = self._elems(b)
        wobj = self._weight_objs()
        cls_weight = {
            obj: [self._weight[r] for r in self._class_roots[obj]]
            for obj in self.shape.objects
        }
        # weight-object classes bucketed by weight so the search only visits
        # values that fit the remaining budget
        by_weight: dict[int, list[int]] = {}
        for val, w in enumerate(cls_weight[wobj]):
            by_weight.setdefault(w, []).append(val)
        weights_sorted = sorted(by_weight)
        order = [(obj, i) for obj in self.shape.assign_order
                 for i in range(kb.size(obj))]
        out: list[tuple[int, ...]] = []
        assigned: dict[tuple[str, int], int] = {}

        def propagate(obj, i, val, trail):
            for kk, (name, src, dst) in enumerate(self.shape.arrows):
                if dst != obj:
                    continue
                key = (src, kb.actions[kk][i])
                forced = self.carrier.act(name)[val]
                if key in assigned:
                    if assigned[key] != forced:
                        return False
                else:
                    assigned[key] = forced
                    trail.append(key)
            return True

        def attempt(k, obj, i, val, wsum, extra):
            assigned[(obj, i)] = val
            trail: list = []
            if propagate(obj, i, val, trail):
                rec(k + 1, wsum + extra)
            for key in trail:
                del assigned[key]
            del assigned[(obj, i)]

        def rec(k: int, wsum: int):
            self.budget.spend()
            if k == len(order):
                out.append(tuple(assigned[e] for e in elems))
                return
            obj, i = order[k]
            if (obj, i) in assigned:
                # only non-weight components are ever forced (edges force
                # vertices, never the other way round)
                rec(k + 1, wsum)
                return
            if obj == wobj:
                room = self.cap - wsum
                for w in weights_sorted:
                    if w > room:
                        break
                    for val in by_weight[w]:
                        attempt(k, obj, i, val, wsum, w)
            else:
                for val in range(self.carrier.size(obj)):
                    attempt(k, obj, i, val, wsum, 0)

        rec(0, 0)
        self._maps_cache[b] = sorted(out)
        return self._maps_cache[b]

    def _map_weight(self, b: int, classes: tuple[int, ...]) -> int:
        kb = self._realize(b)
        wobj = self._weight_objs()
        total = 0
        for (obj, i), cls in zip(kb.elements(), classes):
            if obj == wobj:
                total += self._weight[self._class_roots[obj][cls]]
        return max(1, total)

    def _count_all_maps(self, b: int) -> int:
        """|hom(K b, carrier)| without the weight bound (cheap closed forms)."""
        if self.family.kind == "fin":
            return self.carrier.size("*") ** b
        if b == 0:
            return self.carrier.size("0")
        src, tgt = self.carrier.act("sigma"), self.carrier.act("tau")
        counts = [1] * self.carrier.size("1")
        for _ in range(b - 1):
            by_src: dict[int, int] = {}
            for e, c in enumerate(counts):
                by_src[src[e]] = by_src.get(src[e], 0) + c
            counts = [by_src.get(tgt[e], 0) for e in range(len(counts))]
        return sum(counts)

    # -- application and evaluation -----------------------------------------

    def _create_app(self, gname: str, a: int, b: int, classes: tuple[int, ...]) -> None:
        kb = self._realize(b)
        inputs = tuple(self._class_rep(obj, cls)
                       for (obj, _), cls in zip(kb.elements(), classes))
        weight = self._map_weight(b, classes)
        ka = self._realize(a)
        out_ids: dict[tuple[str, int], int] = {}
        app_id = len(self._apps)
        for obj, t in ka.elements():
            out_ids[(obj, t)] = self._new_element(obj, weight, ("app", app_id, obj, t))
        for k, (name, src, dst) in enumerate(self.shape.arrows):
            for t in range(ka.size(dst)):
                e = out_ids[(dst, t)]
                self._act[e][name] = out_ids[(src, ka.actions[k][t])]
        app = _App(gname, inputs, tuple(out_ids[e] for e in ka.elements()), weight)
        self._apps.append(app)
        key = (gname, tuple(self._uf.find(e) for e in inputs))
        self._app_index[key] = app_id

    def _lookup_app(self, gname: str, input_roots: tuple[int, ...]) -> Optional[_App]:
        self._ensure_app_index()
        app_id = self._app_index.get((gname, input_roots))
        if app_id is None:
            return None
        return self._apps[app_id]

    def eval_word(self, w: Word, pmap: tuple[int, ...]) -> Optional[tuple[int, ...]]:
        """Evaluate a word at a map K(dst) -> carrier given as class tuple;
        returns the class tuple over K(src), or None if an application is
        missing from the bounded table."""
        cur = tuple(self._class_rep(obj, cls)
                    for (obj, _), cls in zip(self._elems(w.dst), pmap))
        find = self._uf.find
        for l in reversed(w.letters):
            if isinstance(l, BaseLetter):
                perm = self._letter_perm(l.hom)
                cur = tuple(cur[k] for k in perm)
            else:
                self._ensure_app_index()
                app_id = self._app_index.get(
                    (l.name, tuple(find(e) for e in cur)))
                if app_id is None:
                    return None
                cur = self._apps[app_id].outputs
        return tuple(self.class_of(e) for e in cur)

    # -- main loop ------------------------------------------------------------

    def _instance_key(self, arity: int, pmap: tuple[int, ...]) -> tuple[int, ...]:
        find = self._uf.find
        return tuple(find(self._class_rep(obj, cls))
                     for (obj, _), cls in zip(self._elems(arity), pmap))

    def _run(self) -> None:
        gen_list = list(self.pretheory.generators)
        self._rebuild()
        processed: set[tuple] = set()
        while True:
            changed = False
            # create missing bounded applications
            for gname, a, b in gen_list:
                for classes in self._bounded_maps(b):
                    roots = self._instance_key(b, classes)
                    if (gname, roots) in self._app_index:
                        continue
                    self._create_app(gname, a, b, classes)
                    changed = True
            if changed:
                self._rebuild()
            # close the equations on bounded instances.  Each sweep evaluates
            # all unprocessed instances against the current congruence, then
            # applies the collected unions in one batch; an instance reenters
            # the queue only when a merge changes its canonical input key.
            while True:
                pending: list[tuple[int, int]] = []
                for k, (lhs, rhs) in enumerate(self.pretheory.equations):
                    for pmap in self._bounded_maps(lhs.dst):
                        ikey = (k, self._instance_key(lhs.dst, pmap))
                        if ikey in processed:
                            continue
                        out1 = self.eval_word(lhs, pmap)
                        out2 = self.eval_word(rhs, pmap)
                        if out1 is None or out2 is None:
                            continue  # retried next round once the app exists
                        processed.add(ikey)
                        if out1 != out2:
                            ka = self._realize(lhs.src)
                            for (obj, _), c1, c2 in zip(ka.elements(), out1, out2):
                                pending.append((self._class_rep(obj, c1),
                                                self._class_rep(obj, c2)))
                if not pending:
                    break
                for e1, e2 in pending:
                    self._unite(e1, e2)
                changed = True
                self._rebuild()
            if not changed:
                break
        # saturation: no equation instance left unevaluated and the weight
        # bound was not binding anywhere
        self._rebuild()
        for lhs, rhs in self.pretheory.equations:
            for pmap in self._bounded_maps(lhs.dst):
                if self.eval_word(lhs, pmap) is None or self.eval_word(rhs, pmap) is None:
                    self._deferred = True
        if self._deferred:
            self.saturated = False
            return
        saturated = True
        for gname, a, b in gen_list:
            if len(self._bounded_maps(b)) != self._count_all_maps(b):
                saturated = False
                break
        if saturated:
            for lhs, _ in self.pretheory.equations:
                if len(self._bounded_maps(lhs.dst)) != self._count_all_maps(lhs.dst):
                    saturated = False
                    break
        self.saturated = saturated

    # -- public views ---------------------------------------------------------

    def _finalize(self) -> None:
        self.unit = PresheafMap(
            self.base, self.carrier,
            tuple(tuple(self.class_of(self._leaf_ids[(obj, i)])
                        for i in range(self.base.size(obj)))
                  for obj in self.shape.objects))
        self.component_classes = {
            obj: self.carrier.size(obj) for obj in self.shape.objects
        }

    def label(self, obj: str, cls: int) -> str:
        root = self._class_rep(obj, cls)
        return self._label_of(root, depth=0)

    def _label_of(self, eid: int, depth: int) -> str:
        root = self._uf.find(eid)
        kind = self._kind[root]
        if kind[0] == "leaf":
            default = f"{kind[1]}{kind[2]}"
            return self._leaf_labels.get((kind[1], kind[2]), default)
        if depth > 8:
            return "..."
        _, app_id, obj, t = kind
        app = self._apps[app_id]
        args = ",".join(self._label_of(e, depth + 1) for e in app.inputs)
        return f"{app.gen}({args})[{obj}{t}]"

    def nerve_component(self, a: int, budget: Optional[Budget] = None) -> list[PresheafMap]:
        """hom(K a, carrier): the a-component of the completed theory's homs."""
        return hom_set(self.family.realize(a), self.carrier, budget)


def free_model_bounded(p: Pretheory, carrier: FinPresheaf, depth: int,
                       budget: Optional[Budget] = None,
                       leaf_labels: Optional[dict[tuple[str, int], str]] = None) -> FreeModel:
    """Build the weight-bounded free model of the pretheory on the carrier."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return FreeModel(p, carrier, depth, budget, leaf_labels)


def kleisli_extend(src: FreeModel, g_classes: tuple[int, ...], dst: FreeModel) -> Optional[dict[tuple[str, int], int]]:
    """Extend a map K(b) -> dst.carrier (src is the free model on K(b)) to a
    structure map src.carrier -> dst.carrier; None when the extension needs
    an application outside dst's bounded table.

    g_classes is aligned with K(b).elements(); the result maps (obj, class of
    src) -> class of dst.
    """
    kb = src.base
    leaf_target: dict[int, int] = {}
    for (obj, i), cls in zip(kb.elements(), g_classes):
        leaf_target[src._uf.find(src._leaf_ids[(obj, i)])] = \
            dst._uf.find(dst._class_rep(obj, cls))
    memo: dict[int, Optional[int]] = {}

    def follow(eid: int) -> Optional[int]:
        root = src._uf.find(eid)
        if root in memo:
            return memo[root]
        memo[root] = None  # cycle guard
        kind = src._kind[root]
        if kind[0] == "leaf":
            res = leaf_target.get(root)
        else:
            _, app_id, obj, t = kind
            app = src._apps[app_id]
            imgs = []
            ok = True
            for e in app.inputs:
                r = follow(e)
                if r is None:
                    ok = False
                    break
                imgs.append(r)
            res = None
            if ok:
                dapp = dst._lookup_app(app.gen, tuple(imgs))
                if dapp is not None:
                    gen = next(g for g in src.pretheory.generators if g[0] == app.gen)
                    ka = src._realize(gen[1])
                    pos = {e: k for k, e in enumerate(ka.elements())}
                    res = dst._uf.find(dapp.outputs[pos[(obj, t)]])
        memo[root] = res
        return res

    out: dict[tuple[str, int], int] = {}
    for obj in src.shape.objects:
        for cls in range(src.carrier.size(obj)):
            r = follow(src._class_rep(obj, cls))
            if r is None:
                return None
            out[(obj, cls)] = dst._class_of_root[dst._uf.find(r)]
    return out
