"""The theory condition for pretheories, bounded theory completion, and
bounded isomorphism checks between completed theories.

A pretheory is a theory when each contravariant hom family hom(-, a) is a
nerve, i.e. satisfies the density-presentation limit condition (products over
fin, the Segal condition over graphs).  At a fixed word-length bound the
engine can certify failures (via model separation and formal absence of
preimages) or pass "up to bound"; every verdict carries its bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from ._util import Budget
from .base import ArityHom, ArityIndexedFamily, PresheafMap, hom_set
from .models import (
    FreeModel,
    ModelZoo,
    enumerate_models,
    carriers_upto,
    free_model_bounded,
    is_nerve,
    kleisli_extend,
    segal_fibre_tuples,
)
from .pretheory import (
    BaseLetter,
    HomTable,
    Pretheory,
    Word,
    certify_hom_table,
    congruence_closure,
    hom_classes,
    reduce_word,
)


# ---------------------------------------------------------------------------
# The theory condition on a bounded hom table
# ---------------------------------------------------------------------------

@dataclass
class TheoryVerdict:
    status: str                      # "theory" | "not-theory" | "unknown-at-bound"
    witness: Optional[dict]
    bound: int
    details: dict = field(default_factory=dict)


def _table_family(table: HomTable, a: int) -> tuple[dict[int, list[Word]], dict[tuple, tuple], bool]:
    """The family n |-> hom-classes(n, a) with J-precomposition actions.

    Returns (reps per n, per-hom action tables, fully-resolved flag).  An
    action entry is None when the precomposite of that class representative
    leaves the bounded window.
    """
    p = table.pretheory
    fam = p.family
    reps = {n: hom_classes(table, n, a) for n in table.window}
    acts: dict[tuple, tuple] = {}
    complete = True
    for m in table.window:
        for n in table.window:
            for h in fam.homs(m, n):
                out = []
                for w in reps[n]:
                    composed = Word(m, a, (BaseLetter(h),) + w.letters)
                    cls = table.class_of(composed)
                    if cls is None:
                        complete = False
                    out.append(cls)
                acts[h.key] = tuple(out)
    return reps, acts, complete


def _fin_comparisons(window) -> list[tuple[int, tuple[int, int]]]:
    out = []
    for n in window:
        for p in range(1, n):
            if p in window and (n - p) in window:
                out.append((n, (p, n - p)))
    return out


def is_theory(p: Pretheory, bound: int = 6, window: Optional[list[int]] = None,
              separation_bound: int = 2, budget: Optional[Budget] = None,
              certify: bool = True) -> TheoryVerdict:
    """Decide (up to the bound) whether the pretheory is a theory.

    "not-theory" verdicts carry a witness: either a limit tuple with no
    class-exact preimage among the bounded hom classes, every candidate being
    excluded at some component (model-separated where a small model exists),
    or a model-separated pair of classes with equal comparison images.
    "theory" is only issued when every comparison is a bijection on tables
    whose completeness flags all certify saturation.
    """
    table = congruence_closure(p, bound, window, certify=False, budget=budget)
    zoo = ModelZoo(p, separation_bound, budget)
    fam = p.family
    saw_unknown = False
    witness: Optional[dict] = None

    for a in table.window:
        reps, acts, acts_complete = _table_family(table, a)
        if not acts_complete:
            saw_unknown = True
        if fam.kind == "fin":
            if 0 in table.window and len(reps[0]) != 1:
                # two parallel words into the empty arity are never model
                # separable, so this failure cannot be certified
                saw_unknown = True
            for n, (q, r) in _fin_comparisons(table.window):
                i1 = ArityHom("map", q, n, tuple(range(q)))
                i2 = ArityHom("map", r, n, tuple(range(q, n)))
                w, unknown = _comparison_witness(
                    zoo, reps, a, n, [(q, acts[i1.key]), (r, acts[i2.key])],
                    itertools.product(range(len(reps[q])), range(len(reps[r]))))
                saw_unknown = saw_unknown or unknown
                if w is not None:
                    witness = w
                    break
            if witness:
                break
        else:
            s_act = acts[ArityHom("shift", 0, 1, (0,)).key]
            t_act = acts[ArityHom("shift", 0, 1, (1,)).key]
            for n in table.window:
                if n < 1:
                    continue
                comps = [(1, acts[ArityHom("shift", 1, n, (k,)).key])
                         for k in range(n)]
                tuples, partial = _segal_tuples(len(reps[1]), s_act, t_act, n)
                saw_unknown = saw_unknown or partial
                w, unknown = _comparison_witness(zoo, reps, a, n, comps, tuples)
                saw_unknown = saw_unknown or unknown
                if w is not None:
                    witness = w
                    break
            if witness:
                break

    if witness is not None:
        return TheoryVerdict("not-theory", witness, bound,
                             {"flags": dict(table.complete)})
    if not saw_unknown and certify:
        # the saturation probe is only needed to upgrade a clean pass from
        # "unknown-at-bound" to "theory"
        certify_hom_table(table, budget)
    if saw_unknown or not all(table.complete.values()):
        return TheoryVerdict("unknown-at-bound", None, bound,
                             {"flags": dict(table.complete)})
    return TheoryVerdict("theory", None, bound, {"flags": dict(table.complete)})


def _segal_tuples(n1: int, s_act, t_act, n: int):
    """Fibre-product tuples over the known part of the endpoint actions;
    the second component flags whether some endpoints were unknown."""
    known = [x for x in range(n1) if s_act[x] is not None and t_act[x] is not None]
    partial = len(known) < n1
    tuples: list[tuple[int, ...]] = [()]
    for k in range(n):
        nxt = []
        for tup in tuples:
            for x in known:
                if k == 0 or t_act[tup[-1]] == s_act[x]:
                    nxt.append(tup + (x,))
        tuples = nxt
    return tuples, partial


def _comparison_witness(zoo: ModelZoo, reps, a: int, n: int, comps, tuples
                        ) -> tuple[Optional[dict], bool]:
    """Check the comparison hom(n, a) -> limit given by component tables.

    comps is a list of (component arity, action table); tuples iterates the
    limit's elements as index tuples.  Returns (witness, unknown_signal).
    An injectivity failure is a witness only when the colliding words are
    model-separated (they are then genuinely distinct in the pretheory); a
    missing tuple is a witness by formal absence of a bounded preimage, with
    the fraction of candidates excluded by model separation recorded.
    """
    fam = zoo.pretheory.family
    unknown = False
    images: dict[tuple[int, ...], int] = {}
    blind = 0  # classes whose image has an out-of-window component
    for u in range(len(reps[n])):
        key = tuple(tab[u] for _, tab in comps)
        if any(v is None for v in key):
            blind += 1
            unknown = True
            continue
        if key in images:
            v = images[key]
            if zoo.separated(reps[n][u], reps[n][v]):
                return ({
                    "arity": a, "limit-at": n, "kind": "not-injective",
                    "elements": (v, u),
                    "reps": (reps[n][v].pretty(fam), reps[n][u].pretty(fam)),
                    "certificate": "model-separated",
                }, unknown)
            unknown = True
        else:
            images[key] = u
    for tup in tuples:
        if tup in images:
            continue
        if blind:
            # some class might hit this tuple beyond the window
            unknown = True
            continue
        # formally missing: no bounded class has exactly these components.
        n_separated = 0
        for u in range(len(reps[n])):
            for (carity, tab), tj in zip(comps, tup):
                cu = tab[u]
                if cu is not None and cu != tj and \
                        zoo.separated(reps[carity][cu], reps[carity][tj]):
                    n_separated += 1
                    break
        comp_reps = tuple(reps[carity][tj].pretty(fam)
                          for (carity, _), tj in zip(comps, tup))
        full = n_separated == len(reps[n])
        return ({
            "arity": a, "limit-at": n, "kind": "not-surjective",
            "tuple": tup, "tuple_reps": comp_reps,
            "certificate": "model-separated" if full else "formal-at-bound",
            "candidates": len(reps[n]), "separated-candidates": n_separated,
        }, unknown)
    return (None, unknown)


# ---------------------------------------------------------------------------
# Bounded theory completion
# ---------------------------------------------------------------------------

@dataclass
class TheoryTable:
    """Bounded hom tables of the completed theory: hom(a, b) is the nerve
    component at a of the bounded free model on K(b)."""

    pretheory: Pretheory
    window: tuple[int, ...]
    bound: int
    depth: int
    free: dict[int, FreeModel]
    homs: dict[tuple[int, int], list[tuple[int, ...]]]  # class tuples over K(a).elements()
    exact: dict[int, bool]
    word_table: Optional[HomTable]
    unit: dict[tuple[int, int], list[Optional[int]]]  # word class -> hom index

    def size(self, a: int, b: int) -> int:
        return len(self.homs[(a, b)])

    def hom_index(self, a: int, b: int, classes: tuple[int, ...]) -> Optional[int]:
        try:
            return self._index[(a, b)][classes]
        except AttributeError:
            self._index = {
                key: {t: i for i, t in enumerate(ts)} for key, ts in self.homs.items()
            }
            return self._index[(a, b)].get(classes)
        except KeyError:
            return None

    def identity(self, a: int) -> int:
        fm = self.free[a]
        classes = tuple(fm.unit(obj, i) for obj, i in fm.base.elements())
        idx = self.hom_index(a, a, classes)
        assert idx is not None
        return idx

    def j_map(self, h: ArityHom) -> int:
        fm = self.free[h.dst]
        hm = self.pretheory.family.hom_map(h)
        classes = tuple(fm.unit(obj, hm(obj, i))
                        for obj, i in hm.dom.elements())
        idx = self.hom_index(h.src, h.dst, classes)
        assert idx is not None
        return idx

    def compose(self, a: int, b: int, c: int, f_idx: int, g_idx: int) -> Optional[int]:
        """Kleisli composite of f: a -> b and g: b -> c; None if it leaves
        the bounded table."""
        g = self.homs[(b, c)][g_idx]
        ext = self._extension(b, c, g)
        if ext is None:
            return None
        f = self.homs[(a, b)][f_idx]
        fm_b = self.free[b]
        ka_elems = list(self.pretheory.family.realize(a).elements())
        kb_objs = [obj for obj, _ in fm_b.base.elements()]
        out = tuple(ext.get((obj, cls)) for (obj, _), cls in zip(ka_elems, f))
        if any(v is None for v in out):
            return None
        return self.hom_index(a, c, tuple(out))

    def _extension(self, b: int, c: int, g: tuple[int, ...]):
        try:
            cache = self._ext_cache
        except AttributeError:
            cache = self._ext_cache = {}
        key = (b, c, g)
        if key not in cache:
            cache[key] = kleisli_extend(self.free[b], g, self.free[c])
        return cache[key]

    def label(self, a: int, b: int, idx: int) -> str:
        fm = self.free[b]
        ka = self.pretheory.family.realize(a)
        parts = []
        for (obj, i), cls in zip(ka.elements(), self.homs[(a, b)][idx]):
            parts.append(fm.label(obj, cls))
        return "(" + ", ".join(parts) + ")"


def complete_to_theory(p: Pretheory, bound: int = 6, depth: int = 4,
                       window: Optional[list[int]] = None,
                       budget: Optional[Budget] = None,
                       with_words: bool = True) -> TheoryTable:
    """The bounded completion: free models on each realized arity give the
    hom tables; the unit sends each bounded word class to its evaluation at
    the generic point of the corresponding free model."""
    if bound < 1 or depth < 0:
        raise ValueError("bounds must be positive")
    if window is None:
        window = p.default_window()
    window = sorted(window)
    fam = p.family
    free = {b: free_model_bounded(p, fam.realize(b), depth, budget) for b in window}
    homs: dict[tuple[int, int], list[tuple[int, ...]]] = {}
    for a in window:
        ka = fam.realize(a)
        for b in window:
            maps = hom_set(ka, free[b].carrier, budget)
            homs[(a, b)] = [
                tuple(f(obj, i) for obj, i in ka.elements()) for f in maps
            ]
    table = congruence_closure(p, bound, window, certify=False, budget=budget) if with_words else None
    unit: dict[tuple[int, int], list[Optional[int]]] = {}
    tt = TheoryTable(p, tuple(window), bound, depth, free, homs,
                     {b: free[b].saturated for b in window}, table, unit)
    if table is not None:
        for a in window:
            for b in window:
                entries: list[Optional[int]] = []
                fm = free[b]
                generic = tuple(fm.unit(obj, i) for obj, i in fm.base.elements())
                for w in hom_classes(table, a, b):
                    out = fm.eval_word(w, generic)
                    entries.append(None if out is None else tt.hom_index(a, b, out))
                unit[(a, b)] = entries
    return tt


def table_is_theory(tt: TheoryTable) -> TheoryVerdict:
    """Run the nerve criterion on a completed table's hom families."""
    fam = tt.pretheory.family
    exact = all(tt.exact.values())
    for a in tt.window:
        sizes = {n: tt.size(n, a) for n in tt.window}
        acts: dict[tuple, tuple[int, ...]] = {}
        for m in tt.window:
            for n in tt.window:
                for h in fam.homs(m, n):
                    hm = fam.hom_map(h)
                    km_elems = list(fam.realize(m).elements())
                    kn_elems = list(fam.realize(n).elements())
                    pos = {e: k for k, e in enumerate(kn_elems)}
                    table = []
                    for classes in tt.homs[(n, a)]:
                        precomp = tuple(classes[pos[(obj, hm(obj, i))]]
                                        for obj, i in km_elems)
                        table.append(tt.hom_index(m, a, precomp))
                    acts[h.key] = tuple(table)
        family = ArityIndexedFamily(fam, tt.window, sizes, acts)
        verdict = is_nerve(fam, family)
        if not verdict.ok:
            status = "not-theory" if exact else "unknown-at-bound"
            return TheoryVerdict(status, {"arity": a, **(verdict.witness or {})},
                                 tt.bound, {"exact": dict(tt.exact)})
    status = "theory" if exact else "unknown-at-bound"
    return TheoryVerdict(status, None, tt.bound, {"exact": dict(tt.exact)})


# ---------------------------------------------------------------------------
# Bounded isomorphism of completed theories
# ---------------------------------------------------------------------------

@dataclass
class IsoVerdict:
    status: str  # "isomorphic" | "not-isomorphic" | "unknown"
    detail: dict = field(default_factory=dict)


def model_census(p: Pretheory, size_bound: int = 3,
                 budget: Optional[Budget] = None) -> list[tuple]:
    """(carrier signature, model count) over all carriers up to the bound."""
    out = []
    for carrier in carriers_upto(p.family, size_bound):
        out.append((carrier.sizes, len(enumerate_models(p, carrier, budget))))
    # aggregate per carrier signature
    agg: dict[tuple, int] = {}
    for sizes, cnt in out:
        agg[sizes] = agg.get(sizes, 0) + cnt
    return sorted(agg.items())


def theories_isomorphic_bounded(t1: TheoryTable, t2: TheoryTable,
                                census_bound: int = 2,
                                budget: Optional[Budget] = None) -> IsoVerdict:
    """Search for an identity-on-objects isomorphism between the bounded
    tables commuting with the arity inclusions and with all compositions
    defined on both sides; compares model censuses first."""
    if t1.pretheory.family is not t2.pretheory.family:
        raise ValueError("theories over different arity families")
    if t1.window != t2.window or t1.bound != t2.bound or t1.depth != t2.depth:
        raise ValueError("tables must be built at matching bounds")
    census1 = model_census(t1.pretheory, census_bound, budget)
    census2 = model_census(t2.pretheory, census_bound, budget)
    if census1 != census2:
        return IsoVerdict("not-isomorphic",
                          {"reason": "model censuses differ",
                           "census1": census1, "census2": census2})
    for key in t1.homs:
        if t1.size(*key) != t2.size(*key):
            exact = all(t1.exact.values()) and all(t2.exact.values())
            return IsoVerdict(
                "not-isomorphic" if exact else "unknown",
                {"reason": "hom counts differ", "at": key,
                 "sizes": (t1.size(*key), t2.size(*key))})
    phi = _search_iso(t1, t2, budget)
    if phi is None:
        return IsoVerdict("unknown", {"reason": "no bounded isomorphism found"})
    return IsoVerdict("isomorphic", {"pairs": sorted(t1.homs)})


def _iso_colors(tt: TheoryTable, rounds: int = 3) -> dict[tuple, str]:
    """Structural colours per table element, refined by composition profiles;
    isomorphic tables get matching colour multisets per hom pair."""
    fam = tt.pretheory.family
    base: dict[tuple, tuple] = {}
    for key in tt.homs:
        for i in range(tt.size(*key)):
            base[(key, i)] = (key,)
    for a in tt.window:
        base[((a, a), tt.identity(a))] += ("id",)
        for b in tt.window:
            for h in fam.homs(a, b):
                base[((a, b), tt.j_map(h))] += (("J",) + h.key,)
    enc = {k: repr(v) for k, v in base.items()}
    for _ in range(rounds):
        nxt = {}
        for (a, b) in sorted(tt.homs):
            for i in range(tt.size(a, b)):
                profile = []
                for c in tt.window:
                    for j in range(tt.size(b, c)):
                        comp = tt.compose(a, b, c, i, j)
                        profile.append((c, enc[((b, c), j)],
                                        "?" if comp is None else enc[((a, c), comp)]))
                profile.sort()
                nxt[((a, b), i)] = repr((enc[((a, b), i)], tuple(profile)))
        if len(set(nxt.values())) == len(set(enc.values())):
            enc = nxt
            break
        enc = nxt
    return enc


def _search_iso(t1: TheoryTable, t2: TheoryTable, budget: Optional[Budget]):
    c1 = _iso_colors(t1)
    c2 = _iso_colors(t2)
    pairs = sorted(t1.homs)
    # candidate targets per element by colour
    cand: dict[tuple, list[int]] = {}
    for key in pairs:
        buckets: dict[str, list[int]] = {}
        for j in range(t2.size(*key)):
            buckets.setdefault(c2[(key, j)], []).append(j)
        for i in range(t1.size(*key)):
            cand[(key, i)] = buckets.get(c1[(key, i)], [])
            if not cand[(key, i)]:
                return None
    phi: dict[tuple, int] = {}
    used: dict[tuple, set] = {key: set() for key in pairs}
    order = [(key, i) for key in pairs for i in range(t1.size(*key))]
    order.sort(key=lambda ki: len(cand[ki]))

    def consistent(key, i, j) -> bool:
        a, b = key
        # check compositions against already-assigned elements
        for (key2, i2), j2 in phi.items():
            a2, b2 = key2
            if b == a2:
                comp1 = t1.compose(a, b, b2, i, i2)
                comp2 = t2.compose(a, b, b2, j, j2)
                if comp1 is not None and comp2 is not None:
                    target = phi.get(((a, b2), comp1))
                    if target is not None and target != comp2:
                        return False
                    if target is None and comp2 in used[(a, b2)]:
                        return False
            if b2 == a:
                comp1 = t1.compose(a2, b2, b, i2, i)
                comp2 = t2.compose(a2, b2, b, j2, j)
                if comp1 is not None and comp2 is not None:
                    target = phi.get(((a2, b), comp1))
                    if target is not None and target != comp2:
                        return False
                    if target is None and comp2 in used[(a2, b)]:
                        return False
        return True

    def rec(k: int) -> bool:
        if budget is not None:
            budget.spend()
        if k == len(order):
            return True
        key, i = order[k]
        if (key, i) in phi:
            return rec(k + 1)
        for j in cand[(key, i)]:
            if j in used[key]:
                continue
            if not consistent(key, i, j):
                continue
            phi[(key, i)] = j
            used[key].add(j)
            if rec(k + 1):
                return True
            del phi[(key, i)]
            used[key].remove(j)
        return False

    return phi if rec(0) else None
