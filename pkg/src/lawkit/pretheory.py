"""Finite presentations of pretheories over an arity family, and the bounded
word/congruence engine that computes their hom tables.

A pretheory is presented by generator arrows between arity objects plus
equations between parallel words.  Words are composable letter sequences in
diagrammatic order (leftmost letter applied first as an arrow; evaluation on
models is contravariant, see models.evaluate_word).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional

from ._util import Budget, BudgetExceededError
from .base import (
    FIN,
    DELTA0,
    ArityFamily,
    ArityHom,
    FinPresheaf,
    compose_homs,
)


# ---------------------------------------------------------------------------
# Letters and words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenLetter:
    name: str
    src: int
    dst: int

    @property
    def sort_key(self) -> tuple:
        return (0, self.name)


@dataclass(frozen=True)
class BaseLetter:
    hom: ArityHom

    @property
    def src(self) -> int:
        return self.hom.src

    @property
    def dst(self) -> int:
        return self.hom.dst

    @property
    def sort_key(self) -> tuple:
        return (1, self.hom.key)


Letter = GenLetter | BaseLetter


@dataclass(frozen=True)
class Word:
    """A composable word src -> dst; empty sequence denotes the identity."""

    src: int
    dst: int
    letters: tuple[Letter, ...]

    def __post_init__(self):
        cur = self.src
        for l in self.letters:
            assert l.src == cur, f"letter {l} not composable at {cur}"
            cur = l.dst
        assert cur == self.dst

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def sort_key(self) -> tuple:
        return (len(self.letters), tuple(l.sort_key for l in self.letters), self.src)

    def then(self, other: "Word") -> "Word":
        assert self.dst == other.src
        return Word(self.src, other.dst, self.letters + other.letters)

    def pretty(self, family: ArityFamily) -> str:
        if not self.letters:
            return f"id[{family.format_arity(self.src)}]"
        return " ; ".join(format_letter(l, family) for l in self.letters)


def format_letter(l: Letter, family: ArityFamily) -> str:
    if isinstance(l, GenLetter):
        return l.name
    h = l.hom
    if h.kind == "map":
        images = ",".join(str(v) for v in h.data)
        return f"map({images})[{h.src}->{h.dst}]"
    if h == ArityHom("shift", 0, 1, (0,)):
        return "sigma"
    if h == ArityHom("shift", 0, 1, (1,)):
        return "tau"
    return f"shift({h.data[0]})[{h.src}->{h.dst}]"


def identity_word(a: int) -> Word:
    return Word(a, a, ())


def word(*letters: Letter) -> Word:
    assert letters
    return Word(letters[0].src, letters[-1].dst, tuple(letters))


def reduce_word(w: Word) -> Word:
    """Normal form under: drop identity base letters, collapse adjacent base
    letters to their composite in the arity family."""
    out: list[Letter] = []
    for l in w.letters:
        if isinstance(l, BaseLetter):
            if l.hom.is_identity():
                continue
            if out and isinstance(out[-1], BaseLetter):
                comp = compose_homs(out[-1].hom, l.hom)
                out.pop()
                if not comp.is_identity():
                    out.append(BaseLetter(comp))
                continue
        out.append(l)
    return Word(w.src, w.dst, tuple(out))


# ---------------------------------------------------------------------------
# Pretheories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pretheory:
    family: ArityFamily
    generators: tuple[tuple[str, int, int], ...]
    equations: tuple[tuple[Word, Word], ...]
    name: str = ""

    def __post_init__(self):
        seen = set()
        for gname, a, b in self.generators:
            assert gname not in seen, f"duplicate generator {gname}"
            assert a >= 0 and b >= 0
            seen.add(gname)
        for lhs, rhs in self.equations:
            assert lhs.src == rhs.src and lhs.dst == rhs.dst, "equation sides not parallel"
            for w in (lhs, rhs):
                for l in w.letters:
                    if isinstance(l, GenLetter):
                        assert (l.name, l.src, l.dst) in self.generators, f"unknown generator {l.name}"

    def gen(self, name: str) -> GenLetter:
        for gname, a, b in self.generators:
            if gname == name:
                return GenLetter(gname, a, b)
        raise KeyError(name)

    def arities_touched(self) -> set[int]:
        out: set[int] = set()
        for _, a, b in self.generators:
            out.update((a, b))
        for lhs, rhs in self.equations:
            for w in (lhs, rhs):
                out.add(w.src)
                for l in w.letters:
                    out.add(l.dst)
        return out

    def default_window(self) -> list[int]:
        top = max(self.arities_touched(), default=1)
        return list(range(0, max(top, 1) + 1))


def initial_pretheory(family: ArityFamily, name: str = "initial") -> Pretheory:
    return Pretheory(family, (), (), name)


def adjoin_generator(p: Pretheory, name: str, a: int, b: int) -> Pretheory:
    if any(g[0] == name for g in p.generators):
        raise ValueError(f"duplicate generator name {name!r}")
    return Pretheory(p.family, p.generators + ((name, a, b),), p.equations, p.name)


def adjoin_equation(p: Pretheory, lhs: Word, rhs: Word) -> Pretheory:
    if lhs.src != rhs.src or lhs.dst != rhs.dst:
        raise ValueError("equation sides must be parallel")
    return Pretheory(p.family, p.generators, p.equations + ((lhs, rhs),), p.name)


# ---------------------------------------------------------------------------
# Signatures and the pretheory presented by a signature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """An assignment of a finite presheaf of operations to finitely many
    arity objects."""

    family: ArityFamily
    parts: tuple[tuple[int, FinPresheaf], ...]  # (arity, presheaf), sorted

    def support(self) -> list[int]:
        return [a for a, _ in self.parts]

    def part(self, a: int) -> Optional[FinPresheaf]:
        for b, x in self.parts:
            if a == b:
                return x
        return None


def make_signature(family: ArityFamily, parts: dict[int, FinPresheaf]) -> Signature:
    items = tuple(sorted(parts.items(), key=lambda kv: kv[0]))
    for _, x in items:
        assert x.shape is family.shape
    return Signature(family, items)


def pretheory_from_signature(sig: Signature, name: str = "") -> Pretheory:
    """One generator per representable-shaped element of each Sigma(a).

    Over Set each element of Sigma(n) gives a generator 1 -> n.  Over graphs
    each vertex of Sigma([n]) gives a generator [0] -> [n], each edge a
    generator [1] -> [n] with two equations tying its endpoint precomposites
    to the vertex generators.  Concrete models then biject with structures
    hom(K a, X) -> hom(Sigma a, X).
    """
    fam = sig.family
    p = initial_pretheory(fam, name or "signature")
    if fam.kind == "fin":
        for a, x in sig.parts:
            for s in range(x.size("*")):
                p = adjoin_generator(p, f"op{a}_{s}", 1, a)
        return p
    sigma = BaseLetter(ArityHom("shift", 0, 1, (0,)))
    tau = BaseLetter(ArityHom("shift", 0, 1, (1,)))
    for a, x in sig.parts:
        for v in range(x.size("0")):
            p = adjoin_generator(p, f"v{a}_{v}", 0, a)
        src_tab, tgt_tab = x.act("sigma"), x.act("tau")
        for e in range(x.size("1")):
            gname = f"e{a}_{e}"
            p = adjoin_generator(p, gname, 1, a)
            g = GenLetter(gname, 1, a)
            p = adjoin_equation(p, word(sigma, g), word(GenLetter(f"v{a}_{src_tab[e]}", 0, a)))
            p = adjoin_equation(p, word(tau, g), word(GenLetter(f"v{a}_{tgt_tab[e]}", 0, a)))
    return p


# ---------------------------------------------------------------------------
# Bundled presentations
# ---------------------------------------------------------------------------

def _fmap(images: tuple[int, ...], a: int, b: int) -> BaseLetter:
    return BaseLetter(ArityHom("map", a, b, images))


def _shift(k: int, a: int, b: int) -> BaseLetter:
    return BaseLetter(ArityHom("shift", a, b, (k,)))


def _monoid() -> Pretheory:
    p = initial_pretheory(FIN, "monoid")
    for gname, a, b in (("m", 1, 2), ("i", 1, 0), ("m1", 2, 3), ("1m", 2, 3),
                        ("i1", 2, 1), ("1i", 2, 1)):
        p = adjoin_generator(p, gname, a, b)
    m, i = p.gen("m"), p.gen("i")
    m1, om, i1, oi = p.gen("m1"), p.gen("1m"), p.gen("i1"), p.gen("1i")
    i1_2 = _fmap((0,), 1, 2)       # first summand of 1+1
    i2_2 = _fmap((1,), 1, 2)       # second summand
    bang1 = _fmap((), 0, 1)
    eqs = [
        # interpretation-forcing squares for m1, 1m, i1, 1i
        (word(i1_2, m1), word(m, _fmap((0, 1), 2, 3))),
        (word(i2_2, m1), word(_fmap((2,), 1, 3))),
        (word(i1_2, om), word(_fmap((0,), 1, 3))),
        (word(i2_2, om), word(m, _fmap((1, 2), 2, 3))),
        (word(i1_2, i1), word(i, bang1)),
        (word(i2_2, i1), identity_word(1)),
        (word(i1_2, oi), identity_word(1)),
        (word(i2_2, oi), word(i, bang1)),
        # associativity and the two unit laws
        (word(m, om), word(m, m1)),
        (word(m, i1), identity_word(1)),
        (word(m, oi), identity_word(1)),
    ]
    for lhs, rhs in eqs:
        p = adjoin_equation(p, lhs, rhs)
    return p


def _monoid_redundant() -> Pretheory:
    p = _monoid()
    p = Pretheory(p.family, p.generators, p.equations, "monoid-redundant")
    p = adjoin_generator(p, "m11", 3, 4)
    m11, m1 = p.gen("m11"), p.gen("m1")
    p = adjoin_equation(p, word(_fmap((0, 1), 2, 3), m11), word(m1, _fmap((0, 1, 2), 3, 4)))
    p = adjoin_equation(p, word(_fmap((2,), 1, 3), m11), word(_fmap((3,), 1, 4)))
    return p


def _category() -> Pretheory:
    p = initial_pretheory(DELTA0, "category")
    for gname, a, b in (("m", 1, 2), ("i", 1, 0), ("m1", 2, 3), ("1m", 2, 3),
                        ("i1", 2, 1), ("1i", 2, 1)):
        p = adjoin_generator(p, gname, a, b)
    m, i = p.gen("m"), p.gen("i")
    m1, om, i1, oi = p.gen("m1"), p.gen("1m"), p.gen("i1"), p.gen("1i")
    sg, tu = _shift(0, 0, 1), _shift(1, 0, 1)
    e1_2, e2_2 = _shift(0, 1, 2), _shift(1, 1, 2)
    eqs = [
        # sources and targets of composites and identities
        (word(sg, m), word(sg, e1_2)),
        (word(tu, m), word(tu, e2_2)),
        (word(sg, i), identity_word(0)),
        (word(tu, i), identity_word(0)),
        # interpretation-forcing squares for m1, 1m, i1, 1i
        (word(e1_2, m1), word(m, _shift(0, 2, 3))),
        (word(e2_2, m1), word(_shift(2, 1, 3))),
        (word(e1_2, om), word(_shift(0, 1, 3))),
        (word(e2_2, om), word(m, _shift(1, 2, 3))),
        (word(e1_2, i1), word(i, sg)),
        (word(e2_2, i1), identity_word(1)),
        (word(e1_2, oi), identity_word(1)),
        (word(e2_2, oi), word(i, tu)),
        # associativity and the unit laws
        (word(m, om), word(m, m1)),
        (word(m, i1), identity_word(1)),
        (word(m, oi), identity_word(1)),
    ]
    for lhs, rhs in eqs:
        p = adjoin_equation(p, lhs, rhs)
    return p


def _groupoid() -> Pretheory:
    p = _category()
    p = Pretheory(p.family, p.generators, p.equations, "groupoid")
    for gname in ("c", "c1", "1c"):
        p = adjoin_generator(p, gname, 1 if gname == "c" else 2, 1 if gname == "c" else 2)
    c, c1, oc, m = p.gen("c"), p.gen("c1"), p.gen("1c"), p.gen("m")
    e1_2, e2_2 = _shift(0, 1, 2), _shift(1, 1, 2)
    eqs = [
        # c1 sends a composable pair (g, h) to (c g, g then h); 1c to (g then h, c h)
        (word(e1_2, c1), word(c, e1_2)),
        (word(e2_2, c1), word(m)),
        (word(e1_2, oc), word(m)),
        (word(e2_2, oc), word(c, e2_2)),
        # left and right inverse laws
        (word(m, oc), word(e1_2)),
        (word(m, c1), word(e2_2)),
    ]
    for lhs, rhs in eqs:
        p = adjoin_equation(p, lhs, rhs)
    return p


_BUNDLED = {
    "monoid": _monoid,
    "monoid-redundant": _monoid_redundant,
    "category": _category,
    "groupoid": _groupoid,
}


def bundled(name: str) -> Pretheory:
    if name not in _BUNDLED:
        raise KeyError(f"unknown bundled pretheory {name!r}")
    return _BUNDLED[name]()


def bundled_names() -> list[str]:
    return sorted(_BUNDLED)


# ---------------------------------------------------------------------------
# Bounded congruence closure
# ---------------------------------------------------------------------------

@dataclass
class HomClass:
    rep: Word
    size: int
    index: int


@dataclass
class HomTable:
    """Partition of all reduced words of length <= bound between window
    arities into congruence classes."""

    pretheory: Pretheory
    bound: int
    window: tuple[int, ...]
    classes: dict[tuple[int, int], list[HomClass]]
    complete: dict[tuple[int, int], bool]
    _engine: "_ClosureEngine" = field(repr=False)

    def class_of(self, w: Word) -> Optional[int]:
        """Index of w's class in classes[(w.src, w.dst)], or None if the
        reduced word falls outside the enumerated window."""
        return self._engine.class_index(w)

    def num_classes(self, a: int, b: int) -> int:
        return len(self.classes[(a, b)])

    def united_pairs(self, rng, count: int,
                     max_len: Optional[int] = None) -> list[tuple[Word, Word]]:
        """Randomly sampled pairs of distinct words united by the closure,
        optionally restricted to members of at most max_len letters."""
        engine = self._engine
        groups: dict[int, list[tuple]] = {}
        for key, nid in engine.nodes.items():
            if max_len is not None:
                length = 0 if key[0] == "id" else len(key)
                if length > max_len:
                    continue
            groups.setdefault(engine.uf.find(nid), []).append(key)
        rich = [members for members in groups.values() if len(members) >= 2]
        out = []
        for _ in range(count):
            members = rng.choice(rich)
            k1, k2 = rng.sample(members, 2)
            out.append((engine._decode(k1), engine._decode(k2)))
        return out


def hom_classes(table: HomTable, a: int, b: int) -> list[Word]:
    """Canonical representatives (shortest, then lexicographic) per class."""
    return [c.rep for c in table.classes[(a, b)]]


class _ClosureEngine:
    def __init__(self, p: Pretheory, bound: int, window: list[int], budget: Budget):
        self.p = p
        self.bound = bound
        self.window = sorted(window)
        wset = set(self.window)
        # letters: generators in declaration order, then base homs
        self.letters: list[Letter] = []
        for gname, a, b in p.generators:
            if a in wset and b in wset:
                self.letters.append(GenLetter(gname, a, b))
        for a in self.window:
            for b in self.window:
                for h in p.family.homs(a, b):
                    if not h.is_identity():
                        self.letters.append(BaseLetter(h))
        self.letter_id = {l: i for i, l in enumerate(self.letters)}
        self.nodes: dict[tuple, int] = {}
        self.node_words: list[tuple] = []  # key: ("id", a) or tuple of letter ids
        self.node_src: list[int] = []
        self.node_dst: list[int] = []
        self.budget = budget
        self._enumerate()
        self.uf = _WordUnionFind(len(self.node_words))
        self._close()

    # -- word encoding ------------------------------------------------------

    def _key(self, w: Word) -> Optional[tuple]:
        if not w.letters:
            return ("id", w.src) if w.src in self.window else None
        if any(l not in self.letter_id for l in w.letters):
            return None
        return tuple(self.letter_id[l] for l in w.letters)

    def _decode(self, key: tuple) -> Word:
        if key and key[0] == "id":
            return identity_word(key[1])
        letters = tuple(self.letters[i] for i in key)
        return Word(letters[0].src, letters[-1].dst, letters)

    def _add_node(self, key: tuple, src: int, dst: int) -> int:
        nid = self.nodes.get(key)
        if nid is None:
            self.budget.spend()
            nid = len(self.node_words)
            self.nodes[key] = nid
            self.node_words.append(key)
            self.node_src.append(src)
            self.node_dst.append(dst)
        return nid

    def _enumerate(self) -> None:
        frontier: list[tuple[tuple, int, int, bool]] = []
        for a in self.window:
            self._add_node(("id", a), a, a)
            frontier.append((("id", a), a, a, False))
        for _ in range(self.bound):
            nxt = []
            for key, src, dst, last_base in frontier:
                for lid, l in enumerate(self.letters):
                    if l.src != dst:
                        continue
                    is_base = isinstance(l, BaseLetter)
                    if is_base and last_base:
                        continue  # adjacent bases are never reduced
                    nkey = (lid,) if key[0] == "id" else key + (lid,)
                    if nkey in self.nodes:
                        continue
                    self._add_node(nkey, src, l.dst)
                    nxt.append((nkey, src, l.dst, is_base))
            frontier = nxt

    # -- reduced single-letter extensions ------------------------------------

    def _extend_right(self, key: tuple, lid: int) -> Optional[int]:
        l = self.letters[lid]
        if key[0] == "id":
            nkey: tuple = (lid,)
        else:
            last = self.letters[key[-1]]
            if isinstance(last, BaseLetter) and isinstance(l, BaseLetter):
                comp = compose_homs(last.hom, l.hom)
                if comp.is_identity():
                    nkey = key[:-1] if len(key) > 1 else ("id", l.dst)
                else:
                    cid = self.letter_id.get(BaseLetter(comp))
                    if cid is None:
                        return None
                    nkey = key[:-1] + (cid,)
            else:
                nkey = key + (lid,)
        return self.nodes.get(nkey)

    def _extend_left(self, lid: int, key: tuple) -> Optional[int]:
        l = self.letters[lid]
        if key[0] == "id":
            nkey: tuple = (lid,)
        else:
            first = self.letters[key[0]]
            if isinstance(first, BaseLetter) and isinstance(l, BaseLetter):
                comp = compose_homs(l.hom, first.hom)
                if comp.is_identity():
                    nkey = key[1:] if len(key) > 1 else ("id", l.src)
                else:
                    cid = self.letter_id.get(BaseLetter(comp))
                    if cid is None:
                        return None
                    nkey = (cid,) + key[1:]
            else:
                nkey = (lid,) + key
        return self.nodes.get(nkey)

    # -- congruence closure ---------------------------------------------------

    def _node_rank(self, nid: int) -> tuple:
        key = self.node_words[nid]
        length = 0 if key[0] == "id" else len(key)
        return (length, key)

    def _close(self) -> None:
        """Close the seeded equations under single-letter pre/post-composition.

        Each node is propagated against the shortest member of its class; the
        representative only ever shortens, so a node re-enters the worklist at
        most bound-many times.  Pairing against the shortest member (rather
        than against the merge partner) makes transitive chains close even
        when they pass through long intermediate words, since the rep's
        extensions stay inside the window whenever the node's do.
        """
        self.unseeded = []
        rep: dict[int, int] = {}
        members: dict[int, list[int]] = {}
        work: deque[tuple[int, int]] = deque()

        def unite(u: int, v: int) -> None:
            ru, rv = self.uf.find(u), self.uf.find(v)
            if ru == rv:
                return
            mu = members.pop(ru, None) or [ru]
            mv = members.pop(rv, None) or [rv]
            pu = rep.pop(ru, ru)
            pv = rep.pop(rv, rv)
            self.uf.union(ru, rv)
            root = self.uf.find(ru)
            best = pu if self._node_rank(pu) <= self._node_rank(pv) else pv
            members[root] = mu + mv
            rep[root] = best
            # members coming from the class whose representative changed must
            # be (re)propagated against the new one
            stale = mv if best is pu else mu
            for m in stale:
                work.append((m, best))

        for lhs, rhs in self.p.equations:
            kl, kr = self._key(reduce_word(lhs)), self._key(reduce_word(rhs))
            ul = self.nodes.get(kl) if kl is not None else None
            vr = self.nodes.get(kr) if kr is not None else None
            if ul is None or vr is None:
                self.unseeded.append((lhs, rhs))
                continue
            unite(ul, vr)
        while work:
            u, v = work.popleft()
            if self.uf.find(u) == self.uf.find(v) and u != v:
                pass  # still propagate: u's contexts must match the rep's
            self.budget.spend()
            ku, kv = self.node_words[u], self.node_words[v]
            for lid, l in enumerate(self.letters):
                if l.src == self.node_dst[u]:
                    a = self._extend_right(ku, lid)
                    b = self._extend_right(kv, lid)
                    if a is not None and b is not None:
                        unite(a, b)
                if l.dst == self.node_src[u]:
                    a = self._extend_left(lid, ku)
                    b = self._extend_left(lid, kv)
                    if a is not None and b is not None:
                        unite(a, b)

    # -- reporting -------------------------------------------------------------

    def class_index(self, w: Word) -> Optional[int]:
        key = self._key(reduce_word(w))
        nid = self.nodes.get(key) if key is not None else None
        if nid is None:
            return None
        return self._class_pos[self.uf.find(nid)]

    def build_classes(self) -> dict[tuple[int, int], list[HomClass]]:
        groups: dict[int, list[int]] = {}
        for nid in range(len(self.node_words)):
            groups.setdefault(self.uf.find(nid), []).append(nid)
        by_pair: dict[tuple[int, int], list[tuple[tuple, int, int]]] = {}
        self._root_rep: dict[int, Word] = {}
        for root, members in groups.items():
            rep = min((self._decode(self.node_words[m]) for m in members),
                      key=lambda w: w.sort_key)
            self._root_rep[root] = rep
            pair = (self.node_src[root], self.node_dst[root])
            by_pair.setdefault(pair, []).append((rep.sort_key, root, len(members)))
        out: dict[tuple[int, int], list[HomClass]] = {}
        self._class_pos: dict[int, int] = {}
        for a in self.window:
            for b in self.window:
                rows = sorted(by_pair.get((a, b), []))
                classes = []
                for idx, (_, root, size) in enumerate(rows):
                    self._class_pos[root] = idx
                    classes.append(HomClass(self._root_rep[root], size, idx))
                out[(a, b)] = classes
        return out

    def partition_restricted(self, max_len: int) -> dict[tuple, int]:
        """Map each word key of length <= max_len to its class root."""
        out = {}
        for key, nid in self.nodes.items():
            length = 0 if key[0] == "id" else len(key)
            if length <= max_len:
                out[key] = self.uf.find(nid)
        return out

    def short_member_roots(self, max_len: int) -> set[int]:
        out = set()
        for key, nid in self.nodes.items():
            length = 0 if key[0] == "id" else len(key)
            if length <= max_len:
                out.add(self.uf.find(nid))
        return out


class _WordUnionFind:
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


def congruence_closure(
    p: Pretheory,
    bound: int = 6,
    window: Optional[list[int]] = None,
    certify: bool = True,
    budget: Optional[Budget] = None,
) -> HomTable:
    """Enumerate reduced words up to the bound and close the presentation's
    equations under single-letter pre/post-composition within that window.

    United words are equal in the presented pretheory (soundness); the
    completeness flag per (a, b) is the saturation heuristic: true when the
    run at bound+2 neither merges nor splits the bounded partition and every
    longer class already contains a word of length <= bound.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if window is None:
        window = p.default_window()
    budget = budget or Budget()
    engine = _ClosureEngine(p, bound, window, budget)
    classes = engine.build_classes()
    complete = {(a, b): False for a in window for b in window}
    table = HomTable(p, bound, tuple(sorted(window)), classes, complete, engine)
    if certify:
        certify_hom_table(table, budget)
    return table


def certify_hom_table(table: HomTable, budget: Optional[Budget] = None) -> None:
    """Run the saturation heuristic: rebuild the closure at bound+2 and mark
    (a, b) complete when the bounded partition is unchanged and every longer
    class already contains a word of length <= bound."""
    engine = table._engine
    p, bound, window = table.pretheory, table.bound, list(table.window)
    if engine.unseeded:
        return
    probe = _ClosureEngine(p, bound + 2, window, budget or Budget())
    part_small = engine.partition_restricted(bound)
    part_big = probe.partition_restricted(bound)
    remap: dict[int, int] = {}
    remap_rev: dict[int, int] = {}
    agree = True
    for key, root in part_small.items():
        big = part_big[key]
        if remap.get(root, big) != big or remap_rev.get(big, root) != root:
            agree = False
            break
        remap[root] = big
        remap_rev[big] = root
    short_roots = probe.short_member_roots(bound)
    long_only: dict[tuple[int, int], bool] = {}
    for nid in range(len(probe.node_words)):
        root = probe.uf.find(nid)
        if root not in short_roots:
            long_only[(probe.node_src[root], probe.node_dst[root])] = True
    for a in window:
        for b in window:
            table.complete[(a, b)] = agree and not long_only.get((a, b), False)
