"""Parser and emitter for pretheory files.

Grammar (whitespace-insensitive, ``#`` comments):

    file     := header (genDecl | eqDecl | importDecl)*
    header   := "base" ("fin" | "graph")
    genDecl  := "generator" IDENT ":" ARITY "->" ARITY
    eqDecl   := "eq" word "=" word
    importDecl := "import" IDENT          # pulls in a bundled presentation
    word     := "id" "[" ARITY "]" | letter (";" letter)*
    letter   := IDENT | basemap
    basemap (fin)   := "map(" [INT ("," INT)*] ")" "[" INT "->" INT "]"
    basemap (graph) := "shift(" INT ")" "[" INT "->" INT "]" | "sigma" | "tau"
    ARITY (fin) := INT ;  ARITY (graph) := "[" INT "]"

Words are in diagrammatic order: the left letter is applied first.  The
image list of a fin base map may be empty (the unique map out of arity 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .base import ArityFamily, ArityHom, FIN, DELTA0, family_by_name
from .pretheory import (
    BaseLetter,
    GenLetter,
    Pretheory,
    Word,
    bundled,
    format_letter,
    identity_word,
)


class LawkitParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_PUNCT = ("->", "(", ")", "[", "]", ":", ";", ",", "=")
_RESERVED = {"base", "generator", "eq", "import", "id", "map", "shift", "sigma", "tau"}


@dataclass
class _Tok:
    kind: str  # "int" | "ident" | punctuation literal
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        matched = False
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(_Tok(p, p, line, col))
                i += len(p)
                col += len(p)
                matched = True
                break
        if matched:
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "int" if word.isdigit() else "ident"
            toks.append(_Tok(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise LawkitParseError(f"unexpected character {ch!r}", line, col)
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def _err(self, message: str):
        if self.pos < len(self.toks):
            t = self.toks[self.pos]
            raise LawkitParseError(message, t.line, t.col)
        last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
        raise LawkitParseError(message + " (at end of input)", last.line, last.col)

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> _Tok:
        t = self.peek()
        if t is None:
            self._err("unexpected end of input")
        self.pos += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.peek()
        if t is None or t.kind != kind:
            self._err(f"expected {kind!r}")
        return self.next()

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind and (text is None or t.text == text)

    # -- grammar -------------------------------------------------------------

    def parse_file(self) -> Pretheory:
        if not (self.at("ident", "base")):
            self._err("file must start with 'base fin' or 'base graph'")
        self.next()
        base = self.expect("ident").text
        if base not in ("fin", "graph"):
            self.pos -= 1
            self._err("base must be 'fin' or 'graph'")
        family = family_by_name(base)
        p = Pretheory(family, (), (), "file")
        while self.peek() is not None:
            t = self.peek()
            if t.kind != "ident":
                self._err("expected a declaration")
            if t.text == "generator":
                self.next()
                name_tok = self.next()
                if name_tok.kind not in ("ident", "int") or name_tok.text in _RESERVED:
                    self.pos -= 1
                    self._err("expected a generator name")
                self.expect(":")
                a = self.parse_arity(family)
                self.expect("->")
                b = self.parse_arity(family)
                if any(g[0] == name_tok.text for g in p.generators):
                    raise LawkitParseError(f"duplicate generator {name_tok.text!r}",
                                           name_tok.line, name_tok.col)
                p = Pretheory(family, p.generators + ((name_tok.text, a, b),),
                              p.equations, p.name)
            elif t.text == "eq":
                self.next()
                lhs = self.parse_word(family, p)
                self.expect("=")
                rhs = self.parse_word(family, p)
                if (lhs.src, lhs.dst) != (rhs.src, rhs.dst):
                    raise LawkitParseError(
                        "equation sides have mismatched endpoints", t.line, t.col)
                p = Pretheory(family, p.generators, p.equations + ((lhs, rhs),), p.name)
            elif t.text == "import":
                self.next()
                name_tok = self.expect("ident")
                try:
                    imported = bundled(name_tok.text)
                except KeyError:
                    raise LawkitParseError(f"unknown bundled name {name_tok.text!r}",
                                           name_tok.line, name_tok.col)
                if imported.family is not family:
                    raise LawkitParseError(
                        f"bundled {name_tok.text!r} has a different base",
                        name_tok.line, name_tok.col)
                gens = p.generators
                for g in imported.generators:
                    if any(g[0] == h[0] for h in gens):
                        raise LawkitParseError(
                            f"import collides on generator {g[0]!r}",
                            name_tok.line, name_tok.col)
                    gens = gens + (g,)
                p = Pretheory(family, gens, p.equations + imported.equations, p.name)
            else:
                self._err(f"unknown declaration {t.text!r}")
        return p

    def parse_arity(self, family: ArityFamily) -> int:
        if family.kind == "fin":
            return int(self.expect("int").text)
        self.expect("[")
        v = int(self.expect("int").text)
        self.expect("]")
        return v

    def parse_word(self, family: ArityFamily, p: Pretheory) -> Word:
        t = self.peek()
        if t is not None and t.kind == "ident" and t.text == "id":
            self.next()
            self.expect("[")
            a = self.parse_arity(family)
            self.expect("]")
            return identity_word(a)
        letters = [self.parse_letter(family, p)]
        while self.at(";"):
            self.next()
            letters.append(self.parse_letter(family, p))
        cur = letters[0].src
        for l in letters:
            if l.src != cur:
                self._err(f"letter {format_letter(l, family)} not composable")
            cur = l.dst
        return Word(letters[0].src, cur, tuple(letters))

    def parse_letter(self, family: ArityFamily, p: Pretheory):
        t = self.peek()
        if t is None:
            self._err("expected a letter")
        if t.kind == "ident" and t.text == "map":
            if family.kind != "fin":
                self._err("map(...) letters need base fin")
            self.next()
            self.expect("(")
            images = []
            if not self.at(")"):
                images.append(int(self.expect("int").text))
                while self.at(","):
                    self.next()
                    images.append(int(self.expect("int").text))
            self.expect(")")
            self.expect("[")
            a = int(self.expect("int").text)
            self.expect("->")
            b = int(self.expect("int").text)
            self.expect("]")
            if len(images) != a or any(not 0 <= v < b for v in images):
                raise LawkitParseError("map images do not fit the arities",
                                       t.line, t.col)
            return BaseLetter(ArityHom("map", a, b, tuple(images)))
        if t.kind == "ident" and t.text == "shift":
            if family.kind != "graph":
                self._err("shift(...) letters need base graph")
            self.next()
            self.expect("(")
            k = int(self.expect("int").text)
            self.expect(")")
            self.expect("[")
            a = int(self.expect("int").text)
            self.expect("->")
            b = int(self.expect("int").text)
            self.expect("]")
            if k + a > b:
                raise LawkitParseError("shift does not fit the arities", t.line, t.col)
            return BaseLetter(ArityHom("shift", a, b, (k,)))
        if t.kind == "ident" and t.text == "sigma":
            if family.kind != "graph":
                self._err("sigma needs base graph")
            self.next()
            return BaseLetter(ArityHom("shift", 0, 1, (0,)))
        if t.kind == "ident" and t.text == "tau":
            if family.kind != "graph":
                self._err("tau needs base graph")
            self.next()
            return BaseLetter(ArityHom("shift", 0, 1, (1,)))
        if t.kind in ("ident", "int"):
            name = self.next().text
            for gname, a, b in p.generators:
                if gname == name:
                    return GenLetter(gname, a, b)
            self.pos -= 1
            self._err(f"unknown generator {name!r}")
        self._err("expected a letter")


def parse(text: str) -> Pretheory:
    """Parse a pretheory file."""
    return _Parser(_tokenize(text)).parse_file()


def emit(p: Pretheory) -> str:
    """Serialise a pretheory in the file format (parse . emit = id)."""
    fam = p.family
    lines = [f"base {fam.kind}"]
    for gname, a, b in p.generators:
        lines.append(f"generator {gname} : {fam.format_arity(a)} -> {fam.format_arity(b)}")
    for lhs, rhs in p.equations:
        lines.append(f"eq {lhs.pretty(fam)} = {rhs.pretty(fam)}")
    return "\n".join(lines) + "\n"
