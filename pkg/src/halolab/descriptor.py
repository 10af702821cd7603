"""Group-descriptor grammar and parser.

    descriptor := halo | product
    product    := atom ("x" atom)*
    atom       := "Z" [":lex"] | "Z^" int [":lex"] | "C" int | "H3"
    halo       := family "(" args ")"
    family     := wreath | shuffler | juggler | designer | cloner | upcloner
    args       := wreath/designer: descriptor "," descriptor
                  shuffler:        descriptor
                  juggler:         int "," descriptor
                  cloner/upcloner: "GF" int "," descriptor

Nesting is allowed anywhere a descriptor is.  Parse errors carry the byte
offset of the offending token.  print(parse(text)) == text on canonical
forms (commas followed by one space, " x " around products).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .errors import ContractViolation, ParseError
from .gf import GF

FAMILIES = ("wreath", "shuffler", "juggler", "designer", "cloner", "upcloner")


@dataclass(frozen=True)
class GroupDescriptor:
    kind: str          # "Z" | "C" | "H3" | "product" | family name
    args: Tuple = ()   # ints/GF-order/child descriptors per kind
    lex: bool = False

    def canonical(self) -> str:
        if self.kind == "Z":
            d = self.args[0]
            out = "Z" if d == 1 else f"Z^{d}"
            return out + (":lex" if self.lex else "")
        if self.kind == "C":
            return f"C{self.args[0]}"
        if self.kind == "H3":
            return "H3"
        if self.kind == "product":
            return " x ".join(c.canonical() for c in self.args)
        if self.kind == "shuffler":
            return f"shuffler({self.args[0].canonical()})"
        if self.kind == "juggler":
            return f"juggler({self.args[0]}, {self.args[1].canonical()})"
        if self.kind in ("cloner", "upcloner"):
            return f"{self.kind}(GF{self.args[0]}, {self.args[1].canonical()})"
        return f"{self.kind}({self.args[0].canonical()}, {self.args[1].canonical()})"

    def build(self):
        from .groups import CyclicGroup, HeisenbergGroup, ProductGroup, ZdGroup
        from .halo import make_halo

        if self.kind == "Z":
            return ZdGroup(self.args[0], self.lex)
        if self.kind == "C":
            return CyclicGroup(self.args[0])
        if self.kind == "H3":
            return HeisenbergGroup()
        if self.kind == "product":
            out = self.args[0].build()
            for child in self.args[1:]:
                out = ProductGroup(out, child.build())
            return out
        if self.kind == "shuffler":
            return make_halo("shuffler", None, self.args[0].build())
        if self.kind == "juggler":
            return make_halo("juggler", self.args[0], self.args[1].build())
        if self.kind in ("cloner", "upcloner"):
            return make_halo(self.kind, GF(self.args[0]), self.args[1].build())
        return make_halo(self.kind, self.args[0].build(), self.args[1].build())

    def __str__(self):
        return self.canonical()


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def peek_word(self) -> str:
        self.skip_ws()
        i = self.pos
        while i < len(self.text) and self.text[i].isalpha():
            i += 1
        return self.text[self.pos:i]

    def take(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise ParseError(f"expected {literal!r}", self.pos)
        self.pos += len(literal)

    def try_take(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def take_int(self) -> int:
        self.skip_ws()
        i = self.pos
        while i < len(self.text) and self.text[i].isdigit():
            i += 1
        if i == self.pos:
            raise ParseError("expected an integer", self.pos)
        value = int(self.text[self.pos:i])
        self.pos = i
        return value


def parse_descriptor(text: str) -> GroupDescriptor:
    sc = _Scanner(text)
    desc = _parse(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise ParseError("trailing input", sc.pos)
    return desc


def _parse(sc: _Scanner) -> GroupDescriptor:
    word = sc.peek_word()
    if word in FAMILIES:
        return _parse_halo(sc, word)
    return _parse_product(sc)


def _parse_halo(sc: _Scanner, family: str) -> GroupDescriptor:
    start = sc.pos
    sc.take(family)
    sc.take("(")
    if family == "shuffler":
        base = _parse(sc)
        sc.take(")")
        return GroupDescriptor("shuffler", (base,))
    if family == "juggler":
        tracks = sc.take_int()
        if tracks < 1:
            raise ParseError("juggler needs at least one track", start)
        sc.take(",")
        base = _parse(sc)
        sc.take(")")
        return GroupDescriptor("juggler", (tracks, base))
    if family in ("cloner", "upcloner"):
        gf_pos = sc.pos
        sc.take("GF")
        q = sc.take_int()
        if q not in GF.SUPPORTED:
            raise ParseError(f"GF({q}) not supported; q must be one of {GF.SUPPORTED}",
                             gf_pos)
        sc.take(",")
        sc.skip_ws()
        base_pos = sc.pos
        base = _parse(sc)
        sc.take(")")
        if family == "upcloner" and not _is_ordered(base):
            hint = base.canonical().replace(":lex", "")
            if hint == "Z":
                hint = "Z^1"
            raise ParseError(f"order required: use {hint}:lex", base_pos)
        return GroupDescriptor(family, (q, base))
    # wreath / designer
    fiber = _parse(sc)
    sc.take(",")
    base = _parse(sc)
    sc.take(")")
    return GroupDescriptor(family, (fiber, base))


def _is_ordered(desc: GroupDescriptor) -> bool:
    return desc.kind == "Z" and desc.lex


def _parse_product(sc: _Scanner) -> GroupDescriptor:
    atoms = [_parse_atom(sc)]
    while sc.try_take("x"):
        atoms.append(_parse_atom(sc))
    if len(atoms) == 1:
        return atoms[0]
    return GroupDescriptor("product", tuple(atoms))


def _parse_atom(sc: _Scanner) -> GroupDescriptor:
    sc.skip_ws()
    pos = sc.pos
    if sc.try_take("Z"):
        d = sc.take_int() if sc.try_take("^") else 1
        if d < 1:
            raise ParseError("Z^d requires d >= 1", pos)
        lex = sc.try_take(":lex")
        return GroupDescriptor("Z", (d,), lex)
    if sc.try_take("H3"):
        return GroupDescriptor("H3")
    if sc.try_take("C"):
        m = sc.take_int()
        if m < 1:
            raise ParseError("C m requires m >= 1", pos)
        return GroupDescriptor("C", (m,))
    word = sc.peek_word()
    raise ParseError(f"expected an atom or halo family, found {word or 'end of input'!r}",
                     pos)
