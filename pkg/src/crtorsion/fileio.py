"""Triangulation text files: parse and serialize.

Format (whitespace-insensitive, UTF-8, # comments):

    field rationals
    field number_field -1 -2 1 1      # modulus coefficients, low degree first
    group trivial | infinite_cyclic | cyclic_mod_p 7 | free_on_k 2
    vertex <id> <scalar>              # scalar: p/q or [c0,c1,...]
    tet <v@gauge> <v@gauge> <v@gauge> <v@gauge>
    rep t <a> <b> <c> <d>             # optional generator image, row-major 2x2
    defo <tag> t <da> <db> <dc> <dd>  # optional deformation direction per tag
    mark distinguished <i> <j>        # optional relative-complex marks
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .field import Field, FieldError, Scalar, number_field, rationals
from .groups import DeckGroup, GroupError
from .jets import Jet
from .mobius import MobiusElement
from .representation import DeformationFamily, Representation, trivial_representation
from .triangulation import GaugedTriangulation, build_quotient


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class Document:
    tri: GaugedTriangulation
    rep: object = None
    defo: DeformationFamily = None
    distinguished: tuple = None


def parse_triangulation(text: str) -> Document:
    field = None
    group = None
    zeta = {}
    tets = []
    rep_entries = {}
    defo_entries = {}
    distinguished = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        try:
            if kind == "field":
                field = _parse_field(args)
            elif kind == "group":
                group = _parse_group(args)
            elif kind == "vertex":
                if field is None:
                    raise ValueError("vertex before field declaration")
                vid, value = args[0], args[1]
                zeta[vid] = field.parse(value)
            elif kind == "tet":
                if group is None:
                    raise ValueError("tet before group declaration")
                if len(args) != 4:
                    raise ValueError("tet needs exactly 4 slots")
                slots = []
                for a in args:
                    vid, _, word = a.partition("@")
                    slots.append((vid, group.element_from_word(word or "e")))
                tets.append(slots)
            elif kind == "rep":
                name = args[0]
                rep_entries[name] = [field.parse(x) for x in args[1:5]]
            elif kind == "defo":
                tag, name = args[0], args[1]
                defo_entries.setdefault(name, {})[tag] = [field.parse(x) for x in args[2:6]]
            elif kind == "mark":
                if args[0] == "distinguished":
                    distinguished = tuple(int(x) for x in args[1:3])
                # other marks are informational
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except ParseError:
            raise
        except (ValueError, IndexError, FieldError, GroupError) as exc:
            raise ParseError(line_no, str(exc)) from exc
    if field is None:
        raise ParseError(0, "missing field declaration")
    if group is None:
        raise ParseError(0, "missing group declaration")
    tri = build_quotient(field, group, zeta, tets)
    rep = None
    defo = None
    if group.kind == "trivial":
        rep = trivial_representation(field)
    elif rep_entries:
        images = {}
        for name, (a, b, c, d) in rep_entries.items():
            images[name] = MobiusElement(a, b, c, d)
        rep = Representation(group, images)
        tags = sorted({t for per in defo_entries.values() for t in per})
        if tags:
            jet_images = {}
            for name, img in images.items():
                per = defo_entries.get(name, {})
                entries = []
                for i, x in enumerate((img.a, img.b, img.c, img.d)):
                    partials = {}
                    for tag, der in per.items():
                        if not der[i].is_zero:
                            partials[tag] = der[i]
                    entries.append(Jet(x, partials))
                jet_images[name] = MobiusElement.from_entries(entries)
            defo = DeformationFamily(rep, tuple(tags), jet_images)
    return Document(tri, rep, defo, distinguished)


def _parse_field(args) -> Field:
    if args[0] == "rationals":
        return rationals()
    if args[0] == "number_field":
        return number_field(args[1:])
    raise ValueError(f"unknown field kind {args[0]!r}")


def _parse_group(args) -> DeckGroup:
    kind = args[0]
    if kind == "trivial":
        return DeckGroup("trivial")
    if kind == "infinite_cyclic":
        return DeckGroup("infinite_cyclic")
    if kind == "cyclic_mod_p":
        return DeckGroup("cyclic_mod_p", p=int(args[1]))
    if kind == "free_on_k":
        return DeckGroup("free_on_k", k=int(args[1]))
    raise ValueError(f"unknown group kind {kind!r}")


def serialize_triangulation(tri: GaugedTriangulation, rep=None,
                            defo: DeformationFamily = None,
                            distinguished=None) -> str:
    lines = []
    f = tri.field
    if f.is_rationals:
        lines.append("field rationals")
    else:
        coeffs = " ".join(str(c) for c in f.modulus)
        lines.append(f"field number_field {coeffs}")
    g = tri.group
    if g.kind == "cyclic_mod_p":
        lines.append(f"group cyclic_mod_p {g.p}")
    elif g.kind == "free_on_k":
        lines.append(f"group free_on_k {g.k}")
    else:
        lines.append(f"group {g.kind}")
    for v in tri.vertex_ids:
        lines.append(f"vertex {v} {tri.zeta[v]}")
    for tet in tri.tets:
        lines.append("tet " + " ".join(f"{lv.vertex}@{lv.gauge.word()}" for lv in tet))
    if rep is not None and getattr(rep, "images", None):
        for name, img in sorted(rep.images.items()):
            lines.append(f"rep {name} {img.a} {img.b} {img.c} {img.d}")
    if defo is not None and defo.tags:
        for name, jet_img in sorted(defo.jet_images.items()):
            for tag in defo.tags:
                ders = []
                for x in (jet_img.a, jet_img.b, jet_img.c, jet_img.d):
                    p = x.partial(tag) if isinstance(x, Jet) else None
                    ders.append(str(p) if p is not None else "0")
                lines.append(f"defo {tag} {name} " + " ".join(ders))
    if distinguished is not None:
        lines.append("mark distinguished " + " ".join(str(i) for i in distinguished))
    return "\n".join(lines) + "\n"
