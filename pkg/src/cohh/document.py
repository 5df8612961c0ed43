"""The declarative JSON document format: named coalgebras (optionally
graded), bicomodules, colinear maps, and short exact sequences.

Documents are UTF-8 JSON with a versioned ``"format": 1`` field; scalars are
exact strings ("a/b" or "a"); all structure maps are sparse triples.  Every
object is validated at parse time, so a Document in hand is known-good.
"""

import json

from .fields import Field, QQ
from .linalg import Matrix
from .coalgebra import FinCoalgebra, trivial_coalgebra
from .comodule import Bicomodule, ColinearMap, is_bicolinear
from .dg import GradedCoalgebra, GradedBicomodule, trivial_graded_coalgebra
from .linalg import kernel, image, solve


FORMAT_VERSION = 1
RESERVED_COALGEBRA = "k"


class ParseError(Exception):
    def __init__(self, message, line=None, column=None):
        loc = "" if line is None else " (line %d, column %d)" % (line, column)
        super().__init__(message + loc)
        self.line = line
        self.column = column


class UnknownReference(Exception):
    pass


class SequenceNotExact(Exception):
    pass


def parse_field(spec):
    spec = str(spec).strip().lower()
    if spec in ("q", "qq", "rationals"):
        return QQ
    if spec.startswith("fp:"):
        return Field(int(spec[3:]))
    raise ParseError("unknown field spec %r (use 'q' or 'fp:p')" % (spec,))


def field_spec(field):
    return "q" if field.p is None else "fp:%d" % field.p


def _labels_and_degrees(raw):
    """Plain string labels (ungraded) or [label, degree] pairs (graded)."""
    if all(isinstance(l, str) for l in raw):
        return list(raw), None
    labels, degrees = [], []
    for item in raw:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise ParseError("graded labels must be [name, degree] pairs")
        labels.append(str(item[0]))
        degrees.append(int(item[1]))
    return labels, degrees


def _triple_matrix(field, triples_by_label, row_labels_a, row_labels_b, col_labels, what):
    """Build a (|A|*|B|) x |cols| matrix from {col_label: [[a, b, coeff]]}."""
    pos_a = {l: i for i, l in enumerate(row_labels_a)}
    pos_b = {l: i for i, l in enumerate(row_labels_b)}
    pos_c = {l: i for i, l in enumerate(col_labels)}
    ent = {}
    nb = len(row_labels_b)
    for col_label, triples in triples_by_label.items():
        if col_label not in pos_c:
            raise UnknownReference("%s: unknown basis label %r" % (what, col_label))
        for t in triples:
            if len(t) != 3:
                raise ParseError("%s: entries must be [a, b, coeff] triples" % what)
            a, b, coeff = t
            if a not in pos_a or b not in pos_b:
                raise UnknownReference("%s: unknown label in triple %r" % (what, t))
            key = (pos_a[a] * nb + pos_b[b], pos_c[col_label])
            ent[key] = field.add(ent.get(key, field.zero()), field.parse(coeff))
    return Matrix(field, len(row_labels_a) * nb, len(col_labels), ent)


def _diff_matrix(field, triples, labels, what):
    pos = {l: i for i, l in enumerate(labels)}
    ent = {}
    for t in triples:
        if len(t) != 3:
            raise ParseError("%s: differential entries must be [src, dst, coeff]" % what)
        src, dst, coeff = t
        if src not in pos or dst not in pos:
            raise UnknownReference("%s: unknown label in differential %r" % (what, t))
        key = (pos[dst], pos[src])
        ent[key] = field.add(ent.get(key, field.zero()), field.parse(coeff))
    return Matrix(field, len(labels), len(labels), ent)


def _parse_coalgebra(name, raw, field):
    labels, degrees = _labels_and_degrees(raw.get("labels", []))
    counit_raw = raw.get("counit", {})
    pos = {l: i for i, l in enumerate(labels)}
    ent = {}
    for l, coeff in counit_raw.items():
        if l not in pos:
            raise UnknownReference("coalgebra %r: unknown counit label %r" % (name, l))
        ent[(0, pos[l])] = field.parse(coeff)
    counit = Matrix(field, 1, len(labels), ent)
    comul = _triple_matrix(field, raw.get("comul", {}), labels, labels, labels,
                           "coalgebra %r" % name)
    if degrees is None:
        if "differential" in raw:
            raise ParseError("coalgebra %r: differential requires graded labels" % name)
        return FinCoalgebra(field, labels, comul, counit)
    diff = _diff_matrix(field, raw.get("differential", []), labels, "coalgebra %r" % name)
    return GradedCoalgebra(field, labels, degrees, comul, counit, diff)


def _parse_bicomodule(name, raw, field, coalgebras):
    labels, degrees = _labels_and_degrees(raw.get("labels", []))
    graded = degrees is not None

    def resolve(side):
        ref = raw.get(side)
        if ref is None:
            raise ParseError("bicomodule %r: missing %r coalgebra" % (name, side))
        if ref == RESERVED_COALGEBRA:
            return trivial_graded_coalgebra(field) if graded else trivial_coalgebra(field)
        if ref not in coalgebras:
            raise UnknownReference("bicomodule %r: unknown coalgebra %r" % (name, ref))
        c = coalgebras[ref]
        if graded != isinstance(c, GradedCoalgebra):
            raise ParseError("bicomodule %r: graded/ungraded mismatch with %r" % (name, ref))
        return c

    left = resolve("left")
    right = resolve("right")
    lam = _triple_matrix(field, raw.get("lambda", {}), left.labels, labels, labels,
                         "bicomodule %r (lambda)" % name)
    rho = _triple_matrix(field, raw.get("rho", {}), labels, right.labels, labels,
                         "bicomodule %r (rho)" % name)
    if not graded:
        return Bicomodule(left, right, labels, lam, rho)
    diff = _diff_matrix(field, raw.get("differential", []), labels, "bicomodule %r" % name)
    return GradedBicomodule(left, right, labels, degrees, lam, rho, diff)


def _parse_map(name, raw, field, bicomodules):
    src = raw.get("source")
    dst = raw.get("target")
    if src not in bicomodules or dst not in bicomodules:
        raise UnknownReference("map %r: unknown endpoint %r or %r" % (name, src, dst))
    source, target = bicomodules[src], bicomodules[dst]
    if isinstance(source, GradedBicomodule) or isinstance(target, GradedBicomodule):
        raise ParseError("map %r: maps between graded bicomodules are not part of "
                         "the document format" % name)
    pos_s = {l: i for i, l in enumerate(source.labels)}
    pos_t = {l: i for i, l in enumerate(target.labels)}
    ent = {}
    for t in raw.get("entries", []):
        if len(t) != 3:
            raise ParseError("map %r: entries must be [src, dst, coeff]" % name)
        a, b, coeff = t
        if a not in pos_s or b not in pos_t:
            raise UnknownReference("map %r: unknown label in %r" % (name, t))
        key = (pos_t[b], pos_s[a])
        ent[key] = field.add(ent.get(key, field.zero()), field.parse(coeff))
    matrix = Matrix(field, target.dim, source.dim, ent)
    return ColinearMap(source, target, matrix)


class Sequence:
    """A short exact sequence 0 -> M' -> M -> M'' -> 0 given by its
    inclusion and projection, with an optional compatible endomorphism
    triple (f', f, f'')."""

    def __init__(self, name, inclusion, projection, endomorphisms=None):
        self.name = name
        self.inclusion = inclusion
        self.projection = projection
        self.endomorphisms = endomorphisms
        if inclusion.target is not projection.source:
            raise SequenceNotExact("sequence %r: middle objects differ" % name)
        if kernel(inclusion.matrix).dim != 0:
            raise SequenceNotExact("sequence %r: inclusion is not injective" % name)
        if image(projection.matrix).dim != projection.target.dim:
            raise SequenceNotExact("sequence %r: projection is not surjective" % name)
        if image(inclusion.matrix) != kernel(projection.matrix):
            raise SequenceNotExact("sequence %r: im(inclusion) != ker(projection)" % name)
        if endomorphisms is not None:
            fp, f, fpp = endomorphisms
            if f.matrix @ inclusion.matrix != inclusion.matrix @ fp.matrix:
                raise SequenceNotExact("sequence %r: endomorphisms do not commute "
                                       "with the inclusion" % name)
            if fpp.matrix @ projection.matrix != projection.matrix @ f.matrix:
                raise SequenceNotExact("sequence %r: endomorphisms do not commute "
                                       "with the projection" % name)


class Document:
    def __init__(self, field, coalgebras, bicomodules, maps, sequences):
        self.field = field
        self.coalgebras = coalgebras
        self.bicomodules = bicomodules
        self.maps = maps
        self.sequences = sequences

    def __eq__(self, other):
        if not isinstance(other, Document):
            return False
        if self.field != other.field:
            return False
        if set(self.coalgebras) != set(other.coalgebras):
            return False
        for k in self.coalgebras:
            a, b = self.coalgebras[k], other.coalgebras[k]
            if type(a) is not type(b):
                return False
            if (a.labels, a.comul, a.counit) != (b.labels, b.comul, b.counit):
                return False
            if isinstance(a, GradedCoalgebra) and (a.degrees, a.diff) != (b.degrees, b.diff):
                return False
        if set(self.bicomodules) != set(other.bicomodules):
            return False
        for k in self.bicomodules:
            a, b = self.bicomodules[k], other.bicomodules[k]
            if (a.labels, a.lam, a.rho) != (b.labels, b.lam, b.rho):
                return False
        if set(self.maps) != set(other.maps):
            return False
        for k in self.maps:
            if self.maps[k].matrix != other.maps[k].matrix:
                return False
        return set(self.sequences) == set(other.sequences)

    def coalgebra(self, name):
        if name == RESERVED_COALGEBRA:
            return trivial_coalgebra(self.field)
        if name not in self.coalgebras:
            raise UnknownReference("unknown coalgebra %r" % name)
        return self.coalgebras[name]

    def bicomodule(self, name):
        if name not in self.bicomodules:
            raise UnknownReference("unknown bicomodule %r" % name)
        return self.bicomodules[name]

    def map(self, name):
        if name not in self.maps:
            raise UnknownReference("unknown map %r" % name)
        return self.maps[name]


def parse_document(text, field_override=None):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("invalid JSON: %s" % e.msg, e.lineno, e.colno)
    if not isinstance(raw, dict):
        raise ParseError("document must be a JSON object")
    if raw.get("format") != FORMAT_VERSION:
        raise ParseError("unsupported document format %r" % (raw.get("format"),))
    field = field_override if field_override is not None else parse_field(raw.get("field", "q"))

    coalgebras = {}
    for name in sorted(raw.get("coalgebras", {})):
        if name == RESERVED_COALGEBRA:
            raise ParseError("coalgebra name %r is reserved for the ground field"
                             % RESERVED_COALGEBRA)
        coalgebras[name] = _parse_coalgebra(name, raw["coalgebras"][name], field)

    bicomodules = {}
    for name in sorted(raw.get("bicomodules", {})):
        bicomodules[name] = _parse_bicomodule(name, raw["bicomodules"][name], field, coalgebras)

    maps = {}
    for name in sorted(raw.get("maps", {})):
        maps[name] = _parse_map(name, raw["maps"][name], field, bicomodules)

    sequences = {}
    for name in sorted(raw.get("sequences", {})):
        seq = raw["sequences"][name]
        inc = seq.get("inclusion")
        proj = seq.get("projection")
        if inc not in maps or proj not in maps:
            raise UnknownReference("sequence %r: unknown map reference" % name)
        endos = None
        if "endomorphisms" in seq:
            refs = seq["endomorphisms"]
            if len(refs) != 3:
                raise ParseError("sequence %r: endomorphisms must be a triple" % name)
            for r in refs:
                if r not in maps:
                    raise UnknownReference("sequence %r: unknown endomorphism %r" % (name, r))
            endos = tuple(maps[r] for r in refs)
        sequences[name] = Sequence(name, maps[inc], maps[proj], endos)

    return Document(field, coalgebras, bicomodules, maps, sequences)


def load_document(path, field_override=None):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_document(fh.read(), field_override)


# -- serialization -----------------------------------------------------------------


def _matrix_triples(matrix, row_a, row_b, cols, to_str):
    out = {}
    nb = len(row_b)
    for (r, c), v in sorted(matrix.entries.items()):
        a, b = divmod(r, nb)
        out.setdefault(cols[c], []).append([row_a[a], row_b[b], to_str(v)])
    return out


def document_to_json(doc):
    """Canonical serialized form; parsing it back yields an equal Document."""
    field = doc.field
    to_str = field.to_str
    out = {"format": FORMAT_VERSION, "field": field_spec(field),
           "coalgebras": {}, "bicomodules": {}, "maps": {}, "sequences": {}}
    for name in sorted(doc.coalgebras):
        c = doc.coalgebras[name]
        graded = isinstance(c, GradedCoalgebra)
        entry = {
            "labels": ([[l, d] for l, d in zip(c.labels, c.degrees)] if graded
                       else list(c.labels)),
            "comul": _matrix_triples(c.comul, c.labels, c.labels, c.labels, to_str),
            "counit": {c.labels[j]: to_str(v) for (_, j), v in sorted(c.counit.entries.items())},
        }
        if graded and not c.diff.is_zero():
            entry["differential"] = [[c.labels[src], c.labels[dst], to_str(v)]
                                     for (dst, src), v in sorted(c.diff.entries.items())]
        out["coalgebras"][name] = entry
    names_by_obj = {}
    for name in sorted(doc.coalgebras):
        names_by_obj[id(doc.coalgebras[name])] = name
    for name in sorted(doc.bicomodules):
        m = doc.bicomodules[name]
        graded = isinstance(m, GradedBicomodule)
        left = names_by_obj.get(id(m.left_coalgebra), RESERVED_COALGEBRA)
        right = names_by_obj.get(id(m.right_coalgebra), RESERVED_COALGEBRA)
        entry = {
            "left": left, "right": right,
            "labels": ([[l, d] for l, d in zip(m.labels, m.degrees)] if graded
                       else list(m.labels)),
            "lambda": _matrix_triples(m.lam, m.left_coalgebra.labels, m.labels,
                                      m.labels, to_str),
            "rho": _matrix_triples(m.rho, m.labels, m.right_coalgebra.labels,
                                   m.labels, to_str),
        }
        if graded and not m.diff.is_zero():
            entry["differential"] = [[m.labels[src], m.labels[dst], to_str(v)]
                                     for (dst, src), v in sorted(m.diff.entries.items())]
        out["bicomodules"][name] = entry
    mod_names = {id(m): n for n, m in doc.bicomodules.items()}
    for name in sorted(doc.maps):
        f = doc.maps[name]
        out["maps"][name] = {
            "source": mod_names[id(f.source)],
            "target": mod_names[id(f.target)],
            "entries": [[f.source.labels[c], f.target.labels[r], to_str(v)]
                        for (r, c), v in sorted(f.matrix.entries.items())],
        }
    map_names = {id(f): n for n, f in doc.maps.items()}
    for name in sorted(doc.sequences):
        s = doc.sequences[name]
        entry = {"inclusion": map_names[id(s.inclusion)],
                 "projection": map_names[id(s.projection)]}
        if s.endomorphisms is not None:
            entry["endomorphisms"] = [map_names[id(e)] for e in s.endomorphisms]
        out["sequences"][name] = entry
    return json.dumps(out, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
