"""JSON codecs for every object the command line reads and writes.

Conventions: complex numbers are ``[re, im]`` pairs, exact rational phases
are ``{"num", "den"}`` objects, tensors are nested lists.  Serialization is
canonical — sorted keys, two-space indent, trailing newline — so identical
objects produce byte-identical documents.  ``SchemaError`` marks documents
that cannot be decoded at all; whether a decoded object satisfies its
axioms is the validators' business.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import numpy as np

from .algebras import BlockData, FdStarAlgebra
from .bimodules import HilbertBimodule
from .correspondences import Correspondence
from .errors import SchemaError
from .groupoids import Bibundle, FinGroupoid
from .groups import FinGroup
from .reduction import Multiplier, UnitaryRep, trivial_multiplier


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(doc) -> str:
    return hashlib.sha256(dumps(doc).encode("utf-8")).hexdigest()


def loads(text: str, where: str = "document"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{where}: not valid JSON ({exc})") from exc


# ---------------------------------------------------------------------------
# leaves

def _dict(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected an object")
    return doc


def _get(doc: dict, key: str, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing key {key!r}")
    return doc[key]


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}: expected an integer")
    return v


def _str(v, where: str) -> str:
    if not isinstance(v, str):
        raise SchemaError(f"{where}: expected a string")
    return v


def _str_list(v, where: str) -> list[str]:
    if not isinstance(v, list):
        raise SchemaError(f"{where}: expected a list")
    return [_str(x, where) for x in v]


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(v, where: str = "number") -> complex:
    if not (isinstance(v, list) and len(v) == 2 and all(_is_number(x) for x in v)):
        raise SchemaError(f"{where}: expected [re, im]")
    return complex(v[0], v[1])


def encode_carray(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return encode_complex(arr[()])
    return [encode_carray(sub) for sub in arr]


def decode_carray(doc, shape: tuple[int, ...], where: str = "array") -> np.ndarray:
    def walk(node):
        if not isinstance(node, list):
            raise SchemaError(f"{where}: expected nested lists with [re, im] leaves")
        if len(node) == 2 and all(_is_number(x) for x in node):
            return complex(node[0], node[1])
        return [walk(x) for x in node]

    try:
        arr = np.array(walk(doc), dtype=complex)
    except ValueError as exc:
        raise SchemaError(f"{where}: ragged array") from exc
    size = 1
    for d in shape:
        size *= d
    if arr.size != size:
        raise SchemaError(f"{where}: expected shape {shape}, got {arr.shape}")
    return arr.reshape(shape)


# ---------------------------------------------------------------------------
# groupoids and bibundles

def encode_groupoid(g: FinGroupoid) -> dict:
    return {
        "objects": list(g.objects),
        "arrows": [{"id": x, "src": g.src[x], "tgt": g.tgt[x]} for x in g.arrows],
        "comp": [[x, y, z] for (x, y), z in sorted(g.comp.items())],
        "inv": [[x, g.inv[x]] for x in g.arrows],
        "units": [[u, g.unit[u]] for u in g.objects],
    }


def decode_groupoid(doc, where: str = "groupoid") -> FinGroupoid:
    doc = _dict(doc, where)
    objects = tuple(_str_list(_get(doc, "objects", where), f"{where}.objects"))
    arrows_doc = _get(doc, "arrows", where)
    if not isinstance(arrows_doc, list):
        raise SchemaError(f"{where}.arrows: expected a list")
    arrows, src, tgt = [], {}, {}
    for a in arrows_doc:
        a = _dict(a, f"{where}.arrows[]")
        x = _str(_get(a, "id", f"{where}.arrows[]"), f"{where}.arrows[].id")
        arrows.append(x)
        src[x] = _str(_get(a, "src", f"{where}.arrows[]"), f"{where}.arrows[].src")
        tgt[x] = _str(_get(a, "tgt", f"{where}.arrows[]"), f"{where}.arrows[].tgt")

    def pairs(key):
        out = {}
        rows = _get(doc, key, where)
        if not isinstance(rows, list):
            raise SchemaError(f"{where}.{key}: expected a list")
        for row in rows:
            if not (isinstance(row, list) and len(row) == 2):
                raise SchemaError(f"{where}.{key}: expected [key, value] pairs")
            out[_str(row[0], f"{where}.{key}")] = _str(row[1], f"{where}.{key}")
        return out

    comp = {}
    rows = _get(doc, "comp", where)
    if not isinstance(rows, list):
        raise SchemaError(f"{where}.comp: expected a list")
    for row in rows:
        if not (isinstance(row, list) and len(row) == 3):
            raise SchemaError(f"{where}.comp: expected [x, y, xy] triples")
        x, y, z = (_str(v, f"{where}.comp") for v in row)
        comp[(x, y)] = z
    return FinGroupoid(objects, tuple(arrows), src, tgt, pairs("units"), pairs("inv"), comp)


def encode_bibundle(b: Bibundle) -> dict:
    return {
        "left_groupoid": encode_groupoid(b.left_groupoid),
        "right_groupoid": encode_groupoid(b.right_groupoid),
        "carrier": list(b.carrier),
        "tau": {m: b.tau[m] for m in b.carrier},
        "rho": {m: b.rho[m] for m in b.carrier},
        "left": [[x, m, y] for (x, m), y in sorted(b.left.items())],
        "right": [[m, h, y] for (m, h), y in sorted(b.right.items())],
    }


def decode_bibundle(doc, where: str = "bibundle") -> Bibundle:
    doc = _dict(doc, where)
    lg = decode_groupoid(_get(doc, "left_groupoid", where), f"{where}.left_groupoid")
    rg = decode_groupoid(_get(doc, "right_groupoid", where), f"{where}.right_groupoid")
    carrier = tuple(_str_list(_get(doc, "carrier", where), f"{where}.carrier"))

    def strmap(key):
        m = _dict(_get(doc, key, where), f"{where}.{key}")
        return {
            _str(k, f"{where}.{key}"): _str(v, f"{where}.{key}") for k, v in m.items()
        }

    def table(key):
        rows = _get(doc, key, where)
        if not isinstance(rows, list):
            raise SchemaError(f"{where}.{key}: expected a list")
        out = {}
        for row in rows:
            if not (isinstance(row, list) and len(row) == 3):
                raise SchemaError(f"{where}.{key}: expected triples")
            a, b, c = (_str(v, f"{where}.{key}") for v in row)
            out[(a, b)] = c
        return out

    return Bibundle(lg, rg, carrier, strmap("tau"), strmap("rho"), table("left"), table("right"))


# ---------------------------------------------------------------------------
# algebras, bimodules, correspondences

def encode_algebra(a: FdStarAlgebra) -> dict:
    mult = []
    for (i, j, k) in np.argwhere(a.mult != 0):
        mult.append([int(i), int(j), int(k), encode_complex(a.mult[i, j, k])])
    doc = {
        "dim": a.dim,
        "labels": list(a.labels),
        "mult": mult,
        "star": encode_carray(a.star),
        "state": encode_carray(a.state),
    }
    if a.blocks is not None:
        doc["blocks"] = {
            "sizes": [int(s) for s in a.blocks.sizes],
            "images": encode_carray(a.blocks.images),
        }
    return doc


def decode_algebra(doc, where: str = "algebra") -> FdStarAlgebra:
    doc = _dict(doc, where)
    d = _int(_get(doc, "dim", where), f"{where}.dim")
    if d < 1:
        raise SchemaError(f"{where}.dim: must be positive")
    if "labels" in doc:
        labels = tuple(_str_list(doc["labels"], f"{where}.labels"))
        if len(labels) != d:
            raise SchemaError(f"{where}.labels: expected {d} labels")
    else:
        labels = tuple(f"e{i}" for i in range(d))
    mult = np.zeros((d, d, d), dtype=complex)
    rows = _get(doc, "mult", where)
    if not isinstance(rows, list):
        raise SchemaError(f"{where}.mult: expected a list")
    seen = set()
    for row in rows:
        if not (isinstance(row, list) and len(row) == 4):
            raise SchemaError(f"{where}.mult: expected [i, j, k, [re, im]] entries")
        i, j, k = (_int(v, f"{where}.mult") for v in row[:3])
        if not (0 <= i < d and 0 <= j < d and 0 <= k < d):
            raise SchemaError(f"{where}.mult: index ({i}, {j}, {k}) out of range")
        if (i, j, k) in seen:
            raise SchemaError(f"{where}.mult: duplicate entry at ({i}, {j}, {k})")
        seen.add((i, j, k))
        mult[i, j, k] = decode_complex(row[3], f"{where}.mult[{i},{j},{k}]")
    star = decode_carray(_get(doc, "star", where), (d, d), f"{where}.star")
    state = decode_carray(_get(doc, "state", where), (d,), f"{where}.state")
    blocks = None
    if doc.get("blocks") is not None:
        bdoc = _dict(doc["blocks"], f"{where}.blocks")
        sizes_doc = _get(bdoc, "sizes", f"{where}.blocks")
        if not isinstance(sizes_doc, list) or not sizes_doc:
            raise SchemaError(f"{where}.blocks.sizes: expected a nonempty list")
        sizes = tuple(_int(s, f"{where}.blocks.sizes") for s in sizes_doc)
        if any(s < 1 for s in sizes):
            raise SchemaError(f"{where}.blocks.sizes: sizes must be positive")
        big = sum(sizes)
        images = decode_carray(
            _get(bdoc, "images", f"{where}.blocks"), (d, big, big), f"{where}.blocks.images"
        )
        blocks = BlockData(sizes, images)
    return FdStarAlgebra(labels, mult, star, state, blocks)


def encode_bimodule(e: HilbertBimodule) -> dict:
    return {
        "alg_a": encode_algebra(e.alg_a),
        "alg_b": encode_algebra(e.alg_b),
        "dim": e.dim,
        "left": encode_carray(e.left),
        "right": encode_carray(e.right),
        "ip": encode_carray(e.ip),
    }


def decode_bimodule(doc, where: str = "bimodule") -> HilbertBimodule:
    doc = _dict(doc, where)
    a = decode_algebra(_get(doc, "alg_a", where), f"{where}.alg_a")
    b = decode_algebra(_get(doc, "alg_b", where), f"{where}.alg_b")
    n = _int(_get(doc, "dim", where), f"{where}.dim")
    if n < 0:
        raise SchemaError(f"{where}.dim: must be nonnegative")
    left = decode_carray(_get(doc, "left", where), (a.dim, n, n), f"{where}.left")
    right = decode_carray(_get(doc, "right", where), (b.dim, n, n), f"{where}.right")
    ip = decode_carray(_get(doc, "ip", where), (n, n, b.dim), f"{where}.ip")
    return HilbertBimodule(a, b, n, left, right, ip)


def encode_correspondence(h: Correspondence) -> dict:
    return {
        "alg_m": encode_algebra(h.alg_m),
        "alg_n": encode_algebra(h.alg_n),
        "dim": h.dim,
        "piL": encode_carray(h.piL),
        "piR": encode_carray(h.piR),
    }


def decode_correspondence(doc, where: str = "correspondence") -> Correspondence:
    doc = _dict(doc, where)
    m = decode_algebra(_get(doc, "alg_m", where), f"{where}.alg_m")
    n = decode_algebra(_get(doc, "alg_n", where), f"{where}.alg_n")
    d = _int(_get(doc, "dim", where), f"{where}.dim")
    if d < 0:
        raise SchemaError(f"{where}.dim: must be nonnegative")
    piL = decode_carray(_get(doc, "piL", where), (m.dim, d, d), f"{where}.piL")
    piR = decode_carray(_get(doc, "piR", where), (n.dim, d, d), f"{where}.piR")
    return Correspondence(m, n, d, piL, piR)


# ---------------------------------------------------------------------------
# groups, multipliers, representations

def encode_group(g: FinGroup) -> dict:
    return {
        "elements": list(g.elements),
        "table": [list(row) for row in g.table],
        "identity": g.identity,
    }


def decode_group(doc, where: str = "group") -> FinGroup:
    doc = _dict(doc, where)
    elements = tuple(_str_list(_get(doc, "elements", where), f"{where}.elements"))
    n = len(elements)
    table_doc = _get(doc, "table", where)
    if not (isinstance(table_doc, list) and len(table_doc) == n):
        raise SchemaError(f"{where}.table: expected {n} rows")
    table = []
    for row in table_doc:
        if not (isinstance(row, list) and len(row) == n):
            raise SchemaError(f"{where}.table: expected {n} entries per row")
        vals = tuple(_int(v, f"{where}.table") for v in row)
        if any(not 0 <= v < n for v in vals):
            raise SchemaError(f"{where}.table: entry out of range")
        table.append(vals)
    identity = _int(_get(doc, "identity", where), f"{where}.identity")
    if not 0 <= identity < n:
        raise SchemaError(f"{where}.identity: out of range")
    return FinGroup(elements, tuple(table), identity)


def encode_multiplier(m: Multiplier) -> dict:
    phases = []
    for x, row in enumerate(m.phases):
        for y, q in enumerate(row):
            if q:
                phases.append([x, y, {"num": q.numerator, "den": q.denominator}])
    return {"phases": phases}


def decode_multiplier(doc, group: FinGroup, where: str = "multiplier") -> Multiplier:
    doc = _dict(doc, where)
    n = group.order
    rows = _get(doc, "phases", where)
    if not isinstance(rows, list):
        raise SchemaError(f"{where}.phases: expected a list")
    table = [[Fraction(0)] * n for _ in range(n)]
    for row in rows:
        if not (isinstance(row, list) and len(row) == 3):
            raise SchemaError(f"{where}.phases: expected [x, y, {{num, den}}] entries")
        x, y = _int(row[0], f"{where}.phases"), _int(row[1], f"{where}.phases")
        if not (0 <= x < n and 0 <= y < n):
            raise SchemaError(f"{where}.phases: index ({x}, {y}) out of range")
        frac = _dict(row[2], f"{where}.phases[{x},{y}]")
        num = _int(_get(frac, "num", f"{where}.phases[{x},{y}]"), f"{where}.phases")
        den = _int(_get(frac, "den", f"{where}.phases[{x},{y}]"), f"{where}.phases")
        if den == 0:
            raise SchemaError(f"{where}.phases: zero denominator at ({x}, {y})")
        table[x][y] = Fraction(num, den)
    return Multiplier(group, tuple(tuple(row) for row in table))


def encode_rep(u: UnitaryRep) -> dict:
    return {
        "group": encode_group(u.group),
        "multiplier": encode_multiplier(u.mult),
        "matrices": encode_carray(u.matrices),
    }


def decode_rep(doc, where: str = "rep") -> UnitaryRep:
    doc = _dict(doc, where)
    group = decode_group(_get(doc, "group", where), f"{where}.group")
    if doc.get("multiplier") is None:
        mult = trivial_multiplier(group)
    else:
        mult = decode_multiplier(doc["multiplier"], group, f"{where}.multiplier")
    mats_doc = _get(doc, "matrices", where)
    if not (isinstance(mats_doc, list) and len(mats_doc) == group.order):
        raise SchemaError(f"{where}.matrices: expected {group.order} matrices")
    first = mats_doc[0] if mats_doc else []
    d = len(first) if isinstance(first, list) else 0
    matrices = decode_carray(mats_doc, (group.order, d, d), f"{where}.matrices")
    return UnitaryRep(group, mult, matrices)
