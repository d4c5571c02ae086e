"""Finite groupoids, actions, principal bibundles, and their tensor calculus.

Everything is table-driven: objects and arrows are string labels, composition
is a partial map on pairs, and all axioms are checked exhaustively.  The
composition ``comp[(x, y)]`` is defined iff ``src(x) == tgt(y)`` and denotes
"x after y".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import MismatchedMiddle, NotBiprincipal, NotPrincipal
from . import groups
from .groups import FinGroup


@dataclass(eq=True)
class FinGroupoid:
    objects: tuple[str, ...]
    arrows: tuple[str, ...]
    src: dict[str, str]
    tgt: dict[str, str]
    unit: dict[str, str]  # object -> its unit arrow
    inv: dict[str, str]
    comp: dict[tuple[str, str], str]

    def is_unit(self, x: str) -> bool:
        return self.unit[self.src[x]] == x

    def hom(self, u: str, v: str) -> list[str]:
        return [x for x in self.arrows if self.src[x] == u and self.tgt[x] == v]


def validate_groupoid(g: FinGroupoid) -> str | None:
    """First failing axiom instance as a string, or None if g is a groupoid."""
    if len(set(g.objects)) != len(g.objects):
        return "duplicate object labels"
    if len(set(g.arrows)) != len(g.arrows):
        return "duplicate arrow labels"
    arrows = set(g.arrows)
    objects = set(g.objects)
    for name, mapping, dom, cod in (
        ("src", g.src, arrows, objects),
        ("tgt", g.tgt, arrows, objects),
        ("inv", g.inv, arrows, arrows),
    ):
        if set(mapping) != dom:
            return f"{name} is not defined on exactly the arrows"
        for k, v in mapping.items():
            if v not in cod:
                return f"{name}({k}) = {v} is not a valid label"
    if set(g.unit) != objects:
        return "unit is not defined on exactly the objects"
    for u, e in g.unit.items():
        if e not in arrows:
            return f"unit({u}) = {e} is not an arrow"
        if g.src[e] != u or g.tgt[e] != u:
            return f"unit arrow of {u} is not an endomorphism of {u}"
    composable = {(x, y) for x in g.arrows for y in g.arrows if g.src[x] == g.tgt[y]}
    if set(g.comp) != composable:
        missing = composable - set(g.comp)
        extra = set(g.comp) - composable
        pair = sorted(missing)[0] if missing else sorted(extra)[0]
        kind = "missing" if missing else "spurious"
        return f"composition {kind} at {pair}"
    for (x, y), z in sorted(g.comp.items()):
        if z not in arrows:
            return f"comp({x}, {y}) = {z} is not an arrow"
        if g.src[z] != g.src[y] or g.tgt[z] != g.tgt[x]:
            return f"comp({x}, {y}) has wrong endpoints"
    for x in g.arrows:
        if g.comp[(g.unit[g.tgt[x]], x)] != x:
            return f"left unit law fails at {x}"
        if g.comp[(x, g.unit[g.src[x]])] != x:
            return f"right unit law fails at {x}"
    by_tgt: dict[str, list[str]] = {u: [] for u in g.objects}
    for x in g.arrows:
        by_tgt[g.tgt[x]].append(x)
    for x in g.arrows:
        for y in by_tgt[g.src[x]]:
            xy = g.comp[(x, y)]
            for z in by_tgt[g.src[y]]:
                if g.comp[(xy, z)] != g.comp[(x, g.comp[(y, z)])]:
                    return f"associativity fails at ({x}, {y}, {z})"
    for x in g.arrows:
        xb = g.inv[x]
        if g.src[xb] != g.tgt[x] or g.tgt[xb] != g.src[x]:
            return f"inverse of {x} has wrong endpoints"
        if g.comp[(x, xb)] != g.unit[g.tgt[x]]:
            return f"x inv(x) law fails at {x}"
        if g.comp[(xb, x)] != g.unit[g.src[x]]:
            return f"inv(x) x law fails at {x}"
    return None


# ---------------------------------------------------------------------------
# constructors

def pair_groupoid(objects) -> FinGroupoid:
    objects = tuple(objects)
    arrows = tuple(f"{v}<{u}" for v in objects for u in objects)
    src = {f"{v}<{u}": u for v in objects for u in objects}
    tgt = {f"{v}<{u}": v for v in objects for u in objects}
    unit = {u: f"{u}<{u}" for u in objects}
    inv = {f"{v}<{u}": f"{u}<{v}" for v in objects for u in objects}
    comp = {
        (f"{w}<{v}", f"{v}<{u}"): f"{w}<{u}"
        for w in objects
        for v in objects
        for u in objects
    }
    return FinGroupoid(objects, arrows, src, tgt, unit, inv, comp)


def connected_groupoid(objects, group: FinGroup) -> FinGroupoid:
    """Transitive groupoid on the given objects with the given isotropy group.

    Arrows are ``v|k|u`` (from u to v with group coordinate k) and compose by
    ``(w|k2|v) o (v|k1|u) = w|k2 k1|u``.
    """
    objects = tuple(objects)
    lab = lambda v, k, u: f"{v}|{group.elements[k]}|{u}"
    arrows = tuple(
        lab(v, k, u) for v in objects for k in range(group.order) for u in objects
    )
    src, tgt, inv = {}, {}, {}
    comp = {}
    for v in objects:
        for k in range(group.order):
            for u in objects:
                a = lab(v, k, u)
                src[a] = u
                tgt[a] = v
                inv[a] = lab(u, group.inv(k), v)
    unit = {u: lab(u, group.identity, u) for u in objects}
    for w in objects:
        for k2 in range(group.order):
            for v in objects:
                for k1 in range(group.order):
                    for u in objects:
                        comp[(lab(w, k2, v), lab(v, k1, u))] = lab(
                            w, group.mul(k2, k1), u
                        )
    return FinGroupoid(objects, arrows, src, tgt, unit, inv, comp)


def group_groupoid(group: FinGroup, object_label: str = "pt") -> FinGroupoid:
    return connected_groupoid((object_label,), group)


def unit_groupoid(objects) -> FinGroupoid:
    return disjoint_union(
        *[connected_groupoid((u,), groups.trivial_group()) for u in objects]
    )


def disjoint_union(*parts: FinGroupoid) -> FinGroupoid:
    objects: list[str] = []
    arrows: list[str] = []
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    unit: dict[str, str] = {}
    inv: dict[str, str] = {}
    comp: dict[tuple[str, str], str] = {}
    for g in parts:
        assert not (set(objects) & set(g.objects)), "object labels must be disjoint"
        assert not (set(arrows) & set(g.arrows)), "arrow labels must be disjoint"
        objects.extend(g.objects)
        arrows.extend(g.arrows)
        src.update(g.src)
        tgt.update(g.tgt)
        unit.update(g.unit)
        inv.update(g.inv)
        comp.update(g.comp)
    return FinGroupoid(tuple(objects), tuple(arrows), src, tgt, unit, inv, comp)


# ---------------------------------------------------------------------------
# functors

@dataclass(eq=True)
class GroupoidFunctor:
    dom: FinGroupoid
    cod: FinGroupoid
    f0: dict[str, str]
    f1: dict[str, str]


def validate_functor(phi: GroupoidFunctor) -> str | None:
    g, h = phi.dom, phi.cod
    if set(phi.f0) != set(g.objects) or not set(phi.f0.values()) <= set(h.objects):
        return "object map is not a map objects(dom) -> objects(cod)"
    if set(phi.f1) != set(g.arrows) or not set(phi.f1.values()) <= set(h.arrows):
        return "arrow map is not a map arrows(dom) -> arrows(cod)"
    for x in g.arrows:
        if h.src[phi.f1[x]] != phi.f0[g.src[x]]:
            return f"src not preserved at {x}"
        if h.tgt[phi.f1[x]] != phi.f0[g.tgt[x]]:
            return f"tgt not preserved at {x}"
    for u in g.objects:
        if phi.f1[g.unit[u]] != h.unit[phi.f0[u]]:
            return f"unit not preserved at {u}"
    for (x, y), z in g.comp.items():
        if h.comp[(phi.f1[x], phi.f1[y])] != phi.f1[z]:
            return f"composition not preserved at ({x}, {y})"
    return None


def identity_functor(g: FinGroupoid) -> GroupoidFunctor:
    return GroupoidFunctor(g, g, {u: u for u in g.objects}, {x: x for x in g.arrows})


def compose_functors(outer: GroupoidFunctor, inner: GroupoidFunctor) -> GroupoidFunctor:
    """outer o inner (apply inner first)."""
    assert inner.cod == outer.dom, "functors not composable"
    return GroupoidFunctor(
        inner.dom,
        outer.cod,
        {u: outer.f0[inner.f0[u]] for u in inner.dom.objects},
        {x: outer.f1[inner.f1[x]] for x in inner.dom.arrows},
    )


def functor_is_equivalence(phi: GroupoidFunctor) -> bool:
    """Essentially surjective plus fully faithful, checked directly."""
    g, h = phi.dom, phi.cod
    image = set(phi.f0.values())
    for v in h.objects:
        if not any(h.src[a] in image and h.tgt[a] == v for a in h.arrows):
            return False
    for u in g.objects:
        for u2 in g.objects:
            dom_hom = g.hom(u, u2)
            cod_hom = h.hom(phi.f0[u], phi.f0[u2])
            images = [phi.f1[x] for x in dom_hom]
            if len(set(images)) != len(dom_hom):  # faithful
                return False
            if set(images) != set(cod_hom):  # full
                return False
    return True


# ---------------------------------------------------------------------------
# actions and bibundles

@dataclass(eq=True)
class GroupoidAction:
    groupoid: FinGroupoid
    carrier: tuple[str, ...]
    base: dict[str, str]
    side: str  # "left" | "right"
    act: dict[tuple[str, str], str]  # (arrow, point) -> point


def validate_action(a: GroupoidAction) -> str | None:
    g = a.groupoid
    if a.side not in ("left", "right"):
        return f"unknown side {a.side!r}"
    if len(set(a.carrier)) != len(a.carrier):
        return "duplicate carrier labels"
    if set(a.base) != set(a.carrier) or not set(a.base.values()) <= set(g.objects):
        return "base map is not carrier -> objects"
    anchor = g.src if a.side == "left" else g.tgt
    moved = g.tgt if a.side == "left" else g.src
    expected = {
        (x, m) for x in g.arrows for m in a.carrier if anchor[x] == a.base[m]
    }
    if set(a.act) != expected:
        diff = expected.symmetric_difference(set(a.act))
        kind = "missing" if (expected - set(a.act)) else "spurious"
        return f"action table {kind} at {sorted(diff)[0]}"
    for (x, m), m2 in a.act.items():
        if m2 not in set(a.carrier):
            return f"act({x}, {m}) leaves the carrier"
        if a.base[m2] != moved[x]:
            return f"base map not equivariant at ({x}, {m})"
    for m in a.carrier:
        if a.act[(g.unit[a.base[m]], m)] != m:
            return f"unit acts nontrivially on {m}"
    for (x, m), m2 in a.act.items():
        for y in g.arrows:
            if a.side == "left" and g.src[y] == g.tgt[x]:
                if a.act[(y, m2)] != a.act[(g.comp[(y, x)], m)]:
                    return f"mixed associativity fails at ({y}, {x}, {m})"
            if a.side == "right" and g.tgt[y] == g.src[x]:
                # right actions store act[(h, m)] = m.h, so (m.x).y = m.(x y)
                if a.act[(y, m2)] != a.act[(g.comp[(x, y)], m)]:
                    return f"mixed associativity fails at ({x}, {y}, {m})"
    return None


@dataclass(eq=True)
class Bibundle:
    left_groupoid: FinGroupoid
    right_groupoid: FinGroupoid
    carrier: tuple[str, ...]
    tau: dict[str, str]  # moment map for the left action
    rho: dict[str, str]  # moment map for the right action
    left: dict[tuple[str, str], str]  # (arrow, point) -> point
    right: dict[tuple[str, str], str]  # (point, arrow) -> point


def left_action_view(b: Bibundle) -> GroupoidAction:
    return GroupoidAction(b.left_groupoid, b.carrier, dict(b.tau), "left", dict(b.left))


def right_action_view(b: Bibundle) -> GroupoidAction:
    act = {(h, m): m2 for (m, h), m2 in b.right.items()}
    return GroupoidAction(b.right_groupoid, b.carrier, dict(b.rho), "right", act)


def validate_bibundle(b: Bibundle) -> str | None:
    bad = validate_action(left_action_view(b))
    if bad:
        return f"left action: {bad}"
    bad = validate_action(right_action_view(b))
    if bad:
        return f"right action: {bad}"
    for (m, h), m2 in b.right.items():
        if b.tau[m2] != b.tau[m]:
            return f"tau not right-invariant at ({m}, {h})"
    for (x, m), m2 in b.left.items():
        if b.rho[m2] != b.rho[m]:
            return f"rho not left-invariant at ({x}, {m})"
    for (x, m), xm in b.left.items():
        for h in b.right_groupoid.arrows:
            if b.right_groupoid.tgt[h] == b.rho[m]:
                if b.right[(xm, h)] != b.left[(x, b.right[(m, h)])]:
                    return f"actions do not commute at ({x}, {m}, {h})"
    return None


def is_right_principal(b: Bibundle) -> bool:
    """tau surjective, H acting freely and transitively along tau-fibers."""
    g0 = set(b.left_groupoid.objects)
    if set(b.tau.values()) != g0:
        return False
    h = b.right_groupoid
    for (m, arrow), m2 in b.right.items():
        if m2 == m and not h.is_unit(arrow):
            return False
    fibers: dict[str, list[str]] = {u: [] for u in g0}
    for m in b.carrier:
        fibers[b.tau[m]].append(m)
    for u, fiber in fibers.items():
        m0 = fiber[0]
        reach = {
            b.right[(m0, arrow)]
            for arrow in h.arrows
            if (m0, arrow) in b.right
        }
        if reach != set(fiber):
            return False
    return True


def is_left_principal(b: Bibundle) -> bool:
    """rho surjective, G acting freely and transitively along rho-fibers."""
    h0 = set(b.right_groupoid.objects)
    if set(b.rho.values()) != h0:
        return False
    g = b.left_groupoid
    for (arrow, m), m2 in b.left.items():
        if m2 == m and not g.is_unit(arrow):
            return False
    fibers: dict[str, list[str]] = {v: [] for v in h0}
    for m in b.carrier:
        fibers[b.rho[m]].append(m)
    for v, fiber in fibers.items():
        m0 = fiber[0]
        reach = {
            b.left[(arrow, m0)]
            for arrow in g.arrows
            if (arrow, m0) in b.left
        }
        if reach != set(fiber):
            return False
    return True


def is_biprincipal(b: Bibundle) -> bool:
    return is_right_principal(b) and is_left_principal(b)


def canonical_bibundle(g: FinGroupoid) -> Bibundle:
    """g acting on its own arrows by composition from both sides."""
    left = {
        (x, m): g.comp[(x, m)]
        for x in g.arrows
        for m in g.arrows
        if g.src[x] == g.tgt[m]
    }
    right = {
        (m, h): g.comp[(m, h)]
        for m in g.arrows
        for h in g.arrows
        if g.src[m] == g.tgt[h]
    }
    return Bibundle(
        g,
        g,
        tuple(g.arrows),
        {m: g.tgt[m] for m in g.arrows},
        {m: g.src[m] for m in g.arrows},
        left,
        right,
    )


def functor_to_bibundle(phi: GroupoidFunctor) -> Bibundle:
    """Carrier {(u, h) : tgt h = phi0(u)} with x.(u,h) = (tgt x, phi1(x) h)."""
    g, h = phi.dom, phi.cod
    pts = [(u, a) for u in g.objects for a in h.arrows if h.tgt[a] == phi.f0[u]]
    lab = {p: f"{p[0]}@{p[1]}" for p in pts}
    assert len(set(lab.values())) == len(pts)
    tau = {lab[p]: p[0] for p in pts}
    rho = {lab[p]: h.src[p[1]] for p in pts}
    left = {}
    for x in g.arrows:
        for (u, a) in pts:
            if g.src[x] == u:
                left[(x, lab[(u, a)])] = lab[(g.tgt[x], h.comp[(phi.f1[x], a)])]
    right = {}
    for (u, a) in pts:
        for k in h.arrows:
            if h.src[a] == h.tgt[k]:
                right[(lab[(u, a)], k)] = lab[(u, h.comp[(a, k)])]
    return Bibundle(
        g, h, tuple(lab[p] for p in pts), tau, rho, left, right
    )


def default_section(b: Bibundle) -> dict[str, str]:
    """First carrier point in each tau-fiber, in carrier order."""
    section: dict[str, str] = {}
    for m in b.carrier:
        section.setdefault(b.tau[m], m)
    if set(section) != set(b.left_groupoid.objects):
        raise NotPrincipal("tau is not surjective, no section exists")
    return section


def all_sections(b: Bibundle):
    """Iterate every section of tau (use on small bundles only)."""
    objs = b.left_groupoid.objects
    fibers = [[m for m in b.carrier if b.tau[m] == u] for u in objs]
    if any(not f for f in fibers):
        raise NotPrincipal("tau is not surjective, no section exists")
    for choice in itertools.product(*fibers):
        yield dict(zip(objs, choice))


def bibundle_to_functor(b: Bibundle, section: dict[str, str] | None = None) -> GroupoidFunctor:
    """Reconstruct a functor from a right-principal bundle and a section of tau."""
    if not is_right_principal(b):
        raise NotPrincipal("bundle is not right principal")
    g, h = b.left_groupoid, b.right_groupoid
    sigma = dict(section) if section is not None else default_section(b)
    for u in g.objects:
        if b.tau.get(sigma.get(u, "")) != u:
            raise NotPrincipal(f"section value at {u} is not in the tau-fiber")
    f0 = {u: b.rho[sigma[u]] for u in g.objects}
    f1 = {}
    for x in g.arrows:
        u, u2 = g.src[x], g.tgt[x]
        lhs = b.left[(x, sigma[u])]
        hits = [
            k
            for k in h.arrows
            if (sigma[u2], k) in b.right and b.right[(sigma[u2], k)] == lhs
        ]
        if len(hits) != 1:
            raise NotPrincipal(
                f"right action is not free+transitive along the fiber at {x}"
            )
        f1[x] = hits[0]
    phi = GroupoidFunctor(g, h, f0, f1)
    bad = validate_functor(phi)
    assert bad is None, bad
    return phi


def natural_isomorphism(phi: GroupoidFunctor, psi: GroupoidFunctor):
    """nu with nu_tgt(x) . phi1(x) = psi1(x) . nu_src(x), or None."""
    if phi.dom != psi.dom or phi.cod != psi.cod:
        return None
    g, h = phi.dom, phi.cod
    objs = list(g.objects)
    candidates = [h.hom(phi.f0[u], psi.f0[u]) for u in objs]

    def consistent(nu, upto):
        for x in g.arrows:
            i, j = objs.index(g.src[x]), objs.index(g.tgt[x])
            if i >= upto or j >= upto:
                continue
            if h.comp[(nu[objs[j]], phi.f1[x])] != h.comp[(psi.f1[x], nu[objs[i]])]:
                return False
        return True

    def search(k, nu):
        if k == len(objs):
            return dict(nu)
        for arrow in candidates[k]:
            nu[objs[k]] = arrow
            if consistent(nu, k + 1):
                found = search(k + 1, nu)
                if found is not None:
                    return found
            del nu[objs[k]]
        return None

    return search(0, {})


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def tensor(m: Bibundle, n: Bibundle, check: bool = True) -> Bibundle:
    """Balanced tensor: pairs over the middle base, modulo the middle action.

    Classes [p, q] with (p.h, q) ~ (p, h.q); the left/right actions descend
    to x.[p, q] = [x.p, q] and [p, q].k = [p, q.k].
    """
    if m.right_groupoid != n.left_groupoid:
        raise MismatchedMiddle("bundles do not share the middle groupoid")
    mid = m.right_groupoid
    pairs = [
        (p, q) for p in m.carrier for q in n.carrier if m.rho[p] == n.tau[q]
    ]
    index = {pq: i for i, pq in enumerate(pairs)}
    dsu = _DSU(len(pairs))
    for (p, h), p2 in m.right.items():
        hb = mid.inv[h]
        for q in n.carrier:
            if n.tau[q] == mid.tgt[h]:
                q2 = n.left[(hb, q)]
                dsu.union(index[(p, q)], index[(p2, q2)])
    classes: dict[int, list[tuple[str, str]]] = {}
    for pq, i in index.items():
        r = dsu.find(i)
        classes.setdefault(r, []).append(pq)
    label_of_root = {}
    carrier = []
    tau, rho = {}, {}
    for r in sorted(classes):
        p, q = pairs[r]
        lab = f"{p}&{q}"
        label_of_root[r] = lab
        carrier.append(lab)
        tau[lab] = m.tau[p]
        rho[lab] = n.rho[q]
    def class_label(pq):
        return label_of_root[dsu.find(index[pq])]

    left = {}
    right = {}
    g, k = m.left_groupoid, n.right_groupoid
    for r in sorted(classes):
        p, q = pairs[r]
        lab = label_of_root[r]
        for x in g.arrows:
            if g.src[x] == m.tau[p]:
                left[(x, lab)] = class_label((m.left[(x, p)], q))
        for arrow in k.arrows:
            if k.tgt[arrow] == n.rho[q]:
                right[(lab, arrow)] = class_label((p, n.right[(q, arrow)]))
    out = Bibundle(g, k, tuple(carrier), tau, rho, left, right)
    if check:
        bad = validate_bibundle(out)
        assert bad is None, bad
        if is_right_principal(m) and is_right_principal(n):
            assert is_right_principal(out)
    return out


def _point_signature(b: Bibundle, m: str):
    left_stab = sum(1 for x in b.left_groupoid.arrows if b.left.get((x, m)) == m)
    right_stab = sum(1 for h in b.right_groupoid.arrows if b.right.get((m, h)) == m)
    return (b.tau[m], b.rho[m], left_stab, right_stab)


def _orbits(b: Bibundle) -> list[list[str]]:
    idx = {m: i for i, m in enumerate(b.carrier)}
    dsu = _DSU(len(b.carrier))
    for (x, m), m2 in b.left.items():
        dsu.union(idx[m], idx[m2])
    for (m, h), m2 in b.right.items():
        dsu.union(idx[m], idx[m2])
    cl: dict[int, list[str]] = {}
    for m, i in idx.items():
        cl.setdefault(dsu.find(i), []).append(m)
    return [cl[r] for r in sorted(cl)]


def bibundle_isomorphism(a: Bibundle, b: Bibundle):
    """Equivariant base-preserving bijection a -> b as a dict, or None.

    Backtracks over joint orbits; within an orbit the image of one anchor
    point propagates through the two actions.  Candidates are pruned by
    base-map fibers, orbit sizes, and stabilizer orders.
    """
    if a.left_groupoid != b.left_groupoid or a.right_groupoid != b.right_groupoid:
        return None
    if len(a.carrier) != len(b.carrier):
        return None
    sig_a = {m: _point_signature(a, m) for m in a.carrier}
    sig_b = {m: _point_signature(b, m) for m in b.carrier}
    orbits_a = _orbits(a)
    orbits_b = _orbits(b)

    def orbit_sig(orbit, sig):
        return (len(orbit), tuple(sorted(sig[m] for m in orbit)))

    qa = [orbit_sig(o, sig_a) for o in orbits_a]
    qb = [orbit_sig(o, sig_b) for o in orbits_b]
    if sorted(qa) != sorted(qb):
        return None

    g, h = a.left_groupoid, a.right_groupoid

    def propagate(anchor, image, fwd):
        queue = [anchor]
        fwd[anchor] = image
        while queue:
            m = queue.pop()
            fm = fwd[m]
            for x in g.arrows:
                if (x, m) in a.left:
                    if (x, fm) not in b.left:
                        return False
                    m2, fm2 = a.left[(x, m)], b.left[(x, fm)]
                    if m2 in fwd:
                        if fwd[m2] != fm2:
                            return False
                    else:
                        fwd[m2] = fm2
                        queue.append(m2)
            for k in h.arrows:
                if (m, k) in a.right:
                    if (fm, k) not in b.right:
                        return False
                    m2, fm2 = a.right[(m, k)], b.right[(fm, k)]
                    if m2 in fwd:
                        if fwd[m2] != fm2:
                            return False
                    else:
                        fwd[m2] = fm2
                        queue.append(m2)
        return True

    used = [False] * len(orbits_b)

    def search(i, fwd):
        if i == len(orbits_a):
            return dict(fwd)
        anchor = orbits_a[i][0]
        for j, orbit_b in enumerate(orbits_b):
            if used[j] or qb[j] != qa[i]:
                continue
            for image in orbit_b:
                if sig_b[image] != sig_a[anchor]:
                    continue
                trial = dict(fwd)
                if not propagate(anchor, image, trial):
                    continue
                used[j] = True
                found = search(i + 1, trial)
                if found is not None:
                    return found
                used[j] = False
        return None

    fwd = search(0, {})
    if fwd is None:
        return None
    if len(set(fwd.values())) != len(b.carrier):
        return None
    for m in a.carrier:
        if b.tau[fwd[m]] != a.tau[m] or b.rho[fwd[m]] != a.rho[m]:
            return None
    for (x, m), m2 in a.left.items():
        if b.left.get((x, fwd[m])) != fwd[m2]:
            return None
    for (m, k), m2 in a.right.items():
        if b.right.get((fwd[m], k)) != fwd[m2]:
            return None
    return fwd


def bibundle_isomorphic(a: Bibundle, b: Bibundle) -> bool:
    return bibundle_isomorphism(a, b) is not None


def inverse_bibundle(b: Bibundle) -> Bibundle:
    """Same carrier with the actions interchanged through inverses."""
    if not is_biprincipal(b):
        raise NotBiprincipal("only biprincipal bundles invert")
    g, h = b.left_groupoid, b.right_groupoid
    left = {
        (h.inv[arrow], m): m2 for (m, arrow), m2 in b.right.items()
    }
    right = {
        (m, g.inv[arrow]): m2 for (arrow, m), m2 in b.left.items()
    }
    return Bibundle(h, g, b.carrier, dict(b.rho), dict(b.tau), left, right)


# ---------------------------------------------------------------------------
# skeletons and Morita equivalence

def components(g: FinGroupoid) -> list[list[str]]:
    idx = {u: i for i, u in enumerate(g.objects)}
    dsu = _DSU(len(g.objects))
    for x in g.arrows:
        dsu.union(idx[g.src[x]], idx[g.tgt[x]])
    cl: dict[int, list[str]] = {}
    for u, i in idx.items():
        cl.setdefault(dsu.find(i), []).append(u)
    return [cl[r] for r in sorted(cl)]


def isotropy_group(g: FinGroupoid, u: str) -> tuple[FinGroup, list[str]]:
    """The automorphism group at u as a FinGroup, plus its arrow labels."""
    elems = [x for x in g.arrows if g.src[x] == u and g.tgt[x] == u]
    index = {x: i for i, x in enumerate(elems)}
    table = tuple(
        tuple(index[g.comp[(x, y)]] for y in elems) for x in elems
    )
    grp = FinGroup(tuple(elems), table, index[g.unit[u]])
    return grp, elems


def skeleton_inclusion(g: FinGroupoid) -> GroupoidFunctor:
    """Inclusion of the full subgroupoid on one object per component."""
    reps = [comp[0] for comp in components(g)]
    arrows = [
        x for x in g.arrows if g.src[x] in reps and g.tgt[x] in reps
    ]
    sub = FinGroupoid(
        tuple(reps),
        tuple(arrows),
        {x: g.src[x] for x in arrows},
        {x: g.tgt[x] for x in arrows},
        {u: g.unit[u] for u in reps},
        {x: g.inv[x] for x in arrows},
        {
            (x, y): g.comp[(x, y)]
            for x in arrows
            for y in arrows
            if g.src[x] == g.tgt[y]
        },
    )
    return GroupoidFunctor(
        sub, g, {u: u for u in reps}, {x: x for x in arrows}
    )


def morita_equivalent(g: FinGroupoid, h: FinGroupoid):
    """A biprincipal g-h bibundle, or None.

    Decision: match components bijectively with isomorphic isotropy groups.
    Witness: invert the skeleton-inclusion bundle of g, tensor through the
    induced skeleton isomorphism, then through h's skeleton inclusion.
    """
    if g == h:
        return canonical_bibundle(g)
    comps_g, comps_h = components(g), components(h)
    if len(comps_g) != len(comps_h):
        return None
    iso_g = [isotropy_group(g, comp[0]) for comp in comps_g]
    iso_h = [isotropy_group(h, comp[0]) for comp in comps_h]
    iso_cache: dict[tuple[int, int], tuple | None] = {}

    def iso_between(i, j):
        if (i, j) not in iso_cache:
            iso_cache[(i, j)] = groups.find_isomorphism(iso_g[i][0], iso_h[j][0])
        return iso_cache[(i, j)]

    match: dict[int, int] = {}

    def assign(i, used):
        if i == len(comps_g):
            return True
        for j in range(len(comps_h)):
            if j in used or iso_between(i, j) is None:
                continue
            match[i] = j
            if assign(i + 1, used | {j}):
                return True
            del match[i]
        return False

    if not assign(0, frozenset()):
        return None

    incl_g = skeleton_inclusion(g)
    incl_h = skeleton_inclusion(h)
    f0, f1 = {}, {}
    for i, j in match.items():
        rep_g, rep_h = comps_g[i][0], comps_h[j][0]
        f0[rep_g] = rep_h
        iso = iso_between(i, j)
        kg, labels_g = iso_g[i]
        _, labels_h = iso_h[j]
        for pos, x in enumerate(labels_g):
            f1[x] = labels_h[iso[pos]]
    theta = GroupoidFunctor(incl_g.dom, incl_h.dom, f0, f1)
    assert validate_functor(theta) is None
    witness = tensor(
        tensor(
            inverse_bibundle(functor_to_bibundle(incl_g)),
            functor_to_bibundle(theta),
            check=False,
        ),
        functor_to_bibundle(incl_h),
        check=False,
    )
    assert is_biprincipal(witness)
    return witness


def act_pullback(psi: GroupoidFunctor, action: GroupoidAction) -> GroupoidAction:
    """Pull a left action back along a functor into its groupoid."""
    assert action.side == "left"
    assert psi.cod == action.groupoid
    hgpd = psi.dom
    pts = [
        (u, m)
        for u in hgpd.objects
        for m in action.carrier
        if psi.f0[u] == action.base[m]
    ]
    lab = {p: f"{p[0]}~{p[1]}" for p in pts}
    act = {}
    for (u, m) in pts:
        for arrow in hgpd.arrows:
            if hgpd.src[arrow] == u:
                act[(arrow, lab[(u, m)])] = lab[
                    (hgpd.tgt[arrow], action.act[(psi.f1[arrow], m)])
                ]
    return GroupoidAction(
        hgpd,
        tuple(lab[p] for p in pts),
        {lab[p]: p[0] for p in pts},
        "left",
        act,
    )


# ---------------------------------------------------------------------------
# exhaustive enumeration (functors, catalog, Morita oracle)

def _spanning_data(g: FinGroupoid, comp: list[str]):
    """Arrows rep -> u for every u in the component, found by BFS."""
    rep = comp[0]
    arr = {rep: g.unit[rep]}
    frontier = [rep]
    while frontier:
        u = frontier.pop(0)
        for x in g.arrows:
            if g.src[x] == u and g.tgt[x] not in arr:
                v = g.tgt[x]
                arr[v] = g.comp[(x, arr[u])]
                frontier.append(v)
            if g.tgt[x] == u and g.src[x] not in arr:
                v = g.src[x]
                arr[v] = g.comp[(g.inv[x], arr[u])]
                frontier.append(v)
    assert set(arr) == set(comp)
    return rep, arr


def all_functors(g: FinGroupoid, h: FinGroupoid):
    """Iterate every functor g -> h.

    A functor is determined freely by, per component of g: the image of the
    base object, a homomorphism of isotropy groups, and an arbitrary arrow
    out of the image for every spanning-tree arrow.
    """
    comps = components(g)
    span = [_spanning_data(g, comp) for comp in comps]
    isotropy = [isotropy_group(g, rep) for rep, _ in span]
    iso_h = {v: isotropy_group(h, v) for v in h.objects}
    hom_cache: dict[tuple[int, str], list[tuple[int, ...]]] = {}

    def homs_into(ci, v):
        key = (ci, v)
        if key not in hom_cache:
            hom_cache[key] = groups.all_homomorphisms(isotropy[ci][0], iso_h[v][0])
        return hom_cache[key]

    arrows_from = {v: [x for x in h.arrows if h.src[x] == v] for v in h.objects}

    per_comp_choices = []
    for ci, comp in enumerate(comps):
        rep, arr = span[ci]
        others = [u for u in comp if u != rep]
        choices = []
        for v in h.objects:
            for hom in homs_into(ci, v):
                for tree in itertools.product(*[arrows_from[v] for _ in others]):
                    choices.append((v, hom, dict(zip(others, tree))))
        per_comp_choices.append(choices)

    for combo in itertools.product(*per_comp_choices):
        f0: dict[str, str] = {}
        f1: dict[str, str] = {}
        for ci, (v, hom, tree) in enumerate(combo):
            rep, arr = span[ci]
            _, klabels = isotropy[ci]
            _, klabels_h = iso_h[v]
            b_of = {rep: h.unit[v]}
            for u, b in tree.items():
                b_of[u] = b
            for u in comps[ci]:
                f0[u] = h.tgt[b_of[u]]
            kindex = {x: i for i, x in enumerate(klabels)}
            for x in g.arrows:
                u, u2 = g.src[x], g.tgt[x]
                if u not in b_of:
                    continue
                k_arrow = g.comp[(g.comp[(g.inv[arr[u2]], x)], arr[u])]
                image_k = klabels_h[hom[kindex[k_arrow]]]
                f1[x] = h.comp[(b_of[u2], h.comp[(image_k, h.inv[b_of[u]])])]
        yield GroupoidFunctor(g, h, f0, f1)


def groupoid_catalog(max_objects: int, max_arrows: int) -> list[FinGroupoid]:
    """One groupoid per isomorphism class within the object/arrow budget.

    Pieces are (object count, isotropy group); a groupoid is a multiset of
    pieces, since every connected finite groupoid is pair x group.
    """
    group_pool = groups.groups_catalog(min(12, max_arrows))
    pieces = [
        (p, grp)
        for p in range(1, max_objects + 1)
        for grp in group_pool
        if p * p * grp.order <= max_arrows
    ]
    out = []
    for count in range(1, max_objects + 1):
        for combo in itertools.combinations_with_replacement(range(len(pieces)), count):
            objs = sum(pieces[i][0] for i in combo)
            arrs = sum(pieces[i][0] ** 2 * pieces[i][1].order for i in combo)
            if objs > max_objects or arrs > max_arrows:
                continue
            parts = []
            for slot, i in enumerate(combo):
                p, grp = pieces[i]
                prefix = chr(ord("a") + slot)
                parts.append(
                    connected_groupoid([f"{prefix}{t}" for t in range(p)], grp)
                )
            out.append(disjoint_union(*parts))
    return out


def exhaustive_biprincipal_search(
    g: FinGroupoid, h: FinGroupoid, max_carrier: int = 12
):
    """Search every biprincipal g-h bundle with carrier <= max_carrier.

    Right-principal bundles are exactly functor bundles of the same carrier
    size, so the search enumerates all functors g -> h, keeps the small
    bundles, and tests biprincipality by the raw definition.
    """
    for phi in all_functors(g, h):
        bundle = functor_to_bibundle(phi)
        if len(bundle.carrier) <= max_carrier and is_biprincipal(bundle):
            return bundle
    return None
