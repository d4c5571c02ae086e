"""Finite groups as explicit Cayley tables, with hom and iso search.

Elements carry string labels; the table stores indices.  Everything is
exhaustively checkable at the scales used here (orders <= 24).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd


@dataclass(eq=True)
class FinGroup:
    elements: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]  # table[i][j] = index of elements[i]*elements[j]
    identity: int
    name: str = field(default="", compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        row = self.table[i]
        return row.index(self.identity)

    def index(self, label: str) -> int:
        return self.elements.index(label)

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k


def validate_group(g: FinGroup) -> str | None:
    """First violated group axiom as a string, or None."""
    n = len(g.elements)
    if len(set(g.elements)) != n:
        return "duplicate element labels"
    if len(g.table) != n or any(len(row) != n for row in g.table):
        return "table is not n x n"
    for row in g.table:
        for v in row:
            if not 0 <= v < n:
                return f"table entry {v} out of range"
    if not 0 <= g.identity < n:
        return "identity index out of range"
    e = g.identity
    for i in range(n):
        if g.table[e][i] != i or g.table[i][e] != i:
            return f"identity law fails at {g.elements[i]}"
    for i in range(n):
        if g.identity not in g.table[i]:
            return f"{g.elements[i]} has no inverse"
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if g.table[g.table[i][j]][k] != g.table[i][g.table[j][k]]:
                    return (
                        "associativity fails at "
                        f"({g.elements[i]}, {g.elements[j]}, {g.elements[k]})"
                    )
    return None


def _from_products(labels, mul, identity_label, name) -> FinGroup:
    index = {lab: i for i, lab in enumerate(labels)}
    table = tuple(
        tuple(index[mul(a, b)] for b in labels) for a in labels
    )
    g = FinGroup(tuple(labels), table, index[identity_label], name)
    assert validate_group(g) is None, name
    return g


def trivial_group() -> FinGroup:
    return _from_products(["e"], lambda a, b: "e", "e", "C1")


def cyclic(n: int) -> FinGroup:
    labels = [f"g{k}" for k in range(n)]
    return _from_products(
        labels, lambda a, b: f"g{(int(a[1:]) + int(b[1:])) % n}", "g0", f"C{n}"
    )


def direct_product(a: FinGroup, b: FinGroup) -> FinGroup:
    """Componentwise product; built by index so nested labels stay unambiguous."""
    na, nb = a.order, b.order
    labels = tuple(f"{x}.{y}" for x in a.elements for y in b.elements)
    table = tuple(
        tuple(
            a.table[i1][i2] * nb + b.table[j1][j2]
            for i2 in range(na)
            for j2 in range(nb)
        )
        for i1 in range(na)
        for j1 in range(nb)
    )
    name = f"{a.name}x{b.name}" if a.name and b.name else ""
    g = FinGroup(labels, table, a.identity * nb + b.identity, name)
    assert validate_group(g) is None, name
    return g


def symmetric(n: int) -> FinGroup:
    """Symmetric group on {0..n-1}; labels spell out the permutation images."""
    assert 1 <= n <= 4
    perms = sorted(itertools.permutations(range(n)))
    labels = ["".join(map(str, p)) for p in perms]

    def mul(a, b):  # (a*b)(i) = a(b(i))
        pa = tuple(int(c) for c in a)
        pb = tuple(int(c) for c in b)
        return "".join(str(pa[pb[i]]) for i in range(n))

    return _from_products(labels, mul, "".join(map(str, range(n))), f"S{n}")


def alternating4() -> FinGroup:
    s4 = symmetric(4)
    labels = [lab for lab in s4.elements if perm_parity(lab) == 1]

    def mul(a, b):
        return s4.elements[s4.mul(s4.index(a), s4.index(b))]

    return _from_products(labels, mul, "0123", "A4")


def perm_parity(label: str) -> int:
    """+1 for even permutations, -1 for odd, reading a symmetric() label."""
    p = [int(c) for c in label]
    inversions = sum(
        1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j]
    )
    return 1 if inversions % 2 == 0 else -1


def dihedral(n: int) -> FinGroup:
    """Symmetries of the n-gon: r^i s^j with s r = r^-1 s."""
    labels = [f"r{i}s{j}" for j in range(2) for i in range(n)]

    def parse(lab):
        i, j = lab[1:].split("s")
        return int(i), int(j)

    def mul(a, b):
        i1, j1 = parse(a)
        i2, j2 = parse(b)
        i = (i1 + i2) % n if j1 == 0 else (i1 - i2) % n
        return f"r{i}s{(j1 + j2) % 2}"

    return _from_products(labels, mul, "r0s0", f"D{n}")


def dicyclic(n: int) -> FinGroup:
    """Order 4n: a^i b^j with a^2n = 1, b^2 = a^n, b a = a^-1 b (Dic2 = Q8)."""
    labels = [f"a{i}b{j}" for j in range(2) for i in range(2 * n)]

    def parse(lab):
        i, j = lab[1:].split("b")
        return int(i), int(j)

    def mul(x, y):
        i, j = parse(x)
        k, l = parse(y)
        if j == 0:
            return f"a{(i + k) % (2 * n)}b{l}"
        if l == 0:
            return f"a{(i - k) % (2 * n)}b1"
        return f"a{(i - k + n) % (2 * n)}b0"

    return _from_products(labels, mul, "a0b0", f"Dic{n}")


def klein_four() -> FinGroup:
    g = direct_product(cyclic(2), cyclic(2))
    g.name = "C2xC2"
    return g


def exponent(g: FinGroup) -> int:
    out = 1
    for i in range(g.order):
        o = g.element_order(i)
        out = out * o // gcd(out, o)
    return out


def is_abelian(g: FinGroup) -> bool:
    return all(
        g.table[i][j] == g.table[j][i] for i in range(g.order) for j in range(g.order)
    )


def subgroup_closure(g: FinGroup, gens) -> frozenset[int]:
    seen = {g.identity}
    frontier = [g.identity]
    gens = list(gens)
    while frontier:
        x = frontier.pop()
        for h in gens:
            y = g.mul(x, h)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return frozenset(seen)


def generating_sequence(g: FinGroup) -> list[int]:
    """Greedy small generating sequence (canonical for a fixed element order)."""
    gens: list[int] = []
    closure = {g.identity}
    for i in range(g.order):
        if len(closure) == g.order:
            break
        if i in closure:
            continue
        gens.append(i)
        closure = set(subgroup_closure(g, gens))
    return gens


def _word_table(g: FinGroup, gens: list[int]) -> list[list[int]]:
    """Each element as a word (list of generator positions), found by BFS."""
    words: dict[int, list[int]] = {g.identity: []}
    frontier = [g.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for pos, h in enumerate(gens):
                y = g.mul(x, h)
                if y not in words:
                    words[y] = words[x] + [pos]
                    nxt.append(y)
        frontier = nxt
    assert len(words) == g.order, "generators do not generate"
    return [words[i] for i in range(g.order)]


def all_homomorphisms(a: FinGroup, b: FinGroup) -> list[tuple[int, ...]]:
    """Every homomorphism a -> b, each as the tuple of element images."""
    gens = generating_sequence(a)
    if not gens:
        return [tuple([b.identity] * a.order)]
    words = _word_table(a, gens)
    out = []
    orders_a = [a.element_order(i) for i in range(a.order)]
    candidates = [
        [j for j in range(b.order) if orders_a[gen] % b.element_order(j) == 0]
        for gen in gens
    ]
    for images in itertools.product(*candidates):
        phi = []
        for word in words:
            x = b.identity
            for pos in word:
                x = b.mul(x, images[pos])
            phi.append(x)
        ok = all(
            phi[a.table[i][j]] == b.table[phi[i]][phi[j]]
            for i in range(a.order)
            for j in range(a.order)
        )
        if ok:
            out.append(tuple(phi))
    return out


def find_isomorphism(a: FinGroup, b: FinGroup):
    """An isomorphism a -> b as a tuple of images, or None."""
    if a.order != b.order:
        return None
    orders_a = sorted(a.element_order(i) for i in range(a.order))
    orders_b = sorted(b.element_order(i) for i in range(b.order))
    if orders_a != orders_b:
        return None
    gens = generating_sequence(a)
    if not gens:
        return tuple([b.identity])
    words = _word_table(a, gens)
    cand = [
        [j for j in range(b.order) if b.element_order(j) == a.element_order(gen)]
        for gen in gens
    ]
    for images in itertools.product(*cand):
        phi = []
        for word in words:
            x = b.identity
            for pos in word:
                x = b.mul(x, images[pos])
            phi.append(x)
        if len(set(phi)) != a.order:
            continue
        ok = all(
            phi[a.table[i][j]] == b.table[phi[i]][phi[j]]
            for i in range(a.order)
            for j in range(a.order)
        )
        if ok:
            return tuple(phi)
    return None


def groups_catalog(max_order: int) -> list[FinGroup]:
    """The standard isomorphism list of groups of order <= max_order (<= 12)."""
    assert max_order <= 12, "catalog stops at order 12"
    cat = [
        trivial_group(),
        cyclic(2),
        cyclic(3),
        cyclic(4),
        klein_four(),
        cyclic(5),
        cyclic(6),
        symmetric(3),
        cyclic(7),
        cyclic(8),
        direct_product(cyclic(4), cyclic(2)),
        direct_product(direct_product(cyclic(2), cyclic(2)), cyclic(2)),
        dihedral(4),
        dicyclic(2),
        cyclic(9),
        direct_product(cyclic(3), cyclic(3)),
        cyclic(10),
        dihedral(5),
        cyclic(11),
        cyclic(12),
        direct_product(cyclic(6), cyclic(2)),
        dihedral(6),
        alternating4(),
        dicyclic(3),
    ]
    return [g for g in cat if g.order <= max_order]
