"""Seeded random generators used by the law suite and the tests.

Every generator takes a ``random.Random`` so corpora are reproducible from a
single seed.  Randomly generated bundles get shuffled carrier labels so
downstream code never sees the construction order; random algebras and
bimodules get their bases twisted by random invertible maps for the same
reason.
"""

from __future__ import annotations

import random

import numpy as np

from . import algebras, bimodules, correspondences, groups, groupoids, numkit, reduction
from .groupoids import Bibundle, FinGroupoid, GroupoidFunctor


def random_groupoid(
    rng: random.Random,
    max_objects: int,
    max_arrows: int,
    prefix: str = "a",
) -> FinGroupoid:
    """Random multiset of (pair x group) pieces within the budget."""
    pool = groups.groups_catalog(min(12, max_arrows))
    pieces: list[tuple[int, groups.FinGroup]] = []
    objs = arrs = 0
    while True:
        fits = [
            (p, grp)
            for p in range(1, max_objects - objs + 1)
            for grp in pool
            if arrs + p * p * grp.order <= max_arrows
        ]
        if not fits:
            break
        if pieces and rng.random() < 0.4:
            break
        p, grp = rng.choice(fits)
        pieces.append((p, grp))
        objs += p
        arrs += p * p * grp.order
    parts = [
        groupoids.connected_groupoid(
            [f"{prefix}{t}.{i}" for i in range(p)], grp
        )
        for t, (p, grp) in enumerate(pieces)
    ]
    return groupoids.disjoint_union(*parts)


def random_functor(
    rng: random.Random, g: FinGroupoid, h: FinGroupoid
) -> GroupoidFunctor:
    """Uniform-ish functor g -> h via base point, isotropy hom, and gauge."""
    comps = groupoids.components(g)
    f0: dict[str, str] = {}
    f1: dict[str, str] = {}
    for comp in comps:
        rep, arr = groupoids._spanning_data(g, comp)
        kgrp, klabels = groupoids.isotropy_group(g, rep)
        v = rng.choice(h.objects)
        kh, klabels_h = groupoids.isotropy_group(h, v)
        hom = rng.choice(groups.all_homomorphisms(kgrp, kh))
        arrows_from_v = [x for x in h.arrows if h.src[x] == v]
        b_of = {rep: h.unit[v]}
        for u in comp:
            if u != rep:
                b_of[u] = rng.choice(arrows_from_v)
        kindex = {x: i for i, x in enumerate(klabels)}
        for u in comp:
            f0[u] = h.tgt[b_of[u]]
        for x in g.arrows:
            u, u2 = g.src[x], g.tgt[x]
            if u not in b_of:
                continue
            k_arrow = g.comp[(g.comp[(g.inv[arr[u2]], x)], arr[u])]
            image_k = klabels_h[hom[kindex[k_arrow]]]
            f1[x] = h.comp[(b_of[u2], h.comp[(image_k, h.inv[b_of[u]])])]
    phi = GroupoidFunctor(g, h, f0, f1)
    assert groupoids.validate_functor(phi) is None
    return phi


def relabel_bibundle(rng: random.Random, b: Bibundle) -> Bibundle:
    order = list(range(len(b.carrier)))
    rng.shuffle(order)
    new = {m: f"m{order[i]}" for i, m in enumerate(b.carrier)}
    carrier = tuple(sorted(new.values(), key=lambda s: int(s[1:])))
    return Bibundle(
        b.left_groupoid,
        b.right_groupoid,
        carrier,
        {new[m]: u for m, u in b.tau.items()},
        {new[m]: u for m, u in b.rho.items()},
        {(x, new[m]): new[m2] for (x, m), m2 in b.left.items()},
        {(new[m], h): new[m2] for (m, h), m2 in b.right.items()},
    )


def random_right_principal_bibundle(
    rng: random.Random, max_objects: int = 4, max_arrows: int = 20
) -> Bibundle:
    g = random_groupoid(rng, max_objects, max_arrows, prefix="a")
    h = random_groupoid(rng, max_objects, max_arrows, prefix="b")
    return relabel_bibundle(rng, groupoids.functor_to_bibundle(random_functor(rng, g, h)))


def random_bibundle_chain(
    rng: random.Random,
    length: int,
    max_objects: int = 4,
    max_arrows: int = 20,
) -> list[Bibundle]:
    """Composable right-principal bundles sharing middle groupoids."""
    gs = [
        random_groupoid(rng, max_objects, max_arrows, prefix=chr(ord("a") + i))
        for i in range(length + 1)
    ]
    return [
        relabel_bibundle(
            rng, groupoids.functor_to_bibundle(random_functor(rng, gs[i], gs[i + 1]))
        )
        for i in range(length)
    ]


def random_functor_pair(
    rng: random.Random, max_objects: int = 3, max_arrows: int = 12
) -> tuple[GroupoidFunctor, GroupoidFunctor]:
    """Composable functors (phi: g -> h, psi: h -> k)."""
    g = random_groupoid(rng, max_objects, max_arrows, prefix="a")
    h = random_groupoid(rng, max_objects, max_arrows, prefix="b")
    k = random_groupoid(rng, max_objects, max_arrows, prefix="c")
    return random_functor(rng, g, h), random_functor(rng, h, k)


# ---------------------------------------------------------------------------
# algebras and bimodules

def _np_rng(rng: random.Random) -> np.random.Generator:
    return np.random.default_rng(rng.getrandbits(64))


def random_block_sizes(
    rng: random.Random, max_blocks: int = 3, max_size: int = 3, max_dim: int = 18
) -> tuple[int, ...]:
    while True:
        k = rng.randint(1, max_blocks)
        sizes = tuple(rng.randint(1, max_size) for _ in range(k))
        if sum(n * n for n in sizes) <= max_dim:
            return sizes


def random_twist(rng: random.Random, d: int) -> np.ndarray:
    """Random invertible matrix: unitary times a mild diagonal stretch."""
    npr = _np_rng(rng)
    u = numkit.orthonormal_rows(
        npr.normal(size=(d, d)) + 1j * npr.normal(size=(d, d))
    ).T
    return u @ np.diag(np.exp(npr.uniform(-0.3, 0.3, size=d)))


def random_algebra(
    rng: random.Random,
    max_blocks: int = 3,
    max_size: int = 3,
    max_dim: int = 18,
    sizes: tuple[int, ...] | None = None,
) -> algebras.FdStarAlgebra:
    if sizes is None:
        sizes = random_block_sizes(rng, max_blocks, max_size, max_dim)
    a = algebras.block_algebra(sizes)
    return algebras.basis_change(a, random_twist(rng, a.dim))


def random_multiplicities(
    rng: random.Random,
    sizes_a: tuple[int, ...],
    max_blocks: int = 3,
    max_size: int = 3,
    max_dim: int = 18,
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Nonnegative integer matrix m and B-sizes with sum_i m[j, i] n_i = p_j."""
    for _ in range(10000):
        kb = rng.randint(1, max_blocks)
        m = np.array(
            [[rng.randint(0, 2) for _ in sizes_a] for _ in range(kb)], dtype=int
        )
        sizes_b = tuple(int(sum(m[j, i] * n for i, n in enumerate(sizes_a))) for j in range(kb))
        if all(1 <= p <= max_size for p in sizes_b) and sum(
            p * p for p in sizes_b
        ) <= max_dim:
            return m, sizes_b
    raise RuntimeError("no multiplicity pattern fits the budget")


def random_star_hom(
    rng: random.Random, max_blocks: int = 3, max_size: int = 3, max_dim: int = 18
):
    """(a, b, m, hom) with hom a unital *-homomorphism of multiplicity m."""
    while True:
        sizes_a = random_block_sizes(rng, max_blocks, max_size, max_dim)
        try:
            m, sizes_b = random_multiplicities(rng, sizes_a, max_blocks, max_size, max_dim)
        except RuntimeError:
            continue
        a = random_algebra(rng, sizes=sizes_a)
        b = random_algebra(rng, sizes=sizes_b)
        return a, b, m, algebras.block_hom(a, b, m)


def random_bimodule(
    rng: random.Random, max_blocks: int = 3, max_size: int = 3, max_dim: int = 18
) -> bimodules.HilbertBimodule:
    a, b, _, hom = random_star_hom(rng, max_blocks, max_size, max_dim)
    e = bimodules.hom_to_bimodule(a, b, hom)
    return bimodules.bimodule_basis_change(e, random_twist(rng, e.dim))


def random_bimodule_pair(
    rng: random.Random, max_size: int = 3, max_dim: int = 18
):
    """Composable bimodules (e over (a, b), f over (b, c))."""
    while True:
        try:
            sizes_a = random_block_sizes(rng, 2, 2, max_dim)
            m1, sizes_b = random_multiplicities(rng, sizes_a, 2, max_size, max_dim)
            m2, sizes_c = random_multiplicities(rng, sizes_b, 2, max_size, max_dim)
        except RuntimeError:
            continue
        a = random_algebra(rng, sizes=sizes_a)
        b = random_algebra(rng, sizes=sizes_b)
        c = random_algebra(rng, sizes=sizes_c)
        h1 = algebras.block_hom(a, b, m1)
        h2 = algebras.block_hom(b, c, m2)
        e = bimodules.bimodule_basis_change(
            bimodules.hom_to_bimodule(a, b, h1), random_twist(rng, b.dim)
        )
        f = bimodules.bimodule_basis_change(
            bimodules.hom_to_bimodule(b, c, h2), random_twist(rng, c.dim)
        )
        return e, f, m1, m2


def random_equivalence_bimodule(
    rng: random.Random, max_blocks: int = 3, max_size: int = 3, max_dim: int = 18
) -> bimodules.HilbertBimodule:
    sizes_a = random_block_sizes(rng, max_blocks, max_size, max_dim)
    sizes_b = tuple(
        rng.randint(1, max_size) for _ in sizes_a
    )
    a = random_algebra(rng, sizes=sizes_a)
    b = random_algebra(rng, sizes=sizes_b)
    e = bimodules.morita_equivalent_algebras(a, b)
    assert e is not None
    return bimodules.bimodule_basis_change(e, random_twist(rng, e.dim))


# ---------------------------------------------------------------------------
# correspondences


def _sizes_with_count(rng: random.Random, count: int, max_size: int, max_dim: int):
    while True:
        s = tuple(rng.randint(1, max_size) for _ in range(count))
        if sum(x * x for x in s) <= max_dim:
            return s


def _corr_multiplicities(
    rng: random.Random, sizes_m, sizes_n, max_dim: int, max_terms: int = 5
) -> list[list[int]]:
    c = [[0 for _ in sizes_n] for _ in sizes_m]
    dim = 0
    for _ in range(rng.randint(1, max_terms)):
        i = rng.randrange(len(sizes_m))
        j = rng.randrange(len(sizes_n))
        if dim + sizes_m[i] * sizes_n[j] <= max_dim:
            c[i][j] += 1
            dim += sizes_m[i] * sizes_n[j]
    if dim == 0:
        i = min(range(len(sizes_m)), key=lambda t: sizes_m[t])
        j = min(range(len(sizes_n)), key=lambda t: sizes_n[t])
        c[i][j] = 1
    return c


def _block_correspondence(a, b, c) -> correspondences.Correspondence:
    """Correspondence between block algebras with joint multiplicities c."""
    sm, sn = a.blocks.sizes, b.blocks.sizes
    offm = [0]
    for s in sm:
        offm.append(offm[-1] + s)
    offn = [0]
    for s in sn:
        offn.append(offn[-1] + s)
    slots = [(i, j) for i in range(len(sm)) for j in range(len(sn)) if c[i][j]]
    dim = sum(sm[i] * sn[j] * c[i][j] for i, j in slots)
    assert dim > 0
    piL = np.zeros((a.dim, dim, dim), dtype=complex)
    piR = np.zeros((b.dim, dim, dim), dtype=complex)
    off = 0
    for i, j in slots:
        span = sm[i] * sn[j] * c[i][j]
        eye_r = np.eye(sn[j] * c[i][j], dtype=complex)
        eye_l = np.eye(sm[i], dtype=complex)
        eye_c = np.eye(c[i][j], dtype=complex)
        for idx in range(a.dim):
            blk = a.blocks.images[idx, offm[i] : offm[i + 1], offm[i] : offm[i + 1]]
            piL[idx, off : off + span, off : off + span] = np.kron(blk, eye_r)
        for idx in range(b.dim):
            blk = b.blocks.images[idx, offn[j] : offn[j + 1], offn[j] : offn[j + 1]]
            piR[idx, off : off + span, off : off + span] = np.kron(
                eye_l, np.kron(blk.T, eye_c)
            )
        off += span
    return correspondences.Correspondence(a, b, dim, piL, piR)


def _twist_correspondence(
    rng: random.Random, h0, twist_a, alg_a, twist_b, alg_b
) -> correspondences.Correspondence:
    piL = np.einsum("it,ipq->tpq", twist_a, h0.piL)
    piR = np.einsum("jt,jpq->tpq", twist_b, h0.piR)
    nr = _np_rng(rng)
    g = nr.standard_normal((h0.dim, h0.dim)) + 1j * nr.standard_normal(
        (h0.dim, h0.dim)
    )
    u = numkit.polar_unitary(g)
    h = correspondences.Correspondence(
        alg_a, alg_b, h0.dim, u @ piL @ u.conj().T, u @ piR @ u.conj().T
    )
    assert correspondences.validate_correspondence(h) is None
    return h


def random_correspondence_chain(
    rng: random.Random,
    length: int = 2,
    max_size: int = 3,
    max_dim: int = 12,
    middle_max: int = 9,
) -> list[correspondences.Correspondence]:
    """Composable correspondences; all algebras have dimension <= middle_max."""
    base = [
        algebras.block_algebra(
            random_block_sizes(rng, 2, max_size, middle_max)
        )
        for _ in range(length + 1)
    ]
    twists = [random_twist(rng, a.dim) for a in base]
    algs = [algebras.basis_change(a, t) for a, t in zip(base, twists)]
    chain = []
    for k in range(length):
        c = _corr_multiplicities(
            rng, base[k].blocks.sizes, base[k + 1].blocks.sizes, max_dim, max_terms=2
        )
        h0 = _block_correspondence(base[k], base[k + 1], c)
        chain.append(
            _twist_correspondence(rng, h0, twists[k], algs[k], twists[k + 1], algs[k + 1])
        )
    return chain


def random_correspondence(
    rng: random.Random,
    max_size: int = 3,
    max_dim: int = 12,
    middle_max: int = 9,
    equivalence: bool = False,
) -> correspondences.Correspondence:
    if equivalence:
        count = rng.randint(1, 2)
        sizes_m = _sizes_with_count(rng, count, 2, middle_max)
        sizes_n = _sizes_with_count(rng, count, 2, middle_max)
        perm = list(range(count))
        rng.shuffle(perm)
        c = [[1 if j == perm[i] else 0 for j in range(count)] for i in range(count)]
    else:
        sizes_m = random_block_sizes(rng, 2, max_size, middle_max)
        sizes_n = random_block_sizes(rng, 2, max_size, middle_max)
        c = _corr_multiplicities(rng, sizes_m, sizes_n, max_dim)
    base_m = algebras.block_algebra(sizes_m)
    base_n = algebras.block_algebra(sizes_n)
    tm, tn = random_twist(rng, base_m.dim), random_twist(rng, base_n.dim)
    alg_m = algebras.basis_change(base_m, tm)
    alg_n = algebras.basis_change(base_n, tn)
    h0 = _block_correspondence(base_m, base_n, c)
    return _twist_correspondence(rng, h0, tm, alg_m, tn, alg_n)


# ---------------------------------------------------------------------------
# group representations

def random_rep(
    rng: random.Random, h: groups.FinGroup, max_dim: int = 8
) -> reduction.UnitaryRep:
    """Random multiplier-free representation of ``h``.

    Characters and regular blocks in random order, conjugated by a random
    unitary so the block structure is not visible in the matrices.
    """
    chars = reduction.one_dim_reps(h)
    blocks: list[np.ndarray] = []
    total = 0
    while total == 0 or (total < max_dim and rng.random() < 0.7):
        if h.order + total <= max_dim and rng.random() < 0.35:
            blocks.append(reduction.regular_rep(h).matrices)
            total += h.order
        else:
            blocks.append(chars[rng.randrange(len(chars))].matrices)
            total += 1
    n = h.order
    mats = np.zeros((n, total, total), dtype=complex)
    for i in range(n):
        off = 0
        for blk in blocks:
            d = blk.shape[1]
            mats[i, off : off + d, off : off + d] = blk[i]
            off += d
    nr = _np_rng(rng)
    g = nr.standard_normal((total, total)) + 1j * nr.standard_normal((total, total))
    u = numkit.polar_unitary(g)
    conj = np.einsum("ab,ibc,dc->iad", u, mats, np.conj(u))
    out = reduction.UnitaryRep(h, reduction.trivial_multiplier(h), conj)
    reduction.check_rep(out)
    return out
