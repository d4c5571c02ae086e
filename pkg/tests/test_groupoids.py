import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from moritakit import corpus, groups
from moritakit.errors import MismatchedMiddle, NotBiprincipal, NotPrincipal
from moritakit.groupoids import (
    Bibundle,
    act_pullback,
    all_functors,
    all_sections,
    bibundle_isomorphic,
    bibundle_to_functor,
    canonical_bibundle,
    components,
    compose_functors,
    connected_groupoid,
    disjoint_union,
    exhaustive_biprincipal_search,
    functor_is_equivalence,
    functor_to_bibundle,
    group_groupoid,
    groupoid_catalog,
    identity_functor,
    inverse_bibundle,
    is_biprincipal,
    is_left_principal,
    is_right_principal,
    isotropy_group,
    morita_equivalent,
    natural_isomorphism,
    pair_groupoid,
    tensor,
    validate_bibundle,
    validate_functor,
    validate_groupoid,
)


PT = group_groupoid(groups.trivial_group())


def _bundle(seed, max_objects=3, max_arrows=12):
    return corpus.random_right_principal_bibundle(
        random.Random(seed), max_objects, max_arrows
    )


def test_constructors_validate():
    assert validate_groupoid(pair_groupoid(["1", "2", "3"])) is None
    assert validate_groupoid(connected_groupoid(["u", "v"], groups.cyclic(3))) is None
    assert validate_groupoid(group_groupoid(groups.dicyclic(2))) is None
    two = disjoint_union(
        pair_groupoid(["a1", "a2"]), group_groupoid(groups.cyclic(2), "b")
    )
    assert validate_groupoid(two) is None
    assert components(two) == [["a1", "a2"], ["b"]]


def test_validate_catches_broken_composition():
    g = pair_groupoid(["1", "2"])
    bad = dict(g.comp)
    bad[("2<1", "1<2")] = "2<1"  # should be the unit at 2
    g2 = type(g)(g.objects, g.arrows, g.src, g.tgt, g.unit, g.inv, bad)
    msg = validate_groupoid(g2)
    assert msg is not None


def test_validate_catches_broken_bibundle():
    b = canonical_bibundle(group_groupoid(groups.cyclic(2), "x"))
    rho = dict(b.rho)
    rho[b.carrier[0]] = "nonsense"
    broken = Bibundle(
        b.left_groupoid, b.right_groupoid, b.carrier, b.tau, rho, b.left, b.right
    )
    assert validate_bibundle(broken) is not None


def test_isotropy_group():
    g = connected_groupoid(["u", "v"], groups.symmetric(3))
    iso, labels = isotropy_group(g, "u")
    assert iso.order == 6
    assert groups.validate_group(iso) is None
    assert groups.find_isomorphism(iso, groups.symmetric(3))
    assert all(g.src[x] == g.tgt[x] == "u" for x in labels)


def test_canonical_bibundle_biprincipal():
    for g in (PT, pair_groupoid(["1", "2"]), connected_groupoid(["u", "v"], groups.cyclic(2))):
        b = canonical_bibundle(g)
        assert validate_bibundle(b) is None
        assert is_biprincipal(b)


def test_functor_bundles_are_right_principal():
    g = pair_groupoid(["1", "2"])
    h = connected_groupoid(["u", "v"], groups.cyclic(2))
    for phi in all_functors(g, h):
        assert validate_functor(phi) is None
        b = functor_to_bibundle(phi)
        assert validate_bibundle(b) is None
        assert is_right_principal(b)


def test_functor_counts():
    assert len(list(all_functors(PT, pair_groupoid(["1", "2"])))) == 2
    c2 = group_groupoid(groups.cyclic(2), "x")
    assert len(list(all_functors(c2, c2))) == 2
    assert len(list(all_functors(pair_groupoid(["1", "2"]), PT))) == 1
    # base object x trivial hom x gauge arrow out of it: 2 * 1 * 4
    h = connected_groupoid(["u", "v"], groups.cyclic(2))
    assert len(list(all_functors(pair_groupoid(["1", "2"]), h))) == 8


def test_tensor_requires_matching_middle():
    m = functor_to_bibundle(next(all_functors(PT, pair_groupoid(["1", "2"]))))
    with pytest.raises(MismatchedMiddle):
        tensor(m, m)


def test_unit_laws_small():
    for seed in range(6):
        m = _bundle(seed)
        lhs = tensor(canonical_bibundle(m.left_groupoid), m)
        rhs = tensor(m, canonical_bibundle(m.right_groupoid))
        assert bibundle_isomorphic(lhs, m)
        assert bibundle_isomorphic(rhs, m)


def test_associativity_small():
    for seed in range(4):
        m, n, p = corpus.random_bibundle_chain(random.Random(seed), 3, 3, 12)
        left = tensor(tensor(m, n), p)
        right = tensor(m, tensor(n, p))
        assert bibundle_isomorphic(left, right)


def test_section_roundtrip_all_sections():
    g = pair_groupoid(["1", "2"])
    h = connected_groupoid(["u", "v"], groups.cyclic(2))
    phi = next(all_functors(g, h))
    b = functor_to_bibundle(phi)
    functors = []
    for sec in all_sections(b):
        psi = bibundle_to_functor(b, sec)
        assert bibundle_isomorphic(functor_to_bibundle(psi), b)
        functors.append(psi)
    # all reconstructions are naturally isomorphic to each other
    for psi in functors[1:]:
        assert natural_isomorphism(functors[0], psi) is not None


def test_bibundle_to_functor_rejects_nonprincipal():
    # two points over one object with trivial right action: not free-transitive
    g = PT
    b = Bibundle(
        g,
        g,
        ("m0", "m1"),
        {"m0": "pt", "m1": "pt"},
        {"m0": "pt", "m1": "pt"},
        {(g.unit["pt"], "m0"): "m0", (g.unit["pt"], "m1"): "m1"},
        {("m0", g.unit["pt"]): "m0", ("m1", g.unit["pt"]): "m1"},
    )
    assert validate_bibundle(b) is None
    assert not is_right_principal(b)
    with pytest.raises(NotPrincipal):
        bibundle_to_functor(b)


def test_composition_dictionary_small():
    rng = random.Random(7)
    for _ in range(10):
        phi, psi = corpus.random_functor_pair(rng, 3, 10)
        composed = functor_to_bibundle(compose_functors(psi, phi))
        tensored = tensor(
            functor_to_bibundle(phi), functor_to_bibundle(psi)
        )
        assert bibundle_isomorphic(composed, tensored)


def test_inverse_bibundle_laws():
    g = group_groupoid(groups.cyclic(2), "x")
    h = connected_groupoid(["u", "v"], groups.cyclic(2))
    eqs = [f for f in all_functors(g, h) if functor_is_equivalence(f)]
    assert len(eqs) == 2  # base object choice; only the identity hom is bijective
    m = functor_to_bibundle(eqs[0])
    minv = inverse_bibundle(m)
    assert is_biprincipal(minv)
    assert bibundle_isomorphic(tensor(minv, m), canonical_bibundle(h))
    assert bibundle_isomorphic(tensor(m, minv), canonical_bibundle(g))


def test_inverse_requires_biprincipal():
    m = functor_to_bibundle(next(all_functors(group_groupoid(groups.cyclic(2), "x"), PT)))
    assert not is_biprincipal(m)
    with pytest.raises(NotBiprincipal):
        inverse_bibundle(m)


def test_equivalence_dictionary_sample():
    cat = groupoid_catalog(2, 6)
    rng = random.Random(3)
    pairs = [(rng.choice(cat), rng.choice(cat)) for _ in range(8)]
    for g, h in pairs:
        for phi in itertools.islice(all_functors(g, h), 40):
            assert is_biprincipal(functor_to_bibundle(phi)) == functor_is_equivalence(phi)


def test_identity_functor_is_equivalence():
    for g in groupoid_catalog(2, 6):
        assert functor_is_equivalence(identity_functor(g))


def test_morita_basic_pairs():
    pair3 = pair_groupoid(["1", "2", "3"])
    w = morita_equivalent(pair3, PT)
    assert w is not None and is_biprincipal(w)
    assert w.left_groupoid == pair3 and w.right_groupoid == PT
    assert morita_equivalent(
        group_groupoid(groups.cyclic(2)), group_groupoid(groups.cyclic(3))
    ) is None
    # same isotropy, different object counts: still equivalent
    c3_two = connected_groupoid(["u", "v"], groups.cyclic(3))
    assert morita_equivalent(c3_two, group_groupoid(groups.cyclic(3))) is not None
    # component counts must match
    two_pts = disjoint_union(group_groupoid(groups.trivial_group(), "p"),
                             group_groupoid(groups.trivial_group(), "q"))
    assert morita_equivalent(two_pts, PT) is None


def test_morita_matches_exhaustive_search_sample():
    cat = groupoid_catalog(2, 6)
    rng = random.Random(11)
    for _ in range(12):
        g, h = rng.choice(cat), rng.choice(cat)
        decided = morita_equivalent(g, h)
        found = exhaustive_biprincipal_search(g, h, max_carrier=12)
        assert (decided is not None) == (found is not None), (g.objects, h.objects)
        if decided is not None:
            assert is_biprincipal(decided)


def test_act_pullback():
    g = pair_groupoid(["1", "2"])
    h = group_groupoid(groups.cyclic(2), "x")
    phi = next(all_functors(h, g))
    from moritakit.groupoids import left_action_view

    action = left_action_view(canonical_bibundle(g))
    pulled = act_pullback(phi, action)
    from moritakit.groupoids import validate_action

    assert validate_action(pulled) is None
    # carrier pairs objects of h with arrows of g into phi0
    assert len(pulled.carrier) == 2


def test_catalog_count_small():
    # hand count: 14 one-piece groups of order <= 8, 2 two-object pieces,
    # 23 unordered pairs of groups with order sum <= 8
    assert len(groupoid_catalog(2, 8)) == 39


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_random_bundle_right_principal(seed):
    b = _bundle(seed)
    assert validate_bibundle(b) is None
    assert is_right_principal(b)


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_functor_roundtrip_default_section(seed):
    b = _bundle(seed)
    phi = bibundle_to_functor(b)
    assert bibundle_isomorphic(functor_to_bibundle(phi), b)


@given(st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_left_principality_matches_equivalence(seed):
    rng = random.Random(seed)
    g = corpus.random_groupoid(rng, 2, 8, "a")
    h = corpus.random_groupoid(rng, 2, 8, "b")
    phi = corpus.random_functor(rng, g, h)
    b = functor_to_bibundle(phi)
    assert is_biprincipal(b) == functor_is_equivalence(phi)
    assert is_left_principal(b) == functor_is_equivalence(phi)
