import dataclasses
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moritakit import algebras, bimodules, corpus, numkit
from moritakit import correspondences as vna
from moritakit.errors import MismatchedMiddle, NotTracial


def z3_convolution_algebra():
    mult = np.zeros((3, 3, 3), dtype=complex)
    star = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            mult[i, j, (i + j) % 3] = 1.0
        star[(-i) % 3, i] = 1.0
    state = np.array([1.0, 0.0, 0.0], dtype=complex)
    a = algebras.FdStarAlgebra(("g0", "g1", "g2"), mult, star, state)
    assert algebras.validate_algebra(a) is None
    return a


class TestStandardForm:
    def test_full_matrix_algebra(self):
        a = algebras.block_algebra((2,))
        sf = vna.standard_form(a)
        # normalized trace: the unit's image already has norm one
        assert np.linalg.norm(sf.unit_vector() - sf.omega) < 1e-12
        assert vna.validate_correspondence(sf.corr) is None

    def test_scalars(self):
        sf = vna.standard_form(algebras.scalar_algebra())
        assert sf.corr.dim == 1
        assert abs(sf.j_mat[0, 0] - 1.0) < 1e-12

    def test_cyclic_group_algebra(self):
        # state f -> f(e) makes the delta basis orthonormal
        sf = vna.standard_form(z3_convolution_algebra())
        assert numkit.max_abs(sf.w - np.eye(3)) < 1e-9
        assert numkit.max_abs(sf.omega - np.array([1, 0, 0])) < 1e-9
        # J sends delta_g to delta_{g^{-1}}
        perm = np.zeros((3, 3))
        perm[0, 0] = perm[1, 2] = perm[2, 1] = 1.0
        assert numkit.max_abs(sf.j_mat - perm) < 1e-9

    def test_rejects_nontracial_state(self):
        a = algebras.block_algebra((2,))
        state = np.array([1 / 3, 0.0, 0.0, 2 / 3], dtype=complex)
        lopsided = dataclasses.replace(a, state=state)
        assert algebras.validate_algebra(lopsided) is None
        with pytest.raises(NotTracial):
            vna.standard_form(lopsided)

    def test_is_equivalence_correspondence(self):
        sf = vna.standard_form(corpus.random_algebra(random.Random(3), sizes=(2, 1)))
        assert vna.is_equivalence_correspondence(sf.corr)


class TestRMap:
    def test_r_omega_is_identity(self):
        for sizes in [(2,), (2, 1)]:
            sf = vna.standard_form(algebras.block_algebra(sizes))
            r = vna.r_map(sf.omega, sf.corr, sf)
            assert numkit.max_abs(r - np.eye(sf.alg.dim)) < 1e-9

    def test_zero_vector(self):
        sf = vna.standard_form(algebras.block_algebra((2,)))
        assert numkit.max_abs(vna.r_map(np.zeros(4), sf.corr, sf)) == 0.0

    def test_scalar_middle(self):
        # over N = C the map is psi as a column
        m = algebras.block_algebra((2,))
        sfc = vna.standard_form(algebras.scalar_algebra())
        eye = np.eye(2, dtype=complex)
        h = vna.Correspondence(
            m, algebras.scalar_algebra(), 2,
            np.stack([im for im in m.blocks.images]), eye[None, :, :],
        )
        assert vna.validate_correspondence(h) is None
        psi = np.array([2.0, 1j])
        r = vna.r_map(psi, h, sfc)
        assert numkit.max_abs(r - psi[:, None]) < 1e-12


class TestValidate:
    def test_rejects_noncommuting_actions(self):
        m = algebras.block_algebra((2,))
        h = vna.Correspondence(
            m, m, 2, np.stack(list(m.blocks.images)), np.stack(list(m.blocks.images))
        )
        assert vna.validate_correspondence(h) == (
            "right representation is not an antirepresentation"
        )

    def test_rejects_wrong_star(self):
        m = algebras.block_algebra((2,))
        s = np.diag([2.0, 0.5])
        sinv = np.linalg.inv(s)
        piL = np.stack([s @ im @ sinv for im in m.blocks.images])
        piR = np.stack([s @ im.T @ sinv for im in m.blocks.images])
        h = vna.Correspondence(m, m, 2, piL, piR)
        assert vna.validate_correspondence(h) == (
            "left representation does not preserve the star"
        )

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10_000))
    def test_random_correspondences_validate(self, seed):
        h = corpus.random_correspondence(random.Random(seed))
        assert vna.validate_correspondence(h) is None


class TestRelativeTensor:
    def test_mismatched_middle(self):
        rng = random.Random(0)
        h = corpus.random_correspondence(rng)
        k = corpus.random_correspondence(rng)
        while bimodules.same_algebra(h.alg_n, k.alg_m):
            k = corpus.random_correspondence(rng)
        with pytest.raises(MismatchedMiddle):
            vna.relative_tensor(h, k)

    def test_column_times_row_over_m2(self):
        # C^2 as a C-M_2 correspondence times C^2 as an M_2-C correspondence
        m2 = algebras.block_algebra((2,))
        c = algebras.scalar_algebra()
        eye = np.eye(2, dtype=complex)
        row = vna.Correspondence(
            c, m2, 2, eye[None, :, :], np.stack([im.T for im in m2.blocks.images])
        )
        col = vna.Correspondence(
            m2, c, 2, np.stack(list(m2.blocks.images)), eye[None, :, :]
        )
        assert vna.validate_correspondence(row) is None
        assert vna.validate_correspondence(col) is None
        out = vna.relative_tensor(row, col)
        assert out.dim == 1

    def test_scalar_middle_multiplies_dimensions(self):
        rng = random.Random(5)
        m = corpus.random_algebra(rng, sizes=(2,))
        p = corpus.random_algebra(rng, sizes=(1, 1))
        c = algebras.scalar_algebra()
        h = vna.bimodule_to_corr(
            bimodules.transport_rep(
                bimodules.canonical_bimodule(m), np.stack(list(m.blocks.images))
            )
        )
        assert (h.alg_m.dim, h.alg_n.dim, h.dim) == (m.dim, 1, 2)
        sfp = vna.standard_form(p)
        k = vna.Correspondence(
            c, p, p.dim, np.eye(p.dim, dtype=complex)[None, :, :], sfp.piR
        )
        assert vna.validate_correspondence(k) is None
        out = vna.relative_tensor(h, k)
        assert out.dim == h.dim * k.dim

    def test_unit_laws(self):
        for seed in range(6):
            rng = random.Random(700 + seed)
            h = corpus.random_correspondence(rng)
            sfn = vna.standard_form(h.alg_n)
            sfm = vna.standard_form(h.alg_m)
            right = vna.relative_tensor(h, sfn.corr, sfn)
            assert vna.corr_unitary_equivalent(right, h) is not None
            left = vna.relative_tensor(sfm.corr, h, sfm)
            assert vna.corr_unitary_equivalent(left, h) is not None

    def test_associativity(self):
        for seed in range(4):
            rng = random.Random(800 + seed)
            h1, h2, h3 = corpus.random_correspondence_chain(
                rng, length=3, max_size=2, max_dim=8, middle_max=8
            )
            lhs = vna.relative_tensor(vna.relative_tensor(h1, h2), h3)
            rhs = vna.relative_tensor(h1, vna.relative_tensor(h2, h3))
            assert vna.corr_unitary_equivalent(lhs, rhs) is not None

    def test_standard_form_idempotent(self):
        sf = vna.standard_form(corpus.random_algebra(random.Random(9), sizes=(2, 1)))
        out = vna.relative_tensor(sf.corr, sf.corr, sf)
        assert vna.corr_unitary_equivalent(out, sf.corr) is not None

    def test_insensitive_to_standard_form_rotation(self):
        rng = random.Random(11)
        while True:
            h, k = corpus.random_correspondence_chain(rng, length=2)
            if h.dim and k.dim:
                break
        sf = vna.standard_form(h.alg_n)
        nr = np.random.default_rng(4)
        u = numkit.polar_unitary(
            nr.standard_normal((sf.alg.dim,) * 2) + 1j * nr.standard_normal((sf.alg.dim,) * 2)
        )
        rotated = vna.StandardForm(
            sf.alg, u @ sf.w, sf.winv @ u.conj().T, u @ sf.omega,
            u @ sf.j_mat @ u.T, u @ sf.piL @ u.conj().T, u @ sf.piR @ u.conj().T,
        )
        a = vna.relative_tensor(h, k, sf)
        b = vna.relative_tensor(h, k, rotated)
        assert a.dim == b.dim
        assert numkit.max_abs(a.piL - b.piL) < 1e-8
        assert numkit.max_abs(a.piR - b.piR) < 1e-8


class TestEquivalence:
    def test_full_action_with_scalar_commutant(self):
        m2 = algebras.block_algebra((2,))
        c = algebras.scalar_algebra()
        eye = np.eye(2, dtype=complex)
        h = vna.Correspondence(
            m2, c, 2, np.stack(list(m2.blocks.images)), eye[None, :, :]
        )
        assert vna.is_equivalence_correspondence(h)

    def test_scalars_on_both_sides_of_c2(self):
        c = algebras.scalar_algebra()
        eye = np.eye(2, dtype=complex)
        h = vna.Correspondence(c, c, 2, eye[None, :, :], eye[None, :, :])
        assert not vna.is_equivalence_correspondence(h)

    def test_conjugate_of_standard_form(self):
        sf = vna.standard_form(corpus.random_algebra(random.Random(21), sizes=(2, 1)))
        hbar = vna.conjugate_correspondence(sf.corr)
        assert vna.validate_correspondence(hbar) is None
        assert vna.corr_unitary_equivalent(hbar, sf.corr) is not None

    def test_double_conjugate(self):
        h = corpus.random_correspondence(random.Random(22))
        hbarbar = vna.conjugate_correspondence(vna.conjugate_correspondence(h))
        assert vna.corr_unitary_equivalent(hbarbar, h) is not None

    def test_conjugate_preserves_equivalence(self):
        h = corpus.random_correspondence(random.Random(23), equivalence=True)
        assert vna.is_equivalence_correspondence(h)
        assert vna.is_equivalence_correspondence(vna.conjugate_correspondence(h))

    def test_equivalence_iff_tensor_inverses(self):
        hits = {True: 0, False: 0}
        for seed in range(14):
            rng = random.Random(900 + seed)
            h = corpus.random_correspondence(rng, equivalence=seed % 2 == 0)
            if min(h.alg_m.dim, h.alg_n.dim, h.dim) == 0:
                continue
            flag = vna.is_equivalence_correspondence(h)
            hbar = vna.conjugate_correspondence(h)
            sfm = vna.standard_form(h.alg_m)
            sfn = vna.standard_form(h.alg_n)
            left = vna.corr_unitary_equivalent(
                vna.relative_tensor(h, hbar), sfm.corr
            )
            right = vna.corr_unitary_equivalent(
                vna.relative_tensor(hbar, h), sfn.corr
            )
            assert flag == (left is not None and right is not None), seed
            hits[flag] += 1
        assert hits[True] and hits[False]


class TestBridges:
    def test_standard_form_gives_canonical_bimodule(self):
        a = corpus.random_algebra(random.Random(31), sizes=(2, 1))
        sf = vna.standard_form(a)
        e = vna.corr_to_bimodule(sf.corr, sf=sf)
        u = bimodules.bimodule_unitary_equivalent(e, bimodules.canonical_bimodule(a))
        assert u is not None

    def test_plain_hilbert_space_carrier(self):
        # N = C: the carrier is the Hilbert space itself
        m = algebras.block_algebra((2,))
        eye = np.eye(2, dtype=complex)
        h = vna.Correspondence(
            m, algebras.scalar_algebra(), 2,
            np.stack(list(m.blocks.images)), eye[None, :, :],
        )
        e = vna.corr_to_bimodule(h)
        assert e.dim == h.dim
        back = vna.bimodule_to_corr(e)
        assert back.dim == h.dim
        assert vna.corr_unitary_equivalent(back, h) is not None

    def test_canonical_bimodule_gives_standard_form(self):
        a = corpus.random_algebra(random.Random(32), sizes=(2, 1))
        h = vna.bimodule_to_corr(bimodules.canonical_bimodule(a))
        sf = vna.standard_form(a)
        assert vna.corr_unitary_equivalent(h, sf.corr) is not None

    def test_roundtrip_from_correspondence(self):
        for seed in range(4):
            h = corpus.random_correspondence(random.Random(1000 + seed))
            if h.dim == 0:
                continue
            back = vna.bimodule_to_corr(vna.corr_to_bimodule(h))
            assert vna.corr_unitary_equivalent(back, h) is not None, seed

    def test_roundtrip_from_bimodule(self):
        for seed in range(4):
            e = corpus.random_bimodule(
                random.Random(1100 + seed), max_blocks=2, max_size=2, max_dim=8
            )
            back = vna.corr_to_bimodule(vna.bimodule_to_corr(e))
            assert bimodules.bimodule_unitary_equivalent(back, e) is not None, seed

    def test_bridge_maps_relative_tensor_to_interior_tensor(self):
        for seed in range(3):
            rng = random.Random(1200 + seed)
            chain = corpus.random_correspondence_chain(
                rng, length=2, max_size=2, max_dim=8, middle_max=8
            )
            h, k = chain
            if h.dim == 0 or k.dim == 0:
                continue
            lhs = vna.corr_to_bimodule(vna.relative_tensor(h, k))
            rhs = bimodules.interior_tensor(
                vna.corr_to_bimodule(h), vna.corr_to_bimodule(k)
            )
            assert bimodules.bimodule_unitary_equivalent(lhs, rhs) is not None, seed


class TestHomToCorr:
    def test_identity_hom_is_standard_form(self):
        a = corpus.random_algebra(random.Random(41), sizes=(2,))
        sf = vna.standard_form(a)
        h = vna.hom_to_corr(a, a, np.eye(a.dim), sf=sf)
        assert numkit.max_abs(h.piL - sf.piL) < 1e-12
        assert numkit.max_abs(h.piR - sf.piR) < 1e-12

    def test_unital_embedding_of_scalars(self):
        b = algebras.block_algebra((2,))
        hom = b.unit()[:, None]
        h = vna.hom_to_corr(algebras.scalar_algebra(), b, hom)
        assert h.dim == 4
        assert numkit.max_abs(h.piL[0] - np.eye(4)) < 1e-12

    def test_functorial_under_composition(self):
        for seed in range(3):
            rng = random.Random(1300 + seed)
            while True:
                try:
                    sizes_a = corpus.random_block_sizes(rng, 2, 2, 8)
                    m1, sizes_b = corpus.random_multiplicities(rng, sizes_a, 2, 2, 8)
                    m2, sizes_c = corpus.random_multiplicities(rng, sizes_b, 2, 2, 8)
                    break
                except RuntimeError:
                    continue
            a = corpus.random_algebra(rng, sizes=sizes_a)
            b = corpus.random_algebra(rng, sizes=sizes_b)
            c = corpus.random_algebra(rng, sizes=sizes_c)
            rho = algebras.block_hom(a, b, m1)
            sigma = algebras.block_hom(b, c, m2)
            lhs = vna.hom_to_corr(a, c, sigma @ rho)
            rhs = vna.relative_tensor(
                vna.hom_to_corr(a, b, rho), vna.hom_to_corr(b, c, sigma)
            )
            assert vna.corr_unitary_equivalent(lhs, rhs) is not None, seed


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_random_equivalences_are_equivalences(seed):
    h = corpus.random_correspondence(random.Random(seed), equivalence=True)
    assert vna.is_equivalence_correspondence(h)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_corr_to_bimodule_carrier_dimension(seed):
    # operator carrier dimension equals the Hilbert space dimension
    h = corpus.random_correspondence(random.Random(seed))
    e = vna.corr_to_bimodule(h)
    assert e.dim == h.dim
