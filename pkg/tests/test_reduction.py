import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moritakit import corpus, numkit
from moritakit.algebras import center_basis, is_tracial, validate_algebra
from moritakit.bimodules import is_full, validate_bimodule
from moritakit.errors import (
    BadCocycle,
    GroupMismatch,
    MultiplierMismatch,
)
from moritakit.groups import cyclic, klein_four, symmetric, trivial_group
from moritakit.reduction import (
    Multiplier,
    UnitaryRep,
    bimodule_from_rep,
    check_rep,
    commutant_algebra,
    conjugate_multiplier,
    cstar_reduce,
    invariant_subspace_oracle,
    multipliers_cancel,
    one_dim_reps,
    pauli_rep,
    pi_r,
    regular_rep,
    rep_to_algrep,
    sign_rep,
    trivial_multiplier,
    trivial_rep,
    twisted_group_algebra,
    unit_law_unitary,
    validate_multiplier,
    validate_rep,
    wstar_reduce,
    z2z2_multiplier,
)

FIVE_GROUPS = [cyclic(2), cyclic(3), cyclic(4), klein_four(), symmetric(3)]


def character_rank(u: UnitaryRep, chi: UnitaryRep) -> int:
    """Independent count of joint invariants from the trace pairing."""
    n = u.group.order
    total = sum(
        np.trace(u.matrices[i]) * np.trace(chi.matrices[i]) for i in range(n)
    )
    val = total / n
    assert abs(val.imag) < 1e-9 and abs(val.real - round(val.real)) < 1e-9
    return round(val.real)


# ---------------------------------------------------------------------------
# multipliers

class TestMultiplier:
    def test_trivial_validates(self):
        for g in FIVE_GROUPS:
            assert validate_multiplier(trivial_multiplier(g)) is None

    def test_z2z2_cocycle_identities_exact(self):
        m = z2z2_multiplier()
        g = m.group
        # every identity holds in exact rational arithmetic, no rounding
        for x in range(4):
            for y in range(4):
                for z in range(4):
                    lhs = m.phases[x][y] + m.phases[g.mul(x, y)][z]
                    rhs = m.phases[y][z] + m.phases[x][g.mul(y, z)]
                    assert (lhs - rhs) % 1 == Fraction(0)
        e = g.identity
        assert all(m.phases[e][i] == 0 and m.phases[i][e] == 0 for i in range(4))
        assert any(q != 0 for row in m.phases for q in row)

    def test_bad_cocycle_detected(self):
        m = z2z2_multiplier()
        rows = [list(r) for r in m.phases]
        rows[3][3] += Fraction(1, 3)
        bad = Multiplier(m.group, tuple(tuple(r) for r in rows))
        assert validate_multiplier(bad) is not None
        with pytest.raises(BadCocycle):
            twisted_group_algebra(m.group, bad)

    def test_normalization_enforced(self):
        g = cyclic(2)
        half = Fraction(1, 2)
        bad = Multiplier(g, ((half, half), (half, half)))
        assert "normalized" in validate_multiplier(bad)

    def test_floats_rejected(self):
        g = cyclic(2)
        bad = Multiplier(g, ((0.0, 0.0), (0.0, 0.0)))
        assert "fractions" in validate_multiplier(bad)

    def test_conjugate_cancels(self):
        m = z2z2_multiplier()
        assert validate_multiplier(conjugate_multiplier(m)) is None
        assert multipliers_cancel(m, conjugate_multiplier(m))
        # half-turns are their own conjugates
        assert conjugate_multiplier(m).phases == m.phases
        assert not multipliers_cancel(m, trivial_multiplier(m.group))


# ---------------------------------------------------------------------------
# twisted group algebras

class TestTwistedGroupAlgebra:
    def test_convolution_structure(self):
        g = cyclic(3)
        a = twisted_group_algebra(g)
        # delta_i delta_j = delta_{i+j}, delta_i^* = delta_{-i}
        eye = np.eye(3)
        for i in range(3):
            for j in range(3):
                prod = a.multiply(eye[i], eye[j])
                assert numkit.max_abs(prod - eye[(i + j) % 3]) < 1e-12
            assert numkit.max_abs(a.star_coords(eye[i]) - eye[(-i) % 3]) < 1e-12

    def test_delta_basis_orthonormal(self):
        for g in FIVE_GROUPS:
            a = twisted_group_algebra(g)
            assert numkit.max_abs(a.gram() - np.eye(g.order)) < 1e-12
            assert is_tracial(a)
        tw = twisted_group_algebra(klein_four(), z2z2_multiplier())
        assert numkit.max_abs(tw.gram() - np.eye(4)) < 1e-12
        assert is_tracial(tw)

    def test_projective_klein_four_is_one_full_block(self):
        tw = twisted_group_algebra(klein_four(), z2z2_multiplier())
        assert validate_algebra(tw) is None

        # independent route: the commutant of the left-multiplication
        # operators meets their span exactly in the center
        eye = np.eye(4, dtype=complex)
        lmults = [tw.left_mult_matrix(eye[:, i]) for i in range(4)]
        comm = numkit.commutant(lmults)
        assert len(comm) == 4
        both = [m.reshape(-1) for m in comm] + [m.reshape(-1) for m in lmults]
        union_rank = numkit.rank(np.stack(both))
        center_dim = len(comm) + 4 - union_rank
        assert center_dim == 1

        # the library's center computation agrees; a 4-dim algebra with a
        # 1-dim center is the 2x2 matrix algebra
        assert center_basis(tw).shape[1] == 1

    def test_untwisted_klein_four_is_commutative(self):
        plain = twisted_group_algebra(klein_four())
        assert center_basis(plain).shape[1] == 4

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatch):
            twisted_group_algebra(cyclic(3), trivial_multiplier(cyclic(2)))


# ---------------------------------------------------------------------------
# representations

class TestReps:
    def test_regular_c2_is_permutations(self):
        u = regular_rep(cyclic(2))
        assert numkit.max_abs(u.matrices[0] - np.eye(2)) == 0
        assert numkit.max_abs(u.matrices[1] - np.array([[0, 1], [1, 0]])) == 0

    def test_regular_rep_validates(self):
        for g in FIVE_GROUPS:
            assert validate_rep(regular_rep(g)) is None
        assert validate_rep(regular_rep(klein_four(), z2z2_multiplier())) is None

    def test_one_dim_counts(self):
        # characters = abelianization size
        for g, want in [(cyclic(2), 2), (cyclic(3), 3), (cyclic(4), 4),
                        (klein_four(), 4), (symmetric(3), 2)]:
            chars = one_dim_reps(g)
            assert len(chars) == want
            for c in chars:
                assert validate_rep(c) is None

    def test_sign_rep(self):
        s3 = symmetric(3)
        u = sign_rep(s3)
        assert validate_rep(u) is None
        vals = sorted(complex(m[0, 0]).real for m in u.matrices)
        assert vals == [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]

    def test_pauli_rep(self):
        p = pauli_rep()
        assert validate_rep(p) is None
        assert p.mult.phases == z2z2_multiplier().phases
        # X and Z anticommute: U(1,0) U(0,1) = - U(0,1) U(1,0)
        x, z = p.matrices[2], p.matrices[1]
        assert numkit.max_abs(x @ z + z @ x) < 1e-12

    def test_validate_rejects_wrong_multiplier(self):
        p = pauli_rep()
        wrong = UnitaryRep(p.group, trivial_multiplier(p.group), p.matrices)
        assert "multiplier" in validate_rep(wrong)

    def test_validate_rejects_nonunitary(self):
        g = cyclic(2)
        mats = np.stack([np.eye(2, dtype=complex), 2 * np.eye(2, dtype=complex)])
        assert "unitary" in validate_rep(UnitaryRep(g, trivial_multiplier(g), mats))

    def test_rep_to_algrep_regular_c2(self):
        u = regular_rep(cyclic(2))
        pi = rep_to_algrep(u)
        assert numkit.max_abs(pi - u.matrices) == 0

    def test_algrep_residuals(self):
        for u in [regular_rep(symmetric(3)), pauli_rep()]:
            alg = twisted_group_algebra(u.group, u.mult)
            pi = rep_to_algrep(u, alg)
            n = u.group.order
            for i in range(n):
                for j in range(n):
                    want = np.einsum("k,kab->ab", alg.mult[i, j], pi)
                    assert numkit.max_abs(pi[i] @ pi[j] - want) <= 1e-10

    def test_rep_to_algrep_multiplier_mismatch(self):
        p = pauli_rep()
        plain = twisted_group_algebra(klein_four())
        with pytest.raises(MultiplierMismatch):
            rep_to_algrep(p, plain)

    def test_pi_r_antirep_residuals(self):
        for u in [regular_rep(cyclic(4)), pauli_rep()]:
            right = pi_r(u)
            conj_alg = twisted_group_algebra(
                u.group, conjugate_multiplier(u.mult)
            )
            n = u.group.order
            for i in range(n):
                for j in range(n):
                    want = np.einsum("k,kab->ab", conj_alg.mult[i, j], right)
                    assert numkit.max_abs(right[j] @ right[i] - want) <= 1e-10

    def test_pi_r_commutes_with_commutant(self):
        rng = random.Random(5)
        u = corpus.random_rep(rng, symmetric(3), max_dim=6)
        _, images = commutant_algebra(u.matrices)
        right = pi_r(u)
        for m in images:
            for r in right:
                assert numkit.max_abs(m @ r - r @ m) <= 1e-10


# ---------------------------------------------------------------------------
# bimodules from representations

class TestBimoduleFromRep:
    def test_trivial_rep_gives_full_matrix_commutant(self):
        u = trivial_rep(cyclic(2), 3)
        e = bimodule_from_rep(u)
        assert e.alg_a.dim == 9
        assert e.dim == 3
        assert validate_bimodule(e) is None

    def test_regular_rep_commutant_has_group_dimension(self):
        u = regular_rep(cyclic(3))
        e = bimodule_from_rep(u)
        assert e.alg_a.dim == 3
        assert is_full(e)

    def test_trivial_one_dim_not_full(self):
        e = bimodule_from_rep(trivial_rep(cyclic(2), 1))
        assert not is_full(e)

    def test_projective_carrier(self):
        e = bimodule_from_rep(pauli_rep())
        assert validate_bimodule(e) is None
        assert e.alg_a.dim == 1  # irreducible: commutant is the scalars
        assert is_full(e)

    @settings(max_examples=8, deadline=None)
    @given(st.integers(0, 10_000))
    def test_random_rep_bimodule_validates(self, seed):
        rng = random.Random(seed)
        g = FIVE_GROUPS[rng.randrange(len(FIVE_GROUPS))]
        u = corpus.random_rep(rng, g, max_dim=6)
        e = bimodule_from_rep(u)
        assert validate_bimodule(e) is None
        assert numkit.max_abs(e.ip[:, :, u.group.identity] - np.eye(u.dim)) < 1e-12


# ---------------------------------------------------------------------------
# the averaging oracle

class TestOracle:
    def test_regular_c2_against_trivial(self):
        r, basis, restricted = invariant_subspace_oracle(
            regular_rep(cyclic(2)), trivial_rep(cyclic(2))
        )
        assert r == 1
        want = np.array([1.0, 1.0]) / np.sqrt(2)
        overlap = abs(np.vdot(basis[:, 0], want))
        assert abs(overlap - 1.0) < 1e-12
        assert restricted.shape == (2, 1, 1)

    def test_regular_always_gives_one_invariant(self):
        for g in [cyclic(3), symmetric(3)]:
            r, _, _ = invariant_subspace_oracle(regular_rep(g), trivial_rep(g))
            assert r == 1
            assert character_rank(regular_rep(g), trivial_rep(g)) == 1

    def test_trivial_keeps_everything(self):
        u = trivial_rep(cyclic(2), 3)
        r, basis, restricted = invariant_subspace_oracle(u, trivial_rep(cyclic(2)))
        assert r == 3
        assert numkit.span_dim(list(restricted)) == 9

    def test_sign_against_trivial_is_empty(self):
        s3 = symmetric(3)
        r, basis, _ = invariant_subspace_oracle(sign_rep(s3), trivial_rep(s3))
        assert r == 0
        assert basis.shape == (1, 0)

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatch):
            invariant_subspace_oracle(regular_rep(cyclic(2)), trivial_rep(cyclic(3)))

    def test_multiplier_mismatch(self):
        with pytest.raises(MultiplierMismatch):
            invariant_subspace_oracle(pauli_rep(), trivial_rep(klein_four()))


# ---------------------------------------------------------------------------
# reduction, bimodule route

class TestCstarReduce:
    def test_regular_c2_against_trivial(self):
        rep = cstar_reduce(regular_rep(cyclic(2)), trivial_rep(cyclic(2)))
        assert rep.dim == 1 and rep.oracle_dim == 1
        assert rep.residual <= 1e-8

    def test_s3_regular_against_sign(self):
        s3 = symmetric(3)
        rep = cstar_reduce(regular_rep(s3), sign_rep(s3))
        assert rep.dim == 1 and rep.oracle_dim == 1
        assert rep.residual <= 1e-8

    def test_trivial_rep_keeps_full_matrix_algebra(self):
        for d in [1, 2, 3]:
            rep = cstar_reduce(trivial_rep(cyclic(2), d), trivial_rep(cyclic(2)))
            assert rep.dim == d == rep.oracle_dim
            assert rep.induced.shape == (d * d, d, d)
            assert numkit.span_dim(list(rep.induced)) == d * d

    def test_reduction_matches_character_count(self):
        rng = random.Random(11)
        for g in FIVE_GROUPS:
            chars = one_dim_reps(g)
            u = corpus.random_rep(rng, g, max_dim=6)
            chi = chars[rng.randrange(len(chars))]
            rep = cstar_reduce(u, chi)
            assert rep.dim == character_rank(u, chi)
            assert rep.residual <= 1e-8

    def test_empty_reduction(self):
        s3 = symmetric(3)
        rep = cstar_reduce(sign_rep(s3), trivial_rep(s3))
        assert rep.dim == 0 and rep.oracle_dim == 0

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatch):
            cstar_reduce(regular_rep(cyclic(2)), trivial_rep(cyclic(3)))

    def test_multiplier_mismatch(self):
        with pytest.raises(MultiplierMismatch):
            cstar_reduce(pauli_rep(), trivial_rep(klein_four()))


# ---------------------------------------------------------------------------
# reduction, correspondence route

class TestWstarReduce:
    def test_matches_bimodule_route(self):
        rng = random.Random(3)
        for g in FIVE_GROUPS:
            u = corpus.random_rep(rng, g, max_dim=6)
            chars = one_dim_reps(g)
            chi = chars[rng.randrange(len(chars))]
            w = wstar_reduce(u, chi)
            c = cstar_reduce(u, chi)
            assert w.dim == c.dim == w.oracle_dim
            assert w.residual <= 1e-8

    def test_regular_c2(self):
        rep = wstar_reduce(regular_rep(cyclic(2)), trivial_rep(cyclic(2)))
        assert rep.dim == 1
        assert rep.residual <= 1e-9

    def test_projective_pair(self):
        p = pauli_rep()
        # the multiplier is real, so the pair cancels and reduces
        assert character_rank(p, p) == 1
        rep = wstar_reduce(p, p)
        assert rep.dim == 1 == rep.oracle_dim
        assert rep.residual <= 1e-8

    def test_two_dim_chi(self):
        g = cyclic(3)
        u = regular_rep(g)
        chi = trivial_rep(g, 2)
        rep = wstar_reduce(u, chi)
        assert rep.dim == character_rank(u, chi) == 2
        assert rep.residual <= 1e-8


class TestUnitLaw:
    def test_quotient_is_the_carrier(self):
        for g in [cyclic(2), cyclic(3), symmetric(3)]:
            u = regular_rep(g)
            t, resid = unit_law_unitary(u)
            assert t.shape == (g.order, g.order)
            assert resid <= 1e-9
            assert numkit.max_abs(t.conj().T @ t - np.eye(g.order)) <= 1e-9

    def test_projective_carrier(self):
        t, resid = unit_law_unitary(pauli_rep())
        assert t.shape == (2, 2)
        assert resid <= 1e-9


# ---------------------------------------------------------------------------
# property checks

@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000))
def test_random_reps_validate(seed):
    rng = random.Random(seed)
    g = FIVE_GROUPS[rng.randrange(len(FIVE_GROUPS))]
    u = corpus.random_rep(rng, g)
    assert u.dim <= 8
    assert validate_rep(u) is None


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10_000))
def test_reduction_dims_match_oracle(seed):
    rng = random.Random(seed)
    g = FIVE_GROUPS[rng.randrange(len(FIVE_GROUPS))]
    u = corpus.random_rep(rng, g, max_dim=6)
    chars = one_dim_reps(g)
    chi = chars[rng.randrange(len(chars))]
    rep = cstar_reduce(u, chi)
    assert rep.dim == rep.oracle_dim == character_rank(u, chi)
    assert rep.residual <= 1e-8
