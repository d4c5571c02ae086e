"""Reduction of finite-group unitary representations by tensoring.

A unitary representation U of a finite group H — projective multipliers
allowed — turns its carrier into a bimodule: the commutant of U(H) acts on
the left and the twisted group algebra on the right through h -> U(h)^-1.
Tensoring that bimodule against the carrier of a second representation
collapses the pair onto its joint invariant subspace.  An explicit
averaging projector computes the same subspace directly, and every
reduction run certifies the two routes against each other.

Multiplier phases are kept as exact rational turn fractions so the
2-cocycle identity is checked without any floating arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numkit
from .algebras import (
    FdStarAlgebra,
    algebra_from_matrix_basis,
    is_tracial,
    scalar_algebra,
    validate_algebra,
)
from .bimodules import HilbertBimodule, interior_tensor_full, validate_bimodule
from .correspondences import (
    Correspondence,
    relative_tensor_full,
    standard_form,
    validate_correspondence,
)
from .errors import BadCocycle, GroupMismatch, MultiplierMismatch, NotProjection
from .groups import (
    FinGroup,
    all_homomorphisms,
    cyclic,
    exponent,
    klein_four,
    perm_parity,
    validate_group,
)
from .numkit import DEFAULT_TOL, cmatrix, eps_of, max_abs


# ---------------------------------------------------------------------------
# multipliers

@dataclass(frozen=True)
class Multiplier:
    """Normalized 2-cocycle on a finite group, stored as turn fractions.

    ``phases[x][y]`` is the exact rational q with c(x, y) = exp(2 pi i q).
    """

    group: FinGroup
    phases: tuple[tuple[Fraction, ...], ...]

    def phase(self, i: int, j: int) -> complex:
        return complex(np.exp(2j * np.pi * float(self.phases[i][j])))

    def phase_table(self) -> np.ndarray:
        n = self.group.order
        return np.array([[self.phase(i, j) for j in range(n)] for i in range(n)])


def validate_multiplier(m: Multiplier) -> str | None:
    """First violated cocycle axiom as a string, or None.  Checks are exact."""
    err = validate_group(m.group)
    if err is not None:
        return f"group: {err}"
    n = m.group.order
    if len(m.phases) != n or any(len(row) != n for row in m.phases):
        return "phase table is not n x n"
    for row in m.phases:
        for q in row:
            if not isinstance(q, Fraction):
                return "phases must be exact fractions"
    e = m.group.identity
    for i in range(n):
        if (m.phases[e][i] % 1) or (m.phases[i][e] % 1):
            return f"not normalized at {m.group.elements[i]}"
    for x in range(n):
        for y in range(n):
            xy = m.group.mul(x, y)
            for z in range(n):
                lhs = m.phases[x][y] + m.phases[xy][z]
                rhs = m.phases[y][z] + m.phases[x][m.group.mul(y, z)]
                if (lhs - rhs) % 1:
                    els = m.group.elements
                    return f"cocycle identity fails at ({els[x]}, {els[y]}, {els[z]})"
    return None


def check_multiplier(m: Multiplier) -> None:
    err = validate_multiplier(m)
    if err is not None:
        raise BadCocycle(err)


def trivial_multiplier(g: FinGroup) -> Multiplier:
    zero = Fraction(0)
    row = tuple(zero for _ in range(g.order))
    return Multiplier(g, tuple(row for _ in range(g.order)))


def conjugate_multiplier(m: Multiplier) -> Multiplier:
    return Multiplier(
        m.group, tuple(tuple((-q) % 1 for q in row) for row in m.phases)
    )


def multipliers_cancel(a: Multiplier, b: Multiplier) -> bool:
    """Exact check that the pointwise product of the phases is 1."""
    if a.group != b.group:
        return False
    return all(
        not ((qa + qb) % 1)
        for ra, rb in zip(a.phases, b.phases)
        for qa, qb in zip(ra, rb)
    )


def z2z2_multiplier() -> Multiplier:
    """The nontrivial class on C2 x C2: c((a1,b1),(a2,b2)) = (-1)^(b1 a2)."""
    g = klein_four()
    half = Fraction(1, 2)
    # element index i encodes (a, b) = (i // 2, i % 2)
    rows = tuple(
        tuple((half * ((i % 2) * (j // 2))) % 1 for j in range(4)) for i in range(4)
    )
    m = Multiplier(g, rows)
    check_multiplier(m)
    return m


# ---------------------------------------------------------------------------
# representations

@dataclass
class UnitaryRep:
    """Projective unitary representation: U(x) U(y) = c(x, y) U(xy)."""

    group: FinGroup
    mult: Multiplier
    matrices: np.ndarray  # (|H|, d, d)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]


def validate_rep(u: UnitaryRep, tol=DEFAULT_TOL) -> str | None:
    err = validate_multiplier(u.mult)
    if err is not None:
        return f"multiplier: {err}"
    if u.mult.group != u.group:
        return "multiplier lives on a different group"
    n = u.group.order
    mats = u.matrices
    if mats.ndim != 3 or mats.shape[0] != n or mats.shape[1] != mats.shape[2]:
        return "matrices are not a (|H|, d, d) stack"
    d = mats.shape[1]
    eps = eps_of(tol)
    eye = np.eye(d)
    lim = 1e2 * eps * max(1.0, max_abs(mats)) ** 2
    for i in range(n):
        if max_abs(mats[i].conj().T @ mats[i] - eye) > lim:
            return f"U({u.group.elements[i]}) is not unitary"
    if max_abs(mats[u.group.identity] - eye) > lim:
        return "U(e) is not the identity"
    for i in range(n):
        for j in range(n):
            want = u.mult.phase(i, j) * mats[u.group.mul(i, j)]
            if max_abs(mats[i] @ mats[j] - want) > lim:
                els = u.group.elements
                return f"U({els[i]}) U({els[j]}) misses the multiplier"
    return None


def check_rep(u: UnitaryRep, tol=DEFAULT_TOL) -> None:
    err = validate_rep(u, tol)
    assert err is None, err


def regular_rep(h: FinGroup, mult: Multiplier | None = None) -> UnitaryRep:
    """(Twisted) left regular representation, U(g) delta_x = c(g, x) delta_gx."""
    if mult is None:
        mult = trivial_multiplier(h)
    check_multiplier(mult)
    if mult.group != h:
        raise GroupMismatch("multiplier lives on a different group")
    n = h.order
    mats = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        for x in range(n):
            mats[g, h.mul(g, x), x] = mult.phase(g, x)
    u = UnitaryRep(h, mult, mats)
    check_rep(u)
    return u


def trivial_rep(h: FinGroup, dim: int = 1) -> UnitaryRep:
    eye = np.eye(dim, dtype=complex)
    return UnitaryRep(h, trivial_multiplier(h), np.stack([eye] * h.order))


def character_rep(h: FinGroup, values) -> UnitaryRep:
    """One-dimensional representation from a table of unit scalars."""
    vals = np.asarray(values, dtype=complex).reshape(h.order, 1, 1)
    u = UnitaryRep(h, trivial_multiplier(h), vals)
    check_rep(u)
    return u


def one_dim_reps(h: FinGroup) -> list[UnitaryRep]:
    """All characters, as homomorphisms into the cyclic group of roots."""
    m = exponent(h)
    out = []
    for hom in all_homomorphisms(h, cyclic(m)):
        out.append(character_rep(h, np.exp(2j * np.pi * np.array(hom) / m)))
    return out


def sign_rep(h: FinGroup) -> UnitaryRep:
    """The parity character of a permutation group."""
    return character_rep(h, [float(perm_parity(lab)) for lab in h.elements])


def pauli_rep() -> UnitaryRep:
    """Two-dimensional projective representation of C2 x C2.

    U(a, b) = X^a Z^b carries exactly the nontrivial multiplier class.
    """
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    mats = np.stack([np.eye(2, dtype=complex), z, x, x @ z])
    u = UnitaryRep(klein_four(), z2z2_multiplier(), mats)
    check_rep(u)
    return u


# ---------------------------------------------------------------------------
# from representations to algebras and bimodules

def twisted_group_algebra(
    h: FinGroup, mult: Multiplier | None = None, tol=DEFAULT_TOL
) -> FdStarAlgebra:
    """Group algebra with product delta_x delta_y = c(x, y) delta_xy.

    The involution is delta_g* = conj(c(g, g^-1)) delta_{g^-1} and the
    state evaluates at the identity; together they make the delta basis
    orthonormal (the Gram matrix is exactly the identity) and the state a
    faithful trace.
    """
    err = validate_group(h)
    assert err is None, err
    if mult is None:
        mult = trivial_multiplier(h)
    if mult.group != h:
        raise GroupMismatch("multiplier lives on a different group")
    check_multiplier(mult)
    n = h.order
    m = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            m[i, j, h.mul(i, j)] = mult.phase(i, j)
    star = np.zeros((n, n), dtype=complex)
    for g in range(n):
        gi = h.inv(g)
        star[gi, g] = np.conj(mult.phase(g, gi))
    state = np.zeros(n, dtype=complex)
    state[h.identity] = 1.0
    alg = FdStarAlgebra(tuple(h.elements), m, star, state)
    err = validate_algebra(alg, tol)
    assert err is None, err
    assert max_abs(alg.gram() - np.eye(n)) <= 1e2 * eps_of(tol), \
        "delta basis is not orthonormal"
    assert is_tracial(alg, tol), "identity-evaluation state is not a trace"
    return alg


def rep_to_algrep(
    u: UnitaryRep, alg: FdStarAlgebra | None = None, tol=DEFAULT_TOL
) -> np.ndarray:
    """Extend h -> U(h) linearly: pi(delta_h) = U(h).

    ``alg`` defaults to the twisted group algebra of ``u``'s own
    multiplier.  When an algebra is supplied, the products of the U(h)
    must reproduce its structure constants; otherwise the multipliers
    disagree and pi would not be multiplicative.
    """
    check_rep(u, tol)
    if alg is None:
        alg = twisted_group_algebra(u.group, u.mult, tol)
    n = u.group.order
    if alg.dim != n or tuple(alg.labels) != tuple(u.group.elements):
        raise GroupMismatch("algebra basis does not match the group")
    pi = np.ascontiguousarray(u.matrices, dtype=complex)
    eps = eps_of(tol)
    lim = 1e2 * eps * max(1.0, max_abs(pi)) ** 2
    for i in range(n):
        for j in range(n):
            want = np.einsum("k,kab->ab", alg.mult[i, j], pi)
            if max_abs(pi[i] @ pi[j] - want) > lim * max(1.0, max_abs(alg.mult)):
                raise MultiplierMismatch(
                    "products of U(h) do not follow the algebra multiplier"
                )
    for i in range(n):
        want = np.einsum("k,kab->ab", alg.star[:, i], pi)
        assert max_abs(pi[i].conj().T - want) <= lim, "pi is not star-preserving"
    return pi


def pi_r(u: UnitaryRep, tol=DEFAULT_TOL) -> np.ndarray:
    """Right action delta_h -> U(h)^-1.

    An antirepresentation of the group algebra twisted by the conjugate
    multiplier; it commutes with everything commuting with U(H).
    """
    check_rep(u, tol)
    return np.conj(np.swapaxes(u.matrices, 1, 2))


def commutant_algebra(mats, tol=DEFAULT_TOL) -> tuple[FdStarAlgebra, np.ndarray]:
    """Commutant of a *-closed family as a concrete algebra.

    Returns the algebra together with its Frobenius-orthonormal matrix
    basis; the basis doubles as a left action in bimodule form.
    """
    basis = numkit.commutant([cmatrix(m) for m in mats], tol)
    images = np.stack(basis)
    return algebra_from_matrix_basis(images, tol=tol), images


def bimodule_from_rep(u: UnitaryRep, tol=DEFAULT_TOL) -> HilbertBimodule:
    """The carrier of ``u`` as a (commutant, twisted group algebra) bimodule.

    The right algebra carries the conjugate multiplier and acts through
    U(h)^-1; the algebra-valued inner product reads off matrix entries,
    <psi, phi> having coefficient (psi, U(h) phi) at delta_h.  Its
    identity coefficient is the ordinary scalar product, so the carrier
    basis stays orthonormal and no quotient is needed.
    """
    check_rep(u, tol)
    alg_b = twisted_group_algebra(u.group, conjugate_multiplier(u.mult), tol)
    alg_a, images = commutant_algebra(u.matrices, tol)
    ip = np.transpose(u.matrices, (1, 2, 0))  # ip[a, b, h] = U(h)[a, b]
    e = HilbertBimodule(alg_a, alg_b, u.dim, images, pi_r(u, tol), ip)
    err = validate_bimodule(e, tol)
    assert err is None, err
    return e


# ---------------------------------------------------------------------------
# reduction

@dataclass
class ReductionReport:
    """Outcome of one reduction run, with the oracle comparison bundled in.

    ``coords`` maps the product of the two carriers onto the quotient;
    ``induced`` stacks the descended action of the commutant basis.  The
    residual is the worst defect of the certificates tying the quotient
    to the independently computed invariant subspace.
    """

    dim: int
    coords: np.ndarray
    induced: np.ndarray
    oracle_dim: int
    residual: float


def _check_pair(u: UnitaryRep, chi: UnitaryRep, tol) -> None:
    check_rep(u, tol)
    check_rep(chi, tol)
    if u.group != chi.group:
        raise GroupMismatch("representations live over different groups")
    if not multipliers_cancel(u.mult, chi.mult):
        raise MultiplierMismatch(
            "multipliers do not cancel, so U x U_chi is still projective"
        )


def invariant_subspace_oracle(
    u: UnitaryRep, chi: UnitaryRep, tol=DEFAULT_TOL
) -> tuple[int, np.ndarray, np.ndarray]:
    """Joint invariants of U x U_chi by explicit averaging.

    Returns (rank, basis, restricted): ``basis`` columns span the range of
    the averaging projector, ``restricted`` compresses the commutant basis
    of U(H) to that range.  The rank is cross-checked against the trace
    pairing sum_h tr U(h) tr U_chi(h) / |H|.
    """
    _check_pair(u, chi, tol)
    n = u.group.order
    p = sum(np.kron(u.matrices[i], chi.matrices[i]) for i in range(n)) / n
    eps = eps_of(tol)
    if max_abs(p - p.conj().T) > 1e2 * eps or max_abs(p @ p - p) > 1e2 * eps:
        raise NotProjection("averaging operator is not an orthogonal projection")
    basis = numkit.kernel_of_normal(np.eye(p.shape[0]) - p, tol)
    r = basis.shape[1]
    by_traces = (
        sum(np.trace(u.matrices[i]) * np.trace(chi.matrices[i]) for i in range(n)) / n
    )
    assert abs(by_traces - r) <= 1e-6, f"trace pairing {by_traces:.8f} != rank {r}"
    _, images = commutant_algebra(u.matrices, tol)
    eye_chi = np.eye(chi.dim, dtype=complex)
    restricted = np.stack(
        [basis.conj().T @ np.kron(m, eye_chi) @ basis for m in images]
    )
    return r, basis, restricted


def cstar_reduce(u: UnitaryRep, chi: UnitaryRep, tol=DEFAULT_TOL) -> ReductionReport:
    """Reduce ``u`` against ``chi`` by tensoring Hilbert bimodules.

    The carrier of ``u`` is a (commutant, twisted group algebra) bimodule
    and the carrier of ``chi`` a (twisted group algebra, scalars) one;
    their tensor product divides H x H_chi by the kernel of the form
    sum_h U(h) x U_chi(h) — |H| times the averaging projector — and the
    commutant action descends.  The certificate: scaling the quotient map
    by 1 / sqrt|H| must carry the projector range unitarily onto the
    quotient, intertwining the two induced actions.
    """
    _check_pair(u, chi, tol)
    e = bimodule_from_rep(u, tol)
    pi_chi = rep_to_algrep(chi, e.alg_b, tol)
    eye = np.eye(chi.dim, dtype=complex)
    f = HilbertBimodule(
        e.alg_b, scalar_algebra(), chi.dim, pi_chi, eye[None], eye[..., None]
    )
    err = validate_bimodule(f, tol)
    assert err is None, err
    out, coords, _ = interior_tensor_full(e, f, tol)

    r, basis, restricted = invariant_subspace_oracle(u, chi, tol)
    assert out.dim == r, f"quotient dimension {out.dim} != projector rank {r}"
    t = coords @ basis / np.sqrt(u.group.order)
    resid = max(
        max_abs(t.conj().T @ t - np.eye(r)),
        max_abs(t @ t.conj().T - np.eye(r)),
        max(
            (max_abs(t @ restricted[i] - out.left[i] @ t) for i in range(len(restricted))),
            default=0.0,
        ),
    )
    lim = 1e3 * eps_of(tol) * max(1.0, max_abs(coords)) ** 2
    assert resid <= lim, f"oracle certificate fails ({resid:.2e})"
    return ReductionReport(out.dim, coords, out.left, r, float(resid))


def unit_law_unitary(u: UnitaryRep, tol=DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Tensoring the carrier of ``u`` with the standard form of its right
    algebra gives back the carrier; return the comparison unitary.

    The map evaluates the right action on elementary tensors,
    psi x f -> pi_r(f) psi, and descends to the quotient.  Returns the
    quotient-to-carrier matrix and its worst defect (unitarity plus
    intertwining of both actions).
    """
    check_rep(u, tol)
    alg_a, images = commutant_algebra(u.matrices, tol)
    alg_n = twisted_group_algebra(u.group, conjugate_multiplier(u.mult), tol)
    sf = standard_form(alg_n, tol)
    right = pi_r(u, tol)
    h1 = Correspondence(alg_a, alg_n, u.dim, images, right)
    err = validate_correspondence(h1, tol)
    assert err is None, err
    out, _, pinv = relative_tensor_full(h1, sf.corr, sf, tol)
    assert out.dim == u.dim, "unit-law quotient dimension differs from the carrier"
    # column (t, alpha) of the evaluation: sum_j winv[j, alpha] U(g_j)^-1 e_t
    m = np.einsum("jst,ja->sta", right, sf.winv).reshape(u.dim, -1)
    t = m @ pinv
    resid = max(
        max_abs(t.conj().T @ t - np.eye(out.dim)),
        max_abs(t @ t.conj().T - np.eye(u.dim)),
        max(
            (max_abs(t @ out.piL[i] - images[i] @ t) for i in range(len(images))),
            default=0.0,
        ),
        max(
            (max_abs(t @ out.piR[j] - right[j] @ t) for j in range(u.group.order)),
            default=0.0,
        ),
    )
    lim = 1e3 * eps_of(tol) * max(1.0, max_abs(m)) ** 2
    assert resid <= lim, f"unit-law certificate fails ({resid:.2e})"
    return t, float(resid)


def wstar_reduce(u: UnitaryRep, chi: UnitaryRep, tol=DEFAULT_TOL) -> ReductionReport:
    """Reduce ``u`` against ``chi`` with the correspondence machinery.

    Same collapse as :func:`cstar_reduce`, but performed as a relative
    tensor product over the standard form of the twisted group algebra.
    The report's residual also covers the certificates that the outcome
    matches the bimodule route unitarily and that tensoring the carrier
    with the standard form reproduces the carrier (the unit law).
    """
    _check_pair(u, chi, tol)
    alg_a, images = commutant_algebra(u.matrices, tol)
    alg_n = twisted_group_algebra(u.group, conjugate_multiplier(u.mult), tol)
    sf = standard_form(alg_n, tol)
    h1 = Correspondence(alg_a, alg_n, u.dim, images, pi_r(u, tol))
    err = validate_correspondence(h1, tol)
    assert err is None, err
    pi_chi = rep_to_algrep(chi, alg_n, tol)
    eye = np.eye(chi.dim, dtype=complex)
    h2 = Correspondence(alg_n, scalar_algebra(), chi.dim, pi_chi, eye[None])
    err = validate_correspondence(h2, tol)
    assert err is None, err
    out, coords, pinv = relative_tensor_full(h1, h2, sf, tol)

    base = cstar_reduce(u, chi, tol)
    assert out.dim == base.dim, "correspondence and bimodule routes split"
    t = base.coords @ pinv  # quotient representatives in the bimodule coordinates
    resid = max(
        max_abs(t.conj().T @ t - np.eye(out.dim)),
        max_abs(t @ t.conj().T - np.eye(base.dim)),
        max(
            (max_abs(t @ out.piL[i] - base.induced[i] @ t) for i in range(len(images))),
            default=0.0,
        ),
        base.residual,
        unit_law_unitary(u, tol)[1],
    )
    lim = 1e3 * eps_of(tol) * max(1.0, max_abs(coords)) ** 2
    assert resid <= lim, f"route-comparison certificate fails ({resid:.2e})"
    return ReductionReport(out.dim, coords, out.piL, base.oracle_dim, float(resid))
