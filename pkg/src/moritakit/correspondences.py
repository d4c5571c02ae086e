"""Correspondences between finite-dimensional von Neumann algebras.

A correspondence is a Hilbert space carrying a normal unital *-representation
of M and a commuting unital *-antirepresentation of N (the right action).
The relative tensor product over N is computed through the standard form
L^2(N) of the middle algebra: for each vector the right-bounded operator
R_psi: L^2(N) -> H determines N-valued inner products R_psi* R_phi, whose
Gram matrix is quotiented exactly as in the C*-module case.  Every Gram
entry is cross-checked against an independent contraction through the
left-bounded operators of the second factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .algebras import (
    FdStarAlgebra,
    center_basis,
    check_star_hom,
    is_tracial,
    scalar_algebra,
)
from .bimodules import (
    HilbertBimodule,
    interior_tensor_full,
    same_algebra,
    validate_bimodule,
)
from .errors import MismatchedMiddle, NotTracial
from .numkit import DEFAULT_TOL, eps_of, max_abs


@dataclass
class Correspondence:
    alg_m: FdStarAlgebra
    alg_n: FdStarAlgebra
    dim: int
    piL: np.ndarray  # (dim M, d, d) *-representation
    piR: np.ndarray  # (dim N, d, d) *-antirepresentation


def validate_correspondence(h: Correspondence, tol=DEFAULT_TOL) -> str | None:
    eps = eps_of(tol)
    m, n, d = h.alg_m, h.alg_n, h.dim
    if h.piL.shape != (m.dim, d, d):
        return "left representation has wrong shape"
    if h.piR.shape != (n.dim, d, d):
        return "right representation has wrong shape"
    scale = max(1.0, max_abs(h.piL), max_abs(h.piR)) ** 2
    lim = 1e3 * eps * scale
    if max_abs(np.einsum("i,ipq->pq", m.unit(), h.piL) - np.eye(d)) > lim:
        return "left representation is not unital"
    prod = np.einsum("ipq,jqr->ijpr", h.piL, h.piL, optimize=True)
    via = np.einsum("ijk,kpr->ijpr", m.mult, h.piL, optimize=True)
    if max_abs(prod - via) > lim * max(1.0, max_abs(m.mult)):
        return "left representation is not multiplicative"
    starred = np.einsum("ai,apq->ipq", m.star, h.piL)
    if max_abs(starred - np.conj(np.transpose(h.piL, (0, 2, 1)))) > lim:
        return "left representation does not preserve the star"
    if max_abs(np.einsum("j,jpq->pq", n.unit(), h.piR) - np.eye(d)) > lim:
        return "right representation is not unital"
    anti = np.einsum("jpq,iqr->ijpr", h.piR, h.piR, optimize=True)
    via_n = np.einsum("ijk,kpr->ijpr", n.mult, h.piR, optimize=True)
    if max_abs(anti - via_n) > lim * max(1.0, max_abs(n.mult)):
        return "right representation is not an antirepresentation"
    starred_r = np.einsum("aj,apq->jpq", n.star, h.piR)
    if max_abs(starred_r - np.conj(np.transpose(h.piR, (0, 2, 1)))) > lim:
        return "right representation does not preserve the star"
    commute = np.einsum("ipq,jqr->ijpr", h.piL, h.piR, optimize=True) - np.einsum(
        "jpq,iqr->ijpr", h.piR, h.piL, optimize=True
    )
    if max_abs(commute) > lim:
        return "left and right representations do not commute"
    return None


# ---------------------------------------------------------------------------
# standard form

@dataclass
class StandardForm:
    alg: FdStarAlgebra
    w: np.ndarray  # (d, d) invertible: L2 coords = w @ algebra coords
    winv: np.ndarray
    omega: np.ndarray  # cyclic trace vector, unit norm
    j_mat: np.ndarray  # modular conjugation: J v = j_mat @ conj(v)
    piL: np.ndarray  # (d, d, d)
    piR: np.ndarray

    @property
    def corr(self) -> Correspondence:
        return Correspondence(self.alg, self.alg, self.alg.dim, self.piL, self.piR)

    def unit_vector(self) -> np.ndarray:
        """Image of the algebra unit, i.e. omega before normalization."""
        return self.w @ self.alg.unit()


def standard_form(n: FdStarAlgebra, tol=DEFAULT_TOL) -> StandardForm:
    """GNS space of the algebra's state, which must be a faithful trace."""
    if not is_tracial(n, tol):
        raise NotTracial("standard form needs a tracial state")
    eps = eps_of(tol)
    d = n.dim
    g = n.gram()
    r, w = numkit.gram_quotient(g, tol)
    assert r == d, "state is not faithful"
    winv = np.linalg.inv(w)
    eye = np.eye(d, dtype=complex)
    piL = np.stack([w @ n.left_mult_matrix(eye[:, i]) @ winv for i in range(d)])
    piR = np.stack([w @ n.right_mult_matrix(eye[:, i]) @ winv for i in range(d)])
    omega = w @ n.unit()
    omega = omega / np.linalg.norm(omega)
    j_mat = w @ n.star @ np.conj(winv)
    scale = max(1.0, max_abs(w), max_abs(winv)) ** 2
    lim = 1e3 * eps * scale
    assert max_abs(j_mat @ np.conj(j_mat) - eye) <= lim, "J is not an involution"
    assert max_abs(j_mat.conj().T @ j_mat - eye) <= lim, "J is not antiunitary"
    assert max_abs(j_mat @ np.conj(omega) - omega) <= lim, "J does not fix the trace vector"
    # J pi_L(a*) J = pi_R(a)
    starred = np.einsum("ai,apq->ipq", n.star, piL)
    conj_form = np.einsum(
        "pq,iqr,rs->ips", j_mat, np.conj(starred), np.conj(j_mat)
    )
    assert max_abs(conj_form - piR) <= lim, "modular conjugation does not swap the actions"
    z = center_basis(n, tol)
    for col in range(z.shape[1]):
        zl = np.einsum("i,ipq->pq", z[:, col], piL)
        zr = np.einsum("i,ipq->pq", z[:, col], piR)
        assert max_abs(zl - zr) <= lim, "central element acts differently on the two sides"
    sf = StandardForm(n, w, winv, omega, j_mat, piL, piR)
    bad = validate_correspondence(sf.corr, tol)
    assert bad is None, bad
    return sf


def _r_tensor(h: Correspondence, sf: StandardForm, tol=DEFAULT_TOL) -> np.ndarray:
    """Right-bounded operators R[q] : L^2(N) -> H for each basis vector of H.

    R_psi sends a.Omega to psi.a (Omega the unit-norm trace vector); columns
    are indexed by the orthonormal basis of L^2(N).  Each R[q] intertwines
    the right actions; asserted.
    """
    eps = eps_of(tol)
    root = np.linalg.norm(sf.unit_vector())
    r = root * np.einsum("isq,ia->qsa", h.piR, sf.winv, optimize=True)
    scale = max(1.0, max_abs(r)) * max(1.0, max_abs(h.piR), max_abs(sf.piR))
    inter = np.einsum("qsa,jab->qjsb", r, sf.piR, optimize=True) - np.einsum(
        "jst,qtb->qjsb", h.piR, r, optimize=True
    )
    assert max_abs(inter) <= 1e4 * eps * scale, "R maps do not intertwine the right actions"
    return r


def r_map(psi, h: Correspondence, sf: StandardForm, tol=DEFAULT_TOL) -> np.ndarray:
    """The operator R_psi : L^2(N) -> H with R_psi(a Omega) = psi.a."""
    psi = np.asarray(psi, dtype=complex)
    assert psi.shape == (h.dim,)
    return np.einsum("q,qsa->sa", psi, _r_tensor(h, sf, tol))


def _n_valued_gram(h: Correspondence, sf: StandardForm, tol):
    """Coordinates x[p, q, :] in N of R_p* R_q, with membership asserted."""
    eps = eps_of(tol)
    r = _r_tensor(h, sf, tol)
    n_op = np.einsum("psa,qsb->pqab", np.conj(r), r, optimize=True)
    wu = sf.unit_vector()
    x = np.einsum("ia,pqab,b->pqi", sf.winv, n_op, wu, optimize=True)
    recon = np.einsum("pqi,iab->pqab", x, sf.piL, optimize=True)
    scale = max(1.0, max_abs(n_op))
    assert max_abs(recon - n_op) <= 1e4 * eps * scale, \
        "R_p* R_q does not lie in the middle algebra"
    return x, r


def tensor_gram_routes(
    h: Correspondence, k: Correspondence, sf: StandardForm | None = None, tol=DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Both routes to the tensor Gram matrix on the big space of h (x) k.

    The first entry contracts the middle-algebra-valued inner product of h
    against the left action of k; the second pairs left-bounded operators
    of k against the same algebra elements.  They must agree entrywise.
    """
    if not same_algebra(h.alg_n, k.alg_m, tol):
        raise MismatchedMiddle("correspondences do not share the middle algebra")
    if sf is None:
        sf = standard_form(h.alg_n, tol)
    x, _ = _n_valued_gram(h, sf, tol)
    dh, dk = h.dim, k.dim
    g = np.einsum("pqi,ikl->pkql", x, k.piL, optimize=True).reshape(dh * dk, dh * dk)

    # independent route: <xi_k, pi(n) xi_l> = <L_l* L_k Omega, pi_L(n) Omega>
    root = np.linalg.norm(sf.unit_vector())
    lten = root * np.einsum("ikq,ia->qka", k.piL, sf.winv, optimize=True)
    pair = np.einsum("kta,ltb->klab", np.conj(lten), lten, optimize=True)
    nop = np.einsum("pqi,iab->pqab", x, sf.piL, optimize=True)
    g3 = np.einsum(
        "a,klab,pqbc,c->pkql", np.conj(sf.omega), pair, nop, sf.omega,
        optimize=True,
    ).reshape(dh * dk, dh * dk)
    return g, g3


def relative_tensor_full(
    h: Correspondence, k: Correspondence, sf: StandardForm | None = None, tol=DEFAULT_TOL
):
    """Relative tensor product over the shared middle algebra.

    Returns (correspondence, coords, pinv).  The Gram matrix
    ``<p (x) kappa, q (x) lambda> = pi_K(<psi_p, psi_q>_N)[kappa, lambda]``
    is cross-checked entrywise against the independent pairing through
    left-bounded operators of k before quotienting.
    """
    if sf is None:
        if not same_algebra(h.alg_n, k.alg_m, tol):
            raise MismatchedMiddle("correspondences do not share the middle algebra")
        sf = standard_form(h.alg_n, tol)
    eps = eps_of(tol)
    g, g3 = tensor_gram_routes(h, k, sf, tol)
    dh, dk = h.dim, k.dim
    scale = max(1.0, max_abs(g))
    assert max_abs(g - g3) <= 1e-9 * scale, \
        f"tensor Gram disagrees with the bounded-vector pairing ({max_abs(g - g3):.2e})"

    r, coords = numkit.gram_quotient(g, tol)
    pinv = numkit.quotient_pinv(coords)
    piL = np.empty((h.alg_m.dim, r, r), dtype=complex)
    for i in range(h.alg_m.dim):
        big = np.kron(h.piL[i], np.eye(dk, dtype=complex))
        piL[i], resid = numkit.descend_operator(coords, pinv, big, tol)
        assert resid <= 1e4 * eps * max(1.0, scale), f"left action does not descend ({resid:.2e})"
    piR = np.empty((k.alg_n.dim, r, r), dtype=complex)
    for j in range(k.alg_n.dim):
        big = np.kron(np.eye(dh, dtype=complex), k.piR[j])
        piR[j], resid = numkit.descend_operator(coords, pinv, big, tol)
        assert resid <= 1e4 * eps * max(1.0, scale), f"right action does not descend ({resid:.2e})"
    out = Correspondence(h.alg_m, k.alg_n, r, piL, piR)
    bad = validate_correspondence(out, tol)
    assert bad is None, bad
    return out, coords, pinv


def relative_tensor(
    h: Correspondence, k: Correspondence, sf: StandardForm | None = None, tol=DEFAULT_TOL
) -> Correspondence:
    return relative_tensor_full(h, k, sf, tol)[0]


# ---------------------------------------------------------------------------
# equivalence and conjugates

def is_equivalence_correspondence(h: Correspondence, tol=DEFAULT_TOL) -> bool:
    """Both representations injective and each spanning the other's commutant."""
    dm, dn, d = h.alg_m.dim, h.alg_n.dim, h.dim
    if numkit.rank(h.piL.reshape(dm, d * d), tol) != dm:
        return False
    if numkit.rank(h.piR.reshape(dn, d * d), tol) != dn:
        return False
    comm_l = numkit.commutant(list(h.piL), tol)
    if not numkit.spans_equal(list(h.piR), comm_l, tol):
        return False
    comm_r = numkit.commutant(list(h.piR), tol)
    return numkit.spans_equal(list(h.piL), comm_r, tol)


def conjugate_correspondence(h: Correspondence) -> Correspondence:
    """The conjugate Hilbert space as an (N, M)-correspondence."""
    m, n = h.alg_m, h.alg_n
    piL = np.conj(np.einsum("aj,apq->jpq", n.star, h.piR))
    piR = np.conj(np.einsum("ai,apq->ipq", m.star, h.piL))
    return Correspondence(n, m, h.dim, piL, piR)


def hom_to_corr(
    a: FdStarAlgebra,
    b: FdStarAlgebra,
    hom: np.ndarray,
    sf: StandardForm | None = None,
    tol=DEFAULT_TOL,
) -> Correspondence:
    """L^2(B) with the left action pulled back along a unital *-hom A -> B."""
    check_star_hom(a, b, hom, tol)
    if sf is None:
        sf = standard_form(b, tol)
    piL = np.einsum("pi,pqr->iqr", np.asarray(hom, dtype=complex), sf.piL)
    h = Correspondence(a, b, b.dim, piL, sf.piR)
    bad = validate_correspondence(h, tol)
    assert bad is None, bad
    return h


def corr_unitary_equivalent(
    h1: Correspondence, h2: Correspondence, tol=DEFAULT_TOL, seed: int = 0
):
    """Unitary intertwiner of both actions, or None."""
    if h1.dim != h2.dim:
        return None
    if not (
        same_algebra(h1.alg_m, h2.alg_m, tol) and same_algebra(h1.alg_n, h2.alg_n, tol)
    ):
        return None
    gens1 = list(h1.piL) + list(h1.piR)
    gens2 = list(h2.piL) + list(h2.piR)
    return numkit.unitary_intertwiner(gens1, gens2, tol, seed=seed)


# ---------------------------------------------------------------------------
# bridges to the C*-module picture

def corr_to_bimodule(h: Correspondence, tol=DEFAULT_TOL, sf: StandardForm | None = None):
    """The Hilbert (M, N)-bimodule of right-bounded operators L^2(N) -> H.

    Carrier: intertwiners of the right actions; M acts by postcomposition
    with pi_L, N by precomposition with the standard-form left action; the
    N-valued inner product of T1, T2 is the element representing T1* T2.
    """
    if sf is None:
        sf = standard_form(h.alg_n, tol)
    eps = eps_of(tol)
    basis = numkit.intertwiner_space(list(sf.piR), list(h.piR), tol)
    nd = len(basis)
    assert nd == h.dim, "right-bounded operators do not match the space"
    left = np.empty((h.alg_m.dim, nd, nd), dtype=complex)
    right = np.empty((h.alg_n.dim, nd, nd), dtype=complex)
    for b, t in enumerate(basis):
        for i in range(h.alg_m.dim):
            moved = h.piL[i] @ t
            coeffs, resid = numkit.coeffs_in_span(basis, moved, tol)
            assert resid <= 1e4 * eps * max(1.0, max_abs(moved)), \
                "left action leaves the carrier"
            left[i, :, b] = coeffs
        for j in range(h.alg_n.dim):
            moved = t @ sf.piL[j]
            coeffs, resid = numkit.coeffs_in_span(basis, moved, tol)
            assert resid <= 1e4 * eps * max(1.0, max_abs(moved)), \
                "right action leaves the carrier"
            right[j, :, b] = coeffs
    ip = np.empty((nd, nd, h.alg_n.dim), dtype=complex)
    wu = sf.unit_vector()
    for a in range(nd):
        for b in range(nd):
            op = basis[a].conj().T @ basis[b]
            ip[a, b] = sf.winv @ (op @ wu)
            recon = np.einsum("i,ipq->pq", ip[a, b], sf.piL)
            assert max_abs(recon - op) <= 1e4 * eps * max(1.0, max_abs(op)), \
                "operator inner product leaves the middle algebra"
    e = HilbertBimodule(h.alg_m, h.alg_n, nd, left, right, ip)
    bad = validate_bimodule(e, tol)
    assert bad is None, bad
    return e


def bimodule_to_corr(e, tol=DEFAULT_TOL, sf: StandardForm | None = None) -> Correspondence:
    """Complete a Hilbert (A, B)-bimodule to the correspondence E (x)_B L^2(B)."""
    if sf is None:
        sf = standard_form(e.alg_b, tol)
    b = e.alg_b
    d = b.dim
    l2 = HilbertBimodule(
        b,
        scalar_algebra(),
        d,
        sf.piL,
        np.eye(d, dtype=complex)[None, :, :],
        np.eye(d, dtype=complex)[:, :, None],
    )
    bad = validate_bimodule(l2, tol)
    assert bad is None, bad
    out, coords, pinv = interior_tensor_full(e, l2, tol)
    eps = eps_of(tol)
    piR = np.empty((d, out.dim, out.dim), dtype=complex)
    for j in range(d):
        big = np.kron(np.eye(e.dim, dtype=complex), sf.piR[j])
        piR[j], resid = numkit.descend_operator(coords, pinv, big, tol)
        assert resid <= 1e4 * eps, f"right multiplication does not descend ({resid:.2e})"
    h = Correspondence(e.alg_a, e.alg_b, out.dim, out.left, piR)
    bad = validate_correspondence(h, tol)
    assert bad is None, bad
    return h
