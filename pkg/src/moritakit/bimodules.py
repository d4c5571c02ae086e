"""Hilbert bimodules over finite-dimensional *-algebras and their interior tensor.

A bimodule over (A, B) is a finite-dimensional right Hilbert B-module with a
left action of A by adjointable operators.  Coordinates: ``left[i]`` is the
matrix of the i-th A-basis element, ``right[j]`` the matrix of the j-th
B-basis element acting on the right (so ``right`` is an antihomomorphism),
and ``ip[a, b, :]`` holds the B-coordinates of the inner product of the a-th
and b-th module basis vectors, conjugate-linear in the first slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .algebras import FdStarAlgebra, central_block_projections
from .errors import DomainError, MismatchedMiddle, NonIntegral, NotEquivalence
from .numkit import DEFAULT_TOL, cmatrix, eps_of, max_abs


@dataclass
class HilbertBimodule:
    alg_a: FdStarAlgebra
    alg_b: FdStarAlgebra
    dim: int
    left: np.ndarray  # (dA, n, n)
    right: np.ndarray  # (dB, n, n)
    ip: np.ndarray  # (n, n, dB)


def scalar_gram(e: HilbertBimodule) -> np.ndarray:
    return np.einsum("abk,k->ab", e.ip, e.alg_b.state)


def same_algebra(a: FdStarAlgebra, b: FdStarAlgebra, tol=DEFAULT_TOL) -> bool:
    eps = eps_of(tol)
    return (
        a.dim == b.dim
        and max_abs(a.mult - b.mult) <= 1e2 * eps * max(1.0, max_abs(a.mult))
        and max_abs(a.star - b.star) <= 1e2 * eps
        and max_abs(a.state - b.state) <= 1e2 * eps * max(1.0, max_abs(a.state))
    )


def validate_bimodule(e: HilbertBimodule, tol=DEFAULT_TOL) -> str | None:
    eps = eps_of(tol)
    a, b, n = e.alg_a, e.alg_b, e.dim
    if e.left.shape != (a.dim, n, n):
        return "left action has wrong shape"
    if e.right.shape != (b.dim, n, n):
        return "right action has wrong shape"
    if e.ip.shape != (n, n, b.dim):
        return "inner product has wrong shape"
    scale = max(1.0, max_abs(e.left), max_abs(e.right), max_abs(e.ip)) ** 2
    lim = 1e3 * eps * scale

    if max_abs(np.einsum("i,ipq->pq", a.unit(), e.left) - np.eye(n)) > lim:
        return "left action is not unital"
    prod = np.einsum("ipq,jqr->ijpr", e.left, e.left)
    via = np.einsum("ijk,kpr->ijpr", a.mult, e.left)
    if max_abs(prod - via) > lim * max(1.0, max_abs(a.mult)):
        return "left action is not multiplicative"
    if max_abs(np.einsum("j,jpq->pq", b.unit(), e.right) - np.eye(n)) > lim:
        return "right action is not unital"
    anti = np.einsum("jpq,iqr->ijpr", e.right, e.right)
    via_b = np.einsum("ijk,kpr->ijpr", b.mult, e.right)
    if max_abs(anti - via_b) > lim * max(1.0, max_abs(b.mult)):
        return "right action is not an antihomomorphism"
    commute = np.einsum("ipq,jqr->ijpr", e.left, e.right) - np.einsum(
        "jpq,iqr->ijpr", e.right, e.left
    )
    if max_abs(commute) > lim:
        return "left and right actions do not commute"

    herm = np.einsum("kj,abj->abk", b.star, np.conj(e.ip)) - np.transpose(
        e.ip, (1, 0, 2)
    )
    if max_abs(herm) > lim:
        return "inner product is not Hermitian"
    convert = np.einsum("jsb,ask->abjk", e.right, e.ip) - np.einsum(
        "abm,mjk->abjk", e.ip, b.mult
    )
    if max_abs(convert) > lim * max(1.0, max_abs(b.mult)):
        return "inner product does not convert right multiplication"
    adj_l = np.einsum("isa,sbk->iabk", np.conj(e.left), e.ip)
    adj_r = np.einsum("mi,msb,ask->iabk", a.star, e.left, e.ip)
    if max_abs(adj_l - adj_r) > lim:
        return "left action is not adjointable"

    g = scalar_gram(e)
    if max_abs(g - g.conj().T) > lim:
        return "scalarized Gram is not Hermitian"
    try:
        r, _ = numkit.gram_quotient(g, tol)
    except Exception:
        return "inner product is not positive"
    if r != n:
        return "inner product is degenerate"
    return None


# ---------------------------------------------------------------------------
# constructors

def canonical_bimodule(a: FdStarAlgebra) -> HilbertBimodule:
    """The algebra over itself with ip(x, y) = x* y."""
    d = a.dim
    eye = np.eye(d, dtype=complex)
    left = np.stack([a.left_mult_matrix(eye[:, i]) for i in range(d)])
    right = np.stack([a.right_mult_matrix(eye[:, j]) for j in range(d)])
    ip = np.einsum("ma,mbk->abk", a.star, a.mult)
    return HilbertBimodule(a, a, d, left, right, ip)


def hom_to_bimodule(
    a: FdStarAlgebra, b: FdStarAlgebra, hom: np.ndarray
) -> HilbertBimodule:
    """B as an (A, B)-bimodule, with A acting through the *-homomorphism."""
    hom = cmatrix(hom)
    d = b.dim
    eye = np.eye(d, dtype=complex)
    left = np.stack([b.left_mult_matrix(hom[:, i]) for i in range(a.dim)])
    right = np.stack([b.right_mult_matrix(eye[:, j]) for j in range(d)])
    ip = np.einsum("ma,mbk->abk", b.star, b.mult)
    return HilbertBimodule(a, b, d, left, right, ip)


def bimodule_basis_change(e: HilbertBimodule, t: np.ndarray) -> HilbertBimodule:
    """Rewrite the module in coordinates z = t x (t invertible)."""
    t = cmatrix(t)
    tinv = np.linalg.inv(t)
    left = np.einsum("pq,iqr,rs->ips", t, e.left, tinv)
    right = np.einsum("pq,jqr,rs->jps", t, e.right, tinv)
    ip = np.einsum("sa,tb,stk->abk", np.conj(tinv), tinv, e.ip)
    return HilbertBimodule(e.alg_a, e.alg_b, e.dim, left, right, ip)


# ---------------------------------------------------------------------------
# interior tensor product

def _balancing_rank(e: HilbertBimodule, f: HilbertBimodule, tol) -> int:
    """Rank of span{psi.b (x) phi - psi (x) b.phi} inside the big tensor space."""
    n, m = e.dim, f.dim
    term1 = np.einsum("jsa,tp->ajpst", e.right, np.eye(m, dtype=complex))
    term2 = np.einsum("sa,jtp->ajpst", np.eye(n, dtype=complex), f.left)
    rows = (term1 - term2).reshape(n * e.alg_b.dim * m, n * m)
    h = rows.conj().T @ rows
    return numkit.rank(h, tol)


def interior_tensor_full(
    e: HilbertBimodule, f: HilbertBimodule, tol=DEFAULT_TOL
):
    """Interior tensor product, returning (bimodule, coords, pinv).

    ``coords`` (r, n*m) maps big-space coordinates onto the quotient;
    ``pinv`` columns are representatives of the quotient basis.
    The quotient dimension is cross-checked against the rank of the
    balancing subspace.
    """
    if not same_algebra(e.alg_b, f.alg_a, tol):
        raise MismatchedMiddle("bimodules do not share the middle algebra")
    n, m = e.dim, f.dim
    w = np.einsum("abj,jsq->absq", e.ip, f.left, optimize=True)
    g = np.einsum(
        "absq,psc,c->apbq", w, f.ip, f.alg_b.state, optimize=True
    ).reshape(n * m, n * m)
    r, coords = numkit.gram_quotient(g, tol)
    assert r == n * m - _balancing_rank(e, f, tol), \
        "quotient dimension disagrees with the balancing-span rank"
    pinv = numkit.quotient_pinv(coords)
    eps = eps_of(tol)
    scale = max(1.0, max_abs(e.left), max_abs(f.right), max_abs(g))

    left = np.empty((e.alg_a.dim, r, r), dtype=complex)
    for i in range(e.alg_a.dim):
        big = np.kron(e.left[i], np.eye(m, dtype=complex))
        left[i], resid = numkit.descend_operator(coords, pinv, big, tol)
        assert resid <= 1e4 * eps * scale, f"left action does not descend ({resid:.2e})"
    right = np.empty((f.alg_b.dim, r, r), dtype=complex)
    for j in range(f.alg_b.dim):
        big = np.kron(np.eye(n, dtype=complex), f.right[j])
        right[j], resid = numkit.descend_operator(coords, pinv, big, tol)
        assert resid <= 1e4 * eps * scale, f"right action does not descend ({resid:.2e})"

    ip_big = np.einsum("absq,psc->apbqc", w, f.ip, optimize=True).reshape(
        n * m, n * m, f.alg_b.dim
    )
    ip = np.einsum("xa,yb,xyc->abc", np.conj(pinv), pinv, ip_big, optimize=True)
    out = HilbertBimodule(e.alg_a, f.alg_b, r, left, right, ip)
    sg = scalar_gram(out)
    assert max_abs(sg - np.eye(r)) <= 1e4 * eps * scale, "quotient Gram is not standard"
    return out, coords, pinv


def interior_tensor(
    e: HilbertBimodule, f: HilbertBimodule, tol=DEFAULT_TOL
) -> HilbertBimodule:
    return interior_tensor_full(e, f, tol)[0]


# ---------------------------------------------------------------------------
# compacts, fullness, equivalence

def compact_operators(e: HilbertBimodule) -> np.ndarray:
    """All rank-one operators theta_{a,b} x = a <b, x>, stacked (n*n, n, n)."""
    n = e.dim
    thetas = np.einsum("bcj,jsa->absc", e.ip, e.right, optimize=True)
    return thetas.reshape(n * n, n, n)


def is_full(e: HilbertBimodule, tol=DEFAULT_TOL) -> bool:
    n = e.dim
    return numkit.rank(e.ip.reshape(n * n, e.alg_b.dim), tol) == e.alg_b.dim


def is_equivalence_bimodule(e: HilbertBimodule, tol=DEFAULT_TOL) -> bool:
    """Full, with A acting isomorphically onto the compacts."""
    if not is_full(e, tol):
        return False
    da, n = e.alg_a.dim, e.dim
    if numkit.rank(e.left.reshape(da, n * n), tol) != da:
        return False
    return numkit.spans_equal(list(e.left), list(compact_operators(e)), tol)


def conjugate_bimodule(e: HilbertBimodule, tol=DEFAULT_TOL) -> HilbertBimodule:
    """The conjugate (B, A)-bimodule of an equivalence bimodule.

    Coordinates of the conjugate of a vector are the conjugated coordinates;
    the A-valued inner product is theta_{a,b} pulled back through the left
    action.
    """
    if not is_equivalence_bimodule(e, tol):
        raise NotEquivalence("conjugate needs an equivalence bimodule")
    a, b, n = e.alg_a, e.alg_b, e.dim
    left_c = np.conj(np.einsum("kj,kpq->jpq", b.star, e.right))
    right_c = np.conj(np.einsum("ki,kpq->ipq", a.star, e.left))
    thetas = compact_operators(e).reshape(n * n, n * n)
    left_flat = e.left.reshape(a.dim, n * n)
    coeffs, *_ = np.linalg.lstsq(left_flat.T, thetas.T, rcond=None)
    resid = max_abs(left_flat.T @ coeffs - thetas.T)
    assert resid <= 1e-7 * max(1.0, max_abs(thetas)), "compacts do not match the left span"
    ip_c = coeffs.T.reshape(n, n, a.dim)
    return HilbertBimodule(b, a, n, left_c, right_c, ip_c)


def multiplicity_matrix(e: HilbertBimodule, tol=DEFAULT_TOL) -> np.ndarray:
    """Block multiplicities: m[i, j] = rank(pi(p_i) rho(q_j)) / (n_i m_j)."""
    a, b = e.alg_a, e.alg_b
    if a.blocks is None or b.blocks is None:
        raise DomainError("multiplicity matrix needs block data on both algebras")
    ps = central_block_projections(a, tol)
    qs = central_block_projections(b, tol)
    out = np.zeros((len(ps), len(qs)), dtype=int)
    for i, p in enumerate(ps):
        pi_p = np.einsum("k,kpq->pq", p, e.left)
        for j, q in enumerate(qs):
            rho_q = np.einsum("k,kpq->pq", q, e.right)
            r = numkit.rank(pi_p @ rho_q, tol)
            denom = a.blocks.sizes[i] * b.blocks.sizes[j]
            if r % denom != 0:
                raise NonIntegral(
                    f"rank {r} is not a multiple of {denom} at block pair ({i}, {j})"
                )
            out[i, j] = r // denom
    return out


def morita_equivalent_algebras(
    a: FdStarAlgebra, b: FdStarAlgebra, tol=DEFAULT_TOL
) -> HilbertBimodule | None:
    """Equivalence bimodule between a and b, or None.

    Fin-dim *-algebras are Morita equivalent iff they have the same number of
    matrix blocks; the witness is the direct sum of rectangular matrix
    spaces pairing the i-th blocks.
    """
    if a.blocks is None or b.blocks is None:
        raise DomainError("Morita decision needs block data on both algebras")
    na, nb = a.blocks.sizes, b.blocks.sizes
    if len(na) != len(nb):
        return None
    dim = sum(p * q for p, q in zip(na, nb))
    offsets = np.cumsum([0] + [p * q for p, q in zip(na, nb)])
    row_off = np.cumsum([0] + list(na))
    col_off = np.cumsum([0] + list(nb))

    def slot(t, r, c):
        return offsets[t] + r * nb[t] + c

    left = np.zeros((a.dim, dim, dim), dtype=complex)
    for i in range(a.dim):
        img = a.blocks.images[i]
        for t, (p, q) in enumerate(zip(na, nb)):
            blk = img[row_off[t] : row_off[t] + p, row_off[t] : row_off[t] + p]
            for r in range(p):
                for r2 in range(p):
                    for c in range(q):
                        left[i, slot(t, r, c), slot(t, r2, c)] = blk[r, r2]
    right = np.zeros((b.dim, dim, dim), dtype=complex)
    for j in range(b.dim):
        img = b.blocks.images[j]
        for t, (p, q) in enumerate(zip(na, nb)):
            blk = img[col_off[t] : col_off[t] + q, col_off[t] : col_off[t] + q]
            for c in range(q):
                for c2 in range(q):
                    for r in range(p):
                        right[j, slot(t, r, c), slot(t, r, c2)] = blk[c2, c]
    flat_b = b.blocks.images.reshape(b.dim, -1)
    pinv_b = np.linalg.pinv(flat_b)
    big = sum(nb)
    ip = np.zeros((dim, dim, b.dim), dtype=complex)
    for t, (p, q) in enumerate(zip(na, nb)):
        for r in range(p):
            for c in range(q):
                for c2 in range(q):
                    unit = np.zeros((big, big), dtype=complex)
                    unit[col_off[t] + c, col_off[t] + c2] = 1.0
                    ip[slot(t, r, c), slot(t, r, c2)] = unit.reshape(-1) @ pinv_b
    return HilbertBimodule(a, b, dim, left, right, ip)


def transport_rep(e: HilbertBimodule, rep: np.ndarray, tol=DEFAULT_TOL):
    """Induce a representation of A from a *-representation of B along e.

    ``rep`` has shape (dim B, d, d) with matrices forming a unital *-rep in
    the standard inner product.  Returns the induced bimodule over (A, C);
    its ``left`` tensor is the induced representation.
    """
    from .algebras import scalar_algebra

    rep = cmatrix(rep)
    d = rep.shape[1]
    f = HilbertBimodule(
        e.alg_b,
        scalar_algebra(),
        d,
        rep,
        np.eye(d, dtype=complex)[None, :, :],
        np.eye(d, dtype=complex)[:, :, None],
    )
    bad = validate_bimodule(f, tol)
    assert bad is None, f"representation is not a *-rep: {bad}"
    return interior_tensor(e, f, tol)


# ---------------------------------------------------------------------------
# unitary equivalence

def to_standard_coords(e: HilbertBimodule, tol=DEFAULT_TOL):
    """Coordinates in which the scalarized Gram is the identity; returns (e', w)."""
    g = scalar_gram(e)
    r, w = numkit.gram_quotient(g, tol)
    assert r == e.dim, "module is degenerate"
    winv = np.linalg.inv(w)
    left = np.einsum("pq,iqr,rs->ips", w, e.left, winv)
    right = np.einsum("pq,jqr,rs->jps", w, e.right, winv)
    ip = np.einsum("sa,tb,stk->abk", np.conj(winv), winv, e.ip)
    return HilbertBimodule(e.alg_a, e.alg_b, e.dim, left, right, ip), w


def bimodule_unitary_equivalent(
    e1: HilbertBimodule, e2: HilbertBimodule, tol=DEFAULT_TOL, seed: int = 0
):
    """Invertible bimodule map e1 -> e2 preserving the B-valued inner product.

    Returns the matrix in the original coordinates, or None.  The search runs
    in standard coordinates where a scalar-unitary intertwiner of the
    combined left/right actions automatically preserves the B-valued inner
    product (the state is faithful).
    """
    if e1.dim != e2.dim:
        return None
    if not (
        same_algebra(e1.alg_a, e2.alg_a, tol) and same_algebra(e1.alg_b, e2.alg_b, tol)
    ):
        return None
    s1, w1 = to_standard_coords(e1, tol)
    s2, w2 = to_standard_coords(e2, tol)
    gens1 = list(s1.left) + list(s1.right)
    gens2 = list(s2.left) + list(s2.right)
    u = numkit.unitary_intertwiner(gens1, gens2, tol, seed=seed)
    if u is None:
        return None
    d = np.einsum("sa,tb,stk->abk", np.conj(u), u, s2.ip) - s1.ip
    assert max_abs(d) <= 1e-7 * max(1.0, max_abs(s1.ip)), \
        "intertwiner does not preserve the inner product"
    return np.linalg.inv(w2) @ u @ w1
