"""Finite-dimensional *-algebras with a distinguished faithful state.

An algebra is a structure-constant tensor ``mult[i, j, k]`` (so that
``e_i e_j = sum_k mult[i, j, k] e_k``), a star matrix acting by
``x* = star @ conj(x)`` on coordinates, and a state row vector.  The state
must be positive and faithful: its Gram matrix ``G[i, j] = state(e_i* e_j)``
is Hermitian positive definite.  Optional block data exhibits the algebra as
a direct sum of matrix blocks through an explicit unital *-isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import DomainError, NotStarHom
from .numkit import DEFAULT_TOL, cmatrix, eps_of, max_abs


@dataclass
class BlockData:
    sizes: tuple[int, ...]
    images: np.ndarray  # (dim, D, D) block-diagonal matrices, D = sum(sizes)


@dataclass
class FdStarAlgebra:
    labels: tuple[str, ...]
    mult: np.ndarray  # (d, d, d)
    star: np.ndarray  # (d, d)
    state: np.ndarray  # (d,)
    blocks: BlockData | None = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def multiply(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.mult)

    def star_coords(self, x) -> np.ndarray:
        return self.star @ np.conj(x)

    def apply_state(self, x) -> complex:
        return complex(self.state @ x)

    def left_mult_matrix(self, x) -> np.ndarray:
        # (L_x)[k, j] = coords of x e_j
        return np.einsum("i,ijk->kj", x, self.mult)

    def right_mult_matrix(self, x) -> np.ndarray:
        # (R_x)[k, i] = coords of e_i x
        return np.einsum("j,ijk->ki", x, self.mult)

    def unit(self) -> np.ndarray:
        d = self.dim
        lhs = self.mult.reshape(d, d * d).T  # rows (j, k), unknown u_i
        rhs = np.eye(d, dtype=complex).reshape(d * d)
        u, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
        assert max_abs(lhs @ u - rhs) <= 1e-8, "algebra has no unit"
        return u

    def gram(self) -> np.ndarray:
        # G[i, j] = state(e_i* e_j), with e_i* = star[:, i]
        return np.einsum("ai,ajk,k->ij", self.star, self.mult, self.state)


def validate_algebra(a: FdStarAlgebra, tol=DEFAULT_TOL) -> str | None:
    eps = eps_of(tol)
    d = a.dim
    if a.mult.shape != (d, d, d) or a.star.shape != (d, d) or a.state.shape != (d,):
        return "shape mismatch between labels and tensors"
    scale = max(1.0, max_abs(a.mult)) ** 2
    assoc = np.einsum("ijm,mkl->ijkl", a.mult, a.mult) - np.einsum(
        "jkm,iml->ijkl", a.mult, a.mult
    )
    if max_abs(assoc) > 1e2 * eps * scale:
        return f"multiplication not associative (defect {max_abs(assoc):.2e})"
    invol = a.star @ np.conj(a.star) - np.eye(d)
    if max_abs(invol) > 1e2 * eps * scale:
        return "star is not an involution"
    # (e_i e_j)* = e_j* e_i*
    lhs = np.einsum("ijm,km->ijk", np.conj(a.mult), a.star)
    rhs = np.einsum("aj,bi,abk->ijk", a.star, a.star, a.mult)
    if max_abs(lhs - rhs) > 1e2 * eps * scale:
        return "star is not antimultiplicative"
    try:
        u = a.unit()
    except AssertionError:
        return "algebra has no unit"
    if max_abs(a.star_coords(u) - u) > 1e2 * eps * scale:
        return "unit is not self-adjoint"
    g = a.gram()
    if max_abs(g - g.conj().T) > 1e2 * eps * max(1.0, max_abs(g)):
        return "state Gram matrix is not Hermitian"
    try:
        r, _ = numkit.gram_quotient(g, tol)
    except Exception:
        return "state is not positive"
    if r != d:
        return "state is not faithful"
    if a.blocks is not None:
        msg = _validate_blocks(a, tol)
        if msg:
            return msg
    return None


def _validate_blocks(a: FdStarAlgebra, tol) -> str | None:
    eps = eps_of(tol)
    sizes = a.blocks.sizes
    images = cmatrix(a.blocks.images)
    big = sum(sizes)
    if images.shape != (a.dim, big, big):
        return "block images have wrong shape"
    if a.dim != sum(n * n for n in sizes):
        return "dimension does not match block sizes"
    offsets = np.cumsum([0] + list(sizes))
    off_diag = images.copy()
    for t in range(len(sizes)):
        lo, hi = offsets[t], offsets[t + 1]
        off_diag[:, lo:hi, lo:hi] = 0
    if max_abs(off_diag) > 1e2 * eps * max(1.0, max_abs(images)):
        return "block images are not block diagonal"
    if numkit.rank(images.reshape(a.dim, big * big), tol) != a.dim:
        return "block map is not injective"
    unit_img = np.einsum("i,ipq->pq", a.unit(), images)
    if max_abs(unit_img - np.eye(big)) > 1e3 * eps * max(1.0, max_abs(images)):
        return "block map is not unital"
    scale = max(1.0, max_abs(images)) ** 2
    prod = np.einsum("ipq,jqr->ijpr", images, images)
    via = np.einsum("ijk,kpr->ijpr", a.mult, images)
    if max_abs(prod - via) > 1e3 * eps * scale * max(1.0, max_abs(a.mult)):
        return "block map is not multiplicative"
    starred = np.einsum("ai,apq->ipq", a.star, images)
    if max_abs(starred - np.conj(np.transpose(images, (0, 2, 1)))) > 1e3 * eps * scale:
        return "block map does not intertwine the stars"
    return None


# ---------------------------------------------------------------------------
# constructors

def _structure_from_images(images: np.ndarray):
    d = images.shape[0]
    flat = images.reshape(d, -1)
    pinv = np.linalg.pinv(flat)
    prod = np.einsum("ipq,jqr->ijpr", images, images).reshape(d * d, -1)
    mult = (prod @ pinv).reshape(d, d, d)
    scale = max(1.0, max_abs(images)) ** 2
    assert max_abs(prod - mult.reshape(d * d, d) @ flat) <= 1e-8 * scale, \
        "span is not closed under multiplication"
    adj = np.conj(np.transpose(images, (0, 2, 1))).reshape(d, -1)
    star = np.empty((d, d), dtype=complex)
    for j in range(d):
        star[:, j] = adj[j] @ pinv
    assert max_abs(adj - (star.T @ flat)) <= 1e-8 * scale, \
        "span is not closed under adjoints"
    return mult, star


def block_algebra(sizes) -> FdStarAlgebra:
    """Direct sum of full matrix blocks in the matrix-unit basis.

    The state is the block-normalized trace ``a -> sum_t tr(a_t) / n_t``.
    """
    sizes = tuple(int(n) for n in sizes)
    assert sizes and all(n >= 1 for n in sizes)
    big = sum(sizes)
    offsets = np.cumsum([0] + list(sizes))
    labels, mats, state = [], [], []
    for t, n in enumerate(sizes):
        for i in range(n):
            for j in range(n):
                labels.append(f"b{t}E{i}_{j}" if len(sizes) > 1 else f"E{i}_{j}")
                m = np.zeros((big, big), dtype=complex)
                m[offsets[t] + i, offsets[t] + j] = 1.0
                mats.append(m)
                state.append(1.0 / n if i == j else 0.0)
    images = np.stack(mats)
    mult, star = _structure_from_images(images)
    # matrix units have exact 0/1 structure constants; snap lstsq noise
    mult = np.round(mult.real, 12).astype(complex)
    star = np.round(star.real, 12).astype(complex)
    return FdStarAlgebra(
        tuple(labels),
        mult,
        star,
        np.asarray(state, dtype=complex),
        BlockData(sizes, images),
    )


def scalar_algebra() -> FdStarAlgebra:
    return block_algebra((1,))


def matrix_algebra(n: int) -> FdStarAlgebra:
    return block_algebra((n,))


def algebra_from_matrix_basis(
    mats, labels=None, state=None, blocks_sizes=None, tol=DEFAULT_TOL
) -> FdStarAlgebra:
    """Algebra spanned by linearly independent matrices closed under * and product.

    The default state is the plain matrix trace, which is faithful whenever
    the span is a *-closed algebra of matrices.
    """
    images = np.stack([cmatrix(m) for m in mats])
    d = images.shape[0]
    assert numkit.rank(images.reshape(d, -1), tol) == d, "matrix basis is dependent"
    mult, star = _structure_from_images(images)
    if labels is None:
        labels = tuple(f"m{i}" for i in range(d))
    if state is None:
        state = np.einsum("ipp->i", images)
    blocks = BlockData(tuple(blocks_sizes), images) if blocks_sizes is not None else None
    return FdStarAlgebra(
        tuple(labels), mult, star, np.asarray(state, dtype=complex), blocks
    )


def basis_change(a: FdStarAlgebra, m: np.ndarray, labels=None) -> FdStarAlgebra:
    """Same algebra in the basis f_j = sum_i m[i, j] e_i (m invertible)."""
    m = cmatrix(m)
    minv = np.linalg.inv(m)
    mult = np.einsum("ai,bj,abc,kc->ijk", m, m, a.mult, minv)
    star = minv @ a.star @ np.conj(m)
    state = a.state @ m
    blocks = None
    if a.blocks is not None:
        blocks = BlockData(
            a.blocks.sizes, np.einsum("ai,apq->ipq", m, a.blocks.images)
        )
    if labels is None:
        labels = tuple(f"f{i}" for i in range(a.dim))
    return FdStarAlgebra(tuple(labels), mult, star, state, blocks)


# ---------------------------------------------------------------------------
# structure helpers

def center_basis(a: FdStarAlgebra, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal coordinate basis of the center, as columns."""
    d = a.dim
    rows = []
    eye = np.eye(d, dtype=complex)
    for j in range(d):
        lj = a.left_mult_matrix(eye[:, j])
        rj = a.right_mult_matrix(eye[:, j])
        rows.append(lj - rj)
    return numkit.nullspace(np.vstack(rows), tol)


def is_tracial(a: FdStarAlgebra, tol=DEFAULT_TOL) -> bool:
    t = np.einsum("ijk,k->ij", a.mult, a.state)
    return max_abs(t - t.T) <= 1e2 * eps_of(tol) * max(1.0, max_abs(t))


def central_block_projections(a: FdStarAlgebra, tol=DEFAULT_TOL) -> list[np.ndarray]:
    """Coordinates of the minimal central projections, one per block."""
    if a.blocks is None:
        raise DomainError("algebra carries no block data")
    sizes = a.blocks.sizes
    big = sum(sizes)
    offsets = np.cumsum([0] + list(sizes))
    flat = a.blocks.images.reshape(a.dim, big * big)
    out = []
    for t, n in enumerate(sizes):
        target = np.zeros((big, big), dtype=complex)
        target[offsets[t] : offsets[t + 1], offsets[t] : offsets[t + 1]] = np.eye(n)
        coords, *_ = np.linalg.lstsq(flat.T, target.reshape(-1), rcond=None)
        assert max_abs(flat.T @ coords - target.reshape(-1)) <= 1e-8
        out.append(coords)
    return out


def block_hom(
    a: FdStarAlgebra, b: FdStarAlgebra, mult_matrix, tol=DEFAULT_TOL
) -> np.ndarray:
    """Unital *-homomorphism a -> b with the given block multiplicities.

    ``mult_matrix[j][i]`` copies of block i of ``a`` sit inside block j of
    ``b``; unitality forces ``sum_i m[j][i] n_i == p_j`` for every j.
    """
    if a.blocks is None or b.blocks is None:
        raise DomainError("block homs need block data on both algebras")
    m = np.asarray(mult_matrix, dtype=int)
    na, nb = a.blocks.sizes, b.blocks.sizes
    if m.shape != (len(nb), len(na)) or (m < 0).any():
        raise DomainError("multiplicity matrix has wrong shape or negative entries")
    for j, p in enumerate(nb):
        if sum(int(m[j, i]) * na[i] for i in range(len(na))) != p:
            raise DomainError(f"multiplicities do not fill block {j}")
    big_b = sum(nb)
    flat_b = b.blocks.images.reshape(b.dim, big_b * big_b)
    pinv_b = np.linalg.pinv(flat_b)
    hom = np.empty((b.dim, a.dim), dtype=complex)
    for idx in range(a.dim):
        blocks_a = _split_blocks(a.blocks.images[idx], na)
        target_blocks = []
        for j in range(len(nb)):
            pieces = []
            for i in range(len(na)):
                pieces.extend([blocks_a[i]] * int(m[j, i]))
            target_blocks.append(_blockdiag(pieces, nb[j]))
        target = _blockdiag(target_blocks, big_b)
        coords = target.reshape(-1) @ pinv_b
        assert max_abs(flat_b.T @ coords - target.reshape(-1)) <= 1e-8
        hom[:, idx] = coords
    return hom


def _split_blocks(mat: np.ndarray, sizes) -> list[np.ndarray]:
    offsets = np.cumsum([0] + list(sizes))
    return [
        mat[offsets[t] : offsets[t + 1], offsets[t] : offsets[t + 1]]
        for t in range(len(sizes))
    ]


def _blockdiag(pieces, expect: int) -> np.ndarray:
    total = sum(p.shape[0] for p in pieces)
    assert total == expect
    out = np.zeros((expect, expect), dtype=complex)
    pos = 0
    for p in pieces:
        k = p.shape[0]
        out[pos : pos + k, pos : pos + k] = p
        pos += k
    return out


def is_star_hom(
    a: FdStarAlgebra, b: FdStarAlgebra, hom: np.ndarray, tol=DEFAULT_TOL
) -> bool:
    eps = eps_of(tol)
    scale = max(1.0, max_abs(hom)) ** 2
    unital = max_abs(hom @ a.unit() - b.unit()) <= 1e3 * eps * scale
    mult = np.einsum("ijk,pk->ijp", a.mult, hom) - np.einsum(
        "pi,qj,pqr->ijr", hom, hom, b.mult
    )
    multiplicative = max_abs(mult) <= 1e3 * eps * scale * max(1.0, max_abs(a.mult))
    star = max_abs(hom @ a.star - b.star @ np.conj(hom)) <= 1e3 * eps * scale
    return unital and multiplicative and star


def check_star_hom(a, b, hom, tol=DEFAULT_TOL) -> None:
    if not is_star_hom(a, b, hom, tol):
        raise NotStarHom("map is not a unital *-homomorphism")
