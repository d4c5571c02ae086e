"""Dense complex linear algebra on one absolute tolerance.

Matrices are plain complex ndarrays.  Every rank decision runs column-pivoted
Gram-Schmidt and every positivity decision runs pivoted Cholesky, so nothing
in the package depends on an eigensolver.  LAPACK is still used for plain
linear solves (``solve``/``lstsq``/``inv``), which decide nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPSD

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Tolerance:
    """Absolute comparison threshold used throughout the package."""

    eps: float = DEFAULT_TOL

    def __post_init__(self):
        assert self.eps > 0.0


def eps_of(tol) -> float:
    return tol.eps if isinstance(tol, Tolerance) else float(tol)


def cmatrix(a) -> np.ndarray:
    """Coerce to a complex ndarray and insist every entry is finite."""
    arr = np.asarray(a, dtype=complex)
    assert np.isfinite(arr).all(), "non-finite matrix entry"
    return arr


def max_abs(a) -> float:
    arr = np.asarray(a)
    return 0.0 if arr.size == 0 else float(np.abs(arr).max())


def orthonormal_rows(rows, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the row span, by column-pivoted Gram-Schmidt.

    Rows whose residual norm falls at or below the tolerance are treated as
    dependent.  Returns a (rank, n) array; the basis is deterministic for a
    fixed input.
    """
    eps = eps_of(tol)
    work = cmatrix(np.atleast_2d(rows)).copy()
    m, n = work.shape
    out: list[np.ndarray] = []
    if m == 0 or n == 0:
        return np.zeros((0, n), dtype=complex)
    norms = np.linalg.norm(work, axis=1)
    for _ in range(min(m, n)):
        k = int(np.argmax(norms))
        if norms[k] <= eps:
            break
        q = work[k].copy()
        for prev in out:  # second pass keeps accepted rows orthonormal
            q -= np.vdot(prev, q) * prev
        nq = np.linalg.norm(q)
        norms[k] = 0.0
        if nq <= eps:
            continue
        q /= nq
        out.append(q)
        coeff = work @ q.conj()
        work -= np.outer(coeff, q)
        norms = np.linalg.norm(work, axis=1)
        norms[k] = 0.0
    if not out:
        return np.zeros((0, n), dtype=complex)
    return np.array(out)


def rank(a, tol=DEFAULT_TOL) -> int:
    return orthonormal_rows(a, tol).shape[0]


def nullspace(a, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ker(a), returned as the columns of an (n, k) array.

    The kernel of A equals the kernel of the Hermitian matrix A*A, whose row
    span is the orthogonal complement of the kernel; the basis is the pivoted
    Gram-Schmidt complement of that span.
    """
    eps = eps_of(tol)
    a = cmatrix(np.atleast_2d(a))
    m, n = a.shape
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if m == 0:
        return np.eye(n, dtype=complex)
    h = a.conj().T @ a
    q = orthonormal_rows(h, tol)
    k = n - q.shape[0]
    if k == 0:
        return np.zeros((n, 0), dtype=complex)
    res = np.eye(n, dtype=complex)
    if q.shape[0]:
        res -= (res @ q.conj().T) @ q
    basis = orthonormal_rows(res, tol)
    assert basis.shape[0] >= k
    # rows orthogonal to rows(h) solve conj(h) v = 0; conjugate to hit ker(h)
    basis = np.conj(basis[:k])
    scale = max(1.0, max_abs(a))
    resid = max_abs(a @ basis.T)
    assert resid <= 1e4 * eps * scale, f"nullspace residual {resid:.3e}"
    return basis.T.copy()


def gram_quotient(g, tol=DEFAULT_TOL) -> tuple[int, np.ndarray]:
    """Pivoted-Cholesky factor of a PSD Gram matrix, dropping the null space.

    Returns ``(dim, coords)`` with ``coords`` of shape (dim, n) and
    ``coords* coords ~= g``; the quotient map sends the j-th generator to
    ``coords[:, j]``.  Raises NotPSD when elimination exposes a diagonal
    entry below -tol (Cholesky failure), or when tiny-diagonal leftovers
    carry non-negligible off-diagonal mass (hidden indefiniteness).
    """
    eps = eps_of(tol)
    g = cmatrix(np.atleast_2d(g))
    n = g.shape[0]
    assert g.shape == (n, n), "Gram matrix must be square"
    herm_defect = max_abs(g - g.conj().T)
    assert herm_defect <= 1e2 * eps * max(1.0, max_abs(g)), (
        f"Gram matrix not Hermitian (defect {herm_defect:.3e})"
    )
    s = 0.5 * (g + g.conj().T)
    live = np.ones(n, dtype=bool)
    rows: list[np.ndarray] = []
    for _ in range(n):
        diag = np.where(live, s.diagonal().real, -np.inf)
        k = int(np.argmax(diag))
        piv = diag[k]
        if piv <= eps:
            break
        row = s[k] / np.sqrt(piv)
        rows.append(row)
        live[k] = False
        s = s - np.outer(row.conj(), row)
        s[k, :] = 0.0
        s[:, k] = 0.0
    if live.any():
        rest = s[np.ix_(live, live)]
        d = rest.diagonal().real
        if d.size and d.min() < -eps:
            raise NotPSD(f"negative pivot {d.min():.3e}")
        if max_abs(rest) > 1e2 * eps:
            raise NotPSD(f"indefinite leftover of size {max_abs(rest):.3e}")
    coords = np.array(rows) if rows else np.zeros((0, n), dtype=complex)
    assert max_abs(coords.conj().T @ coords - 0.5 * (g + g.conj().T)) <= 1e4 * eps * max(
        1.0, max_abs(g)
    )
    return coords.shape[0], coords


def quotient_pinv(coords) -> np.ndarray:
    """Right inverse of a full-row-rank quotient map (n, r array)."""
    coords = cmatrix(coords)
    gram = coords @ coords.conj().T
    return coords.conj().T @ np.linalg.inv(gram)


def descend_operator(coords, pinv, big, tol=DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Push an operator through a quotient map; residual measures invariance.

    ``small = coords @ big @ pinv`` satisfies ``small @ coords == coords @ big``
    exactly when ``big`` preserves the kernel of the quotient.
    """
    small = coords @ big @ pinv
    residual = max_abs(small @ coords - coords @ big)
    return small, residual


def kernel_of_normal(h, tol=DEFAULT_TOL) -> np.ndarray:
    """Orthonormal kernel basis (columns) of a Hermitian PSD matrix.

    Intended for summed normal matrices B_i* B_i, whose joint kernel this
    extracts without ever stacking the B_i.  The pivoted Gram-Schmidt
    complement runs directly on the rows, so thresholds apply at the
    matrix's own scale rather than its square.
    """
    eps = eps_of(tol)
    h = cmatrix(h)
    n = h.shape[0]
    assert h.shape == (n, n)
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    scale = max(1.0, max_abs(h))
    assert max_abs(h - h.conj().T) <= 1e3 * eps * scale, "normal matrix is not Hermitian"
    q = orthonormal_rows(h, tol)
    k = n - q.shape[0]
    if k == 0:
        return np.zeros((n, 0), dtype=complex)
    res = np.eye(n, dtype=complex)
    res -= (res @ q.conj().T) @ q
    basis = orthonormal_rows(res, tol)
    assert basis.shape[0] >= k
    # rows orthogonal to rows(h) solve conj(h) v = 0; conjugate to hit ker(h)
    basis = np.conj(basis[:k]).T.copy()
    resid = max_abs(h @ basis)
    assert resid <= 1e4 * eps * scale, f"kernel residual {resid:.3e}"
    return basis


def commutant(gens, tol=DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal (Frobenius) basis of {X : Xg = gX for all generators}."""
    mats = [cmatrix(m) for m in gens]
    assert mats, "need at least one generator"
    d = mats[0].shape[0]
    eye = np.eye(d, dtype=complex)
    # normal matrix of the stacked maps X -> gX - Xg, assembled kron by kron
    h = np.zeros((d * d, d * d), dtype=complex)
    for m in mats:
        h += np.kron(m.conj().T @ m, eye)
        h -= np.kron(m.conj().T, m.T)
        h -= np.kron(m, np.conj(m))
        h += np.kron(eye, np.conj(m) @ m.T)
    basis = kernel_of_normal(h, tol)
    return [basis[:, j].reshape(d, d) for j in range(basis.shape[1])]


def intertwiner_space(reps_a, reps_b, tol=DEFAULT_TOL) -> list[np.ndarray]:
    """Basis of {T : T a_i = b_i T} for two matrix tuples of equal length."""
    reps_a = [cmatrix(m) for m in reps_a]
    reps_b = [cmatrix(m) for m in reps_b]
    assert len(reps_a) == len(reps_b)
    d1 = reps_a[0].shape[0] if reps_a else 0
    d2 = reps_b[0].shape[0] if reps_b else 0
    eye1 = np.eye(d1, dtype=complex)
    eye2 = np.eye(d2, dtype=complex)
    # normal matrix of the stacked maps T -> Ta - bT
    h = np.zeros((d2 * d1, d2 * d1), dtype=complex)
    for a, b in zip(reps_a, reps_b):
        h += np.kron(eye2, np.conj(a) @ a.T)
        h -= np.kron(b, np.conj(a))
        h -= np.kron(b.conj().T, a.T)
        h += np.kron(b.conj().T @ b, eye1)
    basis = kernel_of_normal(h, tol)
    return [basis[:, j].reshape(d2, d1) for j in range(basis.shape[1])]


def polar_unitary(x, iters: int = 100) -> np.ndarray:
    """Unitary polar factor via the Newton inverse iteration U <- (U + U^-*)/2."""
    u = cmatrix(x)
    n = u.shape[0]
    assert u.shape == (n, n)
    u = u / max(np.linalg.norm(u) / max(np.sqrt(n), 1.0), 1e-30)
    for _ in range(iters):
        v = np.linalg.inv(u).conj().T
        nxt = 0.5 * (u + v)
        if max_abs(nxt - u) < 1e-14 * max(1.0, max_abs(nxt)):
            u = nxt
            break
        u = nxt
    defect = max_abs(u.conj().T @ u - np.eye(n))
    if not np.isfinite(defect) or defect > 1e-10:
        raise np.linalg.LinAlgError(f"polar iteration did not converge ({defect:.3e})")
    return u


def unitary_intertwiner(reps_a, reps_b, tol=DEFAULT_TOL, seed: int = 0, tries: int = 12):
    """Unitary T with T a_i = b_i T, or None.

    Searches the intertwiner span for a unitary element by polar-correcting
    random elements; sound for *-closed generator spans, and self-validating
    in general because the residuals below are always checked.
    """
    eps = eps_of(tol)
    reps_a = [cmatrix(m) for m in reps_a]
    reps_b = [cmatrix(m) for m in reps_b]
    d1 = reps_a[0].shape[0] if reps_a else 0
    d2 = reps_b[0].shape[0] if reps_b else 0
    if d1 != d2:
        return None
    if d1 == 0:
        return np.zeros((0, 0), dtype=complex)
    basis = intertwiner_space(reps_a, reps_b, tol)
    if not basis:
        return None
    scale = max(1.0, max(max_abs(m) for m in reps_a + reps_b))
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        coeff = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        t = sum(c * m for c, m in zip(coeff, basis))
        try:
            u = polar_unitary(t)
        except np.linalg.LinAlgError:
            continue
        resid = max(max_abs(u @ a - b @ u) for a, b in zip(reps_a, reps_b))
        if resid <= 1e3 * eps * scale:
            return u
    return None


def coeffs_in_span(mats, target, tol=DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of target in span(mats), plus max-abs residual."""
    mats = [cmatrix(m) for m in mats]
    target = cmatrix(target)
    cols = np.stack([m.ravel() for m in mats], axis=1)
    rhs = target.ravel()
    coeff, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
    residual = max_abs(cols @ coeff - rhs)
    return coeff, residual


def frob_onb(mats, tol=DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormalize a family of matrices in the Frobenius inner product."""
    mats = [cmatrix(m) for m in mats]
    if not mats:
        return []
    shape = mats[0].shape
    flat = np.stack([m.ravel() for m in mats])
    basis = orthonormal_rows(flat, tol)
    return [basis[j].reshape(shape) for j in range(basis.shape[0])]


def span_dim(mats, tol=DEFAULT_TOL) -> int:
    mats = [cmatrix(m) for m in mats]
    if not mats:
        return 0
    return rank(np.stack([m.ravel() for m in mats]), tol)


def spans_equal(mats_a, mats_b, tol=DEFAULT_TOL) -> bool:
    """Mutual containment of two matrix spans, decided by membership residuals."""
    eps = eps_of(tol)
    mats_a = [cmatrix(m) for m in mats_a]
    mats_b = [cmatrix(m) for m in mats_b]
    if span_dim(mats_a, tol) != span_dim(mats_b, tol):
        return False
    if not mats_a:
        return True
    scale = max(1.0, max(max_abs(m) for m in mats_a + mats_b))
    for m in mats_a:
        _, resid = coeffs_in_span(mats_b, m, tol)
        if resid > 1e3 * eps * scale:
            return False
    for m in mats_b:
        _, resid = coeffs_in_span(mats_a, m, tol)
        if resid > 1e3 * eps * scale:
            return False
    return True
