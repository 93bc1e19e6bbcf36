"""Takagi factorization of complex symmetric matrices.

A complex symmetric M factors as M = U diag(d) U^T with U unitary and d real
nonnegative (the singular values of M).  The routine here goes through the
Hermitian positive-semidefinite matrix conj(M) M, whose eigenbasis gives
conj(U) up to a phase per eigenvector; phases are then fixed so the diagonal
becomes real nonnegative.  Clusters of equal singular values need one extra
step: on such a cluster the matrix acts as s times a unitary symmetric B,
and B itself splits as O D O^T with O real orthogonal and D unit-modulus
diagonal, because the real and imaginary parts of B are commuting real
symmetric matrices.

The simultaneous variant factorizes a whole commuting family with a single
unitary, by Takagi-factorizing a random generic linear combination and
verifying that it diagonalizes every member.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotCommuting, NotSymmetric
from .obtuse import DEFAULT_TOL

_CLUSTER_REL = 1e-10
# the squared route cannot resolve singular values below sqrt(eps) * s_max
_NULL_REL = 1e-8


@dataclass(frozen=True)
class TakagiResult:
    """Factorization M = unitary @ diag(diagonal) @ unitary.T."""

    unitary: np.ndarray
    diagonal: np.ndarray
    residual: float

    def reconstruct(self) -> np.ndarray:
        return self.unitary @ np.diag(self.diagonal) @ self.unitary.T


def _as_square(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


def _diag_unitary_symmetric(b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a unitary symmetric B as O @ diag(d) @ O.T, O real orthogonal.

    Re(B) and Im(B) are commuting real symmetric matrices (a consequence of
    B being unitary and symmetric), so a joint real eigenbasis exists: take
    the eigenbasis of Re(B) and re-diagonalize Im(B) inside each degenerate
    eigenspace.
    """
    x = np.ascontiguousarray(b.real)
    y = np.ascontiguousarray(b.imag)
    k = b.shape[0]
    _, o = np.linalg.eigh(x)
    # refine within degenerate blocks of Re(B) so Im(B) becomes diagonal too
    xv = np.diagonal(o.T @ x @ o).copy()
    start = 0
    while start < k:
        stop = start + 1
        while stop < k and xv[stop] - xv[start] <= 1e-8:
            stop += 1
        if stop - start > 1:
            block = o[:, start:stop]
            _, q = np.linalg.eigh(block.T @ y @ block)
            o[:, start:stop] = block @ q
        start = stop
    d = np.diagonal(o.T @ b @ o).copy()
    return o, d


def takagi(m, tol: float = DEFAULT_TOL) -> TakagiResult:
    """Takagi-factorize a complex symmetric matrix.

    Returns unitary U and real nonnegative d, sorted descending, with
    M = U diag(d) U^T.  Raises ``NotSymmetric`` when M is not symmetric within
    ``tol`` and ``NoConvergence`` if the final residual exceeds the tolerance
    (which indicates pathological input rather than an unlucky run: the
    algorithm is direct, not iterative).
    """
    arr = _as_square(m)
    n = arr.shape[0]
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    sym_defect = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
    if sym_defect > max(tol, tol * scale):
        raise NotSymmetric(f"matrix is not symmetric: defect {sym_defect:.3e}")
    arr = 0.5 * (arr + arr.T)

    h = np.conj(arr) @ arr
    eigvals, w = np.linalg.eigh(h)
    s = np.sqrt(np.clip(eigvals, 0.0, None))
    smax = float(s[-1]) if n else 0.0
    cluster_tol = max(smax * _CLUSTER_REL, 1e-14)
    null_tol = max(smax * _NULL_REL, 1e-14)

    cols = np.zeros((n, n), dtype=complex)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and s[stop] - s[start] <= cluster_tol:
            stop += 1
        wc = w[:, start:stop]
        s_rep = float(np.mean(s[start:stop]))
        if s_rep <= null_tol:
            cols[:, start:stop] = np.conj(wc)
        else:
            a = wc.T @ arr @ wc
            o, dphase = _diag_unitary_symmetric(a / s_rep)
            # snap phases onto the unit circle so the factor stays exactly
            # unitary even when s_rep carries eigensolver noise
            mod = np.abs(dphase)
            dphase = np.where(mod > 0, dphase / np.where(mod > 0, mod, 1.0), 1.0)
            g = o * np.sqrt(dphase)[None, :]
            cols[:, start:stop] = np.conj(wc) @ g
        start = stop

    # read the diagonal off M itself; the squared route above loses half the
    # significant digits on small singular values
    dvals = np.maximum(np.real(np.diagonal(cols.conj().T @ arr @ np.conj(cols))), 0.0)
    order = np.argsort(-dvals, kind="stable")
    u = cols[:, order]
    d = dvals[order]
    residual = float(np.max(np.abs(u @ np.diag(d) @ u.T - arr))) if n else 0.0
    if residual > max(tol, tol * scale):
        raise NoConvergence(
            f"factorization residual {residual:.3e} exceeds tolerance",
            residual=residual,
        )
    return TakagiResult(unitary=u, diagonal=d, residual=residual)


def commuting_check(family, tol: float = DEFAULT_TOL) -> float:
    """Max commutator norm over the family G = {conj(A_i) A_j}.

    This is the quantity whose vanishing characterizes simultaneous Takagi
    factorizability of the A_i.  The norm is the max absolute entry; ``tol``
    is unused in the computation and kept for interface symmetry.
    """
    mats = [_as_square(a) for a in family]
    if not mats:
        return 0.0
    dim = mats[0].shape[0]
    if any(a.shape[0] != dim for a in mats):
        raise DimensionMismatch("family members have different dimensions")
    g = [np.conj(a) @ b for a in mats for b in mats]
    worst = 0.0
    for i in range(len(g)):
        for j in range(i + 1, len(g)):
            worst = max(worst, float(np.max(np.abs(g[i] @ g[j] - g[j] @ g[i]))))
    return worst


def simultaneous_takagi(
    family, tol: float = DEFAULT_TOL, seed: int = 0, max_draws: int = 5
):
    """Joint Takagi factorization A_i = U D_i U^T of a commuting family.

    Every member must be complex symmetric and the family {conj(A_i) A_j}
    must commute (checked first).  A generic random real combination of the
    family is Takagi-factorized; with probability one its unitary also
    diagonalizes every member, which is verified explicitly and retried with
    a fresh draw on failure (up to ``max_draws`` draws, then
    ``NoConvergence``).  Randomness comes from a generator seeded with
    ``seed``, so results are reproducible.

    Returns ``(u, diags)`` with ``diags[i]`` the complex diagonal of
    ``u.conj().T @ family[i] @ u.conj()``; columns are ordered by descending
    singular value of the drawn combination.
    """
    mats = [_as_square(a) for a in family]
    if not mats:
        raise DimensionMismatch("need a non-empty family")
    dim = mats[0].shape[0]
    scale = max(float(np.max(np.abs(a))) for a in mats)
    for a in mats:
        if a.shape[0] != dim:
            raise DimensionMismatch("family members have different dimensions")
        defect = float(np.max(np.abs(a - a.T)))
        if defect > max(tol, tol * scale):
            raise NotSymmetric(f"family member not symmetric: defect {defect:.3e}")

    comm = commuting_check(mats, tol)
    if comm > max(tol, tol * max(scale, 1.0) ** 2):
        raise NotCommuting(f"conjugate-product family does not commute: {comm:.3e}")

    rng = np.random.default_rng(seed)
    threshold = max(tol, tol * scale)
    last_off = None
    for _ in range(max_draws):
        coeffs = rng.standard_normal(len(mats))
        combo = sum(c * a for c, a in zip(coeffs, mats))
        try:
            u = takagi(combo, tol).unitary
        except NoConvergence:
            continue
        ds = [u.conj().T @ a @ np.conj(u) for a in mats]
        off = max(
            float(np.max(np.abs(d - np.diag(np.diagonal(d))))) for d in ds
        )
        last_off = off
        if off <= threshold:
            diags = [np.diagonal(d).copy() for d in ds]
            return _normalize_joint(u, diags, scale)
    raise NoConvergence(
        f"no generic combination diagonalized the family in {max_draws} draws",
        residual=last_off,
    )


def _normalize_joint(u: np.ndarray, diags: list, scale: float):
    """Deterministic phase and ordering convention for a joint factorization.

    A column phase e^{i t} multiplies every diagonal value by e^{-2 i t}:
    rotate so the first significant diagonal value down the family becomes
    real nonnegative, resolve the leftover sign through the column's largest
    entry (sign flips leave the diagonals untouched), then order columns by
    descending modulus of the diagonal values, ties broken by phase angle.
    """
    u = u.copy()
    dim = u.shape[1]
    floor = 1e-9 * max(scale, 1.0)
    for m in range(dim):
        for d in diags:
            if abs(d[m]) > floor:
                theta = np.angle(d[m]) / 2.0
                u[:, m] *= np.exp(1j * theta)
                for dd in diags:
                    dd[m] *= np.exp(-2j * theta)
                break
        pivot = u[np.argmax(np.abs(u[:, m])), m]
        if pivot.real < 0 or (pivot.real == 0 and pivot.imag < 0):
            u[:, m] = -u[:, m]

    def column_key(m):
        key = []
        for d in diags:
            key.append(-round(abs(d[m]), 12))
            key.append(round(np.angle(d[m]) % (2.0 * np.pi), 12))
        return tuple(key)

    order = sorted(range(dim), key=column_key)
    return u[:, order], [d[list(order)] for d in diags]
