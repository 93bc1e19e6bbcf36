"""Complex obtuse systems and obtuse random variables.

An obtuse system in C^N is a family of N+1 vectors whose pairwise inner
products all equal -1 (inner products are conjugate-linear in the first
argument throughout).  Attaching the probabilities p_i = 1/(1 + |v_i|^2)
turns the family into the value set of a centered, normalized random
variable taking exactly N+1 values: an obtuse random variable.  This module
builds and validates these objects, computes the 3-tensor S^{ij}_k =
E[X^i X^j conj(X^k)] that encodes their multiplication algebra, checks its
symmetry relations, and implements the uniqueness and embedding results
that make obtuse variables generate all finitely supported ones.

All arrays are immutable by convention: no function mutates its inputs and
results are freshly allocated, so everything here is safe to use from
multiple threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousMatching,
    DimensionMismatch,
    MinimalSupport,
    NotObtuse,
    ProbabilityMismatch,
    SingularSystem,
)

DEFAULT_TOL = 1e-9

# probabilities closer than this are treated as tied when matching atoms
TIE_EPS = 1e-12


def _as_vectors(values) -> np.ndarray:
    """Stack a sequence of vectors into a complex (n, d) array."""
    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a family of vectors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch("vector entries must be finite")
    return arr


def inner(x, y) -> complex:
    """Inner product, conjugate-linear in the first argument."""
    return complex(np.vdot(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)))


def probabilities_of(values) -> np.ndarray:
    """p_i = 1/(1 + |v_i|^2) for each vector of the family."""
    arr = _as_vectors(values)
    return 1.0 / (1.0 + np.sum(np.abs(arr) ** 2, axis=1))


@dataclass(frozen=True)
class SystemValidation:
    """Residual report for an obtuse-system check.

    ``pair_residuals[i, j]`` is ``|<v_i, v_j> + 1|`` for i != j (zero on the
    diagonal).  The three aggregate residuals correspond to sum(p) = 1,
    sum(p v) = 0 and sum(p |v><v|) = I, which hold automatically for a true
    obtuse system.
    """

    probabilities: np.ndarray
    pair_residuals: np.ndarray
    prob_sum_residual: float
    mean_residual: float
    identity_residual: float
    tol: float

    @property
    def worst_pair(self) -> tuple[int, int]:
        i, j = divmod(int(np.argmax(self.pair_residuals)), self.pair_residuals.shape[1])
        return i, j

    @property
    def max_pair_residual(self) -> float:
        return float(np.max(self.pair_residuals))

    @property
    def ok(self) -> bool:
        return self.max_pair_residual <= self.tol


def validate_obtuse_system(values, tol: float = DEFAULT_TOL) -> SystemValidation:
    """Check that ``values`` is an obtuse system of C^N.

    Expects exactly N+1 non-zero vectors of dimension N.  Returns the derived
    probabilities together with the pairwise residuals |<v_i,v_j> + 1| and the
    residuals of the three derived identities.  Structural problems (wrong
    count, wrong dimension, zero vector) raise ``DimensionMismatch``; a mere
    failure of obtuseness is reported in the result, not raised.
    """
    arr = _as_vectors(values)
    n, d = arr.shape
    if n != d + 1:
        raise DimensionMismatch(f"need {d + 1} vectors in C^{d}, got {n}")
    norms2 = np.sum(np.abs(arr) ** 2, axis=1)
    if np.any(norms2 == 0.0):
        raise DimensionMismatch("obtuse systems contain no zero vector")

    gram = np.conj(arr) @ arr.T
    residuals = np.abs(gram + 1.0)
    np.fill_diagonal(residuals, 0.0)

    p = 1.0 / (1.0 + norms2)
    mean = p @ arr
    ident = np.einsum("m,mi,mj->ij", p, arr, np.conj(arr))
    return SystemValidation(
        probabilities=p,
        pair_residuals=residuals,
        prob_sum_residual=abs(float(np.sum(p)) - 1.0),
        mean_residual=float(np.linalg.norm(mean)),
        identity_residual=float(np.max(np.abs(ident - np.eye(d)))),
        tol=tol,
    )


@dataclass(frozen=True)
class ObtuseSystem:
    """An obtuse system: N+1 vectors of C^N plus their probabilities."""

    values: np.ndarray
    probabilities: np.ndarray

    @classmethod
    def from_values(cls, values, tol: float = DEFAULT_TOL) -> "ObtuseSystem":
        report = validate_obtuse_system(values, tol)
        if not report.ok:
            i, j = report.worst_pair
            raise NotObtuse(
                f"vectors {i} and {j} have inner product residual "
                f"{report.max_pair_residual:.3e} > {tol:.1e}",
                pair=(i, j),
                residual=report.max_pair_residual,
            )
        return cls(values=_as_vectors(values), probabilities=report.probabilities)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def hatted(self) -> np.ndarray:
        """The vectors (1, v_i) in C^{N+1}, stacked as rows."""
        n = self.values.shape[0]
        return np.hstack([np.ones((n, 1), dtype=complex), self.values])


@dataclass(frozen=True)
class ObtuseRV:
    """Obtuse random variable: an obtuse system read as a random variable.

    The atom i carries the value ``system.values[i]`` with probability
    ``system.probabilities[i]``.  The matrix with rows sqrt(p_i) (1, v_i) is
    unitary exactly when the underlying family is obtuse.
    """

    system: ObtuseSystem

    @classmethod
    def from_values(cls, values, tol: float = DEFAULT_TOL) -> "ObtuseRV":
        return cls(ObtuseSystem.from_values(values, tol))

    @property
    def dim(self) -> int:
        return self.system.dim

    @property
    def values(self) -> np.ndarray:
        return self.system.values

    @property
    def probabilities(self) -> np.ndarray:
        return self.system.probabilities

    @property
    def hatted(self) -> np.ndarray:
        return self.system.hatted

    def unitary_matrix(self) -> np.ndarray:
        """(N+1)x(N+1) matrix with rows sqrt(p_i) (1, v_i)."""
        return np.sqrt(self.probabilities)[:, None] * self.hatted

    def unitarity_defect(self) -> float:
        u = self.unitary_matrix()
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def rv_is_centered_normalized(values, probabilities, tol: float = DEFAULT_TOL):
    """Whether a finitely supported variable has mean 0 and covariance I.

    Works for any number of atoms n in C^d, not only n = d+1.  Returns
    ``(ok, mean_residual, covariance_residual)`` where the covariance is
    E[conj(X^i) X^j].
    """
    arr = _as_vectors(values)
    p = np.asarray(probabilities, dtype=float)
    if p.shape != (arr.shape[0],):
        raise DimensionMismatch("one probability per atom required")
    if np.any(p <= 0.0) or abs(float(np.sum(p)) - 1.0) > 1e-12:
        raise DimensionMismatch("probabilities must be positive and sum to 1")
    mean_res = float(np.linalg.norm(p @ arr))
    cov = np.einsum("m,mi,mj->ij", p, np.conj(arr), arr)
    cov_res = float(np.max(np.abs(cov - np.eye(arr.shape[1]))))
    return (mean_res <= tol and cov_res <= tol), mean_res, cov_res


# ---------------------------------------------------------------------------
# 3-tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tensor3:
    """Dense 3-tensor S^{ij}_k on C^D, stored as ``entries[i, j, k]``.

    ``has_constant`` marks whether index 0 plays the role of the constant
    coordinate X^0 = 1 (true for tensors of obtuse random variables, false
    e.g. for limit tensors restricted to the coordinates 1..N).
    """

    entries: np.ndarray
    has_constant: bool = True

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise DimensionMismatch(f"tensor entries must be a cube, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DimensionMismatch("tensor entries must be finite")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def slice(self, j: int) -> np.ndarray:
        """The matrix (S^{ij}_k)_{i,k} of the coordinate j."""
        return np.array(self.entries[:, j, :])

    def k_slice(self, k: int) -> np.ndarray:
        """The complex symmetric matrix S_k = (S^{ij}_k)_{i,j}."""
        return np.array(self.entries[:, :, k])

    def apply(self, x) -> np.ndarray:
        """Contract on the third index: (S(x))^{ij} = sum_k S^{ij}_k x^k."""
        vec = np.asarray(x, dtype=complex)
        if vec.shape != (self.dim,):
            raise DimensionMismatch(f"expected a vector of dimension {self.dim}")
        return self.entries @ vec


def tensor_of(rv: ObtuseRV) -> Tensor3:
    """The 3-tensor S^{ij}_k = E[X^i X^j conj(X^k)] of an obtuse variable.

    Indices run over 0..N with X^0 = 1, so the tensor lives on C^{N+1}.  It is
    the unique tensor with X^i X^j = sum_k S^{ij}_k X^k on the atoms.
    """
    vhat = rv.hatted
    p = rv.probabilities
    entries = np.einsum("m,mi,mj,mk->ijk", p, vhat, vhat, np.conj(vhat))
    return Tensor3(entries=entries, has_constant=True)


@dataclass(frozen=True)
class SymmetryReport:
    """Max-residuals of the four tensor symmetry relations.

    sym0: S^{i0}_k = delta_{ik} (only meaningful with a constant coordinate),
    sym1: symmetry of S^{ij}_k in (i, j),
    sym2: symmetry of sum_m S^{im}_j S^{kl}_m in (i, k),
    sym3: symmetry of sum_m S^{im}_j conj(S^{lm}_k) in (i, k).
    """

    sym0: float | None
    sym1: float
    sym2: float
    sym3: float
    tol: float

    @property
    def doubly_symmetric(self) -> bool:
        return max(self.sym1, self.sym2, self.sym3) <= self.tol

    @property
    def ok(self) -> bool:
        if self.sym0 is not None and self.sym0 > self.tol:
            return False
        return self.doubly_symmetric

    def residuals(self) -> dict:
        out = {"sym1": self.sym1, "sym2": self.sym2, "sym3": self.sym3}
        if self.sym0 is not None:
            out["sym0"] = self.sym0
        return out


def check_symmetries(
    tensor: Tensor3, tol: float = DEFAULT_TOL, include_constant: bool | None = None
) -> SymmetryReport:
    """Exhaustively sweep the four symmetry relations of a 3-tensor.

    ``include_constant`` defaults to the tensor's own flag; pass False to
    check only sym1-sym3 on a tensor that happens to carry the flag.
    """
    s = tensor.entries
    if include_constant is None:
        include_constant = tensor.has_constant
    sym0 = None
    if include_constant:
        sym0 = float(np.max(np.abs(s[:, 0, :] - np.eye(tensor.dim))))
    sym1 = float(np.max(np.abs(s - s.transpose(1, 0, 2)))) if tensor.dim else 0.0
    t2 = np.einsum("imj,klm->ijkl", s, s)
    sym2 = float(np.max(np.abs(t2 - t2.transpose(2, 1, 0, 3))))
    t3 = np.einsum("imj,lmk->ijlk", s, np.conj(s))
    sym3 = float(np.max(np.abs(t3 - t3.transpose(3, 1, 2, 0))))
    return SymmetryReport(sym0=sym0, sym1=sym1, sym2=sym2, sym3=sym3, tol=tol)


# ---------------------------------------------------------------------------
# Uniqueness and embedding
# ---------------------------------------------------------------------------


def _tie_blocks(sorted_probs: np.ndarray) -> list[list[int]]:
    """Consecutive index blocks of equal probabilities (within TIE_EPS)."""
    blocks = [[0]]
    for k in range(1, len(sorted_probs)):
        if sorted_probs[k] - sorted_probs[blocks[-1][0]] <= TIE_EPS:
            blocks[-1].append(k)
        else:
            blocks.append([k])
    return blocks


def relate_same_probabilities(x: ObtuseRV, y: ObtuseRV, tol: float = DEFAULT_TOL):
    """Unitary U on C^N with U v_i(x) = v_{sigma(i)}(y) for matched atoms.

    Two obtuse variables with the same probabilities differ by a unitary
    rotation of their values.  Atoms are matched by probability; blocks of
    tied probabilities are resolved by trying every matching of the block and
    keeping the first that produces a valid rotation.

    Returns ``(u, sigma)`` where ``sigma[i]`` is the atom of ``y`` matched to
    atom i of ``x``.
    """
    if x.dim != y.dim:
        raise DimensionMismatch("variables live in different dimensions")
    px, py = x.probabilities, y.probabilities
    order_x = np.argsort(px, kind="stable")
    order_y = np.argsort(py, kind="stable")
    if np.max(np.abs(px[order_x] - py[order_y])) > TIE_EPS:
        raise ProbabilityMismatch("probability multisets differ")

    blocks = _tie_blocks(px[order_x])
    wx = np.sqrt(px)[:, None] * x.hatted  # rows: orthonormal basis of C^{N+1}
    wy = np.sqrt(py)[:, None] * y.hatted

    def attempt(perm_per_block):
        sigma = np.empty(len(px), dtype=int)
        for block, perm in zip(blocks, perm_per_block):
            for pos, k in zip(block, perm):
                sigma[order_x[pos]] = order_y[block[k]]
        # unitary on C^{N+1} mapping sqrt(p_i) vhat_i(x) to the matched basis
        big = wy[sigma].T @ np.conj(wx)
        corner = max(
            abs(big[0, 0] - 1.0),
            float(np.max(np.abs(big[0, 1:]))),
            float(np.max(np.abs(big[1:, 0]))),
        )
        u = big[1:, 1:]
        if corner > max(tol, 1e-8):
            return None
        rot = x.values @ u.T
        if np.max(np.abs(rot - y.values[sigma])) > max(tol, 1e-8):
            return None
        return u, sigma

    for perms in itertools.product(
        *[itertools.permutations(range(len(b))) for b in blocks]
    ):
        result = attempt(perms)
        if result is not None:
            return result
    raise AmbiguousMatching(
        "no matching of equal-probability atoms yields a unitary relation"
    )


def embed_general(values, probabilities, y: ObtuseRV, tol: float = DEFAULT_TOL):
    """Matrix A with X = A Y for a general centered normalized variable X.

    X takes n values in C^d with the given probabilities; ``y`` must be an
    obtuse variable in C^{n-1} carrying the same probabilities atom by atom.
    The returned A is d x (n-1) and satisfies A A* = I_d: a partial isometry
    pushing Y forward onto X.
    """
    arr = _as_vectors(values)
    n, d = arr.shape
    p = np.asarray(probabilities, dtype=float)
    if n < d + 1:
        raise MinimalSupport(
            f"a centered normalized variable in C^{d} needs at least {d + 1} atoms"
        )
    if y.dim != n - 1:
        raise DimensionMismatch(f"the obtuse factor must live in C^{n - 1}")
    if p.shape != (n,) or np.max(np.abs(p - y.probabilities)) > TIE_EPS:
        raise ProbabilityMismatch("probabilities must match atom by atom")
    ok, mean_res, cov_res = rv_is_centered_normalized(arr, p, tol=max(tol, 1e-8))
    if not ok:
        raise DimensionMismatch(
            f"variable is not centered normalized (mean {mean_res:.2e}, "
            f"covariance {cov_res:.2e})"
        )

    w = y.values  # (n, n-1); the first n-1 rows are linearly independent
    try:
        a = np.linalg.solve(w[: n - 1], arr[: n - 1]).T
    except np.linalg.LinAlgError as exc:  # pragma: no cover - valid y prevents this
        raise SingularSystem("obtuse value matrix unexpectedly singular") from exc

    last_res = float(np.max(np.abs(a @ w[n - 1] - arr[n - 1])))
    iso_res = float(np.max(np.abs(a @ a.conj().T - np.eye(d))))
    if last_res > max(tol, 1e-8) or iso_res > max(tol, 1e-8):
        raise SingularSystem(
            f"embedding inconsistent (last atom {last_res:.2e}, isometry {iso_res:.2e})"
        )
    return a


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def system_from_probabilities(probabilities) -> ObtuseSystem:
    """The canonical real obtuse system with the given probabilities.

    Builds a real orthogonal matrix whose first column is (sqrt(p_i))_i; its
    rows, divided by sqrt(p_i) and stripped of the first coordinate, form a
    real obtuse system with probabilities p.
    """
    p = np.asarray(probabilities, dtype=float)
    if p.ndim != 1 or len(p) < 2:
        raise DimensionMismatch("need at least two probabilities")
    if np.any(p <= 0.0) or abs(float(np.sum(p)) - 1.0) > 1e-12:
        raise DimensionMismatch("probabilities must be positive and sum to 1")
    n = len(p)
    first = np.sqrt(p)
    basis = np.eye(n)[:, 1:]
    q, _ = np.linalg.qr(np.column_stack([first, basis]))
    if np.dot(q[:, 0], first) < 0:
        q = q * np.concatenate([[-1.0], np.ones(n - 1)])
    vhat = q / first[:, None]
    return ObtuseSystem(values=vhat[:, 1:].astype(complex), probabilities=p)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary: QR of a complex Gaussian, phases fixed."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_system(dim: int, rng: np.random.Generator) -> ObtuseSystem:
    """Random complex obtuse system in C^dim.

    Draws probabilities from a Dirichlet (kept away from degenerate corners),
    builds the canonical real system, then rotates by a random unitary.  All
    complex obtuse variables arise this way.
    """
    p = rng.dirichlet(np.full(dim + 1, 5.0))
    base = system_from_probabilities(p)
    u = haar_unitary(dim, rng)
    return ObtuseSystem(values=base.values @ u.T, probabilities=base.probabilities)
