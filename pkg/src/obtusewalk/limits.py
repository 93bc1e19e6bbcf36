"""Continuous-time limits of obtuse random walks.

Rescaling a walk with time step h multiplies the tensor entry S^{ij}_k by
h^{e_i + e_j - e_k}, with exponent 1 on the constant coordinate and 1/2 on
the others.  As h goes to zero only two entry classes survive: the matrix
Lambda^{ij} = lim S^{ij}_0 and the inner tensor M^{ij}_k = lim sqrt(h)
S^{ij}_k.  The limit tensor is doubly symmetric, Lambda is symmetric
unitary, and together they pin down the law of the limiting normal
martingale: jumps happen along the fixed points of M with Poisson rates
1/|v|^2; the remaining dimensions carry a rotated real Brownian motion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InconsistentCount,
    NoApparentLimit,
    NonPositiveStep,
    NotDoublySymmetric,
    StructureViolation,
)
from .obtuse import DEFAULT_TOL, Tensor3, check_symmetries
from .takagi import takagi
from .tensor import diagonalize

# successive extrapolation differences must shrink at least this fast; the
# exact asymptotic ratio on the default quarter grid is 2 for sqrt(h)
# families, so the gate leaves slack below it
_SHRINK_FACTOR = 1.6

DEFAULT_STEPS = tuple(0.1 * 4.0**-k for k in range(5))


def rescale_tensor(tensor: Tensor3, h: float) -> Tensor3:
    """Tensor of the rescaled variable: entries h^{e_i + e_j - e_k} S^{ij}_k."""
    if h <= 0:
        raise NonPositiveStep(f"time step must be positive, got {h}")
    if not tensor.has_constant:
        raise DimensionMismatch("rescaling applies to constant-coordinate tensors")
    d = tensor.dim
    eps = np.full(d, 0.5)
    eps[0] = 1.0
    expo = eps[:, None, None] + eps[None, :, None] - eps[None, None, :]
    return Tensor3(entries=(h**expo) * tensor.entries, has_constant=True)


@dataclass(frozen=True)
class TensorFamily:
    """A map h -> S(h) sampled on a decreasing grid of steps."""

    tensor_at: object  # callable h -> Tensor3
    steps: tuple

    def __post_init__(self):
        steps = tuple(float(h) for h in self.steps)
        if len(steps) < 3:
            raise DimensionMismatch("need at least 3 sample steps")
        if any(h <= 0 for h in steps) or any(
            a <= b for a, b in zip(steps, steps[1:])
        ):
            raise NonPositiveStep("steps must be positive and strictly decreasing")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def from_samples(cls, steps, tensors) -> "TensorFamily":
        steps = tuple(float(h) for h in steps)
        table = {h: t for h, t in zip(steps, tensors)}
        if len(table) != len(steps):
            raise DimensionMismatch("duplicate sample steps")
        return cls(tensor_at=table.__getitem__, steps=steps)

    @classmethod
    def constant(cls, tensor: Tensor3, steps=DEFAULT_STEPS) -> "TensorFamily":
        return cls(tensor_at=lambda h: tensor, steps=steps)

    def sample(self) -> list[Tensor3]:
        return [self.tensor_at(h) for h in self.steps]


def _extrapolate(values: np.ndarray, ratio: float, scale: float):
    """Limit of a sequence sampled on a geometric grid of steps.

    Assumes corrections in powers of sqrt(h): on a grid with step ratio
    ``ratio`` the m-th correction decays by ratio^{m/2} per sample, and is
    eliminated by one Richardson stage each.  Returns ``(limit, ok, worst)``
    where ``ok`` reports the successive-difference diagnostic and ``worst``
    the worst observed shrink ratio.
    """
    floor = 1e-11 * max(scale, 1.0)
    diffs = np.abs(np.diff(values))
    worst = 0.0
    ok = True
    for a, b in zip(diffs, diffs[1:]):
        if b <= floor:
            continue
        if a <= floor or b > a / _SHRINK_FACTOR:
            ok = False
            worst = max(worst, b / max(a, floor))
    if np.all(diffs <= floor):
        return complex(values[-1]), True, 0.0
    table = np.array(values, dtype=complex)
    level = 1
    while len(table) > 1:
        q = ratio ** (level / 2.0)
        table = (table[1:] - q * table[:-1]) / (1.0 - q)
        level += 1
    return complex(table[0]), ok, worst


@dataclass(frozen=True)
class LimitTensorResult:
    """Extrapolated limit tensor plus convergence diagnostics."""

    tensor: Tensor3
    lambda_matrix: np.ndarray
    worst_ratio: float
    worst_entry: tuple


def limit_tensor(family: TensorFamily, tol: float = DEFAULT_TOL) -> LimitTensorResult:
    """Extrapolate the limit tensor M from sampled rescaled walks.

    Entries M^{ij}_0 extrapolate S^{ij}_0(h); entries M^{ij}_k (all indices
    >= 1) extrapolate sqrt(h) S^{ij}_k(h); every other entry is forced to
    zero by the rescaling exponents and is asserted, not estimated.  Raises
    ``NoApparentLimit`` when successive differences of some entry stop
    shrinking, and ``NotDoublySymmetric`` if a sample violates the tensor
    symmetries.
    """
    steps = np.array(family.steps)
    samples = family.sample()
    d = samples[0].dim
    for h, s in zip(steps, samples):
        if s.dim != d or not s.has_constant:
            raise DimensionMismatch("family samples have inconsistent shape")
        rep = check_symmetries(s, tol=max(tol, 1e-8))
        if not rep.ok:
            raise NotDoublySymmetric(
                f"sample at h={h} violates tensor symmetries: {rep.residuals()}"
            )
    ratios = steps[1:] / steps[:-1]
    ratio = float(np.exp(np.mean(np.log(ratios))))

    stack = np.stack([s.entries for s in samples])  # (n_samples, d, d, d)
    scale = float(np.max(np.abs(stack)))
    entries = np.zeros((d, d, d), dtype=complex)
    worst_ratio = 0.0
    worst_entry = None
    for i in range(1, d):
        for j in range(1, d):
            seq = stack[:, i, j, 0]
            lim, ok, ratio_seen = _extrapolate(seq, ratio, scale)
            if not ok:
                raise NoApparentLimit(
                    f"entry ({i},{j},0) shows no convergent trend", entry=(i, j, 0)
                )
            entries[i, j, 0] = lim
            if ratio_seen > worst_ratio:
                worst_ratio, worst_entry = ratio_seen, (i, j, 0)
            for k in range(1, d):
                seq = np.sqrt(steps) * stack[:, i, j, k]
                lim, ok, ratio_seen = _extrapolate(seq, ratio, scale)
                if not ok:
                    raise NoApparentLimit(
                        f"entry ({i},{j},{k}) shows no convergent trend",
                        entry=(i, j, k),
                    )
                entries[i, j, k] = lim
                if ratio_seen > worst_ratio:
                    worst_ratio, worst_entry = ratio_seen, (i, j, k)

    tensor = Tensor3(entries=entries, has_constant=True)
    return LimitTensorResult(
        tensor=tensor,
        lambda_matrix=entries[1:, 1:, 0].copy(),
        worst_ratio=worst_ratio,
        worst_entry=worst_entry,
    )


@dataclass(frozen=True)
class LimitSymmetryReport:
    """Residuals of the limit-tensor structure relations.

    sym1..sym3 are the double-symmetry relations of the inner tensor;
    ``lambda_symmetry``/``lambda_unitarity`` check Lambda; ``exchange`` is
    the symmetry of sum_m M^{ij}_m Lambda^{mk} in (i, k); ``reduction`` is
    sum_m conj(M^{km}_j) Lambda^{im} = M^{ij}_k.
    """

    sym1: float
    sym2: float
    sym3: float
    lambda_symmetry: float
    lambda_unitarity: float
    exchange: float
    reduction: float
    tol: float

    def residuals(self) -> dict:
        return {
            "sym1": self.sym1,
            "sym2": self.sym2,
            "sym3": self.sym3,
            "lambda_symmetry": self.lambda_symmetry,
            "lambda_unitarity": self.lambda_unitarity,
            "exchange": self.exchange,
            "reduction": self.reduction,
        }

    @property
    def ok(self) -> bool:
        return max(self.residuals().values()) <= self.tol


def _split_limit(m) -> tuple[np.ndarray, np.ndarray]:
    """Inner entries and Lambda from either a full or an inner limit tensor."""
    if isinstance(m, LimitTensorResult):
        return m.tensor.entries[1:, 1:, 1:], m.lambda_matrix
    if isinstance(m, Tensor3):
        if m.has_constant:
            return m.entries[1:, 1:, 1:], m.entries[1:, 1:, 0].copy()
        raise DimensionMismatch(
            "an inner tensor alone does not determine Lambda; pass the full "
            "limit tensor (constant coordinate included)"
        )
    raise DimensionMismatch(f"unsupported limit tensor input {type(m)!r}")


def check_limit_symmetries(m, tol: float = DEFAULT_TOL) -> LimitSymmetryReport:
    """Structure-relation report for a limit tensor (report-only, no raise)."""
    inner, lam = _split_limit(m)
    n = inner.shape[0]
    rep = check_symmetries(Tensor3(inner, has_constant=False), tol=tol)
    lam_sym = float(np.max(np.abs(lam - lam.T)))
    lam_uni = float(np.max(np.abs(lam @ lam.conj().T - np.eye(n))))
    ex = np.einsum("ijm,mk->ijk", inner, lam)
    exchange = float(np.max(np.abs(ex - ex.transpose(2, 1, 0))))
    red = np.einsum("kmj,im->ijk", np.conj(inner), lam)
    reduction = float(np.max(np.abs(red - inner)))
    return LimitSymmetryReport(
        sym1=rep.sym1,
        sym2=rep.sym2,
        sym3=rep.sym3,
        lambda_symmetry=lam_sym,
        lambda_unitarity=lam_uni,
        exchange=exchange,
        reduction=reduction,
        tol=tol,
    )


@dataclass(frozen=True)
class LimitSpec:
    """Full description of a limiting normal martingale in C^N.

    ``poisson_dirs[m]`` jumps with rate ``intensities[m] = 1/|v|^2``;
    ``brownian_basis`` spans (orthonormally) the subspace carrying the
    Brownian part; ``v_matrix`` is a unitary with V V^T = Lambda rotating a
    real picture onto the complex one.
    """

    dim: int
    tensor: Tensor3  # inner tensor on {1..N}, no constant coordinate
    lambda_matrix: np.ndarray
    v_matrix: np.ndarray
    poisson_dirs: np.ndarray  # (K, N)
    intensities: np.ndarray  # (K,)
    brownian_basis: np.ndarray  # (N - K, N)

    @property
    def n_poisson(self) -> int:
        return len(self.poisson_dirs)

    @property
    def n_brownian(self) -> int:
        return len(self.brownian_basis)


def _real_complement(rows: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal real basis of the complement of the given real rows.

    Gram-Schmidt over the canonical basis vectors, keeping directions that
    survive projection removal.
    """
    basis = [r / np.linalg.norm(r) for r in rows]
    out = []
    for k in range(n):
        cand = np.zeros(n)
        cand[k] = 1.0
        for b in basis:
            cand = cand - np.dot(b, cand) * b
        norm = np.linalg.norm(cand)
        if norm > 1e-8:
            cand /= norm
            basis.append(cand)
            out.append(cand)
    return np.array(out) if out else np.zeros((0, n))


def classify(m, tol: float = DEFAULT_TOL, seed: int = 0) -> LimitSpec:
    """Split a limit tensor into Poisson directions and a Brownian subspace.

    The Poisson directions are the fixed points of the inner tensor; V comes
    from a Takagi factorization of Lambda.  The real pre-images V* v of the
    jump directions must be real vectors; their real orthocomplement, pushed
    forward by V, spans the Brownian part.  Dimensions always add up to N.
    """
    inner, lam = _split_limit(m)
    n = inner.shape[0]
    report = check_limit_symmetries(m, tol=max(tol, 1e-8))
    if not report.ok:
        raise StructureViolation(
            f"limit tensor fails structure relations: {report.residuals()}"
        )
    inner_t = Tensor3(inner, has_constant=False)
    diag = diagonalize(inner_t, tol=tol, seed=seed)
    dirs = diag.vectors
    if len(dirs) > n:
        raise InconsistentCount(f"{len(dirs)} jump directions in dimension {n}")

    v0 = takagi(lam, tol=max(tol, 1e-9)).unitary
    candidates = [v0]
    for k in range(min(n, 3)):
        flip = np.ones(n)
        flip[k] = -1.0
        candidates.append(v0 * flip[None, :])
    last_imag = None
    for v in candidates:
        w = dirs @ np.conj(v) if len(dirs) else np.zeros((0, n))
        imag = float(np.max(np.abs(w.imag))) if len(dirs) else 0.0
        if imag <= max(tol, 1e-7):
            w_real = w.real
            comp = _real_complement(w_real, n) if n else np.zeros((0, 0))
            brownian = comp @ v.T
            intensities = (
                1.0 / np.sum(np.abs(dirs) ** 2, axis=1) if len(dirs) else np.zeros(0)
            )
            if len(dirs) + len(brownian) != n:
                raise InconsistentCount(
                    f"{len(dirs)} jump + {len(brownian)} Brownian directions "
                    f"!= dimension {n}"
                )
            return LimitSpec(
                dim=n,
                tensor=inner_t,
                lambda_matrix=lam,
                v_matrix=v,
                poisson_dirs=dirs,
                intensities=intensities,
                brownian_basis=brownian,
            )
        last_imag = imag
    raise InconsistentCount(
        f"jump directions have no real pre-image under any Takagi branch "
        f"(residual {last_imag:.3e})"
    )
