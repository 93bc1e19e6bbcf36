"""Seeded Monte-Carlo simulation of obtuse walks and their limit martingales.

Walks are sums of sqrt(h)-scaled i.i.d. obtuse variables; limit processes
are built exactly from their classification: independent real Brownian
motions along the Brownian basis plus independent compensated Poisson
processes (exponential interarrivals, rate 1/|v|^2) along each jump
direction.  No Euler discretization error enters anywhere: Gaussian
increments are exact per time step and jump times are exact.

RNG contract: all randomness comes from ``numpy.random.default_rng`` seeded
with ``[seed, path_index]`` (a ``SeedSequence`` over both words), so path k
of a given seed is an independent, reproducible substream and paths can be
generated in parallel.  Ensemble helpers are vectorized over paths and use
the single stream ``[seed]``; they draw sufficient statistics (multinomial
atom counts, Poisson interval counts) and are therefore exact in
distribution at the requested grid times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonPositiveStep, TooFewIncrements
from .limits import LimitSpec
from .obtuse import ObtuseRV


def _substream(seed: int, path_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, path_index])


@dataclass(frozen=True)
class Path:
    """A sampled trajectory in C^N.

    ``values[k]`` is the state at ``times[k]``; walks carry uniform spacing
    h.  For limit paths, ``jump_times``/``jump_dirs`` log every Poisson jump
    (direction index into the generating spec), which makes the jump
    structure testable.
    """

    times: np.ndarray
    values: np.ndarray
    kind: str
    jump_times: np.ndarray | None = None
    jump_dirs: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)


def walk_path(rv: ObtuseRV, h: float, T: float, seed: int = 0, path_index: int = 0) -> Path:
    """One trajectory of the rescaled walk sum sqrt(h) X_1 + ... on [0, T]."""
    if h <= 0:
        raise NonPositiveStep(f"time step must be positive, got {h}")
    if T < h:
        raise NonPositiveStep("horizon T must cover at least one step")
    n = int(np.floor(T / h + 1e-12))
    rng = _substream(seed, path_index)
    atoms = rng.choice(len(rv.probabilities), size=n, p=rv.probabilities)
    increments = np.sqrt(h) * rv.values[atoms]
    values = np.vstack([np.zeros((1, rv.dim), dtype=complex), np.cumsum(increments, axis=0)])
    times = np.arange(n + 1) * h
    return Path(times=times, values=values, kind="walk")


def limit_path(spec: LimitSpec, T: float, dt: float, seed: int = 0, path_index: int = 0) -> Path:
    """One trajectory of the limit martingale, sampled on a dt-grid.

    Brownian increments are exact Gaussians; each Poisson direction jumps at
    exponential interarrival times with rate = intensity and contributes its
    compensated count times the direction vector.
    """
    if dt <= 0:
        raise NonPositiveStep(f"grid step must be positive, got {dt}")
    if T <= 0:
        raise NonPositiveStep("horizon T must be positive")
    n = max(1, int(round(T / dt)))
    times = np.arange(n + 1) * dt
    t_end = times[-1]
    rng = _substream(seed, path_index)

    values = np.zeros((n + 1, spec.dim), dtype=complex)
    if spec.n_brownian:
        db = rng.normal(0.0, np.sqrt(dt), size=(n, spec.n_brownian))
        b = np.vstack([np.zeros((1, spec.n_brownian)), np.cumsum(db, axis=0)])
        values = values + b @ spec.brownian_basis

    all_jump_times: list[np.ndarray] = []
    all_jump_dirs: list[np.ndarray] = []
    for m, (v, lam) in enumerate(zip(spec.poisson_dirs, spec.intensities)):
        jumps = []
        t = rng.exponential(1.0 / lam)
        while t <= t_end:
            jumps.append(t)
            t += rng.exponential(1.0 / lam)
        jumps = np.array(jumps)
        counts = np.searchsorted(jumps, times, side="right")
        values = values + np.outer(counts - lam * times, v)
        all_jump_times.append(jumps)
        all_jump_dirs.append(np.full(len(jumps), m, dtype=int))

    if all_jump_times:
        jt = np.concatenate(all_jump_times)
        jd = np.concatenate(all_jump_dirs)
        order = np.argsort(jt)
        jt, jd = jt[order], jd[order]
    else:
        jt = np.zeros(0)
        jd = np.zeros(0, dtype=int)
    return Path(times=times, values=values, kind="limit", jump_times=jt, jump_dirs=jd)


def _grid_steps(t_grid, h: float) -> np.ndarray:
    steps = np.floor(np.asarray(t_grid, dtype=float) / h + 1e-9).astype(int)
    if np.any(steps < 0) or np.any(np.diff(steps) < 0):
        raise DimensionMismatch("time grid must be nonnegative and increasing")
    return steps


def walk_ensemble(rv: ObtuseRV, h: float, t_grid, n_paths: int, seed: int = 0) -> np.ndarray:
    """Walk values at the grid times for many paths, shape (n_paths, n_t, N).

    Exact in distribution: between grid times only the multinomial counts of
    atoms matter, and those are drawn directly.
    """
    if h <= 0:
        raise NonPositiveStep(f"time step must be positive, got {h}")
    steps = _grid_steps(t_grid, h)
    rng = np.random.default_rng([seed])
    out = np.zeros((n_paths, len(steps), rv.dim), dtype=complex)
    if n_paths == 0:
        return out
    counts = np.zeros((n_paths, len(rv.probabilities)))
    prev = 0
    for idx, s in enumerate(steps):
        if s > prev:
            counts = counts + rng.multinomial(s - prev, rv.probabilities, size=n_paths)
            prev = s
        out[:, idx, :] = np.sqrt(h) * counts @ rv.values
    return out


def limit_ensemble(spec: LimitSpec, t_grid, n_paths: int, seed: int = 0) -> np.ndarray:
    """Limit-martingale values at the grid times, shape (n_paths, n_t, N)."""
    grid = np.asarray(t_grid, dtype=float)
    if np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise DimensionMismatch("time grid must be nonnegative and increasing")
    rng = np.random.default_rng([seed])
    n_t = len(grid)
    out = np.zeros((n_paths, n_t, spec.dim), dtype=complex)
    if n_paths == 0 or n_t == 0:
        return out
    dts = np.diff(np.concatenate([[0.0], grid]))
    if spec.n_brownian:
        db = rng.normal(0.0, 1.0, size=(n_paths, n_t, spec.n_brownian)) * np.sqrt(
            dts
        )[None, :, None]
        b = np.cumsum(db, axis=1)
        out = out + b @ spec.brownian_basis
    for v, lam in zip(spec.poisson_dirs, spec.intensities):
        dn = rng.poisson(lam * dts, size=(n_paths, n_t))
        compensated = np.cumsum(dn, axis=1) - lam * grid[None, :]
        out = out + compensated[:, :, None] * v[None, None, :]
    return out


@dataclass(frozen=True)
class BracketEstimate:
    """Realized square brackets of one path at its final time.

    ``bracket[i, j]`` estimates [Z^i, Z^j]_T as the sum of increment
    products; ``conj_bracket`` uses conjugated first factors.  Standard
    errors treat increment products as i.i.d. summands.  When a limit spec
    is supplied, the structure right-hand sides Lambda T + sum_k M^{ij}_k
    Z^k_T and delta T + sum_k conj(M^{ik}_j) Z^k_T and the residuals in
    units of standard errors are filled in.
    """

    bracket: np.ndarray
    conj_bracket: np.ndarray
    se_bracket: np.ndarray
    se_conj_bracket: np.ndarray
    n_increments: int
    final_time: float
    final_value: np.ndarray
    rhs_bracket: np.ndarray | None = None
    rhs_conj_bracket: np.ndarray | None = None

    def sigmas_bracket(self) -> np.ndarray:
        return np.abs(self.bracket - self.rhs_bracket) / self.se_bracket

    def sigmas_conj_bracket(self) -> np.ndarray:
        return np.abs(self.conj_bracket - self.rhs_conj_bracket) / self.se_conj_bracket


def _sum_and_se(prod: np.ndarray):
    total = prod.sum(axis=0)
    n = prod.shape[0]
    var = prod.real.var(axis=0, ddof=1) + prod.imag.var(axis=0, ddof=1)
    se = np.sqrt(n * var)
    return total, np.maximum(se, 1e-300)


def empirical_brackets(path: Path, spec: LimitSpec | None = None) -> BracketEstimate:
    """Realized covariation matrices of a path from its increments."""
    dz = path.increments
    if dz.shape[0] < 100:
        raise TooFewIncrements(f"need at least 100 increments, got {dz.shape[0]}")
    prod = dz[:, :, None] * dz[:, None, :]
    cprod = np.conj(dz)[:, :, None] * dz[:, None, :]
    bracket, se = _sum_and_se(prod)
    conj_bracket, se_c = _sum_and_se(cprod)
    t_end = float(path.times[-1])
    z_end = path.values[-1]
    rhs = rhs_c = None
    if spec is not None:
        if spec.dim != path.dim:
            raise DimensionMismatch("spec and path dimensions differ")
        m = spec.tensor.entries
        rhs = spec.lambda_matrix * t_end + np.einsum("ijk,k->ij", m, z_end)
        rhs_c = np.eye(spec.dim) * t_end + np.einsum(
            "ikj,k->ij", np.conj(m), z_end
        )
    return BracketEstimate(
        bracket=bracket,
        conj_bracket=conj_bracket,
        se_bracket=se,
        se_conj_bracket=se_c,
        n_increments=dz.shape[0],
        final_time=t_end,
        final_value=z_end,
        rhs_bracket=rhs,
        rhs_conj_bracket=rhs_c,
    )


def _moments(values: np.ndarray):
    """Mean, E[conj(Z) Z^T], E[Z Z^T] and E|Z_i|^4 over the path axis."""
    mean = values.mean(axis=0)
    cov_conj = np.einsum("pi,pj->ij", np.conj(values), values) / len(values)
    cov_plain = np.einsum("pi,pj->ij", values, values) / len(values)
    abs4 = (np.abs(values) ** 4).mean(axis=0)
    return mean, cov_conj, cov_plain, abs4


@dataclass(frozen=True)
class MomentReport:
    """Distances between walk and limit ensembles, per moment family.

    Each entry is the max over grid times and coordinates of the absolute
    difference of the corresponding empirical moments.
    """

    t_grid: np.ndarray
    mean_distance: float
    cov_conj_distance: float
    cov_plain_distance: float
    abs4_distance: float

    @property
    def covariance_distance(self) -> float:
        return max(self.cov_conj_distance, self.cov_plain_distance)

    @property
    def overall_distance(self) -> float:
        return max(
            self.mean_distance,
            self.cov_conj_distance,
            self.cov_plain_distance,
            self.abs4_distance,
        )


def distribution_compare(walk_values: np.ndarray, limit_values: np.ndarray, t_grid) -> MomentReport:
    """Compare first, second and fourth moments of two path ensembles.

    ``walk_values`` and ``limit_values`` have shape (n_paths, n_times, N)
    with matching grids, as produced by :func:`walk_ensemble` and
    :func:`limit_ensemble`.
    """
    grid = np.asarray(t_grid, dtype=float)
    wv = np.asarray(walk_values)
    lv = np.asarray(limit_values)
    if wv.shape[1:] != lv.shape[1:] or wv.shape[1] != len(grid):
        raise DimensionMismatch("ensembles must share the time grid and dimension")
    if wv.shape[0] == 0 or lv.shape[0] == 0 or len(grid) == 0:
        return MomentReport(
            t_grid=grid,
            mean_distance=0.0,
            cov_conj_distance=0.0,
            cov_plain_distance=0.0,
            abs4_distance=0.0,
        )
    dists = np.zeros(4)
    for k in range(len(grid)):
        mw = _moments(wv[:, k, :])
        ml = _moments(lv[:, k, :])
        for fam in range(4):
            dists[fam] = max(dists[fam], float(np.max(np.abs(mw[fam] - ml[fam]))))
    return MomentReport(
        t_grid=grid,
        mean_distance=dists[0],
        cov_conj_distance=dists[1],
        cov_plain_distance=dists[2],
        abs4_distance=dists[3],
    )
