"""Euler-type path simulation of the jump SDE via thinned point processes.

Every branching jump is simulated as an actual event: candidate jumps of type
j arrive with the state-independent rate of mu_j restricted to the simulated
region, thinned by the left-endpoint state X_{t,j}. The compensators of the
simulated jumps are folded into the linear drift, which therefore uses the
effective matrix B_tilde - (simulated first moments per type) -- equal to the
actual-event drift matrix B_hat whenever nothing is truncated. Immigration
jumps arrive state-independently. Infinite-activity components are truncated
below eps_trunc; the discarded sub-cutoff branching martingale is dropped
whole (mean zero), the discarded sub-cutoff immigration mean is a documented
bias.

Randomness is consumed in a fixed per-step order (diffusion normals,
immigration counts and sizes, then per-type branching counts, sizes and
thinning marks), so a fixed Generator state reproduces paths bit-for-bit.
Counter-based substreams for block-parallel runs live in
:func:`block_generator`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import measures, params as params_mod
from .errors import InfiniteMass, InvalidConfig, PreconditionViolated
from .params import AdmissibleParams, DerivedParams

COMPARISON_SLACK = 1e-12  # ordering violations below this are roundoff


@dataclass(frozen=True)
class SimConfig:
    """Discretisation settings for the Euler scheme."""

    T: float
    dt: float
    eps_trunc: float = params_mod.DEFAULT_EPS_TRUNC
    positivity_mode: str = "raw"   # "raw": only coefficients clamp; "clamp": states too
    record_jumps: bool = False

    def __post_init__(self):
        if not self.T > 0:
            raise InvalidConfig("T must be positive")
        if not self.dt > 0:
            raise InvalidConfig("dt must be positive")
        if not 0.0 < self.eps_trunc <= 1.0:
            raise InvalidConfig("eps_trunc must lie in (0, 1]")
        if self.positivity_mode not in ("raw", "clamp"):
            raise InvalidConfig("positivity_mode must be 'raw' or 'clamp'")

    @property
    def n_steps(self) -> int:
        n = round(self.T / self.dt)
        if n < 1 or abs(n * self.dt - self.T) > 1e-9 * max(1.0, self.T):
            raise InvalidConfig("T must be an integer multiple of dt")
        return n

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_steps + 1)


@dataclass(frozen=True)
class JumpEvent:
    time: float
    kind: str                 # "immigration" | "branching"
    type_index: int | None    # branching type j, None for immigration
    size: np.ndarray
    u: float | None           # thinning mark, branching only
    size_class: str | None    # "small" (||z|| < 1) or "large"


@dataclass(frozen=True)
class Path:
    grid: np.ndarray
    states: np.ndarray            # (n_steps + 1, d)
    jumps: tuple | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def block_generator(seed: int, block_index: int) -> np.random.Generator:
    """Counter-based substream for one path block; scheduling-independent."""
    return np.random.Generator(np.random.Philox(key=[int(seed), int(block_index)]))


class _SamplingPlan:
    """Per-measure decomposition into leaf families with simulated regions."""

    def __init__(self, measure, eps):
        self.entries = []
        self.rate = 0.0
        if measure is None:
            return
        for leaf in measure.components():
            region = measures.ALL if leaf.is_finite_activity else measures.above(eps)
            mass = leaf.mass(region)
            if np.isinf(mass):
                raise InfiniteMass(
                    "simulated jump region must have finite mass above the cutoff")
            if mass > 0.0:
                self.entries.append((leaf, region, mass))
                self.rate += mass

    def sample(self, total, rng):
        """(total, d) jump sizes from the rate-normalised mixture."""
        if len(self.entries) == 1:
            leaf, region, _ = self.entries[0]
            return leaf.sample_n(region, total, rng)
        weights = np.array([m for _, _, m in self.entries]) / self.rate
        idx = rng.choice(len(self.entries), size=total, p=weights)
        out = np.empty((total, self.entries[0][0].dim))
        for k, (leaf, region, _) in enumerate(self.entries):
            sel = idx == k
            cnt = int(sel.sum())
            if cnt:
                out[sel] = leaf.sample_n(region, cnt, rng)
        return out


def _matched_derived(p, der, cfg):
    if der.eps_trunc != cfg.eps_trunc:
        der = params_mod.derive(p, eps_trunc=cfg.eps_trunc)
    return der


def _check_x0(x0, d):
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    if x0.shape[1] != d:
        raise InvalidConfig(f"x0 must have {d} components")
    if np.any(x0 < 0):
        raise PreconditionViolated("x0 must be componentwise non-negative")
    return x0


def simulate_block(p: AdmissibleParams, der: DerivedParams, x0, cfg: SimConfig,
                   rng, keep_full: bool = False, snapshot_steps=()):
    """Simulate a block of paths sharing one random stream.

    Returns (final_states, full_states_or_None, snapshots, events) where
    snapshots maps requested step indices to state copies and events is a
    per-path tuple of JumpEvent lists when cfg.record_jumps is set.
    """
    der = _matched_derived(p, der, cfg)
    X = _check_x0(x0, p.d).copy()
    n, d = X.shape
    n_steps = cfg.n_steps
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)

    nu_plan = _SamplingPlan(p.nu, cfg.eps_trunc)
    mu_plans = [_SamplingPlan(m, cfg.eps_trunc) for m in p.mu]
    drift = der.drift_matrix
    use_diffusion = bool(np.any(p.c > 0))
    sig = np.sqrt(2.0 * p.c)

    full = np.empty((n_steps + 1, n, d)) if keep_full else None
    if keep_full:
        full[0] = X
    snapshots = {}
    wanted = set(int(k) for k in snapshot_steps)
    if 0 in wanted:
        snapshots[0] = X.copy()
    events = tuple([] for _ in range(n)) if cfg.record_jumps else None

    for k in range(n_steps):
        Xp = np.maximum(X, 0.0)
        X_new = X + (p.beta[None, :] + Xp @ drift.T) * dt
        if use_diffusion:
            xi = rng.standard_normal((n, d))
            X_new += np.sqrt(Xp) * sig[None, :] * sqrt_dt * xi

        t_next = (k + 1) * dt

        if nu_plan.rate > 0.0:
            counts = rng.poisson(nu_plan.rate * dt, size=n)
            total = int(counts.sum())
            if total:
                sizes = nu_plan.sample(total, rng)
                owners = np.repeat(np.arange(n), counts)
                np.add.at(X_new, owners, sizes)
                if events is not None:
                    for owner, z in zip(owners, sizes):
                        events[owner].append(JumpEvent(
                            time=t_next, kind="immigration", type_index=None,
                            size=z.copy(), u=None,
                            size_class="small" if np.linalg.norm(z) < 1 else "large"))

        for j, plan in enumerate(mu_plans):
            if plan.rate == 0.0:
                continue
            lam = Xp[:, j] * plan.rate * dt
            counts = rng.poisson(lam)
            total = int(counts.sum())
            if not total:
                continue
            sizes = plan.sample(total, rng)
            owners = np.repeat(np.arange(n), counts)
            np.add.at(X_new, owners, sizes)
            if events is not None:
                marks = rng.uniform(0.0, np.repeat(Xp[:, j], counts))
                for owner, z, u in zip(owners, sizes, marks):
                    events[owner].append(JumpEvent(
                        time=t_next, kind="branching", type_index=j,
                        size=z.copy(), u=float(u),
                        size_class="small" if np.linalg.norm(z) < 1 else "large"))

        if cfg.positivity_mode == "clamp":
            np.maximum(X_new, 0.0, out=X_new)
        X = X_new
        if keep_full:
            full[k + 1] = X
        if (k + 1) in wanted:
            snapshots[k + 1] = X.copy()

    return X, full, snapshots, events


def simulate_path(p: AdmissibleParams, der: DerivedParams, x0, cfg: SimConfig,
                  rng) -> Path:
    """Single trajectory on the regular grid, optionally logging jump events."""
    _, full, _, events = simulate_block(p, der, np.asarray(x0, dtype=float)[None, :],
                                        cfg, rng, keep_full=True)
    jumps = tuple(events[0]) if events is not None else None
    return Path(grid=cfg.grid(), states=full[:, 0, :], jumps=jumps)


@dataclass
class CoupledStats:
    """Ordering diagnostics of a coupled block, accumulated over grid points."""

    n_paths: int
    violations: int = 0
    triples: int = 0
    worst: float = 0.0
    diff_sum: np.ndarray | None = None     # (n_steps+1, d) sums of X' - X
    diff_sq_sum: np.ndarray | None = None

    def record(self, step, diff):
        gap = np.minimum(diff, 0.0)
        self.violations += int(np.count_nonzero(diff < -COMPARISON_SLACK))
        self.triples += diff.size
        worst = float(-gap.min()) if gap.size else 0.0
        self.worst = max(self.worst, worst)
        self.diff_sum[step] += diff.sum(axis=0)
        self.diff_sq_sum[step] += (diff ** 2).sum(axis=0)


def simulate_coupled_block(p: AdmissibleParams, der: DerivedParams, beta_prime,
                           x0, x0_prime, cfg: SimConfig, rng,
                           keep_full: bool = False):
    """Simulate (X, X') sharing noise, with beta <= beta_prime and X0 <= X0'.

    Branching candidates are drawn per step with the dominating intensity
    max(X_j^+, X'_j^+) and a uniform mark u on [0, that bound]; a candidate is
    accepted for a path exactly when u <= that path's left-endpoint state, so
    the accepted sets are nested whenever the states are ordered. Immigration
    points and Gaussian increments are shared identically.
    """
    der = _matched_derived(p, der, cfg)
    beta_prime = np.asarray(beta_prime, dtype=float)
    if beta_prime.shape != (p.d,):
        raise PreconditionViolated(f"beta_prime must have {p.d} components")
    if np.any(beta_prime < p.beta):
        raise PreconditionViolated("beta_prime must dominate beta componentwise")
    X = _check_x0(x0, p.d).copy()
    Xq = _check_x0(x0_prime, p.d).copy()
    if Xq.shape != X.shape:
        raise PreconditionViolated("x0 and x0_prime must have matching shapes")
    if np.any(Xq < X):
        raise PreconditionViolated("x0_prime must dominate x0 componentwise")

    n, d = X.shape
    n_steps = cfg.n_steps
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)

    nu_plan = _SamplingPlan(p.nu, cfg.eps_trunc)
    mu_plans = [_SamplingPlan(m, cfg.eps_trunc) for m in p.mu]
    drift = der.drift_matrix
    use_diffusion = bool(np.any(p.c > 0))
    sig = np.sqrt(2.0 * p.c)

    stats = CoupledStats(n_paths=n,
                         diff_sum=np.zeros((n_steps + 1, d)),
                         diff_sq_sum=np.zeros((n_steps + 1, d)))
    stats.record(0, Xq - X)
    full = np.empty((2, n_steps + 1, n, d)) if keep_full else None
    if keep_full:
        full[0, 0], full[1, 0] = X, Xq

    for k in range(n_steps):
        Xp = np.maximum(X, 0.0)
        Xqp = np.maximum(Xq, 0.0)
        X_new = X + (p.beta[None, :] + Xp @ drift.T) * dt
        Xq_new = Xq + (beta_prime[None, :] + Xqp @ drift.T) * dt
        if use_diffusion:
            xi = rng.standard_normal((n, d))
            X_new += np.sqrt(Xp) * sig[None, :] * sqrt_dt * xi
            Xq_new += np.sqrt(Xqp) * sig[None, :] * sqrt_dt * xi

        if nu_plan.rate > 0.0:
            counts = rng.poisson(nu_plan.rate * dt, size=n)
            total = int(counts.sum())
            if total:
                sizes = nu_plan.sample(total, rng)
                owners = np.repeat(np.arange(n), counts)
                np.add.at(X_new, owners, sizes)
                np.add.at(Xq_new, owners, sizes)

        for j, plan in enumerate(mu_plans):
            if plan.rate == 0.0:
                continue
            bound = np.maximum(Xp[:, j], Xqp[:, j])
            counts = rng.poisson(bound * plan.rate * dt)
            total = int(counts.sum())
            if not total:
                continue
            sizes = plan.sample(total, rng)
            owners = np.repeat(np.arange(n), counts)
            marks = rng.uniform(0.0, 1.0, size=total) * np.repeat(bound, counts)
            accept = marks <= np.repeat(Xp[:, j], counts)
            accept_q = marks <= np.repeat(Xqp[:, j], counts)
            if np.any(accept):
                np.add.at(X_new, owners[accept], sizes[accept])
            if np.any(accept_q):
                np.add.at(Xq_new, owners[accept_q], sizes[accept_q])

        if cfg.positivity_mode == "clamp":
            np.maximum(X_new, 0.0, out=X_new)
            np.maximum(Xq_new, 0.0, out=Xq_new)
        X, Xq = X_new, Xq_new
        stats.record(k + 1, Xq - X)
        if keep_full:
            full[0, k + 1], full[1, k + 1] = X, Xq

    return X, Xq, stats, full


def simulate_coupled(p: AdmissibleParams, der: DerivedParams, beta_prime,
                     x0, x0_prime, cfg: SimConfig, rng):
    """Coupled pair of single trajectories; returns (Path, Path)."""
    x0 = np.asarray(x0, dtype=float)[None, :]
    x0_prime = np.asarray(x0_prime, dtype=float)[None, :]
    _, _, _, full = simulate_coupled_block(
        p, der, beta_prime, x0, x0_prime, cfg, rng, keep_full=True)
    grid = cfg.grid()
    return (Path(grid=grid, states=full[0][:, 0, :]),
            Path(grid=grid, states=full[1][:, 0, :]))
