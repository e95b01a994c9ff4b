"""Path simulation: exactness, positivity, reproducibility, coupling."""

import math

import numpy as np
import pytest

from cbi.errors import InvalidConfig, PreconditionViolated
from cbi.measures import DiscreteAtoms, TemperedPowerLawAxis
from cbi.moments import mean
from cbi.params import AdmissibleParams, derive
from cbi.simulate import (
    SimConfig, block_generator, simulate_block, simulate_coupled,
    simulate_coupled_block, simulate_path,
)


def make(d=1, c=(0.0,), beta=(0.0,), B=((0.0,),), nu=None, mu=None):
    mu = mu if mu is not None else (None,) * d
    return AdmissibleParams(d=d, c=list(c), beta=list(beta),
                            B=[list(r) for r in B], nu=nu, mu=mu)


class TestConfig:
    def test_horizon_must_be_grid_multiple(self):
        with pytest.raises(InvalidConfig):
            SimConfig(T=1.0, dt=0.3).n_steps
        assert SimConfig(T=1.0, dt=2.0 ** -6).n_steps == 64

    def test_invalid_values(self):
        with pytest.raises(InvalidConfig):
            SimConfig(T=0.0, dt=0.1)
        with pytest.raises(InvalidConfig):
            SimConfig(T=1.0, dt=0.1, eps_trunc=0.0)
        with pytest.raises(InvalidConfig):
            SimConfig(T=1.0, dt=0.1, positivity_mode="projective")


class TestDeterministicLimits:
    def test_constant_drift_is_exact(self):
        p = make(beta=(1.0,))
        cfg = SimConfig(T=1.0, dt=2.0 ** -5)
        path = simulate_path(p, derive(p), [0.5], cfg, block_generator(1, 0))
        want = 0.5 + path.grid
        assert np.max(np.abs(path.states[:, 0] - want)) <= 1e-12

    def test_no_dynamics_constant_path(self):
        p = make()
        cfg = SimConfig(T=1.0, dt=2.0 ** -4)
        path = simulate_path(p, derive(p), [0.7], cfg, block_generator(2, 0))
        assert np.all(path.states == 0.7)

    def test_coupled_linear_difference_recursion(self):
        # no noise at all: the coupled difference obeys an exact affine recursion
        p = make(d=2, c=(0.0, 0.0), beta=(0.1, 0.2),
                 B=((-0.5, 0.2), (0.3, -0.8)), mu=(None, None))
        der = derive(p)
        cfg = SimConfig(T=1.0, dt=2.0 ** -6)
        shift = np.array([0.3, 0.5])
        _, _, stats, full = simulate_coupled_block(
            p, der, p.beta + shift, [[1.0, 1.0]], [[1.0, 1.0]], cfg,
            block_generator(3, 0), keep_full=True)
        diff = full[1][:, 0, :] - full[0][:, 0, :]
        expect = np.zeros(2)
        M = np.eye(2) + der.drift_matrix * cfg.dt
        for k in range(cfg.n_steps + 1):
            assert np.allclose(diff[k], expect, rtol=1e-12, atol=1e-12)
            expect = M @ expect + shift * cfg.dt
        assert stats.violations == 0
        assert np.all(diff >= 0.0)


class TestJumpScheme:
    def test_pure_branching_martingale_mean(self):
        # unit-size branching atoms: B_tilde = 0, the mean is conserved
        kappa = 0.8
        mu = DiscreteAtoms(1, [(np.array([1.0]), kappa)])
        p = make(mu=(mu,))
        der = derive(p)
        assert der.B_tilde[0, 0] == 0.0
        cfg = SimConfig(T=1.0, dt=2.0 ** -7)
        n = 40_000
        final, _, _, _ = simulate_block(p, der, np.full((n, 1), 1.0), cfg,
                                        block_generator(11, 0))
        est = final[:, 0].mean()
        se = final[:, 0].std(ddof=1) / math.sqrt(n)
        want = mean(p, der, [1.0], 1.0)[0]
        assert want == 1.0
        assert abs(est - want) <= 3.0 * se

    def test_branching_with_drift_mean_matches_formula(self):
        mu = DiscreteAtoms(1, [(np.array([0.5]), 0.6), (np.array([2.0]), 0.3)])
        nu = DiscreteAtoms(1, [(np.array([0.8]), 0.5)])
        p = make(c=(0.0,), beta=(0.2,), B=((-0.9,),), nu=nu, mu=(mu,))
        der = derive(p)
        cfg = SimConfig(T=1.0, dt=2.0 ** -8)
        n = 60_000
        final, _, _, _ = simulate_block(p, der, np.full((n, 1), 1.5), cfg,
                                        block_generator(17, 0))
        est = final[:, 0].mean()
        se = final[:, 0].std(ddof=1) / math.sqrt(n)
        want = mean(p, der, [1.5], 1.0)[0]
        assert abs(est - want) <= 3.0 * se + 2.0 * cfg.dt

    def test_clamp_mode_nonnegative(self):
        p = make(c=(1.5,), beta=(0.05,), B=((-2.0,),))
        cfg = SimConfig(T=1.0, dt=2.0 ** -6, positivity_mode="clamp")
        _, full, _, _ = simulate_block(p, derive(p), np.full((500, 1), 0.02), cfg,
                                       block_generator(23, 0), keep_full=True)
        assert np.all(full >= 0.0)

    def test_truncated_jump_sizes_respect_cutoff(self):
        mu = TemperedPowerLawAxis(1, 0, alpha=0.7, theta=1.0, scale=0.5)
        p = make(mu=(mu,))
        cfg = SimConfig(T=1.0, dt=2.0 ** -6, eps_trunc=0.05, record_jumps=True)
        der = derive(p, eps_trunc=0.05)
        path = simulate_path(p, der, [2.0], cfg, block_generator(29, 0))
        assert path.jumps  # jump activity is near-certain at this rate
        for ev in path.jumps:
            assert np.linalg.norm(ev.size) >= 0.05
            assert ev.kind == "branching" and ev.u is not None and ev.u >= 0.0

    def test_bit_reproducible(self):
        mu = DiscreteAtoms(2, [(np.array([0.4, 0.2]), 0.5)])
        nu = DiscreteAtoms(2, [(np.array([0.3, 0.0]), 0.4)])
        p = make(d=2, c=(0.6, 0.4), beta=(0.2, 0.1),
                 B=((-1.0, 0.2), (0.1, -0.8)), nu=nu, mu=(mu, mu))
        der = derive(p)
        cfg = SimConfig(T=0.5, dt=2.0 ** -6)
        a = simulate_path(p, der, [1.0, 0.5], cfg, block_generator(31, 7))
        b = simulate_path(p, der, [1.0, 0.5], cfg, block_generator(31, 7))
        assert np.array_equal(a.states, b.states)
        c = simulate_path(p, der, [1.0, 0.5], cfg, block_generator(31, 8))
        assert not np.array_equal(a.states, c.states)


class TestCoupling:
    def coupled_instance(self):
        mu1 = DiscreteAtoms(2, [(np.array([0.6, 0.3]), 0.5)])
        mu2 = DiscreteAtoms(2, [(np.array([0.2, 1.1]), 0.4)])
        nu = DiscreteAtoms(2, [(np.array([0.5, 0.5]), 0.4)])
        return make(d=2, c=(0.1, 0.1), beta=(0.3, 0.2),
                    B=((-1.2, 0.4), (0.3, -1.0)), nu=nu, mu=(mu1, mu2))

    def test_identical_inputs_identical_paths(self):
        p = self.coupled_instance()
        der = derive(p)
        cfg = SimConfig(T=0.5, dt=2.0 ** -7)
        a, b = simulate_coupled(p, der, p.beta, [1.0, 0.5], [1.0, 0.5], cfg,
                                block_generator(37, 0))
        assert np.array_equal(a.states, b.states)

    def test_ordering_preconditions(self):
        p = self.coupled_instance()
        der = derive(p)
        cfg = SimConfig(T=0.5, dt=2.0 ** -6)
        with pytest.raises(PreconditionViolated):
            simulate_coupled(p, der, p.beta - 0.1, [1.0, 0.5], [1.0, 0.5], cfg,
                             block_generator(41, 0))
        with pytest.raises(PreconditionViolated):
            simulate_coupled(p, der, p.beta, [1.0, 0.5], [0.5, 0.5], cfg,
                             block_generator(41, 0))

    def test_pure_jump_coupling_has_no_violations(self):
        p = self.coupled_instance()
        p = AdmissibleParams(d=2, c=[0.0, 0.0], beta=p.beta, B=p.B, nu=p.nu, mu=p.mu)
        der = derive(p)
        cfg = SimConfig(T=1.0, dt=2.0 ** -7)
        _, _, stats, _ = simulate_coupled_block(
            p, der, p.beta + np.array([1.0, 1.0]),
            np.tile([1.0, 0.5], (2000, 1)), np.tile([1.0, 0.5], (2000, 1)),
            cfg, block_generator(43, 0))
        assert stats.violations == 0
        assert stats.worst == 0.0

    def test_violation_counter_detects_diffusive_crossings(self):
        # near-zero states on a coarse grid: shared-noise Euler steps do cross
        p = make(c=(2.0,), beta=(0.0,), B=((0.0,),))
        der = derive(p)
        cfg = SimConfig(T=1.0, dt=2.0 ** -4)
        x0 = np.full((4000, 1), 0.02)
        _, _, stats, _ = simulate_coupled_block(
            p, der, p.beta, x0, x0 + 1e-6, cfg, block_generator(55, 0))
        assert stats.violations > 0
        assert stats.worst > 1e-12

    def test_diffusive_coupling_rare_violations_and_ordered_means(self):
        p = self.coupled_instance()
        der = derive(p)
        cfg = SimConfig(T=1.0, dt=2.0 ** -8)
        _, _, stats, _ = simulate_coupled_block(
            p, der, p.beta + np.array([1.0, 1.0]),
            np.tile([1.0, 0.5], (2000, 1)), np.tile([1.0, 0.5], (2000, 1)),
            cfg, block_generator(47, 0))
        assert stats.violations / stats.triples <= 0.01
        mean_diff = stats.diff_sum / stats.n_paths
        var = stats.diff_sq_sum / stats.n_paths - mean_diff ** 2
        se = np.sqrt(np.maximum(var, 0.0) / stats.n_paths)
        assert np.all(mean_diff >= -3.0 * se)
