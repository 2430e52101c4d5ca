import numpy as np
import pytest

from anderson_ent import (
    BoundaryCondition,
    ConfigError,
    DimensionError,
    DisorderConfig,
    InitialState,
    PropagatorConfig,
    State,
    average_concurrence,
    build_hamiltonian,
    evolve_record,
    linear_fit,
    step,
)
from conftest import dense_hamiltonian


def exact_propagate(h, psi0, t):
    evals, evecs = np.linalg.eigh(dense_hamiltonian(h))
    return evecs @ (np.exp(-1j * evals * t) * (evecs.T @ psi0))


class TestConfigs:
    def test_propagator_validation(self):
        with pytest.raises(ConfigError):
            PropagatorConfig(dt=0.2)
        with pytest.raises(ConfigError):
            PropagatorConfig(dt=0.05, total_time=0.01)
        with pytest.raises(ConfigError):
            PropagatorConfig(record_stride=0)

    def test_initial_state_variants(self):
        assert InitialState.delta().build(10).amplitudes[5] == 1.0
        assert InitialState.delta(site=2).build(10).amplitudes[2] == 1.0
        w = InitialState.w().build(4)
        assert np.allclose(np.abs(w.amplitudes), 0.5)
        custom = InitialState.custom(State.delta(6, 1))
        assert custom.build(6).amplitudes[1] == 1.0
        with pytest.raises(DimensionError):
            custom.build(7)
        with pytest.raises(ConfigError):
            InitialState(kind="bogus")


class TestStep:
    def test_free_ring_uniform_gains_only_phase(self):
        n = 32
        h = build_hamiltonian(DisorderConfig(size=n, strength=0.0, seed=0))
        s = State.w_state(n)
        out = step(h, s, 0.05)
        assert np.max(np.abs(np.abs(out.amplitudes) - 1 / np.sqrt(n))) < 1e-12
        # global phase matches the Cayley-transformed ground energy
        phase = out.amplitudes[0] / s.amplitudes[0]
        want = (1 + 1j * 0.025 * 2.0) / (1 - 1j * 0.025 * 2.0)
        assert abs(phase - want) < 1e-12

    def test_norm_preserved_per_step(self, rng):
        for boundary in BoundaryCondition:
            h = build_hamiltonian(DisorderConfig(size=48, strength=1.5, seed=6,
                                                 boundary=boundary))
            s = State(rng.standard_normal(48) + 1j * rng.standard_normal(48),
                      normalize=True)
            out = step(h, s, 0.1)
            assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-12

    def test_matches_exact_propagator(self):
        # second-order phase error: dt chosen so 1e-4 absolute holds at t=5
        n = 8
        h = build_hamiltonian(DisorderConfig(size=n, strength=1.0, seed=21))
        psi = State.delta(n, n // 2).amplitudes
        dt, n_steps = 0.005, 1000
        for _ in range(n_steps):
            psi = step(h, State(psi), dt).amplitudes
        exact = exact_propagate(h, State.delta(n, n // 2).amplitudes,
                                dt * n_steps)
        assert np.max(np.abs(psi - exact)) < 1e-4

    def test_two_site_ring(self):
        h = build_hamiltonian(DisorderConfig(size=2, strength=0.7, seed=3))
        psi0 = State.delta(2, 0).amplitudes
        psi = psi0.copy()
        for _ in range(200):
            psi = step(h, State(psi), 0.01).amplitudes
        exact = exact_propagate(h, psi0, 2.0)
        assert np.max(np.abs(psi - exact)) < 1e-4


class TestEvolveRecord:
    def test_time_grid_and_snapshots(self):
        h = build_hamiltonian(DisorderConfig(size=16, strength=0.5, seed=2))
        cfg = PropagatorConfig(dt=0.05, total_time=1.03, record_stride=10)
        rec = evolve_record(h, InitialState.delta(), cfg, keep_snapshots=True)
        # 21 steps: samples at steps 0, 10, 20 plus the final step 21
        assert np.allclose(rec.times, [0.0, 0.5, 1.0, 1.05])
        assert len(rec.snapshots) == rec.times.size
        assert rec.avg_concurrence[0] == 0.0

    def test_w_state_invariant_free_ring(self):
        n = 64
        h = build_hamiltonian(DisorderConfig(size=n, strength=0.0, seed=0))
        rec = evolve_record(h, InitialState.w(),
                            PropagatorConfig(dt=0.05, total_time=20.0,
                                             record_stride=20))
        assert np.max(np.abs(rec.avg_concurrence - 2.0 / n)) < 1e-10

    def test_unitarity_long_run(self):
        h = build_hamiltonian(DisorderConfig(size=64, strength=1.0, seed=13))
        cfg = PropagatorConfig(dt=0.05, total_time=500.0, record_stride=10000)
        rec = evolve_record(h, InitialState.delta(), cfg, keep_snapshots=True)
        norm = np.linalg.norm(rec.snapshots[-1].amplitudes)
        assert abs(norm - 1.0) < 1e-8  # 1e4 steps

    def test_energy_conserved(self):
        h = build_hamiltonian(DisorderConfig(size=64, strength=1.0, seed=13))
        psi0 = InitialState.delta().build(64).amplitudes
        e0 = np.real(np.conj(psi0) @ h.apply(psi0))
        cfg = PropagatorConfig(dt=0.05, total_time=100.0, record_stride=2000)
        rec = evolve_record(h, InitialState.delta(), cfg, keep_snapshots=True)
        psi = rec.snapshots[-1].amplitudes
        e1 = np.real(np.conj(psi) @ h.apply(psi))
        assert abs(e1 - e0) < 1e-6 * h.scale

    def test_second_order_in_dt(self):
        # halving dt shrinks the final concurrence error ~4x
        n = 64
        h = build_hamiltonian(DisorderConfig(size=n, strength=0.5, seed=31))
        finals = []
        for dt in (0.1, 0.05, 0.025):
            cfg = PropagatorConfig(dt=dt, total_time=20.0,
                                   record_stride=10**6)
            rec = evolve_record(h, InitialState.delta(), cfg)
            finals.append(rec.avg_concurrence[-1])
        order = np.log2(abs(finals[0] - finals[1]) / abs(finals[1] - finals[2]))
        assert order >= 1.8

    def test_free_spread_linear_growth_matches_oracle(self):
        # early growth of <C> from a delta state is near-linear; compare
        # the fitted slope against the exact spectral propagator
        n = 64
        h = build_hamiltonian(DisorderConfig(size=n, strength=0.0, seed=0))
        cfg = PropagatorConfig(dt=0.02, total_time=8.0, record_stride=50)
        rec = evolve_record(h, InitialState.delta(), cfg)
        psi0 = InitialState.delta().build(n).amplitudes
        oracle = np.array([
            average_concurrence(State(exact_propagate(h, psi0, t)))
            for t in rec.times
        ])
        assert np.all(np.diff(rec.avg_concurrence) > 0)
        window = rec.times >= 1.0
        fit = linear_fit(rec.times[window], rec.avg_concurrence[window])
        oracle_fit = linear_fit(rec.times[window], oracle[window])
        assert fit.r2 > 0.99
        assert abs(fit.params["slope"] - oracle_fit.params["slope"]) \
            <= 0.02 * oracle_fit.params["slope"]

    def test_disorder_suppresses_growth(self):
        n = 128
        final = {}
        for lam in (0.05, 1.0):
            vals = []
            for r in range(4):
                h = build_hamiltonian(DisorderConfig(size=n, strength=lam,
                                                     seed=100 + r))
                rec = evolve_record(h, InitialState.delta(),
                                    PropagatorConfig(dt=0.05, total_time=40.0,
                                                     record_stride=800))
                vals.append(rec.avg_concurrence[-1])
            final[lam] = np.mean(vals)
        assert final[1.0] < final[0.05]
