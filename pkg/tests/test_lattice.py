import numpy as np
import pytest

from anderson_ent import (
    BoundaryCondition,
    ConfigError,
    DimensionError,
    DisorderConfig,
    Hamiltonian,
    build_hamiltonian,
    sample_disorder,
)
from conftest import dense_hamiltonian

OPEN = BoundaryCondition.OPEN
PERIODIC = BoundaryCondition.PERIODIC


class TestSampleDisorder:
    def test_zero_strength_kills_randomness(self):
        cfg = DisorderConfig(size=5, strength=0.0, seed=123)
        assert np.array_equal(sample_disorder(cfg), np.zeros(5))

    def test_constant_offset(self):
        cfg = DisorderConfig(size=5, strength=0.0, offset=2.5, seed=9)
        assert np.array_equal(sample_disorder(cfg), np.full(5, 2.5))

    def test_seed_determinism_bitwise(self):
        cfg = DisorderConfig(size=1000, strength=1.3, seed=77)
        a = sample_disorder(cfg)
        b = sample_disorder(DisorderConfig(size=1000, strength=1.3, seed=77))
        assert np.array_equal(a, b)
        c = sample_disorder(cfg.with_(seed=78))
        assert not np.array_equal(a, c)

    def test_large_sample_statistics(self):
        # law-of-large-numbers check on the pinned generator
        cfg = DisorderConfig(size=10**6, strength=1.0, seed=42)
        v = sample_disorder(cfg)
        assert abs(v.mean()) < 5e-3
        assert abs(v.var() - 1.0) < 1e-2

    def test_invalid_configs(self):
        with pytest.raises(ConfigError):
            DisorderConfig(size=1, strength=0.0)
        with pytest.raises(ConfigError):
            DisorderConfig(size=4, strength=-0.1)
        with pytest.raises(ConfigError):
            DisorderConfig(size=4, strength=0.0, hopping=0.0)
        with pytest.raises(ConfigError):
            DisorderConfig(size=4, strength=0.0, boundary="periodic")


class TestBuildHamiltonian:
    def test_free_open_matrix(self):
        h = build_hamiltonian(DisorderConfig(size=4, strength=0.0, seed=0,
                                             boundary=OPEN))
        want = np.array([
            [0, -1, 0, 0],
            [-1, 0, -1, 0],
            [0, -1, 0, -1],
            [0, 0, -1, 0],
        ], dtype=float)
        assert np.array_equal(dense_hamiltonian(h), want)

    def test_free_periodic_matrix(self):
        h = build_hamiltonian(DisorderConfig(size=4, strength=0.0, seed=0,
                                             boundary=PERIODIC))
        want = np.array([
            [0, -1, 0, -1],
            [-1, 0, -1, 0],
            [0, -1, 0, -1],
            [-1, 0, -1, 0],
        ], dtype=float)
        assert np.array_equal(dense_hamiltonian(h), want)

    def test_diagonal_matches_sample_disorder(self):
        cfg = DisorderConfig(size=3, strength=1.0, seed=314)
        h = build_hamiltonian(cfg)
        assert np.array_equal(h.potentials, sample_disorder(cfg))
        assert h.hopping == cfg.hopping
        assert h.boundary is cfg.boundary

    def test_potentials_read_only(self):
        h = build_hamiltonian(DisorderConfig(size=8, strength=1.0, seed=3))
        with pytest.raises(ValueError):
            h.potentials[0] = 1.0


class TestApply:
    def test_open_unit_vector(self):
        h = Hamiltonian(np.zeros(3), hopping=1.0, boundary=OPEN)
        assert np.array_equal(h.apply(np.array([1.0, 0.0, 0.0])),
                              np.array([0.0, -1.0, 0.0]))

    def test_periodic_uniform_is_eigenvector(self):
        h = Hamiltonian(np.zeros(3), hopping=1.0, boundary=PERIODIC)
        v = np.full(3, 1 / np.sqrt(3))
        assert np.allclose(h.apply(v), -2.0 * v, atol=1e-15)

    @pytest.mark.parametrize("boundary", [OPEN, PERIODIC])
    def test_matches_dense_oracle(self, rng, boundary):
        for _ in range(20):
            h = build_hamiltonian(DisorderConfig(
                size=8, strength=float(rng.uniform(0.1, 2.0)),
                seed=int(rng.integers(2**32)), boundary=boundary))
            v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            assert np.allclose(h.apply(v), dense_hamiltonian(h) @ v,
                               rtol=1e-14, atol=1e-14)

    def test_two_site_ring_double_bond(self):
        # wraparound and nearest-neighbor coincide on a two-site ring
        h = Hamiltonian(np.zeros(2), hopping=1.0, boundary=PERIODIC)
        assert np.array_equal(h.apply(np.array([1.0, 0.0])),
                              np.array([0.0, -2.0]))

    def test_dimension_error(self):
        h = Hamiltonian(np.zeros(4), hopping=1.0)
        with pytest.raises(DimensionError):
            h.apply(np.zeros(5))

    def test_symmetry(self, rng):
        for boundary in (OPEN, PERIODIC):
            h = build_hamiltonian(DisorderConfig(
                size=64, strength=1.5, seed=5, boundary=boundary))
            v = rng.standard_normal(64)
            w = rng.standard_normal(64)
            lhs = w @ h.apply(v)
            rhs = h.apply(w) @ v
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))

    def test_offset_shift_covariance(self, rng):
        base = DisorderConfig(size=32, strength=1.0, seed=11)
        h0 = build_hamiltonian(base)
        hc = build_hamiltonian(base.with_(offset=3.25))
        v = rng.standard_normal(32)
        assert np.allclose(hc.apply(v), h0.apply(v) + 3.25 * v,
                           rtol=1e-13, atol=1e-13)

    def test_scale(self):
        h = Hamiltonian(np.array([1.0, -4.0, 2.0]), hopping=1.5)
        assert h.scale == 4.0 + 3.0
