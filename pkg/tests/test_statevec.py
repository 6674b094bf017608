"""Tests for the dense state-vector simulator."""

import math

import numpy as np
import pytest

from orbitqaoa.graph import brute_force_maxcut, cut_value, gen_sk, generate, index_to_bits
from orbitqaoa.statevec import (
    apply_cost_layer,
    apply_rx,
    apply_xy,
    apply_y_rot,
    apply_zz_phase,
    basis_state,
    estimate_cut,
    expectation_cut,
    from_amplitudes,
    init_plus,
    sample,
)
from orbitqaoa.utils import InvalidArgumentError, SizeLimitError


def random_state(n: int, seed: int):
    rng = np.random.default_rng(seed)
    amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return from_amplitudes(amp / np.linalg.norm(amp))


class TestStates:
    def test_uniform_superposition(self):
        s = init_plus(3)
        assert s.norm() == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(s.probabilities(), 1 / 8)

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            init_plus(5, max_qubits=4)

    def test_basis_state(self):
        s = basis_state("011")
        assert s.amp[6] == 1.0
        assert s.norm() == 1.0

    def test_amplitude_count_must_be_power_of_two(self):
        with pytest.raises(InvalidArgumentError):
            from_amplitudes(np.ones(3))

    def test_dump_lists_every_amplitude(self):
        assert len(init_plus(2).dump().splitlines()) == 4


class TestGates:
    def test_zz_phase_signs(self):
        theta = 0.3
        same = basis_state("00")
        apply_zz_phase(same, 0, 1, theta)
        assert same.amp[0] == pytest.approx(np.exp(1j * theta))
        differ = basis_state("10")
        apply_zz_phase(differ, 0, 1, theta)
        assert differ.amp[1] == pytest.approx(np.exp(-1j * theta))

    def test_rx_half_pi_flips(self):
        s = basis_state("000")
        apply_rx(s, 0, math.pi / 2)
        assert s.amp[1] == pytest.approx(-1j)

    def test_single_qubit_register(self):
        s = basis_state("0")
        apply_rx(s, 0, math.pi / 2)
        assert s.amp[0] == pytest.approx(0.0, abs=1e-12)
        assert s.amp[1] == pytest.approx(-1j)

        s = basis_state("0")
        apply_y_rot(s, 0, math.pi / 4)
        assert np.allclose(s.amp, [math.sqrt(0.5), math.sqrt(0.5)], atol=1e-12)

    def test_y_rotation_is_real(self):
        s = basis_state("00")
        apply_y_rot(s, 1, math.pi / 2)
        assert s.amp[2] == pytest.approx(1.0)
        assert np.all(np.isreal(s.amp))

    def test_xy_swaps_single_excitation(self):
        s = basis_state("10")
        apply_xy(s, 0, 1, math.pi / 2)
        assert s.amp[2] == pytest.approx(-1j)
        assert abs(s.amp[1]) < 1e-12

    def test_xy_fixes_aligned_states(self):
        for bits in ("00", "11"):
            s = basis_state(bits)
            apply_xy(s, 0, 1, 0.7)
            assert np.allclose(s.amp, basis_state(bits).amp, atol=1e-12)

    @pytest.mark.parametrize("gate", [apply_rx, apply_y_rot])
    def test_single_qubit_inverse(self, gate):
        s = random_state(4, seed=1)
        original = s.amp.copy()
        gate(s, 2, 0.41)
        gate(s, 2, -0.41)
        assert np.allclose(s.amp, original, atol=1e-12)

    @pytest.mark.parametrize("gate", [apply_zz_phase, apply_xy])
    def test_two_qubit_inverse(self, gate):
        s = random_state(4, seed=2)
        original = s.amp.copy()
        gate(s, 1, 3, 0.77)
        gate(s, 1, 3, -0.77)
        assert np.allclose(s.amp, original, atol=1e-12)

    def test_gates_preserve_norm(self):
        s = random_state(5, seed=3)
        apply_rx(s, 0, 0.2)
        apply_y_rot(s, 4, 1.1)
        apply_xy(s, 2, 3, 0.9)
        apply_zz_phase(s, 0, 4, 0.5)
        assert s.norm() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_qubits(self):
        s = init_plus(3)
        with pytest.raises(InvalidArgumentError):
            apply_rx(s, 3, 0.1)
        with pytest.raises(InvalidArgumentError):
            apply_xy(s, 1, 1, 0.1)


class TestCostLayer:
    def test_matches_single_edge_phases(self):
        g = generate("er", 6, seed=4)
        thetas = np.linspace(-0.5, 0.8, g.m)
        fused = random_state(6, seed=5)
        single = fused.copy()
        apply_cost_layer(fused, g, thetas)
        for (u, v, _), theta in zip(g.edges, thetas):
            apply_zz_phase(single, u, v, float(theta))
        assert np.allclose(fused.amp, single.amp, atol=1e-12)

    def test_edge_order_does_not_matter(self):
        g = gen_sk(4)
        thetas = np.arange(1, g.m + 1) * 0.1
        forward = random_state(4, seed=6)
        backward = forward.copy()
        for (u, v, _), theta in zip(g.edges, thetas):
            apply_zz_phase(forward, u, v, float(theta))
        for (u, v, _), theta in reversed(list(zip(g.edges, thetas))):
            apply_zz_phase(backward, u, v, float(theta))
        assert np.allclose(forward.amp, backward.amp, atol=1e-12)


class TestExpectation:
    def test_uniform_state_cuts_half(self, path5):
        assert expectation_cut(init_plus(5), path5) == pytest.approx(2.0)

    def test_matches_enumeration(self):
        for seed, model in enumerate(("er", "ba", "ws", "pl", "sk")):
            g = generate(model, 7, seed=seed)
            s = random_state(7, seed=seed)
            naive = sum(
                abs(a) ** 2 * cut_value(g, index_to_bits(i, 7)) for i, a in enumerate(s.amp)
            )
            assert expectation_cut(s, g) == pytest.approx(naive, abs=1e-10)

    def test_bounded_by_maxcut(self, pl6):
        s = random_state(6, seed=9)
        assert 0.0 <= expectation_cut(s, pl6) <= brute_force_maxcut(pl6).max_value

    def test_qubit_count_must_match(self, path5):
        with pytest.raises(InvalidArgumentError):
            expectation_cut(init_plus(4), path5)


class TestSampling:
    def test_counts_sum_to_shots(self):
        counts = sample(init_plus(4), 1000, np.random.default_rng(0))
        assert sum(counts.counts.values()) == 1000

    def test_basis_state_is_deterministic(self, path5):
        s = basis_state("01101")
        counts = sample(s, 64, np.random.default_rng(1))
        assert counts.counts == {"01101": 64}
        assert estimate_cut(counts, path5) == cut_value(path5, "01101")

    def test_same_seed_same_samples(self, path5):
        s = random_state(5, seed=2)
        a = sample(s, 256, np.random.default_rng(42))
        b = sample(s, 256, np.random.default_rng(42))
        assert a.counts == b.counts
        assert estimate_cut(a, path5) == estimate_cut(b, path5)

    def test_estimate_resolution(self, path5):
        counts = sample(random_state(5, seed=3), 64, np.random.default_rng(5))
        scaled = estimate_cut(counts, path5) * 64
        assert scaled == pytest.approx(round(scaled), abs=1e-9)

    def test_rejects_zero_shots(self):
        with pytest.raises(InvalidArgumentError):
            sample(init_plus(2), 0, np.random.default_rng(0))
