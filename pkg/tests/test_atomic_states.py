import math

import numpy as np
import pytest

from ringphoton.atomic_states import (
    blockade_radius, bosonic_norm, bosonic_overlap, collective_rabi, momentum_mode_pair,
    overlap_spectrum, overlap_table, pair_state, product_pair, spin_wave,
)
from ringphoton.errors import ShapeMismatchError
from ringphoton.models import AmplitudeLabel, PreparationParams, SpinWave, TwoExcitationAmplitude


class TestSpinWaves:
    @pytest.mark.parametrize("n_sites, l", [(1, 0), (7, 0), (7, 3), (40, -5)])
    def test_normalized(self, n_sites, l):
        wave = spin_wave(n_sites, l)
        assert np.sum(np.abs(wave.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-14)
        assert wave.angular_momentum == l

    def test_uniform_wave(self):
        np.testing.assert_allclose(spin_wave(4).amplitudes, 0.5)

    def test_phase_winding(self):
        wave = spin_wave(8, 2)
        ratio = wave.amplitudes[1] / wave.amplitudes[0]
        assert ratio == pytest.approx(np.exp(1j * np.pi / 2))

    def test_unnormalized_wave_is_rejected(self):
        with pytest.raises(ValueError):
            SpinWave(amplitudes=np.ones(3))


class TestPairStates:
    @pytest.mark.parametrize("n_sites", [2, 9, 40])
    def test_every_pair_state_is_normalized(self, n_sites):
        for p in range(1, n_sites // 2 + 1):
            state = pair_state(n_sites, p)
            assert bosonic_norm(state) == pytest.approx(1.0, abs=1e-12)
            assert state.label is AmplitudeLabel.PAIR
            assert state.index == p

    def test_neighbour_amplitude(self):
        state = pair_state(40, 10)
        assert state.psi[0, 1].real == pytest.approx(math.sin(2 * math.pi * 9.5 / 40) / 40, abs=1e-15)
        assert state.psi[0, 0] == 0.0

    def test_amplitude_is_circulant(self):
        psi = pair_state(12, 4).psi
        for shift in range(12):
            np.testing.assert_allclose(np.roll(np.roll(psi, shift, axis=0), shift, axis=1), psi, atol=1e-15)

    @pytest.mark.parametrize("n_sites, p", [(10, 0), (10, 6), (1, 1)])
    def test_p_out_of_range(self, n_sites, p):
        with pytest.raises(ValueError):
            pair_state(n_sites, p)

    def test_asymmetric_amplitude_is_rejected(self):
        psi = np.zeros((3, 3))
        psi[0, 1] = 1.0
        with pytest.raises(ValueError):
            TwoExcitationAmplitude(psi=psi)


class TestMomentumModes:
    @pytest.mark.parametrize("n_sites", [6, 7, 40])
    def test_orthonormal(self, n_sites):
        modes = [momentum_mode_pair(n_sites, l) for l in range(n_sites // 2 + 1)]
        gram = np.array([[bosonic_overlap(a, b) for b in modes] for a in modes])
        np.testing.assert_allclose(gram, np.eye(len(modes)), atol=1e-12)

    @pytest.mark.parametrize("l", [1, 3])
    def test_equals_symmetrized_product_of_opposite_waves(self, l):
        plus, minus = spin_wave(10, l).amplitudes, spin_wave(10, -l).amplitudes
        product = 0.5 * (np.outer(plus, minus) + np.outer(minus, plus))
        np.testing.assert_allclose(momentum_mode_pair(10, l).psi, product, atol=1e-15)

    def test_zero_mode_equals_doubly_occupied_uniform_wave(self):
        np.testing.assert_allclose(momentum_mode_pair(10, 0).psi, product_pair(spin_wave(10)).psi, atol=1e-15)

    def test_l_out_of_range(self):
        with pytest.raises(ValueError):
            momentum_mode_pair(10, 6)


class TestOverlaps:
    @pytest.mark.parametrize("p", [5, 10])
    def test_two_dominant_modes(self, p):
        xi = overlap_spectrum(40, p)
        weights = np.abs(xi) ** 2

        # The half-integer wave number p − ½ splits between l = p − 1 and l = p,
        # each near 4/π², with the rest spread over the neighbours
        assert 0.35 <= weights[p - 1] <= 0.45
        assert 0.35 <= weights[p] <= 0.45
        assert weights[p - 1] + weights[p] == pytest.approx(8 / math.pi ** 2, abs=0.05)
        assert xi[p - 1].real > 0 > xi[p].real

        others = np.delete(weights, [p - 1, p])
        assert others.max() < 0.07

    def test_central_pair_state_weights(self):
        weights = np.abs(overlap_spectrum(40, 10)) ** 2
        assert weights[9] == pytest.approx(0.409, abs=0.005)
        assert weights[10] == pytest.approx(0.404, abs=0.005)

    @pytest.mark.parametrize("p", [2, 3])
    def test_low_pair_states_leak_into_neighbouring_modes(self, p):
        weights = np.abs(overlap_spectrum(40, p)) ** 2
        others = np.delete(weights, [p - 1, p])
        assert 0.05 < others.max() < 0.095

    def test_lowest_pair_state_is_mostly_uniform(self):
        xi = overlap_spectrum(40, 1)
        assert abs(xi[0]) ** 2 == pytest.approx(8 / math.pi ** 2, abs=0.01)

    def test_overlaps_are_real(self):
        assert np.max(np.abs(overlap_spectrum(40, 10).imag)) < 1e-14

    @pytest.mark.parametrize("n_sites", [9, 40])
    def test_expansion_is_complete(self, n_sites):
        for p in range(1, n_sites // 2 + 1):
            assert np.sum(np.abs(overlap_spectrum(n_sites, p)) ** 2) == pytest.approx(1.0, abs=1e-10)

    def test_overlap_table_rows(self):
        rows = overlap_table(40, [1, 10])
        assert len(rows) == 2 * 21
        assert {row["p"] for row in rows} == {1, 10}
        for row in rows:
            assert row["weight"] == pytest.approx(row["xi_real"] ** 2 + row["xi_imag"] ** 2)

    def test_overlap_on_mismatched_lattices(self):
        with pytest.raises(ShapeMismatchError):
            bosonic_overlap(pair_state(10, 1), pair_state(12, 1))


class TestPreparation:
    def test_blockade_radius(self):
        assert blockade_radius(PreparationParams(c6=64.0, rabi_gr=1.0)) == pytest.approx(2.0)

    def test_collective_rabi(self):
        rabi, duration = collective_rabi(PreparationParams(c6=1.0, rabi_gr=0.5), 16)
        assert rabi == pytest.approx(2.0)
        assert duration == pytest.approx(math.pi / 2)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            PreparationParams(c6=-1.0, rabi_gr=1.0)
        with pytest.raises(ValueError):
            collective_rabi(PreparationParams(c6=1.0, rabi_gr=1.0), 0)
