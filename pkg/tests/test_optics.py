import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockstat import (
    BeamsplitterSpec,
    FockVector,
    OccupationVector,
    SingleParticleUnitary,
    beamsplitter,
    bunching_enhancement,
    enumerate_basis,
    evolve,
    fourier_unitary,
    hom_distribution,
    lifted_matrix,
    pauli_amplitude_is_zero,
    random_unitary,
    transition_amplitude,
)
from fockstat.errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    NonUnitaryError,
    PauliExclusionError,
    TotalMismatchError,
    UndefinedRatioError,
)
from fockstat.optics import distribution_from_json, distribution_to_csv, distribution_to_json, load_unitary
from oracles import boson_amplitude_by_polynomial, fermion_amplitude_by_anticommutation

S = 1 / math.sqrt(2)
BS = beamsplitter()


def occ(*c):
    return OccupationVector(c)


def random_state(kind, n_modes, n_particles, seed):
    rng = np.random.default_rng(seed)
    basis = enumerate_basis(kind, n_modes, n_particles)
    v = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    return FockVector.from_terms(kind, n_modes, zip(basis, v))


class TestBeamsplitter:
    def test_fully_transmissive_is_identity(self):
        np.testing.assert_allclose(beamsplitter(BeamsplitterSpec(1.0, 0.0)).matrix, np.eye(2))

    def test_balanced_matrix(self):
        np.testing.assert_allclose(BS.matrix, [[S, 1j * S], [1j * S, S]], atol=1e-15)

    @given(st.floats(0, math.pi / 2))
    def test_always_unitary(self, theta):
        m = beamsplitter(BeamsplitterSpec(math.cos(theta), math.sin(theta))).matrix
        np.testing.assert_allclose(m @ m.conj().T, np.eye(2), atol=1e-12)

    def test_invalid_spec(self):
        with pytest.raises(InvalidArgumentError):
            BeamsplitterSpec(0.7071, 0.7071)
        with pytest.raises(InvalidArgumentError):
            BeamsplitterSpec(1.2, 0.0)


def test_unitary_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        SingleParticleUnitary([[1, 1], [0, 1]])


def test_unitary_json_round_trip(tmp_path):
    u = random_unitary(3, seed=3)
    path = tmp_path / "u.json"
    path.write_text(json.dumps(u.to_json()))
    np.testing.assert_array_equal(load_unitary(path).matrix, u.matrix)
    bad = {"n": 2, "rows": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}
    with pytest.raises(NonUnitaryError):
        SingleParticleUnitary.from_json(bad)
    with pytest.raises(DimensionMismatchError):
        SingleParticleUnitary.from_json({"n": 3, "rows": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]})


class TestEvolve:
    def test_identity_leaves_state(self):
        psi = random_state("boson", 3, 2, 0)
        out = evolve(np.eye(3), psi)
        for o in psi.basis():
            assert out.amplitude(o) == pytest.approx(psi.amplitude(o), abs=1e-15)

    def test_hom_output_state(self):
        out = evolve(BS, FockVector.basis_state("boson", (1, 1)))
        assert out.amplitude((2, 0)) == pytest.approx(1j * S, abs=1e-15)
        assert out.amplitude((0, 2)) == pytest.approx(1j * S, abs=1e-15)
        assert out.amplitude((1, 1)) == 0

    def test_two_photons_same_port(self):
        # frozen from the operator-polynomial oracle: (t a^+ + i r b^+)^2 / sqrt(2)
        out = evolve(BS, FockVector.basis_state("boson", (2, 0)))
        expected = {(2, 0): 0.5, (1, 1): 1j * S, (0, 2): -0.5}
        for o, a in expected.items():
            assert out.amplitude(o) == pytest.approx(a, abs=1e-14)
            assert out.amplitude(o) == pytest.approx(boson_amplitude_by_polynomial(BS.matrix, (2, 0), o), abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            evolve(np.eye(3), FockVector.basis_state("boson", (1, 1)))

    @pytest.mark.parametrize("kind", ["boson", "fermion"])
    @pytest.mark.parametrize("n_modes,n_particles", [(2, 1), (2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (4, 4)])
    def test_norm_preserved(self, kind, n_modes, n_particles):
        if kind == "fermion" and n_particles > n_modes:
            pytest.skip("does not fit")
        seed = 10 * n_modes + n_particles
        psi = random_state(kind, n_modes, n_particles, seed)
        out = evolve(random_unitary(n_modes, seed), psi)
        assert abs(out.norm() - 1) < 1e-10

    @pytest.mark.parametrize("kind", ["boson", "fermion"])
    def test_composition(self, kind):
        # |n> -> sum_m U[n, m]|m> composes as a row-vector action: first u1 then u2 is u1 @ u2
        u1, u2 = random_unitary(3, 1), random_unitary(3, 2)
        psi = random_state(kind, 3, 2, 5)
        a = evolve(u2, evolve(u1, psi)).to_array()
        b = evolve(u1 @ u2, psi).to_array()
        np.testing.assert_allclose(a, b, atol=1e-9)


class TestTransitionAmplitude:
    def test_identical_inputs_to_same_output(self):
        amp = transition_amplitude(BS, (2, 0), (0, 2))
        assert amp == pytest.approx(-0.5, abs=1e-15)
        assert abs(amp) ** 2 == pytest.approx(abs(BS.matrix[0, 1]) ** 4)

    def test_distinct_inputs_to_same_output(self):
        amp = transition_amplitude(BS, (1, 1), (2, 0))
        assert amp == pytest.approx(1j * S, abs=1e-15)
        assert abs(amp) ** 2 == pytest.approx(2 * abs(BS.matrix[0, 0] * BS.matrix[1, 0]) ** 2)

    def test_fermion_double_occupancy(self):
        u = random_unitary(2, 0)
        with pytest.raises(PauliExclusionError):
            transition_amplitude(u, (1, 1), (2, 0), "fermion")
        assert transition_amplitude(u, (1, 1), (2, 0), "fermion", strict=False) == 0
        assert pauli_amplitude_is_zero((1, 1), (0, 2))
        assert not pauli_amplitude_is_zero((1, 1), (1, 1))

    def test_total_mismatch(self):
        with pytest.raises(TotalMismatchError):
            transition_amplitude(BS, (1, 1), (1, 0))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_identical_input_amplitude_is_square(self, seed):
        u = random_unitary(2, seed).matrix
        for n in range(2):
            for m in range(2):
                inp = [0, 0]
                inp[n] = 2
                out = [0, 0]
                out[m] = 2
                amp = transition_amplitude(u, inp, out)
                assert abs(abs(amp) - abs(u[n, m] ** 2)) < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_distinct_input_amplitude_has_root_two(self, seed):
        u = random_unitary(3, seed).matrix
        for m in range(3):
            out = [0, 0, 0]
            out[m] = 2
            amp = transition_amplitude(u, (1, 0, 1), out)
            assert abs(abs(amp) - math.sqrt(2) * abs(u[0, m] * u[2, m])) < 1e-12

    @pytest.mark.parametrize("n_modes", [1, 2, 3])
    @pytest.mark.parametrize("n_particles", [1, 2, 3, 4])
    def test_matches_polynomial_oracle(self, n_modes, n_particles):
        u = random_unitary(n_modes, 31 * n_modes + n_particles).matrix
        basis = enumerate_basis("boson", n_modes, n_particles)
        for src in basis:
            for dst in basis:
                ref = boson_amplitude_by_polynomial(u, src.counts, dst.counts)
                assert abs(transition_amplitude(u, src, dst) - ref) < 1e-10

    @pytest.mark.parametrize("n_modes,n_particles", [(2, 1), (3, 2), (4, 2), (4, 3)])
    def test_fermions_match_anticommutation_oracle(self, n_modes, n_particles):
        u = random_unitary(n_modes, n_modes + 7 * n_particles).matrix
        basis = enumerate_basis("fermion", n_modes, n_particles)
        for src in basis:
            for dst in basis:
                ref = fermion_amplitude_by_anticommutation(u, src.counts, dst.counts)
                assert abs(transition_amplitude(u, src, dst, "fermion") - ref) < 1e-10


@pytest.mark.parametrize("kind", ["boson", "fermion"])
@pytest.mark.parametrize("n_modes", [1, 2, 3, 4])
@pytest.mark.parametrize("n_particles", [1, 2, 3])
def test_lifted_matrix_is_unitary(kind, n_modes, n_particles):
    if kind == "fermion" and n_particles > n_modes:
        pytest.skip("does not fit")
    _, m = lifted_matrix(random_unitary(n_modes, n_modes * 5 + n_particles), kind, n_particles)
    np.testing.assert_allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-9)


class TestBunching:
    def test_two_particles(self):
        assert bunching_enhancement(BS, [0, 1], 0) == pytest.approx(2.0, rel=1e-9)

    def test_three_particles_fourier(self):
        # oracle: |amp|^2 = 2/9, classical 1/27
        f = fourier_unitary(3)
        assert bunching_enhancement(f, [0, 1, 2], 0) == pytest.approx(6.0, rel=1e-9)
        amp = transition_amplitude(f, (1, 1, 1), (3, 0, 0))
        assert abs(amp) ** 2 == pytest.approx(2 / 9, rel=1e-12)

    def test_single_particle(self):
        assert bunching_enhancement(random_unitary(3, 4), [2], 1) == pytest.approx(1.0, rel=1e-12)

    def test_repeated_inputs_rejected(self):
        with pytest.raises(InvalidArgumentError):
            bunching_enhancement(BS, [0, 0], 0)

    def test_zero_classical_probability(self):
        with pytest.raises(UndefinedRatioError):
            bunching_enhancement(np.eye(2), [0, 1], 0)


class TestHOM:
    def test_distinct_ports_bunch(self):
        d = hom_distribution(BeamsplitterSpec.balanced(), (1, 1))
        assert d[occ(2, 0)] == pytest.approx(0.5, abs=1e-12)
        assert d[occ(0, 2)] == pytest.approx(0.5, abs=1e-12)
        assert d[occ(1, 1)] == pytest.approx(0.0, abs=1e-12)

    def test_same_port_is_classical(self):
        d = hom_distribution(None, (2, 0))
        assert [d[occ(2, 0)], d[occ(1, 1)], d[occ(0, 2)]] == pytest.approx([0.25, 0.5, 0.25], abs=1e-12)

    def test_odd_counts_cancel(self):
        d = hom_distribution(None, (2, 2))
        assert sum(d.values()) == pytest.approx(1.0, abs=1e-10)
        for o, p in d.items():
            if o[0] % 2:
                assert p < 1e-12

    def test_requires_two_modes(self):
        with pytest.raises(DimensionMismatchError):
            hom_distribution(None, (1, 1, 0))

    def test_serialization(self):
        d = hom_distribution(None, (2, 0))
        assert distribution_to_csv(d).splitlines()[0] == "occupation,probability"
        assert distribution_from_json(json.loads(json.dumps(distribution_to_json(d)))) == d
