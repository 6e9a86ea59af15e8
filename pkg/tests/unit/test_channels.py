"""Unit tests for the noise channel library and noise placement."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from netbell.simulators import qmath
from netbell.simulators.channels import (
    CHANNEL_FACTORIES,
    ChannelFactory,
    NoiseChannel,
    NoiseLocation,
    NoiseModel,
    amplitude_damping,
    amplitude_damping_ancilla_unitary,
    apply_channel,
    biased_detector,
    channel_factories,
    check_gamma,
    check_stochastic,
    colored_noise,
    colored_noise_map,
    dephasing,
    dephasing_ancilla_unitary,
    depolarizing,
    depolarizing_qubit,
    depolarizing_source,
    fault_injection,
    gamma_from_visibility,
    is_unital,
    make_channel,
    partial_replacer,
    pauli_channel,
    resolve_placement,
    visibility_from_gamma,
    white_noise_detector,
)
from netbell.simulators.network import build_network

GAMMAS = [0.0, 0.13, 0.5, 0.87, 1.0]


@pytest.mark.unit
class TestKrausChannels:
    """Test Kraus realizations of the channel library."""

    @pytest.mark.parametrize("gamma", GAMMAS)
    @pytest.mark.parametrize(
        "factory",
        [
            depolarizing_qubit,
            depolarizing_source,
            dephasing,
            amplitude_damping,
            colored_noise,
        ],
    )
    def test_completeness(self, factory, gamma):
        """Test that every channel is trace preserving."""
        qmath.check_kraus_completeness(factory(gamma))

    def test_gamma_range(self):
        """Test the noise parameter range check."""
        assert check_gamma(1) == 1.0
        with pytest.raises(ValueError, match=r"gamma must lie in \[0, 1\]"):
            dephasing(1.5)
        with pytest.raises(ValueError, match="must lie in"):
            check_gamma(float("nan"))

    def test_dephasing_shrinks_coherence(self):
        """Test the coherence factor sqrt(1 - gamma)."""
        plus = np.full((2, 2), 0.5, dtype=complex)
        out = apply_channel(plus, dephasing(0.36))
        assert out[0, 1].real == pytest.approx(0.5 * 0.8)
        assert out[0, 0].real == pytest.approx(0.5)

    def test_amplitude_damping_relaxes(self):
        """Test population transfer from |1> to |0>."""
        excited = np.diag([0.0, 1.0]).astype(complex)
        out = apply_channel(excited, amplitude_damping(0.3))
        np.testing.assert_allclose(np.diag(out).real, [0.3, 0.7])

    @pytest.mark.parametrize("gamma", [0.2, 0.6])
    def test_source_depolarizing_visibility(self, gamma):
        """Test that a Bell pair keeps visibility 1 - 16 gamma / 15."""
        bell = qmath.ket_to_density(qmath.PHI_PLUS)
        out = apply_channel(bell, depolarizing_source(gamma))
        v = 1 - 16 * gamma / 15
        np.testing.assert_allclose(out, v * bell + (1 - v) * np.eye(4) / 4, atol=1e-12)

    @pytest.mark.parametrize("gamma", [0.2, 0.6])
    def test_qubit_depolarizing_visibility(self, gamma):
        """Test the Bloch-vector shrink 1 - 4 gamma / 3."""
        rho = np.diag([1.0, 0.0]).astype(complex)
        out = apply_channel(rho, depolarizing_qubit(gamma))
        assert (out[0, 0] - out[1, 1]).real == pytest.approx(1 - 4 * gamma / 3)

    def test_depolarizing_general_form(self, rng):
        """Test (1 - gamma) X + gamma Tr(X) I / 2^M on two qubits."""
        rho = qmath.random_density_matrix(2, rng)
        out = apply_channel(rho, depolarizing(0.4, 2))
        np.testing.assert_allclose(out, 0.6 * rho + 0.4 * np.eye(4) / 4, atol=1e-12)

    @pytest.mark.parametrize("gamma", [0.0, 0.3, 0.7, 1.0])
    def test_colored_kraus_reproduce_map(self, gamma, rng):
        """Test colored-noise Kraus operators against the affine map."""
        rho = qmath.random_density_matrix(2, rng)
        np.testing.assert_allclose(
            apply_channel(rho, colored_noise(gamma)),
            colored_noise_map(rho, gamma),
            atol=1e-9,
        )

    def test_unital(self):
        """Test the unitality predicate."""
        assert is_unital(dephasing(0.4))
        assert is_unital(depolarizing_source(0.4))
        assert is_unital(pauli_channel(0.1, 0.2, 0.3))
        assert not is_unital(amplitude_damping(0.4))
        assert not is_unital(colored_noise(0.4))

    def test_pauli_channel_probabilities(self):
        """Test that Pauli probabilities must sum to at most one."""
        with pytest.raises(ValueError, match="sum to"):
            pauli_channel(0.5, 0.4, 0.3)

    def test_partial_replacer(self, rng):
        """Test replacement with a fixed state."""
        sigma = qmath.random_density_matrix(1, rng)
        rho = qmath.random_density_matrix(1, rng)
        kraus = partial_replacer(0.25, sigma)
        qmath.check_kraus_completeness(kraus)
        np.testing.assert_allclose(
            apply_channel(rho, kraus), 0.75 * rho + 0.25 * sigma, atol=1e-12
        )


@pytest.mark.unit
class TestAncillaCircuits:
    """Test unitary dilations of the link channels."""

    @pytest.mark.parametrize(
        ("unitary", "kraus"),
        [
            (dephasing_ancilla_unitary, dephasing),
            (amplitude_damping_ancilla_unitary, amplitude_damping),
        ],
    )
    def test_dilation_matches_kraus(self, unitary, kraus, rng):
        """Test that tracing out the ancilla reproduces the channel."""
        rho = qmath.random_density_matrix(1, rng)
        joint = np.kron(rho, np.diag([1.0, 0.0]))
        out = qmath.apply_unitary(joint, unitary(0.42), [0, 1])
        np.testing.assert_allclose(
            qmath.partial_trace(out, [0]), apply_channel(rho, kraus(0.42)), atol=1e-12
        )


@pytest.mark.unit
class TestDetectors:
    """Test detector post-processing maps."""

    def test_white_noise(self):
        """Test the uniformly random flip."""
        np.testing.assert_allclose(
            white_noise_detector(0.4), [[0.8, 0.2], [0.2, 0.8]]
        )

    def test_biased(self):
        """Test the detector biased towards +1."""
        np.testing.assert_allclose(biased_detector(0.4) @ [0.0, 1.0], [0.4, 0.6])

    def test_stochastic_check(self):
        """Test column-stochastic validation."""
        with pytest.raises(ValueError, match="do not sum to 1"):
            check_stochastic(np.array([[0.5, 0.5], [0.6, 0.5]]))
        with pytest.raises(ValueError, match="negative"):
            check_stochastic(np.array([[1.5, 0.0], [-0.5, 1.0]]))

    def test_visibility_round_trip(self):
        """Test gamma and visibility conversions."""
        assert visibility_from_gamma(0.15, "source") == pytest.approx(0.84)
        assert gamma_from_visibility(0.6, "qubit") == pytest.approx(0.3)
        with pytest.raises(ValueError, match="qubit or source"):
            visibility_from_gamma(0.1, "link")


@pytest.mark.unit
class TestNoiseModel:
    """Test channel placement on network elements."""

    def test_uniform_dephasing_on_every_link(self):
        """Test one link channel per qubit."""
        network = build_network("bilocal")
        model = NoiseModel.from_placement("dephasing", 0.3, "uniform", network.topology)
        assert [c.targets for c in model.channels] == [(0,), (1,), (2,), (3,)]
        assert all(c.location is NoiseLocation.LINK for c in model.channels)

    def test_single_source(self):
        """Test single placement on the first source."""
        network = build_network("star:3")
        model = NoiseModel.from_placement(
            "depolarizing_source", 0.3, "single", network.topology
        )
        assert [c.targets for c in model.channels] == [(0, 3)]

    def test_explicit_detector_indices(self):
        """Test detector channels on chosen nodes."""
        network = build_network("chain:3")
        model = NoiseModel.from_placement(
            "white_noise_detector", [0.1, 0.2], [1, 3], network.topology
        )
        assert [c.targets for c in model.detector_channels] == [(1,), (3,)]
        maps = model.detector_maps(4)
        np.testing.assert_allclose(maps[0], np.eye(2))
        np.testing.assert_allclose(maps[3], white_noise_detector(0.2))

    def test_gamma_vector_length(self):
        """Test that a gamma vector needs one entry per placed channel."""
        network = build_network("bilocal")
        with pytest.raises(ValueError, match="gamma vector has 2 entries"):
            NoiseModel.from_placement(
                "dephasing", [0.1, 0.2], "uniform", network.topology
            )

    def test_none_model(self):
        """Test the noiseless model."""
        network = build_network("chsh")
        assert NoiseModel.from_placement("none", 0.5, "uniform", network.topology) == (
            NoiseModel()
        )

    def test_unknown_model(self):
        """Test unknown channel names."""
        network = build_network("chsh")
        with pytest.raises(ValueError, match="unknown noise model"):
            NoiseModel.from_placement("erasure", 0.1, "uniform", network.topology)

    @pytest.mark.parametrize(
        ("placement", "message"),
        [
            ("every", "placement must be"),
            ([], "at least one"),
            ([0, 0], "repeats"),
            ([5], "outside"),
        ],
    )
    def test_placement_errors(self, placement, message):
        """Test placement validation."""
        with pytest.raises(ValueError, match=message):
            resolve_placement(placement, 4)

    def test_channel_shape_checked(self):
        """Test that Kraus shapes must match the targets."""
        with pytest.raises(ValueError, match="does not match"):
            NoiseChannel(
                "dephasing",
                NoiseLocation.LINK,
                0.1,
                (0, 1),
                kraus=tuple(dephasing(0.1)),
            )

    def test_check_topology(self):
        """Test channels targeting qubits outside the register."""
        model = NoiseModel((make_channel("dephasing", 0.1, (5,)),))
        with pytest.raises(ValueError, match="outside"):
            model.check_topology(build_network("chsh").topology)


@pytest.mark.unit
class TestFaultInjection:
    """Test the temporary channel corruption used by verification."""

    def test_scales_and_restores(self):
        """Test that channels built inside the block use a scaled gamma."""
        original = CHANNEL_FACTORIES["dephasing"]
        with fault_injection("dephasing", scale=0.5):
            faulty = make_channel("dephasing", 0.64, (0,))
            assert CHANNEL_FACTORIES["dephasing"] is original
        np.testing.assert_allclose(faulty.kraus[0], np.diag([1.0, np.sqrt(0.68)]))
        restored = make_channel("dephasing", 0.64, (0,))
        np.testing.assert_allclose(restored.kraus[0], np.diag([1.0, 0.6]))

    def test_other_threads_are_unaffected(self):
        """Test that a fault stays inside the context that injected it."""
        with fault_injection("dephasing", scale=0.5):
            with ThreadPoolExecutor(max_workers=1) as pool:
                clean = pool.submit(make_channel, "dephasing", 0.64, (0,)).result()
        np.testing.assert_allclose(clean.kraus[0], np.diag([1.0, 0.6]))

    def test_nested_faults(self):
        """Test that nested injections stack and unwind."""
        with fault_injection("dephasing", scale=0.5):
            with fault_injection("depolarizing_qubit", scale=0.0):
                assert channel_factories()["dephasing"] is not (
                    CHANNEL_FACTORIES["dephasing"]
                )
                assert channel_factories()["depolarizing_qubit"] is not (
                    CHANNEL_FACTORIES["depolarizing_qubit"]
                )
            assert channel_factories()["depolarizing_qubit"] is (
                CHANNEL_FACTORIES["depolarizing_qubit"]
            )
        assert channel_factories() is CHANNEL_FACTORIES

    def test_explicit_factories(self):
        """Test a noise model built from a caller-supplied registry."""
        halved = {
            "dephasing": ChannelFactory(
                NoiseLocation.LINK, lambda gamma: dephasing(gamma / 2)
            )
        }
        topology = build_network("chsh").topology
        model = NoiseModel.from_placement(
            "dephasing", 0.64, "single", topology, factories=halved
        )
        np.testing.assert_allclose(
            model.channels[0].kraus[0], np.diag([1.0, np.sqrt(0.68)])
        )
        with pytest.raises(ValueError, match="unknown noise model"):
            NoiseModel.from_placement("colored", 0.1, "single", topology, halved)

    def test_unknown_channel(self):
        """Test that only registered channels can be corrupted."""
        with pytest.raises(ValueError, match="unknown channel"):
            with fault_injection("erasure"):
                pass
