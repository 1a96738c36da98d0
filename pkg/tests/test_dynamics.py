import math

import numpy as np
import pytest

from conftest import random_state
from tempcorr import qmat
from tempcorr.dynamics import Channel, apply, choi, is_completely_positive, propagate_choi
from tempcorr.errors import ConfigError, DimensionError

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
KINDS = ["amplitude_damping", "phase_damping", "depolarizing", "identity"]
GRID = np.linspace(0, 5, 11)


def all_channels():
    for d in (2, 3):
        for kind in KINDS:
            for gt in GRID:
                yield Channel(kind, d, gt)


def test_depolarizing_long_time_limit():
    rng = np.random.default_rng(0)
    for d in (2, 3):
        rho = random_state(rng, d)
        assert np.allclose(apply(Channel("depolarizing", d, math.inf), rho), np.eye(d) / d)


def test_qutrit_phase_damping_coherence():
    rng = np.random.default_rng(1)
    rho = random_state(rng, 3)
    out = apply(Channel("phase_damping", 3, 0.7), rho)
    assert out[0, 1] == pytest.approx(math.exp(-0.7) * rho[0, 1])
    assert out[0, 2] == pytest.approx(math.exp(-0.7) * rho[0, 2])
    assert np.allclose(np.diag(out), np.diag(rho))


def test_qutrit_amplitude_damping_vacuum_population():
    gt = 0.9
    out = apply(Channel("amplitude_damping", 3, gt), np.diag([1.0, 0, 0]))
    assert out[2, 2].real == pytest.approx(math.exp(-2 * gt) - 2 * math.exp(-gt) + 1)
    assert out[0, 0].real == pytest.approx(math.exp(-2 * gt))
    assert out[1, 1].real == pytest.approx(2 * (math.exp(-gt) - math.exp(-2 * gt)))


def test_qubit_channel_forms():
    gt = 0.4
    p = math.exp(-gt)
    rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    ad = apply(Channel("amplitude_damping", 2, gt), rho)
    k0 = np.diag([1, math.sqrt(p)])
    k1 = np.array([[0, math.sqrt(1 - p)], [0, 0]])
    assert np.allclose(ad, k0 @ rho @ k0.T + k1 @ rho @ k1.T)
    dep = apply(Channel("depolarizing", 2, gt), rho)
    assert np.allclose(dep, p * rho + (1 - p) * np.eye(2) / 2)


@pytest.mark.parametrize("ch", list(all_channels()), ids=str)
def test_trace_preservation_and_cp(ch):
    rng = np.random.default_rng(int(ch.gamma_t * 10) + ch.dim)
    for _ in range(5):
        rho = random_state(rng, ch.dim)
        assert np.trace(ch(rho)).real == pytest.approx(1.0, abs=1e-12)
    assert is_completely_positive(ch)
    e = choi(ch)
    assert np.trace(e.operator).real == pytest.approx(ch.dim, abs=1e-10)
    assert np.max(np.abs(qmat.partial_trace(e.operator, e.dims, keep="A") - np.eye(ch.dim))) <= 1e-10


def test_choi_examples():
    assert np.allclose(choi(Channel("identity", 2)).operator, SWAP)
    for gt in (0.0, 0.3, 2.0):
        p = math.exp(-gt)
        expected = p * SWAP + (1 - p) * np.eye(4) / 2
        assert np.allclose(choi(Channel("depolarizing", 2, gt)).operator, expected)


def test_propagate_examples():
    rng = np.random.default_rng(2)
    rho = random_state(rng, 3)
    assert np.allclose(propagate_choi(choi(Channel("identity", 3)), rho), rho)
    gt = 0.6
    p = math.exp(-gt)
    out = propagate_choi(choi(Channel("depolarizing", 3, gt)), np.diag([1.0, 0, 0]))
    assert np.allclose(out, p * np.diag([1, 0, 0]) + (1 - p) * np.eye(3) / 3)
    diag = np.diag([0.5, 0.3, 0.2])
    assert np.allclose(propagate_choi(choi(Channel("phase_damping", 3, 1.3)), diag), diag)


@pytest.mark.parametrize("ch", [c for c in all_channels() if c.gamma_t in (0.0, 1.0, 5.0)], ids=str)
def test_apply_equals_propagate(ch):
    rng = np.random.default_rng(3)
    e = choi(ch)
    for _ in range(200):
        rho = random_state(rng, ch.dim)
        assert np.max(np.abs(apply(ch, rho) - propagate_choi(e, rho))) <= 1e-10


def test_transposed_propagation_is_not_the_channel():
    # the ρᵀ variant of the propagation formula would give 𝓔(ρᵀ), not 𝓔(ρ)
    rho = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    e = choi(Channel("identity", 2))
    assert not np.allclose(propagate_choi(e, rho.T), rho)


@pytest.mark.parametrize("kind", ["depolarizing", "phase_damping"])
@pytest.mark.parametrize("d", [2, 3])
def test_semigroup(kind, d):
    rng = np.random.default_rng(4)
    rho = random_state(rng, d)
    a, b = 0.37, 1.21
    two = apply(Channel(kind, d, b), apply(Channel(kind, d, a), rho))
    assert np.max(np.abs(two - apply(Channel(kind, d, a + b), rho))) <= 1e-10


def test_errors_and_specs():
    with pytest.raises(DimensionError):
        apply(Channel("depolarizing", 2, 0.1), np.eye(3) / 3)
    with pytest.raises(ValueError):
        apply(Channel("depolarizing", 2, 0.1), np.diag([2.0, -1.0]))
    with pytest.raises(ValueError):
        Channel("bogus", 2, 0.1)
    with pytest.raises(ValueError):
        Channel("depolarizing", 2, -1)
    assert Channel.from_spec({"kind": "depolarizing", "gamma": 2.0, "t": 0.25}, 3) == Channel("depolarizing", 3, 0.5)
    assert Channel.from_spec({"kind": "pd", "gamma_t": 1}, 2).kind == "phase_damping"
    with pytest.raises(ConfigError):
        Channel.from_spec({"kind": "depolarizing"}, 2)
    with pytest.raises(ConfigError):
        Channel.from_spec({"kind": "depolarizing", "gamma_t": 1, "extra": 2}, 2)
