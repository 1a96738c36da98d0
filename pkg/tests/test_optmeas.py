import json
import math

import numpy as np
import pytest

from conftest import random_unitary
from tempcorr.dynamics import Channel
from tempcorr.measurements import Pvm, mub_bases, mub_pvms
from tempcorr.optmeas import PvmParameterization, SearchOptions, decode, encode, maximize

TINY = SearchOptions(restarts=1, max_evals=25, seed=3)


def _same_pvm(p, q, tol=1e-10):
    return all(np.max(np.abs(a - b)) <= tol for a, b in zip(p.projectors, q.projectors))


def test_zero_parameters_give_computational_basis():
    for d in (2, 3):
        for p in decode(PvmParameterization(d, 2, np.zeros(2 * d * (d - 1)))):
            for k, proj in enumerate(p.projectors):
                assert np.allclose(proj, np.diag(np.eye(d)[k]))


def test_hadamard_angles_give_x_basis():
    (p,) = decode(PvmParameterization(2, 1, (math.pi / 4, 0.0)))
    assert _same_pvm(p, mub_pvms(2, 2)[1])


def test_random_parameters_give_valid_pvms():
    rng = np.random.default_rng(20)
    for d in (2, 3, 4):
        for p in decode(PvmParameterization(d, 3, rng.uniform(-4, 4, 3 * d * (d - 1)))):
            total = sum(p.projectors)
            assert np.allclose(total, np.eye(d), atol=1e-12)
            for i, a in enumerate(p.projectors):
                for j, b in enumerate(p.projectors):
                    assert np.allclose(a @ b, a if i == j else 0, atol=1e-12)


def test_wrong_parameter_count_rejected():
    with pytest.raises(ValueError):
        PvmParameterization(3, 1, (0.0, 0.0))


@pytest.mark.parametrize("d", [2, 3])
def test_encode_decode_round_trip(d):
    rng = np.random.default_rng(21)
    us = list(mub_bases(d)) + [random_unitary(rng, d) for _ in range(3)]

    for u, p in zip(us, decode(encode(us))):
        assert _same_pvm(p, Pvm.from_basis(u))


def test_column_phases_are_gauge():
    rng = np.random.default_rng(22)
    u = random_unitary(rng, 3)
    phased = u * np.exp(1j * rng.uniform(0, 6, 3))
    a, b = decode(encode([u]))[0], decode(encode([phased]))[0]
    assert _same_pvm(a, b)


def test_tsr_search_beats_or_matches_mub_start():
    ch = Channel("identity", 2)
    res = maximize("tsr", np.eye(2) / 2, ch, 2, TINY)
    assert res.best_value >= res.mub_value - 1e-9
    assert res.mub_value == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-7)
    assert res.trace[0]["start"] == "mub"
    assert res.restarts == 2 and res.evaluations >= 2


def test_determinism_and_restart_monotonicity():
    ch = Channel("amplitude_damping", 2, 0.4)
    rho = np.diag([0.7, 0.3])
    a = maximize("tsr", rho, ch, 2, SearchOptions(restarts=1, max_evals=15, seed=5))
    b = maximize("tsr", rho, ch, 2, SearchOptions(restarts=1, max_evals=15, seed=5))
    assert a.best_value == b.best_value and a.best_params == b.best_params
    c = maximize("tsr", rho, ch, 2, SearchOptions(restarts=2, max_evals=15, seed=5))
    assert c.best_value >= a.best_value


def test_long_time_depolarizing_is_zero():
    ch = Channel("depolarizing", 2, math.inf)
    for measure in ("tsr", "tnr"):
        res = maximize(measure, np.diag([1.0, 0.0]), ch, 2, SearchOptions(restarts=1, max_evals=12))
        assert res.best_value == pytest.approx(0.0, abs=1e-7)


def test_mixed_qutrit_tnr_is_zero():
    ch = Channel("phase_damping", 3, 0.5)
    res = maximize("tnr", np.eye(3) / 3, ch, 2, SearchOptions(restarts=0, max_evals=10))
    assert res.best_value == pytest.approx(0.0, abs=1e-7)


def test_result_serializes():
    res = maximize("tsr", np.eye(2) / 2, Channel("identity", 2), 1, SearchOptions(restarts=0, max_evals=5))
    doc = json.loads(json.dumps(res.to_dict()))
    assert doc["measure"] == "tsr" and len(doc["best_pvms"]) == 1


def test_bad_arguments():
    ch = Channel("identity", 2)
    with pytest.raises(ValueError):
        maximize("ter", np.eye(2) / 2, ch, 1)
    with pytest.raises(ValueError):
        maximize("tsr", np.eye(2) / 2, ch, 0)
