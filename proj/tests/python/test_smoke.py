import math

import numpy as np
import pytest

import eqaoa


def k4():
    return eqaoa.Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def test_max_cut_and_generator():
    assert eqaoa.max_cut(k4())[0] == 4
    g = eqaoa.generate_regular(10, 3, seed=5)
    assert g.degree == 3 and len(g.edges) == 15
    assert g == eqaoa.generate_regular(10, 3, seed=5)
    assert eqaoa.Graph.from_text(g.to_text()) == g
    with pytest.raises(ValueError):
        eqaoa.generate_regular(5, 3, seed=1)


def test_run_qaoa_is_normalized_and_symmetric():
    amps = eqaoa.run_qaoa(k4(), [0.4, 0.9], 1)
    assert amps.dtype == np.complex128 and amps.shape == (16,)
    assert abs(np.vdot(amps, amps).real - 1.0) < 1e-12
    # Complementing every bit leaves the state unchanged.
    assert np.allclose(amps, amps[::-1])
    uniform = eqaoa.run_qaoa(k4(), [0.0, 0.0], 1)
    assert np.allclose(uniform, np.full(16, 0.25))


def test_cvar_limits():
    g = k4()
    counts = {0b0011: 3, 0b0001: 5, 0b0000: 2}
    mean = (4 * 3 + 3 * 5 + 0 * 2) / 10
    assert eqaoa.cvar(counts, g, 1.0) == pytest.approx(mean, abs=1e-12)
    assert eqaoa.cvar(counts, g, 0.1) == 4.0
    assert eqaoa.max_count(counts, g) == 3.0
    assert eqaoa.cvar_tail_size(0.15, 10000) == 1500


def test_evolve_and_islands():
    cfg = {"g": 4, "seed": 3, "fitness": {"shots": 500}}
    r = eqaoa.evolve(k4(), cfg)
    assert r["evaluations"] == 80
    assert len(r["generations"]) == 5
    assert r["best_solution_cut"] == 4
    assert all(-math.pi < a <= math.pi for a in r["best_genotype"]["angles"])
    assert eqaoa.evolve(k4(), cfg) == r

    m = eqaoa.run_islands(eqaoa.generate_regular(6, 3, 1), {"g": 15, "fitness": {"shots": 300}}, islands=2, g_f=5)
    for isl in m["islands"]:
        assert [ev["at_generation"] for ev in isl["migrations"]] == [5, 10]
    with pytest.raises(ValueError):
        eqaoa.evolve(k4(), {"n_pop": 3})


def test_baseline():
    r = eqaoa.optimize_local(k4(), {"restarts": 3, "iterations": 10, "fitness": {"shots": 500}})
    assert len(r["restarts"]) == 3
    assert all(run["evaluations"] == 10 for run in r["restarts"])


def test_packet_round_trip():
    frame = eqaoa.encode_packet(1, 5, [0.1, -0.2], [0.3, 0.4], 4)
    p = eqaoa.decode_packet(frame)
    assert p["angles"] == [0.1, -0.2] and p["best_cut"] == 4
    broken = bytearray(frame)
    broken[-3] ^= 0x20
    with pytest.raises(RuntimeError):
        eqaoa.decode_packet(bytes(broken))
