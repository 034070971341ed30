import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coreset_smi import sim
from coreset_smi.errors import DivergenceError, InputError

from systems import A2, B2, second_order, boeing


def test_simulate_shapes_and_identity():
    system = second_order()
    tr = sim.simulate(system, 150, 0)
    assert tr.states.shape == (151, 2) and tr.z.shape == (150, 3) and tr.K == 150
    pred = tr.z @ system.theta.T + tr.disturbances
    assert np.max(np.abs(tr.states[1:] - pred)) <= 1e-12
    assert np.all(np.linalg.norm(tr.disturbances, axis=1) <= 0.5)


def test_simulate_deterministic_and_seeded():
    a = sim.simulate(second_order(), 50, 4)
    b = sim.simulate(second_order(), 50, 4)
    c = sim.simulate(second_order(), 50, 5)
    assert np.array_equal(a.states, b.states)
    assert not np.array_equal(a.states, c.states)


def test_streams_are_independent():
    # changing the disturbance law leaves the input stream untouched
    a = sim.simulate(second_order("ball"), 30, 2)
    b = sim.simulate(second_order("hypercube"), 30, 2)
    assert np.array_equal(a.inputs, b.inputs)


def test_simulate_zero_horizon():
    tr = sim.simulate(second_order(), 0, 0)
    assert tr.states.shape == (1, 2) and tr.K == 0
    with pytest.raises(InputError):
        sim.simulate(second_order(), -1, 0)


def test_divergence():
    unstable = sim.SystemSpec.linear([[3.0]], [[0.0]], sim.HypercubeUniform([0.1]),
                                     sim.ConstantInput([0.0]), [1.0])
    with pytest.raises(DivergenceError):
        sim.simulate(unstable, 100, 0)


def test_system_validation():
    with pytest.raises(InputError):
        sim.SystemSpec.linear(A2, B2, sim.BallUniform(0.5, 3), sim.GaussianInput([0.0], [[1.0]]), [0, 0])
    with pytest.raises(InputError):
        sim.SystemSpec.linear(A2, B2, sim.BallUniform(0.5, 2), sim.GaussianInput([0.0], [[1.0]]), [0, 0, 0])
    with pytest.raises(InputError):
        sim.GaussianInput([0.0, 0.0], [[1.0]])
    with pytest.raises(InputError):
        sim.GaussianInput([0.0], [[-1.0]])
    with pytest.raises(InputError):
        sim.HypercubeUniform([0.0])


def test_sampler_exceeding_bound_rejected():
    class Liar(sim.HypercubeUniform):
        def sample(self, rng, size):
            return 2 * super().sample(rng, size)

    with pytest.raises(InputError):
        sim.SystemSpec.linear([[0.5]], [[1.0]], Liar([1.0]), sim.ConstantInput([0.0]), [0.0])


def test_noise_is_bounded_and_separate():
    clean = sim.simulate(second_order(), 40, 1)
    noisy = sim.simulate(second_order(noise=[0.05, 0.05, 0.05]), 40, 1)
    assert np.array_equal(clean.states, noisy.states)
    assert np.all(np.abs(noisy.z_noisy - noisy.z) <= 0.05)
    assert np.all(np.abs(noisy.x_noisy - noisy.states) <= 0.05)
    assert np.array_equal(clean.z_noisy, clean.z)


def test_nonlinear_regressor():
    basis = sim.MonomialBasis(((0, 0), (1, 0), (0, 1), (1, 1)))
    assert np.allclose(basis([2.0, 3.0]), [1.0, 2.0, 3.0, 6.0])
    assert basis(np.ones((5, 2))).shape == (5, 4)
    with pytest.raises(InputError):
        sim.MonomialBasis(((3,),))
    with pytest.raises(InputError):
        basis([1.0])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**40), st.integers(1, 6), st.floats(0.1, 5.0))
def test_ball_sampler_in_ball(seed, n, radius):
    W = sim.sample_ball_uniform(radius, n, seed, 2000)
    assert W.shape == (2000, n)
    assert np.all(np.linalg.norm(W, axis=1) <= radius * (1 + 1e-12))


def test_ball_sampler_is_uniform():
    n, R = 3, 2.0
    W = sim.sample_ball_uniform(R, n, 0, 200_000)
    r = np.linalg.norm(W, axis=1) / R
    # P(||w|| <= t R) = t^n for the uniform law
    for t in (0.3, 0.6, 0.9):
        assert abs(np.mean(r <= t) - t**n) < 0.005
    assert np.all(np.abs(W.mean(axis=0)) < 0.01)
    assert sim.sample_ball_uniform(R, n, 0).shape == (n,)


def test_trajectory_csv(tmp_path):
    tr = sim.simulate(second_order(), 5, 0)
    path = tmp_path / "traj.csv"
    tr.to_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["step", "x1", "x2", "u1", "w1", "w2", "z1", "z2", "z3"]
    assert len(rows) == 7
    assert float(rows[1][1]) == tr.states[0, 0]
    assert rows[-1][3:] == [""] * 6


# -- persistence of excitation ------------------------------------------------

def test_pe_cycling_unit_vectors():
    Z = np.array([[1.0, 0.0], [0.0, 1.0]] * 10)
    rep = sim.pe_check(Z, 2, 0.5)
    assert np.allclose(rep.lambda_min, 0.5) and rep.passed
    assert rep.b_z == 1.0


def test_pe_constant_regressor():
    rep = sim.pe_check(np.ones((10, 2)), 4, 0.01)
    assert np.allclose(rep.lambda_min, 0.0, atol=1e-12) and not rep.passed


def test_pe_single_window_and_short_horizon():
    rep = sim.pe_check(np.eye(3), 3, 0.1)
    assert len(rep.window_starts) == 1 and rep.worst == pytest.approx(1 / 3)
    with pytest.raises(InputError):
        sim.pe_check(np.eye(3), 4, 0.1)


def test_pe_matches_direct_computation():
    tr = sim.simulate(second_order(), 100, 3)
    rep = sim.pe_check(tr, 20, 0.02)
    for s in (0, 37, 80):
        Zw = tr.z[s:s + 20]
        assert rep.lambda_min[s] == pytest.approx(np.linalg.eigvalsh(Zw.T @ Zw / 20)[0], abs=1e-10)


def test_boeing_pe_positive():
    tr = sim.simulate(boeing(), 200, 0)
    assert sim.pe_check(tr, 50, 1e-3).worst > 0


@pytest.mark.parametrize("w, eps, q", [(0.5, 0.1, 0.2), (0.5, 0.0, 0.0), (0.5, 1.0, 1.0)])
def test_tightness(w, eps, q):
    assert sim.tightness_q_uniform(w, eps) == pytest.approx(q)


def test_tightness_empirical():
    rng = sim.stream(0, 1)
    W = rng.uniform(-0.5, 0.5, 200_000)
    assert abs(np.mean(np.abs(W) >= 0.5 - 0.1) - sim.tightness_q_uniform(0.5, 0.1)) < 0.005
    with pytest.raises(InputError):
        sim.tightness_q_uniform(0.0, 0.1)


# -- sign condition -----------------------------------------------------------

def test_sign_condition_alternating_offsets_pass():
    z = np.ones((20, 1))
    G = np.array([[0.1], [-0.1]] * 10)
    rep = sim.sign_condition_diagnostic(z, G, [0.0], beta=0.5, delta=1.0, N_G=2, probes=8)
    assert rep.fraction_satisfied == 1.0 and not rep.degenerate.any()


def test_sign_condition_one_sided_offsets_half_pass():
    z = np.ones((20, 1))
    G = np.full((20, 1), 0.1)
    rep = sim.sign_condition_diagnostic(z, G, [0.0], beta=0.5, delta=1.0, N_G=3, probes=64)
    # only probes pointing against the offset pass
    assert 0.0 < rep.fraction_satisfied < 1.0
    assert np.all(rep.satisfied == rep.satisfied[0])


def test_sign_condition_degenerate():
    z = np.ones((10, 1))
    rep = sim.sign_condition_diagnostic(z, np.zeros((10, 1)), [0.0], 0.5, 1.0, 2)
    assert rep.degenerate.all() and rep.fraction_satisfied == 0.0


def test_free_response_one_step():
    system = sim.SystemSpec.linear(A2, B2, sim.ZeroDisturbance(2), sim.ConstantInput([0.0]), [1.0, 0.0])
    tr = sim.simulate(system, 1, 0)
    assert np.array_equal(tr.states[1], np.asarray(A2) @ [1.0, 0.0])


def test_reference_systems_stay_bounded():
    assert np.max(np.abs(sim.simulate(second_order(), 150, 0).states)) < 100
    tr = sim.simulate(boeing(), 500, 0)
    assert tr.states.shape == (501, 4) and np.all(np.isfinite(tr.states))


def test_ball_sampler_examples():
    W = sim.sample_ball_uniform(0.5, 2, 7, 100_000)
    assert np.all(np.linalg.norm(W, axis=1) <= 0.5)
    sigma = 0.5 / 2 / np.sqrt(W.shape[0])  # per-axis std is R/2 in 2-D
    assert np.all(np.abs(W.mean(axis=0)) <= 3 * sigma)
    frac = np.mean(np.linalg.norm(W, axis=1) <= 0.25)
    assert abs(frac - 0.25) <= 3 * np.sqrt(0.25 * 0.75 / W.shape[0])


@pytest.mark.parametrize("eps, q", [(0.0, 0.0), (0.5, 1.0), (0.125, 0.25)])
def test_tightness_worked_examples(eps, q):
    assert sim.tightness_q_uniform(0.5, eps) == pytest.approx(q)


def test_pe_fails_for_settling_system():
    system = sim.SystemSpec.linear([[0.5, 0.1], [0.0, 0.6]], [[1.0], [0.5]], sim.ZeroDisturbance(2),
                                   sim.ConstantInput([1.0]), [0.0, 0.0])
    rep = sim.pe_check(sim.simulate(system, 200, 0), 20, 1e-3)
    assert not rep.passed and rep.lambda_min[-1] < 1e-10


def test_sign_condition_alternating_regressor():
    z = np.array([[1.0], [-1.0]] * 10)
    G = np.full((20, 1), 0.1)
    rep = sim.sign_condition_diagnostic(z, G, [0.0], beta=0.5, delta=1.0, N_G=2, probes=8)
    # in 1-D the probe opposing the offset passes in every window
    assert rep.satisfied.any(axis=1).all() and not rep.degenerate.any()


def test_sign_condition_weak_regressor_fails():
    z = np.full((20, 1), 0.1)
    G = np.array([[0.1], [-0.1]] * 10)
    rep = sim.sign_condition_diagnostic(z, G, [0.0], beta=0.5, delta=1.0, N_G=3)
    assert not rep.satisfied.any()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**40), st.floats(0.1, 3.0))
def test_ball_sampler_symmetric(seed, radius):
    W = sim.sample_ball_uniform(radius, 2, seed, 100_000)
    assert np.all(np.abs(W.mean(axis=0)) <= 4 / np.sqrt(1e5) * radius)


def test_pe_window_order_irrelevant():
    Z = sim.simulate(second_order(), 80, 6).z
    a = sim.pe_check(Z, 10, 0.0).lambda_min
    b = sim.pe_check(Z[::-1], 10, 0.0).lambda_min
    assert np.allclose(a, b[::-1], atol=1e-10)
