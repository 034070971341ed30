"""System and learner factories shared by the test modules."""
import numpy as np

from coreset_smi import sim
from coreset_smi.learner import LearnerConfig

A2 = [[0.5366, 0.2038], [-0.0406, 0.6310]]
B2 = [[-0.02], [0.4730]]

A_BOEING = [[0.99, 0.03, -0.02, -0.32], [0.01, 0.47, 4.7, 0.0], [0.02, -0.06, 0.4, 0.0], [0.01, -0.04, 0.72, 0.99]]
B_BOEING = [[0.01, 0.99], [-3.44, 1.66], [-0.83, 0.44], [-0.47, 0.25]]


def second_order(disturbance="ball", noise=None):
    dist = sim.BallUniform(0.5, 2) if disturbance == "ball" else sim.HypercubeUniform([0.5, 0.5])
    return sim.SystemSpec.linear(A2, B2, dist, sim.GaussianInput([0.0], [[5.0]]), [0.0, 0.0], noise)


def boeing():
    return sim.SystemSpec.linear(A_BOEING, B_BOEING, sim.HypercubeUniform([2.0] * 4),
                                 sim.GaussianInput([0.0, 0.0], np.eye(2)), [0.0] * 4)


def scalar_quadratic():
    """x+ = 0.5 x + 0.1 x^2 + w with |w| <= 0.5, regressor basis {x, x^2}."""
    basis = sim.MonomialBasis(((1,), (2,)))
    return sim.SystemSpec.nonlinear(basis, [[0.5, 0.1]], 1, 0, sim.HypercubeUniform([0.5]),
                                    sim.GaussianInput(np.zeros(0), np.zeros((0, 0))), [0.0])


def second_order_config(alpha0=-0.3, **kw):
    return LearnerConfig(alpha0, [0.5, 0.5], update_policy="exact", **kw)
