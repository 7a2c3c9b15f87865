"""Benchmark systems used across the tests and demos."""
from __future__ import annotations

import numpy as np

from .lti import LtiSystem


def batch_reactor() -> LtiSystem:
    """The classic open-loop-unstable batch reactor, sampled at 0.5 s.

    A standard benchmark for data-driven and robust control studies; the
    discretized state matrix has an eigenvalue well outside the unit circle,
    which makes long open-loop experiments numerically hopeless and short
    ones attractive.  Full state measurement (C = I, D = 0).
    """
    A = np.array([
        [2.622, 0.320, 1.834, -1.066],
        [-0.238, 0.187, -0.136, 0.202],
        [0.161, 0.789, 0.286, 0.606],
        [-0.104, 0.764, 0.089, 0.736],
    ])
    B = np.array([
        [0.465, -1.550],
        [1.314, 0.085],
        [2.055, -0.673],
        [2.023, -0.160],
    ])
    return LtiSystem(A=A, B=B, C=np.eye(4), D=np.zeros((4, 2)))
