"""Shared helpers: brute-force oracles and small problem builders."""

import numpy as np

from splitlq.problem import LQProblem, TimeMatrix

C = TimeMatrix.from_constant


def taylor_expm(M, terms=40):
    """Scaled 40-term Taylor series oracle for the matrix exponential.

    Independent of the Pade kernel: scale to small norm, sum the series,
    square back.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    norm = np.linalg.norm(M, 1)
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-300) / 0.25))))
    X = M / 2.0**squarings
    F = np.eye(n)
    term = np.eye(n)
    for k in range(1, terms + 1):
        term = term @ X / k
        F = F + term
    for _ in range(squarings):
        F = F @ F
    return F


def canonical_j(n):
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def random_hamiltonian(rng, n, scale=1.0):
    """A 2n x 2n matrix M with J M symmetric."""
    S = rng.standard_normal((2 * n, 2 * n)) * scale
    S = 0.5 * (S + S.T)
    return -canonical_j(n) @ S


def random_spd(rng, n, shift=1.0):
    G = rng.standard_normal((n, n))
    return G @ G.T + shift * np.eye(n)


def random_psd(rng, n):
    G = rng.standard_normal((n, n))
    return G @ G.T


def random_lq(rng, n=2, r=1, T=1.0):
    A = rng.standard_normal((n, n)) * 0.5
    B = rng.standard_normal((n, r))
    Q = random_psd(rng, n)
    R = random_spd(rng, r)
    QT = random_psd(rng, n)
    x0 = rng.standard_normal(n)
    return LQProblem(A=C(A), B=C(B), Q=C(Q), R=C(R), QT=QT, x0=x0, t0=0.0, T=T)


def tanh_lq(n=1, T=1.0):
    """A one-dimensional problem with a smooth time-varying drift."""
    a = lambda t: np.array([[2.0 + np.tanh(5.0 * (t - 0.5))]])
    return LQProblem(
        A=TimeMatrix.from_function(a, (1, 1)),
        B=C([[1.0]]),
        Q=TimeMatrix.from_function(
            lambda t: np.array([[(2.0 / 11.0) * np.exp(-0.1 * t)]]), (1, 1)),
        R=TimeMatrix.from_function(
            lambda t: np.array([[(11.0 / 2.0) * np.exp(-0.1 * t)]]), (1, 1)),
        QT=np.zeros((1, 1)),
        x0=np.array([10.0]),
        t0=0.0,
        T=T,
    )


def fit_order(hs, errs):
    """Least-squares slope of log error against log step size."""
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
