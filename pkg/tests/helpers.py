"""Shared brute-force oracles for the test suite: central finite differences
and direct summation, kept deliberately independent of the package internals."""

import numpy as np


def fd_gradient(f, x, h=1e-5):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def fd_jacobian(f, x, h=1e-5):
    """Central-difference Jacobian of a vector function."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(f(x))
    J = np.empty((len(f0), len(x)))
    for i in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        J[:, i] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * h)
    return J


def direct_hamiltonian(n, pot, omega, u):
    """H by literal term-by-term summation over sites, no vectorization."""
    total = 0.0
    for j in range(n):
        uj = u[2 * j:2 * j + 2]
        up = u[2 * ((j + 1) % n):2 * ((j + 1) % n) + 2]
        s = uj @ uj
        diff = up - uj
        total += pot(s, 0) + omega * s - diff @ diff
    return 0.5 * total
