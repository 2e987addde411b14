"""Independent reference implementations used by the tests.

``FullSpace`` builds the complete 3^N-dimensional non-Hermitian Hamiltonian
of N three-level atoms (local basis g=0, e=1, s=2) by Kronecker products,
with no excitation-number truncation and no use of the package code.
"""

import itertools

import numpy as np

G, E, S = 0, 1, 2


def _local(n_atoms, op, site):
    out = np.eye(1)
    for k in range(n_atoms):
        out = np.kron(out, op if k == site else np.eye(3))
    return out


def _unit(i, j):
    m = np.zeros((3, 3), complex)
    m[i, j] = 1.0
    return m


class FullSpace:
    def __init__(self, n_atoms, gamma_1d, gamma_prime, omega, delta, delta2, potential,
                 loss_s=0.0, drive=0.0, phase=1.5 * np.pi):
        self.n = n_atoms
        self.z = np.arange(n_atoms)
        dim = 3**n_atoms
        h = np.zeros((dim, dim), complex)
        loc = lambda op, j: _local(n_atoms, op, j)  # noqa: E731
        for j in range(n_atoms):
            h += loc(_unit(E, E), j) * (-delta - 0.5j * gamma_prime)
            h += loc(_unit(S, S), j) * (-delta2 - 0.5j * loss_s)
            h += -omega * loc(_unit(E, S), j) - np.conj(omega) * loc(_unit(S, E), j)
            c = np.sqrt(gamma_1d / 2) * np.exp(1j * phase * self.z[j])
            h += -drive * (c * loc(_unit(E, G), j) + np.conj(c) * loc(_unit(G, E), j))
            for l in range(n_atoms):
                rate = -0.5j * gamma_1d * np.exp(1j * phase * abs(j - l))
                h += rate * loc(_unit(E, G), j) @ loc(_unit(G, E), l)
                if j != l:
                    h += -potential(abs(j - l)) * loc(_unit(S, S), j) @ loc(_unit(S, S), l)
        self.h = h

    def index(self, config):
        return int(np.ravel_multi_index(tuple(config), (3,) * self.n))

    def steady_state(self):
        """Fix the all-ground amplitude to 1 and solve the rest exactly."""
        rest = np.arange(1, self.h.shape[0])
        c = np.linalg.solve(self.h[np.ix_(rest, rest)], -self.h[rest, 0])
        return np.concatenate([[1.0], c])

    def single(self, vec, level, j):
        cfg = [G] * self.n
        cfg[j] = level
        return vec[self.index(cfg)]

    def pair(self, vec, level_j, j, level_l, l):
        cfg = [G] * self.n
        cfg[j], cfg[l] = level_j, level_l
        return vec[self.index(cfg)]

    def from_amplitudes(self, amp0, amp1, pair):
        """Embed hierarchy amplitudes into the full space."""
        n = self.n
        vec = np.zeros(3**n, complex)
        vec[0] = amp0
        for j in range(n):
            vec[self.index([E if k == j else G for k in range(n)])] = amp1[j]
            vec[self.index([S if k == j else G for k in range(n)])] = amp1[n + j]
        for j, l in itertools.permutations(range(n), 2):
            for a, b in ((E, E), (E, S), (S, S)):
                cfg = [G] * n
                cfg[j], cfg[l] = a, b
                row = j if a == E else n + j
                col = l if b == E else n + l
                vec[self.index(cfg)] = pair[row, col]
        return vec

    def two_excitation_count(self):
        return sum(1 for cfg in itertools.product(range(3), repeat=self.n)
                   if sum(c != G for c in cfg) == 2)


def free_gaussian(x, t, sigma0, a):
    """Solution of ``i psi_t = -a psi_xx`` from ``exp(-x^2 / (2 sigma0^2))``."""
    s = sigma0**2 + 2j * a * t
    return np.sqrt(sigma0**2 / s) * np.exp(-(x**2) / (2 * s))


def square_well_ground(depth, width):
    """Even ground state of ``-psi'' + W psi = eps psi`` with W = -depth on
    |r| < width: solves ``k tan(k width) = kappa`` for ``eps < 0``."""
    from scipy.optimize import brentq

    def f(eps):
        k = np.sqrt(depth + eps)
        return k * np.tan(k * width) - np.sqrt(-eps)

    # ground state: k width in (0, pi/2)
    lo = -depth + 1e-14
    hi = min(-1e-14, -depth + (np.pi / 2 / width) ** 2 - 1e-12)
    return brentq(f, lo, hi, xtol=1e-14)
