"""Atom chain geometry and the non-Hermitian spin-model Hamiltonian.

Rates are measured in units of Gamma' and lengths in units of the lattice
spacing.  Amplitudes obey ``i d(psi)/dt = h psi``, so every dissipative
channel shows up as a negative imaginary part of ``h``.

Two-excitation amplitudes are held in one symmetric ``(2N, 2N)`` array
``pair`` indexed by the one-excitation basis ``{e_1..e_N, s_1..s_N}``::

    pair[e_j, e_l] = psi_ee^{jl}
    pair[e_j, s_l] = psi_es^{jl}    (e on atom j, s on atom l)
    pair[s_j, s_l] = psi_ss^{jl}

Entries with both labels on the same atom vanish identically (hard-core
spins).  With this layout the two-excitation Hamiltonian acts as
``h1 @ pair + pair @ h1.T`` followed by a pair-diagonal potential, which
keeps ``N = 200`` chains at O(N^3) cost per application.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_count, check_finite, check_positive
from .potentials import InteractionPotential


@dataclass(frozen=True)
class AtomChain:
    """Regular lattice of ``count`` atoms at ``z_j = j * spacing``."""

    count: int
    spacing: float = 1.0
    phase: float = 1.5 * np.pi  # k_p * spacing

    def __post_init__(self):
        check_count("count", self.count, 2)
        check_positive("spacing", self.spacing)
        check_finite("phase", self.phase)

    @property
    def positions(self):
        return np.arange(self.count) * self.spacing

    @property
    def wavevector(self):
        return self.phase / self.spacing

    @property
    def length(self):
        return (self.count - 1) * self.spacing

    def separations(self):
        z = self.positions
        return np.abs(z[:, None] - z[None, :])


def build_chain(count, spacing=1.0, phase=1.5 * np.pi):
    return AtomChain(count, spacing, phase)


@dataclass(frozen=True)
class LevelParams:
    """Single-atom rates and detunings of the g-e-s ladder.

    ``probe_detuning`` is the probe-minus-(g-e) detuning and
    ``two_photon_detuning`` the probe-minus-control offset from the g-s
    transition.  The bare e-level then sits at ``-probe_detuning`` and the
    s-level at ``-two_photon_detuning`` in the rotating frame.
    """

    gamma_1d: float
    gamma_prime: float = 1.0
    rabi_control: complex = 0.0
    probe_detuning: float = 0.0
    two_photon_detuning: float = 0.0

    def __post_init__(self):
        check_positive("gamma_1d", self.gamma_1d, allow_zero=True)
        check_positive("gamma_prime", self.gamma_prime)
        for name in ("rabi_control", "probe_detuning", "two_photon_detuning"):
            check_finite(name, getattr(self, name))

    @property
    def renormalized_detuning(self):
        return self.probe_detuning + self.two_photon_detuning


def waveguide_matrix(chain, gamma_1d):
    """Guided-mode exchange ``-i (gamma_1d / 2) exp(i k_p |z_j - z_l|)``."""
    check_positive("gamma_1d", gamma_1d, allow_zero=True)
    return -0.5j * gamma_1d * np.exp(1j * chain.wavevector * chain.separations())


def same_atom_mask(count):
    """True where both labels of a pair entry sit on the same atom."""
    idx = np.arange(2 * count) % count
    return idx[:, None] == idx[None, :]


@dataclass(frozen=True, eq=False)
class FewExcitationState:
    """Amplitudes of the 0-, 1- and 2-excitation manifolds.

    ``amp1`` stacks ``psi_e`` then ``psi_s``; ``pair`` uses the symmetric
    layout described in the module docstring.
    """

    amp0: complex
    amp1: np.ndarray
    pair: np.ndarray

    @property
    def count(self):
        return self.amp1.shape[0] // 2

    @property
    def amp_e(self):
        return self.amp1[: self.count]

    @property
    def amp_s(self):
        return self.amp1[self.count:]

    @property
    def amp_ee(self):
        n = self.count
        return self.pair[:n, :n]

    @property
    def amp_es(self):
        n = self.count
        return self.pair[:n, n:]

    @property
    def amp_ss(self):
        n = self.count
        return self.pair[n:, n:]

    def norms(self):
        """Squared norms of the three manifolds."""
        return (
            abs(self.amp0) ** 2,
            float(np.vdot(self.amp1, self.amp1).real),
            0.5 * float(np.vdot(self.pair, self.pair).real),
        )

    def norm2(self):
        return sum(self.norms())

    @classmethod
    def vacuum(cls, count):
        return cls(1.0 + 0j, np.zeros(2 * count, complex), np.zeros((2 * count,) * 2, complex))


@dataclass(frozen=True, eq=False)
class HamiltonianBlocks:
    """Assembled spin-model operators for one parameter set.

    ``source`` is the drive pattern: ``d(amp1)/dt`` gains
    ``drive(t) * amp0 * source``.  ``readout`` maps e-amplitudes onto the
    forward output field, ``E_out = E_in + readout @ amp_e``.
    """

    chain: AtomChain
    levels: LevelParams
    potential: InteractionPotential
    h1: np.ndarray
    pair_potential: np.ndarray
    source: np.ndarray
    readout: np.ndarray
    mask: np.ndarray = field(repr=False)

    @property
    def count(self):
        return self.chain.count

    def apply_h2(self, pair, potential_scale=1.0):
        """Two-excitation Hamiltonian acting on a symmetric ``pair`` array.

        Accepts a stack ``(..., 2N, 2N)``; entries on the same atom are
        returned as zero.
        """
        k = self.h1 @ pair
        out = k + np.swapaxes(k, -1, -2)
        n = self.count
        out[..., n:, n:] += potential_scale * self.pair_potential * pair[..., n:, n:]
        out[..., self.mask] = 0.0
        return out

    def pair_source(self, amp1):
        """Drive-induced feed of ``amp1`` into the two-excitation manifold."""
        b = np.zeros(2 * self.count, complex)
        b[: self.count] = self.source[: self.count]
        out = np.outer(b, amp1)
        out = out + out.T
        out[self.mask] = 0.0
        return out

    # packed basis: ee (j<l), es (all j != l), ss (j<l)
    def _pack_index(self):
        n = self.count
        ju, lu = np.triu_indices(n, 1)
        je, le = np.nonzero(~np.eye(n, dtype=bool))
        rows = np.concatenate([ju, je, n + ju])
        cols = np.concatenate([lu, n + le, n + lu])
        return rows, cols

    @property
    def pair_dimension(self):
        n = self.count
        return 2 * n * (n - 1)

    def pack(self, pair):
        rows, cols = self._pack_index()
        return pair[..., rows, cols]

    def unpack(self, vec):
        rows, cols = self._pack_index()
        vec = np.asarray(vec)
        out = np.zeros(vec.shape[:-1] + (2 * self.count,) * 2, complex)
        out[..., rows, cols] = vec
        out[..., cols, rows] = vec
        return out

    def h2_dense(self, potential_scale=1.0, chunk=256):
        """Explicit two-excitation matrix in the packed basis (small chains)."""
        dim = self.pair_dimension
        mat = np.empty((dim, dim), complex)
        for start in range(0, dim, chunk):
            stop = min(start + chunk, dim)
            unit = np.zeros((stop - start, dim), complex)
            unit[np.arange(stop - start), np.arange(start, stop)] = 1.0
            cols = self.pack(self.apply_h2(self.unpack(unit), potential_scale))
            mat[:, start:stop] = cols.T
        return mat


def assemble_blocks(chain, levels, potential=None):
    """Build the 0/1/2-excitation operators of the driven spin model."""
    if potential is None:
        potential = InteractionPotential.uniform(0.0)
    n = chain.count
    seps = chain.separations()
    v = potential(seps)
    if not np.all(np.isfinite(v)):
        raise ValueError("potential undefined at a chain separation")

    h1 = np.zeros((2 * n, 2 * n), complex)
    eye = np.eye(n)
    h1[:n, :n] = waveguide_matrix(chain, levels.gamma_1d) - (
        levels.probe_detuning + 0.5j * levels.gamma_prime) * eye
    h1[n:, n:] = -(levels.two_photon_detuning + 0.5j * potential.loss_rate_s) * eye
    h1[:n, n:] = -levels.rabi_control * eye
    h1[n:, :n] = -np.conj(levels.rabi_control) * eye

    pair_potential = -2.0 * np.asarray(v, float)
    np.fill_diagonal(pair_potential, 0.0)

    phase = np.exp(1j * chain.wavevector * chain.positions)
    coupling = np.sqrt(levels.gamma_1d / 2.0)
    source = np.zeros(2 * n, complex)
    source[:n] = 1j * coupling * phase
    readout = 1j * coupling * np.conj(phase)
    return HamiltonianBlocks(
        chain, levels, potential, h1, pair_potential, source, readout, same_atom_mask(n))
