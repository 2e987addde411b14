"""Weak-drive amplitude hierarchy of the spin model.

The coherent probe enters through the Mollow-transformed pump, so the
ground amplitude ``amp0`` stays fixed and the 1- and 2-excitation
amplitudes are solved order by order in the drive::

    d(amp1)/dt = -i h1 amp1 + E(t) amp0 source
    d(pair)/dt = -i H2 pair + E(t) B(amp1)

Output fields are assembled from the guided-mode readout.  All photon
observables are normally ordered, so the vacuum input drops out.
"""

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator, expm_multiply, gmres

from .model import FewExcitationState

log = logging.getLogger(__name__)

WEAK_DRIVE_LIMIT = 1e-2
STEP_LIMIT = 0.75
DENSE_PAIR_LIMIT = 600


class SolverError(RuntimeError):
    """A linear solve or time integration failed."""


@dataclass(frozen=True)
class DriveProfile:
    """Classical probe amplitude ``E_in(t)`` in units of sqrt(Gamma').

    A Gaussian pulse has intensity ``exp(-8 (t - center)^2 / length^2)``.
    """

    shape: str = "constant"
    amplitude: complex = 1e-2
    pulse_center: float = 0.0
    pulse_length: float = 1.0

    def __post_init__(self):
        if self.shape not in ("constant", "gaussian_pulse", "off"):
            raise ValueError(f"unknown drive shape {self.shape!r}")
        if self.shape == "gaussian_pulse" and self.pulse_length <= 0:
            raise ValueError("pulse_length must be > 0")
        if abs(self.amplitude) ** 2 > WEAK_DRIVE_LIMIT and self.shape != "off":
            warnings.warn(
                f"|E_in|^2 = {abs(self.amplitude) ** 2:.3g} exceeds the weak-drive "
                f"regime ({WEAK_DRIVE_LIMIT}); third-order terms are not modelled",
                stacklevel=2)

    @classmethod
    def constant(cls, amplitude):
        return cls("constant", amplitude)

    @classmethod
    def off(cls):
        return cls("off", 0.0)

    @classmethod
    def gaussian(cls, amplitude, center, length):
        return cls("gaussian_pulse", amplitude, center, length)

    @property
    def stationary(self):
        return self.shape != "gaussian_pulse"

    def __call__(self, t):
        t = np.asarray(t, float)
        if self.shape == "off":
            out = np.zeros_like(t, complex)
        elif self.shape == "constant":
            out = np.full_like(t, self.amplitude, complex)
        else:
            x = (t - self.pulse_center) / self.pulse_length
            out = self.amplitude * np.exp(-4.0 * x * x)
        return out if out.ndim else complex(out)


# ---------------------------------------------------------------- steady state

def _solve_single(blocks, drive_value):
    try:
        return np.linalg.solve(blocks.h1, -1j * drive_value * blocks.source)
    except LinAlgError as exc:
        raise SolverError("singular one-excitation Hamiltonian") from exc


class _SylvesterPreconditioner:
    """Exact inverse of ``Y -> h1 Y + Y h1^T`` via the eigenbasis of ``h1``."""

    def __init__(self, h1):
        lam, vec = np.linalg.eig(h1)
        self.vec = vec
        self.inv = np.linalg.inv(vec)
        self.denom = lam[:, None] + lam[None, :]
        if np.any(self.denom == 0):
            raise SolverError("singular two-excitation spectrum")

    def __call__(self, rhs):
        x = self.inv @ rhs @ self.inv.T / self.denom
        return self.vec @ x @ self.vec.T


def solve_pair(blocks, rhs, tol=1e-10, potential_scale=1.0, method="auto", restart=150):
    """Solve ``H2 pair = rhs`` on the hard-core two-excitation space."""
    if method == "auto":
        method = "dense" if blocks.pair_dimension <= DENSE_PAIR_LIMIT else "gmres"
    if method == "dense":
        mat = blocks.h2_dense(potential_scale)
        try:
            sol = lu_solve(lu_factor(mat, check_finite=False), blocks.pack(rhs))
        except (LinAlgError, ValueError) as exc:
            raise SolverError("singular two-excitation Hamiltonian") from exc
        return blocks.unpack(sol)
    if method != "gmres":
        raise ValueError(f"unknown pair solver {method!r}")

    dim = 2 * blocks.count
    mask = blocks.mask
    prec = _SylvesterPreconditioner(blocks.h1)

    def matvec(v):
        y = v.reshape(dim, dim)
        out = blocks.apply_h2(y, potential_scale)
        out[mask] = y[mask]
        return out.ravel()

    op = LinearOperator((dim * dim,) * 2, matvec=matvec, dtype=complex)
    pre = LinearOperator((dim * dim,) * 2, matvec=lambda v: prec(v.reshape(dim, dim)).ravel(),
                         dtype=complex)
    b = np.array(rhs, complex)
    b[mask] = 0.0
    if not np.any(b):
        return np.zeros_like(b)
    sol, info = gmres(op, b.ravel(), M=pre, rtol=tol, atol=0.0, restart=restart, maxiter=200)
    if info != 0:
        raise SolverError(f"GMRES did not converge (info={info})")
    y = sol.reshape(dim, dim)
    y = 0.5 * (y + y.T)
    y[mask] = 0.0
    return y


def _without_dark_levels(blocks):
    # With no control field the s-levels are neither driven nor coupled, so
    # their amplitudes vanish; give them a dummy decay to keep h1 invertible.
    n = blocks.count
    h1 = blocks.h1.copy()
    idx = np.arange(n, 2 * n)
    h1[idx, idx] = -1j
    return replace(blocks, h1=h1)


def steady_state(blocks, drive, method="auto", tol=1e-10, order=2):
    """Stationary amplitudes under a constant drive, exact to second order.

    ``order=1`` skips the pair solve and leaves the two-excitation manifold
    empty, which is all that single-photon transmission needs.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if not drive.stationary:
        raise ValueError("steady_state needs a constant (or off) drive")
    amp = complex(drive(0.0))
    n = blocks.count
    if blocks.levels.rabi_control == 0:
        blocks = _without_dark_levels(blocks)
    if amp == 0:
        return FewExcitationState(1.0 + 0j, np.zeros(2 * n, complex), np.zeros((2 * n,) * 2, complex))
    amp1 = _solve_single(blocks, amp)
    if order == 1:
        return FewExcitationState(1.0 + 0j, amp1, np.zeros((2 * n,) * 2, complex))
    pair = solve_pair(blocks, -1j * amp * blocks.pair_source(amp1), tol=tol, method=method)
    return FewExcitationState(1.0 + 0j, amp1, pair)


# ---------------------------------------------------------------- time domain

def generator_scale(blocks):
    """Spectral-radius bound of the two-excitation generator."""
    rho1 = np.abs(np.linalg.eigvals(blocks.h1)).max()
    return 2.0 * rho1 + np.abs(blocks.pair_potential).max()


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time series of one run.

    ``out1`` and ``out2`` are the forward output amplitudes (first order and
    equal-time two-photon) at every grid time; ``states`` are kept only at
    ``stored`` indices.
    """

    times: np.ndarray
    drive: np.ndarray
    out1: np.ndarray
    out2: np.ndarray
    pair_norm: np.ndarray
    mean_separation: np.ndarray
    stored: np.ndarray
    states: list = field(repr=False)

    def state_at(self, index):
        k = int(np.searchsorted(self.stored, index))
        if k == self.stored.size or self.stored[k] != index:
            raise KeyError(f"no state stored at grid index {index}")
        return self.states[k]


def _uniform_step(t_grid):
    t = np.asarray(t_grid, float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("t_grid needs at least two times")
    steps = np.diff(t)
    if np.any(steps <= 0):
        raise ValueError("t_grid must be strictly increasing")
    dt = steps.mean()
    if np.abs(steps - dt).max() > 1e-9 * max(1.0, abs(dt)):
        raise ValueError("t_grid must be uniformly spaced")
    return t, dt


def evolve(blocks, drive, initial, t_grid, store_every=None, store_indices=None,
           potential_switch=None, check_step=True):
    """Fixed-step RK4 integration of the amplitude hierarchy.

    ``potential_switch(t)`` scales the pair potential (default: always on).
    Raises ``ValueError`` when the step exceeds ``STEP_LIMIT`` over the
    generator scale and ``SolverError`` on non-finite amplitudes.
    """
    t, dt = _uniform_step(t_grid)
    if check_step:
        limit = STEP_LIMIT / generator_scale(blocks)
        if dt > limit * (1 + 1e-12):
            raise ValueError(f"time step {dt:.4g} exceeds the stability limit {limit:.4g}")

    stored = set()
    if store_every:
        stored.update(range(0, t.size, int(store_every)))
        stored.add(t.size - 1)
    if store_indices is not None:
        stored.update(int(i) % t.size for i in store_indices)
    stored = np.array(sorted(stored), int)

    n = blocks.count
    amp0 = complex(initial.amp0)
    c1 = np.array(initial.amp1, complex)
    y = np.array(initial.pair, complex)
    h1 = blocks.h1
    src = blocks.source
    seps = blocks.chain.separations()
    scale = potential_switch if potential_switch is not None else (lambda _t: 1.0)

    def rhs(tt, c, p):
        e = complex(drive(tt))
        dc = -1j * (h1 @ c)
        dp = -1j * blocks.apply_h2(p, scale(tt))
        if e != 0:
            dc += e * amp0 * src
            dp += e * blocks.pair_source(c)
        return dc, dp

    size = t.size
    drive_vals = np.asarray(drive(t), complex)
    out1 = np.empty(size, complex)
    out2 = np.empty(size, complex)
    pnorm = np.empty(size)
    msep = np.empty(size)
    states = []
    zeta = blocks.readout

    for k in range(size):
        e = drive_vals[k]
        a1 = zeta @ c1[:n]
        ss = np.abs(y[n:, n:]) ** 2
        ss_tot = ss.sum()
        out1[k] = e * amp0 + a1
        out2[k] = e * e * amp0 + 2 * e * a1 + zeta @ y[:n, :n] @ zeta
        pnorm[k] = 0.5 * np.vdot(y, y).real
        msep[k] = (seps * ss).sum() / ss_tot if ss_tot > 0 else np.nan
        if not (np.isfinite(pnorm[k]) and np.all(np.isfinite(c1))):
            raise SolverError(f"non-finite amplitudes at t = {t[k]:.6g} (step {k})")
        if stored.size and k in stored:
            states.append(FewExcitationState(amp0, c1.copy(), y.copy()))
        if k == size - 1:
            break
        tk = t[k]
        k1c, k1p = rhs(tk, c1, y)
        k2c, k2p = rhs(tk + dt / 2, c1 + dt / 2 * k1c, y + dt / 2 * k1p)
        k3c, k3p = rhs(tk + dt / 2, c1 + dt / 2 * k2c, y + dt / 2 * k2p)
        k4c, k4p = rhs(tk + dt, c1 + dt * k3c, y + dt * k3p)
        c1 = c1 + dt / 6 * (k1c + 2 * k2c + 2 * k3c + k4c)
        y = y + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)

    return Trajectory(t, drive_vals, out1, out2, pnorm, msep, stored, states)


def prepare_spin_wave(chain, cm_profile, rel_profile, normalize=True):
    """Two-polariton spin wave ``cm(R) rel(r) exp(i k_p (z_j + z_l))`` in ss.

    ``R`` is the pair midpoint and ``r = z_j - z_l``; the profile is
    symmetrized, so a relative profile odd in ``r`` is rejected.
    """
    z = chain.positions
    mid = 0.5 * (z[:, None] + z[None, :])
    rel = z[:, None] - z[None, :]
    amp = np.asarray(cm_profile(mid), complex) * np.asarray(rel_profile(rel), complex)
    amp = 0.5 * (amp + amp.T)
    np.fill_diagonal(amp, 0.0)
    amp *= np.exp(1j * chain.wavevector * (z[:, None] + z[None, :]))
    norm2 = 0.5 * np.vdot(amp, amp).real
    if not norm2 > 0:
        raise ValueError("spin-wave profile has zero norm after bosonic symmetrization")
    if normalize:
        amp /= np.sqrt(norm2)
    n = chain.count
    pair = np.zeros((2 * n, 2 * n), complex)
    pair[n:, n:] = amp
    return FewExcitationState(0j, np.zeros(2 * n, complex), pair)


# ---------------------------------------------------------------- observables

def output_field(blocks, state, drive_value, position=None):
    """Forward output amplitudes ``<vac|E_out|psi>`` and ``<vac|E_out E_out|psi>``.

    The input carrier ``exp(i k_p z)`` is kept so that both amplitudes carry
    the propagation phase to ``position`` (default: the last atom).
    """
    chain = blocks.chain
    z_end = chain.positions[-1]
    if position is None:
        position = z_end
    if position < z_end:
        raise ValueError("output position must lie at or beyond the last atom")
    n = blocks.count
    zeta = blocks.readout
    e = complex(drive_value)
    a1 = zeta @ state.amp1[:n]
    carrier = np.exp(1j * chain.wavevector * position)
    amp1 = carrier * (e * state.amp0 + a1)
    amp2 = carrier**2 * (e * e * state.amp0 + 2 * e * a1 + zeta @ state.pair[:n, :n] @ zeta)
    return amp1, amp2


def ss_population(state):
    return np.abs(state.amp_ss) ** 2


def mean_separation(chain, state):
    """``<|z_j - z_l|>`` weighted by the ss populations."""
    pop = ss_population(state)
    total = pop.sum()
    if total == 0:
        return float("nan")
    return float((chain.separations() * pop).sum() / total)


@dataclass(frozen=True, eq=False)
class ObservableSet:
    i1: float
    i2: float
    ss_map: np.ndarray
    mean_separation: float
    g2: object = None


def observables(blocks, state, drive_value):
    """Normalized intensity, equal-time coincidence and ss statistics.

    ``i1`` and ``i2`` are ``None`` when the drive is zero.
    """
    ss_map = ss_population(state)
    msep = mean_separation(blocks.chain, state)
    e = complex(drive_value)
    if e == 0:
        return ObservableSet(None, None, ss_map, msep)
    amp1, amp2 = output_field(blocks, state, e)
    return ObservableSet(abs(amp1) ** 2 / abs(e) ** 2, abs(amp2) ** 2 / abs(e) ** 4, ss_map, msep)


@dataclass(frozen=True, eq=False)
class G2Curve:
    tau: np.ndarray
    values: np.ndarray

    def __call__(self, tau):
        return np.interp(tau, self.tau, self.values)


def _condition_on_detection(blocks, state):
    """Apply the (envelope) output operator once to a state.

    Returns the new ground amplitude and one-excitation vector.
    """
    n = blocks.count
    zeta = np.concatenate([blocks.readout, np.zeros(n, complex)])
    return zeta[:n] @ state.amp1[:n], state.pair @ zeta


def g2(blocks, drive, tau_grid, state=None):
    """Steady-state ``g2(tau)`` by conditioned evolution of the amplitudes."""
    if not drive.stationary or drive.shape == "off":
        raise ValueError("g2 needs a constant, non-zero drive")
    tau = np.asarray(tau_grid, float)
    if np.any(tau < 0):
        raise ValueError("tau must be >= 0")
    e = complex(drive.amplitude)
    if state is None:
        state = steady_state(blocks, drive)
    n = blocks.count
    zeta = blocks.readout
    a1, c_cond = _condition_on_detection(blocks, state)
    c0_cond = e * state.amp0 + a1
    c_cond = e * state.amp1 + c_cond
    c_inf = c0_cond * state.amp1
    values = np.empty(tau.size)
    order = np.argsort(tau)
    ts = tau[order]
    gen = -1j * blocks.h1
    diff = c_cond - c_inf
    prev_t = 0.0
    for k, tk in zip(order, ts):
        diff = expm_multiply(gen * (tk - prev_t), diff) if tk > prev_t else diff
        prev_t = tk
        amp = e * c0_cond + zeta @ (c_inf + diff)[:n]
        values[k] = abs(amp) ** 2 / abs(c0_cond) ** 4
    return G2Curve(tau, values)


def output_correlation_map(blocks, drive, trajectory, t1_indices, tau_steps):
    """Two-photon output ``|<E_out(t1 + tau) E_out(t1)>|^2`` for pulsed runs.

    Each selected state of ``trajectory`` is conditioned on a detection at
    ``t1`` and its one-excitation part is propagated under the same drive
    with the trajectory's RK4 step.  Returns an array of shape
    ``(len(t1_indices), tau_steps + 1)``.
    """
    t = trajectory.times
    dt = t[1] - t[0]
    n = blocks.count
    zeta = blocks.readout
    h1, src = blocks.h1, blocks.source
    out = np.zeros((len(t1_indices), tau_steps + 1))
    for row, k in enumerate(t1_indices):
        state = trajectory.state_at(k)
        e1 = complex(drive(t[k]))
        a1, c = _condition_on_detection(blocks, state)
        c0 = e1 * state.amp0 + a1
        c = e1 * state.amp1 + c

        def f(tt, v):
            return -1j * (h1 @ v) + complex(drive(tt)) * c0 * src

        tt = t[k]
        for j in range(tau_steps + 1):
            out[row, j] = abs(complex(drive(tt)) * c0 + zeta @ c[:n]) ** 2
            if j == tau_steps:
                break
            k1 = f(tt, c)
            k2 = f(tt + dt / 2, c + dt / 2 * k1)
            k3 = f(tt + dt / 2, c + dt / 2 * k2)
            k4 = f(tt + dt, c + dt * k3)
            c = c + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            tt += dt
    return out
