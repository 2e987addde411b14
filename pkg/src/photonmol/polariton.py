"""Dark-state polariton picture: coefficients, bound pairs, propagation and
design formulas.

Two polaritons obey

    H = -(1/4m) d^2/dR^2 - i v_g d/dR  -  (1/m) d^2/dr^2 - 2 V(r)

in center-of-mass ``R`` and relative ``r`` coordinates.  The mass is
complex, ``m = -|Omega|^2 / ((2 Delta_M + i Gamma') v_g^2)``, so the
kinetic term carries the absorption of the EIT window.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eig
from scipy.signal import find_peaks

from ._validation import check_positive

REFINEMENT_TOL = 1e-3


@dataclass(frozen=True)
class PolaritonParams:
    """Coefficients of the effective two-polariton Hamiltonian.

    The vacuum speed of light never enters, so the polariton is pure spin
    wave and ``mixing_angle`` is pi/2.
    """

    group_velocity: float
    mass: complex
    delta_m: float
    density: float
    gamma_1d: float
    gamma_prime: float = 1.0
    mixing_angle: float = np.pi / 2


def polariton_params(levels, density=1.0):
    check_positive("density", density)
    check_positive("gamma_1d", levels.gamma_1d)
    om2 = abs(levels.rabi_control) ** 2
    if om2 == 0:
        raise ValueError("rabi_control = 0: no EIT window, polariton undefined")
    vg = 2.0 * om2 / (levels.gamma_1d * density)
    dm = levels.renormalized_detuning
    mass = -om2 / ((2.0 * dm + 1j * levels.gamma_prime) * vg**2)
    return PolaritonParams(vg, mass, dm, density, levels.gamma_1d, levels.gamma_prime)


# ---------------------------------------------------------------- bound states

@dataclass(frozen=True, eq=False)
class BoundState:
    energy: complex
    separation: np.ndarray = field(repr=False)
    wavefunction: np.ndarray = field(repr=False)
    mean_separation: float = 0.0


def _potential_range(potential):
    p = potential.params
    if potential.kind == "square_well":
        return p["r_s"]
    if potential.kind == "single_exponential":
        return p["L"]
    if potential.kind == "double_band_edge":
        return max(p["L_u"], p["L_l"])
    if potential.kind == "tabulated":
        return 0.2 * p["separation"][-1]
    return 0.0


def relative_hamiltonian(potential, params, r_max, spacing):
    """Cell-centred finite differences of ``H_rel`` on ``[0, r_max]``.

    Zero derivative at ``r = 0`` (bosonic symmetry), hard wall at ``r_max``.
    """
    size = int(round(r_max / spacing))
    r = (np.arange(size) + 0.5) * spacing
    lap = np.diag(np.full(size, -2.0)) + np.diag(np.ones(size - 1), 1) + np.diag(np.ones(size - 1), -1)
    lap[0, 0] = -1.0
    ham = -lap / (params.mass * spacing**2) - 2.0 * np.diag(potential(r))
    return r, ham


def _solve_bound(potential, params, r_max, spacing, count):
    r, ham = relative_hamiltonian(potential, params, r_max, spacing)
    w, v = eig(ham)
    key = (params.mass * w).real
    order = np.argsort(key)
    out = []
    for k in order[:count]:
        if key[k] >= 0:
            break
        psi = v[:, k]
        psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * spacing)
        psi = psi * np.exp(-1j * np.angle(psi[np.argmax(np.abs(psi))]))
        prob = np.abs(psi) ** 2
        out.append(BoundState(complex(w[k]), r, psi, float(np.sum(r * prob) * spacing)))
    return out


def bound_states(potential, params, r_max, spacing=0.5, count=2, refine=True, tol=REFINEMENT_TOL):
    """Lowest bound eigenpairs of ``H_rel``, ground state first.

    A state counts as bound when ``Re(m E) < 0``, i.e. it sits below the
    continuum threshold of the (possibly negative) mass.  With ``refine``
    the energies are recomputed on a mesh of half the spacing and a relative
    shift above ``tol`` raises ``ValueError``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    check_positive("spacing", spacing)
    reach = _potential_range(potential)
    if r_max < 5 * reach:
        raise ValueError(f"r_max = {r_max} is shorter than 5x the potential range {reach}")
    states = _solve_bound(potential, params, r_max, spacing, count)
    if refine and states:
        fine = _solve_bound(potential, params, r_max, spacing / 2, len(states))
        for a, b in zip(states, fine):
            shift = abs(a.energy - b.energy) / abs(b.energy)
            if shift > tol:
                raise ValueError(
                    f"grid too coarse: bound-state energy moved by {shift:.2e} under refinement")
    return states


# ---------------------------------------------------------------- propagation

@dataclass(frozen=True, eq=False)
class EffectiveTrajectory:
    times: np.ndarray
    center: np.ndarray = field(repr=False)
    relative: np.ndarray = field(repr=False)
    norm: np.ndarray = field(repr=False)
    mean_separation: np.ndarray = field(repr=False)
    stored: np.ndarray = field(repr=False)
    states: list = field(repr=False)


def relative_grid(size, spacing):
    """Symmetric periodic grid ``r_k = (k - size/2 + 1/2) spacing``."""
    return (np.arange(size) - size / 2 + 0.5) * spacing


def _check_resolved(psi, axis, name, tol=1e-8):
    spec = np.abs(np.fft.fft(psi, axis=axis)) ** 2
    k = np.abs(np.fft.fftfreq(psi.shape[axis]))
    outer = k > 0.4  # beyond 80% of Nyquist
    shape = [1, 1]
    shape[axis] = -1
    frac = (spec * outer.reshape(shape)).sum() / spec.sum()
    if frac > tol:
        raise ValueError(f"{name} grid under-resolves psi0 (spectral tail {frac:.2e})")


def propagate_effective(potential, params, psi0, center, relative, t_grid,
                        store_every=None, include_loss=True):
    """Strang split-step evolution of a two-body amplitude ``psi0[R, r]``.

    ``center`` and ``relative`` are uniform periodic grids; ``relative``
    must be symmetric about 0 (see ``relative_grid``).  Kinetic and drift
    factors are exact in wavevector space, including the complex mass.
    """
    psi = np.array(psi0, complex)
    center = np.asarray(center, float)
    relative = np.asarray(relative, float)
    if psi.shape != (center.size, relative.size):
        raise ValueError("psi0 must have shape (len(center), len(relative))")
    if not np.allclose(relative, -relative[::-1]):
        raise ValueError("relative grid must be symmetric about r = 0")
    if not np.allclose(psi, psi[:, ::-1], atol=1e-12 * np.abs(psi).max()):
        raise ValueError("psi0 must be even in r")
    _check_resolved(psi, 0, "center")
    _check_resolved(psi, 1, "relative")

    t = np.asarray(t_grid, float)
    dt = t[1] - t[0]
    if np.any(np.abs(np.diff(t) - dt) > 1e-9 * max(1.0, abs(dt))) or dt <= 0:
        raise ValueError("t_grid must be uniform and increasing")
    dR = center[1] - center[0]
    dr = relative[1] - relative[0]
    kR = 2 * np.pi * np.fft.fftfreq(center.size, dR)
    kr = 2 * np.pi * np.fft.fftfreq(relative.size, dr)
    inv_m = 1.0 / params.mass
    kin = (kR**2 / 4 * inv_m + params.group_velocity * kR)[:, None] + (kr**2 * inv_m)[None, :]
    kin_step = np.exp(-1j * kin * dt)
    pot = 2.0 * np.asarray(potential(np.abs(relative)), complex)
    if include_loss:
        pot = pot + 1j * potential.loss_rate_s  # two s-atoms, Gamma_s / 2 each
    half = np.exp(0.5j * pot * dt)[None, :]

    stored = set(range(0, t.size, int(store_every))) | {t.size - 1} if store_every else set()
    absr = np.abs(relative)[None, :]
    norm = np.empty(t.size)
    msep = np.empty(t.size)
    states, kept = [], []
    cell = dR * dr
    for k in range(t.size):
        prob = np.abs(psi) ** 2
        norm[k] = prob.sum() * cell
        msep[k] = (absr * prob).sum() / prob.sum()
        if k in stored:
            states.append(psi.copy())
            kept.append(k)
        if k == t.size - 1:
            break
        psi = half * np.fft.ifft2(kin_step * np.fft.fft2(half * psi))
    return EffectiveTrajectory(t, center, relative, norm, msep, np.array(kept, int), states)


# ---------------------------------------------------------------- design formulas

def oscillation_frequency(params, z0, detuning=None):
    """Harmonic molecule frequency ``32 v_g |Delta| / (Gamma_1D n z0^2)``.

    ``detuning`` defaults to the renormalized detuning of ``params``.
    """
    check_positive("z0", z0)
    det = abs(params.delta_m if detuning is None else detuning)
    return 32.0 * params.group_velocity * det / (params.gamma_1d * params.density * z0**2)


@dataclass(frozen=True)
class OscillationLength:
    length: float
    minimum: float

    @property
    def inside_window(self):
        """False when the molecule frequency leaves the EIT window."""
        return self.length >= self.minimum * (1 - 1e-12)


def oscillation_length(params, omega_m, z0=None):
    """``L_o = 2 pi v_g / omega_M``; ``minimum`` is the bound ``pi z0 / 2``."""
    check_positive("omega_m", omega_m)
    length = 2 * np.pi * params.group_velocity / omega_m
    return OscillationLength(length, np.pi * z0 / 2 if z0 is not None else 0.0)


@dataclass(frozen=True)
class DesignBudget:
    z0: float
    total_loss: float
    pulse_optical_depth: float
    total_optical_depth: float
    oscillation_length: float


def design_budget(c_lambda, beta=10.0, gamma_1d=1.0, gamma_prime=1.0, detuning=1.0, density=1.0):
    """Loss-optimal pulse length and the optical depth for one oscillation.

    The total loss balances propagation loss ``exp(-16 L / (z0 D_p))`` with
    the interaction loss of the band-edge cavities.  ``detuning`` is the
    single-photon detuning that sets the EIT window; the shortest allowed
    oscillation length is used for the total optical depth.
    """
    for name, val in (("c_lambda", c_lambda), ("beta", beta), ("gamma_1d", gamma_1d),
                      ("gamma_prime", gamma_prime), ("detuning", detuning), ("density", density)):
        check_positive(name, val)
    z0 = 2.0 * (4.0 * c_lambda * gamma_prime**2 / (beta * gamma_1d) ** 2) ** (1 / 3)
    exponent = 6 * np.pi * (2 * beta**2 * gamma_prime / (c_lambda * gamma_1d)) ** (1 / 3)
    d_pulse = 48 * np.pi / exponent
    l_osc = np.pi * gamma_1d * density * z0**2 / (16.0 * abs(detuning))
    d_total = 2 * density * gamma_1d * l_osc / gamma_prime
    return DesignBudget(z0, float(np.exp(-exponent)), d_pulse, d_total, l_osc)


def oscillation_period(times, values, prominence=0.1):
    """Period from the first maximum and the following minimum of a series.

    Only extrema with a prominence above ``prominence`` times the peak-to-peak
    range count, so early transients are skipped.  Extrema are refined by a
    parabola through the three nearest samples.  Returns ``nan`` when no
    complete half-oscillation is present.
    """
    t = np.asarray(times, float)
    y = np.asarray(values, float)
    span = np.ptp(y)
    if not np.isfinite(span) or span == 0:
        return float("nan")
    peaks = find_peaks(y, prominence=prominence * span)[0]
    if peaks.size == 0:
        return float("nan")
    first = peaks[0]
    troughs = find_peaks(-y, prominence=prominence * span)[0]
    troughs = troughs[troughs > first]
    if troughs.size == 0:
        return float("nan")

    def vertex(k):
        a, b, c = y[k - 1], y[k], y[k + 1]
        den = a - 2 * b + c
        shift = 0.5 * (a - c) / den if den != 0 else 0.0
        return t[k] + shift * (t[k + 1] - t[k])

    return 2.0 * (vertex(troughs[0]) - vertex(first))
