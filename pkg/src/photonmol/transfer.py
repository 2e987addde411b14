"""Linear transfer-matrix propagation through a chain of point scatterers.

Used as an independent check on the single-excitation sector of the spin
model: each atom is a lumped element with reflection ``r`` and
transmission ``t = 1 + r``, separated by free propagation of phase
``k_p z_a``.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_positive


@dataclass(frozen=True)
class ScattererCoefficients:
    r: complex
    t: complex

    @classmethod
    def from_reflection(cls, r):
        return cls(complex(r), 1.0 + complex(r))

    def transfer_matrix(self):
        if self.t == 0:
            raise ZeroDivisionError("scatterer with t = 0 has no transfer matrix")
        r, t = self.r, self.t
        return np.array([[t * t - r * r, r], [-r, 1.0]], complex) / t


def two_level_coefficients(gamma_1d, gamma_prime, delta_probe=0.0):
    """Single two-level atom, ``r = -G1d / (G1d + G' - 2i Delta)``.

    Only the resonant value is quoted in the source material; the detuned
    form follows from the same single-atom response and is checked against
    the spin model in the tests.
    """
    check_positive("gamma_prime", gamma_prime)
    check_positive("gamma_1d", gamma_1d, allow_zero=True)
    return ScattererCoefficients.from_reflection(
        -gamma_1d / (gamma_1d + gamma_prime - 2j * delta_probe))


def three_level_coefficients(gamma_1d, gamma_prime, omega, delta2, control_detuning=0.0):
    """Single EIT atom with a resonant control field.

    ``r = -G1d d / [(G1d + G' - 2i d) d + 2i |Omega|^2]`` with ``d`` the
    two-photon detuning.  With the control on resonance the probe's
    one-photon detuning equals ``d`` as well.  A detuned control is refused.
    """
    check_positive("gamma_prime", gamma_prime)
    check_positive("gamma_1d", gamma_1d, allow_zero=True)
    if control_detuning != 0:
        raise ValueError("three-level coefficients are only defined for a resonant control")
    if omega == 0 and delta2 == 0:
        raise ValueError("omega = 0 and delta2 = 0 is degenerate")
    om2 = abs(omega) ** 2
    r = -gamma_1d * delta2 / ((gamma_1d + gamma_prime - 2j * delta2) * delta2 + 2j * om2)
    return ScattererCoefficients.from_reflection(r)


def chain_response(coeffs, count, phase=1.5 * np.pi):
    """Total ``(t, r)`` for ``count`` identical scatterers a phase ``phase`` apart."""
    check_count("count", count, 1)
    cell = coeffs.transfer_matrix()
    prop = np.diag([np.exp(1j * phase), np.exp(-1j * phase)])
    step = cell @ prop
    total = np.linalg.matrix_power(step, count - 1) @ cell
    if total[1, 1] == 0:
        raise ZeroDivisionError("singular chain transfer matrix")
    return 1.0 / total[1, 1], -total[1, 0] / total[1, 1]


def chain_transmission(coeffs, count, phase=1.5 * np.pi):
    return chain_response(coeffs, count, phase)[0]


def optical_depth(count, gamma_1d, gamma_prime=1.0):
    """Resonant optical depth ``D = 2 N G1d / G'``."""
    check_positive("count", count)
    check_positive("gamma_1d", gamma_1d, allow_zero=True)
    check_positive("gamma_prime", gamma_prime)
    return 2.0 * count * gamma_1d / gamma_prime
