"""Atom-atom interaction potentials and band-edge design calculators.

Sign convention: the s-s interaction Hamiltonian is
``H_ss = -sum_{j != l} V(z_j - z_l) sigma_ss^j sigma_ss^l``, so a pair of
s-excitations at separation r has energy ``-2 V(r)`` and positive V lowers
the pair energy.  A uniform level shift ``+U`` therefore corresponds to
``V = -U``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ._validation import check_finite, check_positive

KINDS = ("uniform", "square_well", "single_exponential", "double_band_edge", "tabulated")


@dataclass(frozen=True, eq=False)
class InteractionPotential:
    """Tagged family of pair potentials ``V(r)`` plus a per-s-atom loss rate.

    Use the classmethod constructors; ``params`` holds the kind-specific
    values.  Instances are callable on separations (scalars or arrays).
    """

    kind: str
    params: dict = field(default_factory=dict)
    loss_rate_s: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        check_positive("loss_rate_s", self.loss_rate_s, allow_zero=True)
        p = self.params
        if self.kind == "square_well":
            check_positive("r_s", p["r_s"])
        elif self.kind == "single_exponential":
            check_positive("L", p["L"])
            if p["sign"] not in (1, -1):
                raise ValueError("sign must be +1 or -1")
        elif self.kind == "double_band_edge":
            check_positive("L_u", p["L_u"])
            check_positive("L_l", p["L_l"])
            if p["L_u"] == p["L_l"]:
                raise ValueError("L_u and L_l must differ")
        elif self.kind == "tabulated":
            r, v = p["separation"], p["value"]
            if r.ndim != 1 or r.shape != v.shape or r.size < 2 or np.any(np.diff(r) <= 0):
                raise ValueError("tabulated potential needs increasing separations")
            check_finite("value", v)

    @classmethod
    def uniform(cls, value, loss_rate_s=0.0):
        return cls("uniform", {"U": float(value)}, loss_rate_s)

    @classmethod
    def square_well(cls, depth, width, loss_rate_s=0.0):
        return cls("square_well", {"U": float(depth), "r_s": float(width)}, loss_rate_s)

    @classmethod
    def single_exponential(cls, strength, length, sign=1, loss_rate_s=0.0):
        return cls("single_exponential",
                   {"G": float(strength), "L": float(length), "sign": int(sign)}, loss_rate_s)

    @classmethod
    def double_band_edge(cls, strength, length_upper, length_lower, loss_rate_s=0.0):
        return cls("double_band_edge",
                   {"G": float(strength), "L_u": float(length_upper), "L_l": float(length_lower)},
                   loss_rate_s)

    @classmethod
    def tabulated(cls, separation, value, loss_rate_s=0.0):
        separation = np.asarray(separation, float)
        value = np.asarray(value, float)
        return cls("tabulated", {"separation": separation, "value": value}, loss_rate_s)

    def with_loss(self, loss_rate_s):
        return InteractionPotential(self.kind, dict(self.params), loss_rate_s)

    def scaled(self, factor):
        """Same shape with every strength multiplied by ``factor``."""
        p = dict(self.params)
        if self.kind == "tabulated":
            p["value"] = p["value"] * factor
        else:
            key = "U" if self.kind in ("uniform", "square_well") else "G"
            p[key] = p[key] * factor
        return InteractionPotential(self.kind, p, self.loss_rate_s)

    def __call__(self, separation):
        return evaluate(self, separation)

    def to_dict(self):
        out = {"kind": self.kind, "loss_rate_s": self.loss_rate_s}
        for key, val in self.params.items():
            out[key] = val.tolist() if isinstance(val, np.ndarray) else val
        return out


def evaluate(potential, separation):
    """Pair potential ``V(r)`` for ``r >= 0`` (scalar or array)."""
    r = np.asarray(separation, float)
    if np.any(r < 0):
        raise ValueError("separation must be >= 0")
    p = potential.params
    kind = potential.kind
    if kind == "uniform":
        out = np.full_like(r, p["U"])
    elif kind == "square_well":
        out = np.where(r < p["r_s"], p["U"], 0.0)
    elif kind == "single_exponential":
        out = p["sign"] * p["G"] * np.exp(-r / p["L"])
    elif kind == "double_band_edge":
        out = p["G"] * (np.exp(-r / p["L_u"]) - np.exp(-r / p["L_l"]))
    else:
        table_r, table_v = p["separation"], p["value"]
        if np.any(r < table_r[0]) or np.any(r > table_r[-1]):
            raise ValueError(
                f"separation outside tabulated range [{table_r[0]}, {table_r[-1]}]")
        out = np.interp(r, table_r, table_v)
    return out if out.ndim else float(out)


def load_tabulated(path, loss_rate_s=0.0):
    """Read a two-column text table (separation, rate)."""
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
    return InteractionPotential.tabulated(data[:, 0], data[:, 1], loss_rate_s)


def potential_extremum(potential):
    """Location and depth ``|V(r0)|`` of the interior extremum.

    Closed form for the double band-edge shape, bounded numerical search on
    a tabulated one.
    """
    if potential.kind == "double_band_edge":
        lu, ll = potential.params["L_u"], potential.params["L_l"]
        r0 = np.log(ll / lu) * lu * ll / (ll - lu)
        return r0, abs(evaluate(potential, r0))
    if potential.kind != "tabulated":
        raise ValueError(f"no interior extremum for a {potential.kind} potential")
    r, v = potential.params["separation"], potential.params["value"]
    k = int(np.argmax(np.abs(v)))
    if k == 0 or k == r.size - 1:
        raise ValueError("tabulated potential is monotonic in magnitude")
    res = minimize_scalar(lambda x: -abs(evaluate(potential, x)),
                          bounds=(r[k - 1], r[k + 1]), method="bounded")
    return float(res.x), abs(evaluate(potential, res.x))


@dataclass(frozen=True)
class BandEdgeParams:
    """Effective-cavity parameters of one photonic-crystal band edge.

    Rates (g, delta_band, band_frequency, kappa, gamma_d) share one unit;
    ``band_wavevector`` is an inverse length in the unit of the returned
    attenuation length.
    """

    g: float
    delta_band: float
    curvature: float = 1.0
    band_frequency: float = 1.0
    band_wavevector: float = 1.0
    drive_ratio: float = 0.05
    kappa: float = 0.0
    gamma_d: float = 0.0

    def __post_init__(self):
        if self.delta_band == 0:
            raise ValueError("delta_band must be non-zero")
        if not 0 <= self.drive_ratio < 1:
            raise ValueError("drive_ratio |Omega_s/Delta_s|^2 must lie in [0, 1)")

    @property
    def cooperativity(self):
        return self.g**2 / (self.kappa * self.gamma_d)


def attenuation_length(band, two_band=False):
    """Decay length of the band-gap photonic cloud.

    ``two_band=False`` gives ``sqrt(alpha w_b / (k_b^2 Delta_b))``; the
    two-band-edge variant carries an extra factor 2 under the root.  The two
    published forms differ and both are kept.
    """
    if band.delta_band <= 0:
        raise ValueError("delta_band must be > 0 (inside the gap)")
    factor = 2.0 if two_band else 1.0
    return float(np.sqrt(factor * band.curvature * band.band_frequency
                         / (band.band_wavevector**2 * band.delta_band)))


def interaction_strength(band):
    """``G = |Omega_s / Delta_s|^2 g^2 / Delta_band``."""
    return band.drive_ratio * band.g**2 / band.delta_band


def loss_rate(strength, cooperativity):
    """Optimized s-state loss ``2 G / sqrt(C)`` for one band edge."""
    check_positive("cooperativity", cooperativity)
    return 2.0 * abs(strength) / np.sqrt(cooperativity)


def cooperativity_at_range(c_lambda, length, wavelength):
    """Cooperativity of a cloud with decay length ``length``: ``C_lambda * lambda / L``."""
    for name, val in (("c_lambda", c_lambda), ("length", length), ("wavelength", wavelength)):
        check_positive(name, val)
    return c_lambda * wavelength / length


def band_edge_loss(strength, lengths, c_lambda, wavelength=4.0 / 3.0):
    """Total s-state loss summed over band edges with the given decay lengths."""
    return sum(loss_rate(strength, cooperativity_at_range(c_lambda, L, wavelength))
               for L in lengths)
