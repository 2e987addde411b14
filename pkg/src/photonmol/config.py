"""Scenario configuration: strict YAML schema, presets and sweep axes.

Units are Gamma' = 1 for rates and z_a = 1 for lengths.  Unknown keys are
rejected so that typos in physics parameters fail loudly.
"""

import copy
import itertools
from importlib import resources
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .dynamics import DriveProfile
from .model import AtomChain, LevelParams
from .potentials import InteractionPotential, band_edge_loss, load_tabulated


class ConfigError(ValueError):
    """Invalid scenario configuration; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ChainSpec(_Strict):
    count: int = Field(ge=2)
    spacing: float = Field(1.0, gt=0)
    phase: float = 1.5 * np.pi


class LevelSpec(_Strict):
    gamma_1d: float = Field(ge=0)
    gamma_prime: float = Field(1.0, gt=0)
    rabi_control: Union[float, Tuple[float, float]] = 0.0
    probe_detuning: Optional[float] = None
    two_photon_detuning: float = 0.0
    renormalized_detuning: Optional[float] = None

    @model_validator(mode="after")
    def _one_detuning(self):
        if self.probe_detuning is not None and self.renormalized_detuning is not None:
            raise ValueError("give probe_detuning or renormalized_detuning, not both")
        return self

    @property
    def rabi(self):
        r = self.rabi_control
        return complex(*r) if isinstance(r, tuple) else complex(r)

    def build(self):
        if self.renormalized_detuning is not None:
            delta = self.renormalized_detuning - self.two_photon_detuning
        else:
            delta = self.probe_detuning or 0.0
        return LevelParams(self.gamma_1d, self.gamma_prime, self.rabi, delta,
                           self.two_photon_detuning)


class DriveSpec(_Strict):
    shape: Literal["constant", "gaussian_pulse", "off"] = "constant"
    amplitude: float = 1e-2
    pulse_center: float = 0.0
    pulse_length: float = Field(1.0, gt=0)

    def build(self):
        return DriveProfile(self.shape, self.amplitude, self.pulse_center, self.pulse_length)


_NEEDS = {
    "square_well": ("U", "r_s"),
    "single_exponential": ("G", "L"),
    "double_band_edge": ("G", "L_u", "L_l"),
    "tabulated": ("table",),
}


class PotentialSpec(_Strict):
    kind: Literal["uniform", "square_well", "single_exponential", "double_band_edge",
                  "tabulated"] = "uniform"
    value: Optional[float] = None
    level_shift: Optional[float] = None
    U: Optional[float] = None
    r_s: Optional[float] = Field(None, gt=0)
    G: Optional[float] = None
    L: Optional[float] = Field(None, gt=0)
    sign: Literal[1, -1] = 1
    L_u: Optional[float] = Field(None, gt=0)
    L_l: Optional[float] = Field(None, gt=0)
    table: Optional[str] = None
    loss_rate_s: Optional[float] = Field(None, ge=0)
    c_lambda: Optional[float] = Field(None, gt=0)
    wavelength: float = Field(4.0 / 3.0, gt=0)

    @model_validator(mode="after")
    def _complete(self):
        missing = [k for k in _NEEDS.get(self.kind, ()) if getattr(self, k) is None]
        if self.kind == "uniform" and self.value is not None and self.level_shift is not None:
            raise ValueError("uniform potential: give value or level_shift, not both")
        if missing:
            raise ValueError(f"{self.kind} potential needs {', '.join(missing)}")
        if self.c_lambda is not None and self.loss_rate_s is not None:
            raise ValueError("give loss_rate_s or c_lambda, not both")
        if self.c_lambda is not None and self.kind != "double_band_edge":
            raise ValueError("c_lambda loss model needs a double_band_edge potential")
        return self

    def resolved_loss(self):
        if self.c_lambda is not None:
            return band_edge_loss(self.G, (self.L_u, self.L_l), self.c_lambda, self.wavelength)
        return self.loss_rate_s or 0.0

    def build(self):
        loss = self.resolved_loss()
        if self.kind == "uniform":
            v = -self.level_shift if self.level_shift is not None else (self.value or 0.0)
            return InteractionPotential.uniform(v, loss)
        if self.kind == "square_well":
            return InteractionPotential.square_well(self.U, self.r_s, loss)
        if self.kind == "single_exponential":
            return InteractionPotential.single_exponential(self.G, self.L, self.sign, loss)
        if self.kind == "double_band_edge":
            return InteractionPotential.double_band_edge(self.G, self.L_u, self.L_l, loss)
        return load_tabulated(self.table, loss)


class SolverSpec(_Strict):
    method: Literal["auto", "dense", "gmres"] = "auto"
    tol: float = Field(1e-10, gt=0)
    dt: Optional[float] = Field(None, gt=0)
    t_max: float = Field(50.0, gt=0)
    store_every: int = Field(50, ge=1)
    tau_max: float = Field(50.0, ge=0)
    tau_points: int = Field(101, ge=1)
    r_max: float = Field(200.0, gt=0)
    r_spacing: float = Field(0.5, gt=0)
    bound_count: int = Field(2, ge=1)
    center_points: int = Field(128, ge=2)
    center_spacing: float = Field(2.0, gt=0)
    effective_dt: float = Field(0.05, gt=0)


class SpinWaveSpec(_Strict):
    """Initial two-polariton packet: Gaussian center of mass times the
    ground bound state evaluated at ``|r| + offset``."""

    center: float = 40.0
    width: float = Field(10.0, gt=0)
    offset: float = 8.0


class DesignSpec(_Strict):
    c_lambda: float = Field(2e4, gt=0)
    beta: float = Field(10.0, gt=0)
    gamma_1d: float = Field(1.0, gt=0)
    gamma_prime: float = Field(1.0, gt=0)
    detuning: float = Field(1.0, gt=0)
    density: float = Field(1.0, gt=0)


class Axis(_Strict):
    name: str
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    num: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _grid(self):
        lin = (self.start, self.stop, self.num)
        if self.values is None and any(v is None for v in lin):
            raise ValueError(f"axis {self.name!r} needs values or start/stop/num")
        if self.values is not None and any(v is not None for v in lin):
            raise ValueError(f"axis {self.name!r}: give values or start/stop/num, not both")
        if self.values is not None and not self.values:
            raise ValueError(f"axis {self.name!r} is empty")
        return self

    def grid(self):
        if self.values is not None:
            return [float(v) for v in self.values]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


class OutputSpec(_Strict):
    dir: str = "photonmol-out"


class ScenarioConfig(_Strict):
    name: str = "scenario"
    chain: ChainSpec
    levels: LevelSpec
    drive: DriveSpec = DriveSpec()
    potential: PotentialSpec = PotentialSpec()
    solver: SolverSpec = SolverSpec()
    spin_wave: Optional[SpinWaveSpec] = None
    design: DesignSpec = DesignSpec()
    sweep: List[Axis] = Field(default_factory=list, max_length=2)
    output: OutputSpec = OutputSpec()
    seed: Optional[int] = None

    @field_validator("sweep")
    @classmethod
    def _axes_exist(cls, axes):
        for axis in axes:
            section, _, key = axis.name.partition(".")
            model = cls.model_fields.get(section)
            sub = getattr(model.annotation, "model_fields", None) if model else None
            if sub is None:
                args = getattr(model.annotation, "__args__", ()) if model else ()
                sub = next((a.model_fields for a in args if hasattr(a, "model_fields")), None)
            if sub is None or key not in sub:
                raise ValueError(f"sweep axis {axis.name!r} does not name a parameter")
        if len({a.name for a in axes}) != len(axes):
            raise ValueError("duplicate sweep axes")
        return axes

    def chain_obj(self):
        return AtomChain(self.chain.count, self.chain.spacing, self.chain.phase)

    def to_dict(self):
        return self.model_dump(mode="json")

    def points(self):
        """Grid points in canonical (lexicographic) order.

        Returns ``(assignments, config)`` pairs with the sweep removed.
        """
        names = [a.name for a in self.sweep]
        grids = [a.grid() for a in self.sweep]
        base = self.to_dict()
        base["sweep"] = []
        out = []
        for combo in itertools.product(*grids):
            data = copy.deepcopy(base)
            for name, val in zip(names, combo):
                section, key = name.split(".")
                data.setdefault(section, {})
                if data[section] is None:
                    data[section] = {}
                data[section][key] = val
            out.append((dict(zip(names, combo)), validate(data)))
        return out


def _format(err):
    loc = ".".join(str(p) for p in err["loc"]) or "<root>"
    return f"{loc}: {err['msg']}"


def validate(data):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(["<root>: expected a mapping of sections"])
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError([_format(e) for e in exc.errors()]) from None


def parse_config(text):
    """Parse YAML text into a validated ``ScenarioConfig``."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"<yaml>: {exc}"]) from None
    return validate(data)


def serialize(config):
    return yaml.safe_dump(config.to_dict(), sort_keys=False)


def preset_names():
    files = resources.files("photonmol").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".yaml"))


def load_preset(name):
    path = resources.files("photonmol").joinpath("presets", f"{name}.yaml")
    if not path.is_file():
        raise ConfigError([f"unknown preset {name!r}; available: {', '.join(preset_names())}"])
    return parse_config(path.read_text())


def override(config, **sections):
    """Copy of ``config`` with ``section={key: value}`` updates applied."""
    data = config.to_dict()
    for section, values in sections.items():
        if values is None:
            data[section] = None
        elif isinstance(values, list):
            data[section] = values
        else:
            data[section] = {**(data.get(section) or {}), **values}
    return validate(data)
