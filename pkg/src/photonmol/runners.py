"""One grid point of each CLI subcommand.

A runner takes a validated ``ScenarioConfig`` without sweep axes and
returns a ``RunResult``: a flat row of scalars for the sweep table plus
optional named tables written next to it.
"""

from dataclasses import dataclass, field

import numpy as np

from . import dynamics, polariton, transfer
from .model import assemble_blocks
from .potentials import potential_extremum


@dataclass
class RunResult:
    row: dict
    tables: dict = field(default_factory=dict)  # name -> (header list, 2-D array)


def _split(name, value):
    value = complex(value)
    return {f"{name}_re": value.real, f"{name}_im": value.imag}


def _blocks(cfg):
    return assemble_blocks(cfg.chain_obj(), cfg.levels.build(), cfg.potential.build())


def _steady(cfg):
    blocks = _blocks(cfg)
    drive = cfg.drive.build()
    return blocks, drive, dynamics.steady_state(blocks, drive, cfg.solver.method, cfg.solver.tol)


def transmission_sweep(cfg, solved=None):
    blocks, drive, state = solved or _steady(cfg)
    amp = drive.amplitude
    obs = dynamics.observables(blocks, state, amp)
    a1, a2 = dynamics.output_field(blocks, state, amp)
    row = {"i1": obs.i1, "i2": obs.i2}
    row.update(_split("amp1", a1))
    row.update(_split("amp2", a2))
    row["mean_separation"] = obs.mean_separation
    row["ss_population"] = float(obs.ss_map.sum() / 2)
    return RunResult(row)


def _split_length(cfg):
    pot = cfg.potential
    if pot.kind == "square_well":
        return pot.r_s
    if pot.kind in ("double_band_edge", "tabulated"):
        return potential_extremum(pot.build())[0]
    return None


def ss_map(cfg):
    solved = _steady(cfg)
    result = transmission_sweep(cfg, solved)
    blocks, _, state = solved
    pop = dynamics.ss_population(state)
    split = _split_length(cfg)
    if split is not None:
        seps = blocks.chain.separations()
        near = pop[(seps > 0) & (seps < split)].sum() / 2
        far = pop[seps > split].sum() / 2
        result.row.update(split_length=split, ss_near=near, ss_far=far, near_far_ratio=near / far)
    result.tables["ss_map"] = ([f"l{j}" for j in range(blocks.count)], pop)
    return result


def spin_wave_state(cfg, blocks):
    """Offset ground-state pair described by the ``spin_wave`` section."""
    sw = cfg.spin_wave
    params = polariton.polariton_params(blocks.levels)
    ground = polariton.bound_states(blocks.potential, params, cfg.solver.r_max,
                                    cfg.solver.r_spacing, count=1)
    if not ground:
        raise dynamics.SolverError("no bound state to build the spin wave from")
    g = ground[0]

    def rel(r):
        return np.interp(np.abs(r) + sw.offset, g.separation, g.wavefunction.real, right=0.0)

    def cm(R):
        return np.exp(-((R - sw.center) ** 2) / (2 * sw.width**2))

    return dynamics.prepare_spin_wave(blocks.chain, cm, rel), g, rel


def _time_grid(cfg, blocks):
    dt = cfg.solver.dt or dynamics.STEP_LIMIT / dynamics.generator_scale(blocks)
    steps = int(np.ceil(cfg.solver.t_max / dt - 1e-9))
    return np.arange(steps + 1) * dt


def propagate(cfg):
    blocks = _blocks(cfg)
    drive = cfg.drive.build()
    if cfg.spin_wave is not None:
        initial = spin_wave_state(cfg, blocks)[0]
    else:
        initial = dynamics.FewExcitationState.vacuum(blocks.count)
    t = _time_grid(cfg, blocks)
    traj = dynamics.evolve(blocks, drive, initial, t, store_every=cfg.solver.store_every)
    period = polariton.oscillation_period(t, traj.mean_separation)
    n = blocks.levels
    row = {"dt": t[1] - t[0], "steps": t.size - 1, "final_pair_norm": traj.pair_norm[-1],
           "oscillation_period": period,
           "oscillation_optical_depth": 2 * n.gamma_1d / n.gamma_prime
           * polariton.polariton_params(n).group_velocity * period
           if n.rabi_control != 0 else float("nan")}
    header = ["t", "drive_re", "drive_im", "out1_re", "out1_im", "out2_re", "out2_im",
              "pair_norm", "mean_separation"]
    data = np.column_stack([t, traj.drive.real, traj.drive.imag, traj.out1.real, traj.out1.imag,
                            traj.out2.real, traj.out2.imag, traj.pair_norm, traj.mean_separation])
    return RunResult(row, {"timeseries": (header, data)})


def g2(cfg):
    blocks, drive, state = _steady(cfg)
    obs = dynamics.observables(blocks, state, drive.amplitude)
    tau = np.linspace(0.0, cfg.solver.tau_max, cfg.solver.tau_points)
    curve = dynamics.g2(blocks, drive, tau, state)
    row = {"i1": obs.i1, "i2": obs.i2}
    row.update({f"g2_tau{k}": v for k, v in enumerate(curve.values)})
    return RunResult(row, {"g2": (["tau", "g2"], np.column_stack([tau, curve.values]))})


def bound_states(cfg):
    levels = cfg.levels.build()
    params = polariton.polariton_params(levels)
    pot = cfg.potential.build()
    states = polariton.bound_states(pot, params, cfg.solver.r_max, cfg.solver.r_spacing,
                                    cfg.solver.bound_count)
    row = {"group_velocity": params.group_velocity}
    row.update(_split("mass", params.mass))
    row["bound_count"] = len(states)
    cols = []
    for k, s in enumerate(states):
        row.update(_split(f"energy{k}", s.energy))
        row[f"mean_separation{k}"] = s.mean_separation
        cols += [s.wavefunction.real, s.wavefunction.imag]
    if len(states) >= 2:
        spacing = abs((states[1].energy - states[0].energy).real)
        row["oscillation_length"] = 2 * np.pi * params.group_velocity / spacing
    tables = {}
    if states:
        header = ["r"] + [f"psi{k}_{p}" for k in range(len(states)) for p in ("re", "im")]
        tables["wavefunctions"] = (header, np.column_stack([states[0].separation] + cols))
    return RunResult(row, tables)


def effective_propagate(cfg):
    if cfg.spin_wave is None:
        raise ValueError("effective-propagate needs a spin_wave section")
    levels = cfg.levels.build()
    params = polariton.polariton_params(levels)
    pot = cfg.potential.build()
    s = cfg.solver
    ground = polariton.bound_states(pot, params, s.r_max, s.r_spacing, count=1)
    if not ground:
        raise dynamics.SolverError("no bound state to build the initial pair from")
    g = ground[0]
    sw = cfg.spin_wave
    size = 2 * int(round(s.r_max / s.r_spacing))
    r = polariton.relative_grid(size, s.r_spacing)
    R = (np.arange(s.center_points) - s.center_points // 2) * s.center_spacing
    rel = np.interp(np.abs(r) + sw.offset, g.separation, g.wavefunction.real, right=0.0)
    psi0 = np.exp(-(R**2) / (2 * sw.width**2))[:, None] * rel[None, :]
    dt = s.effective_dt
    t = np.arange(int(np.ceil(s.t_max / dt - 1e-9)) + 1) * dt
    traj = polariton.propagate_effective(pot, params, psi0, R, r, t)
    period = polariton.oscillation_period(t, traj.mean_separation)
    row = {"dt": dt, "ground_mean_separation": g.mean_separation, "oscillation_period": period,
           "oscillation_optical_depth": 2 * params.density * params.gamma_1d
           / params.gamma_prime * params.group_velocity * period,
           "final_norm": traj.norm[-1] / traj.norm[0]}
    data = np.column_stack([t, traj.norm, traj.mean_separation])
    return RunResult(row, {"timeseries": (["t", "norm", "mean_separation"], data)})


def design_budget(cfg):
    d = cfg.design
    out = polariton.design_budget(d.c_lambda, d.beta, d.gamma_1d, d.gamma_prime, d.detuning,
                                  d.density)
    row = {"z0": out.z0, "total_loss": out.total_loss,
           "pulse_optical_depth": out.pulse_optical_depth,
           "total_optical_depth": out.total_optical_depth,
           "oscillation_length": out.oscillation_length,
           "pulse_bandwidth_ok": float(out.pulse_optical_depth > 16 * d.detuning / d.gamma_prime)}
    return RunResult(row)


def oracle(cfg):
    lv = cfg.levels.build()
    if lv.rabi_control == 0:
        coeffs = transfer.two_level_coefficients(lv.gamma_1d, lv.gamma_prime, lv.probe_detuning)
    else:
        if lv.probe_detuning != lv.two_photon_detuning:
            raise ValueError("three-level oracle needs probe_detuning == two_photon_detuning "
                             "(resonant control)")
        coeffs = transfer.three_level_coefficients(lv.gamma_1d, lv.gamma_prime, lv.rabi_control,
                                                   lv.two_photon_detuning)
    chain = cfg.chain_obj()
    t, r = transfer.chain_response(coeffs, chain.count, chain.phase)
    depth = transfer.optical_depth(chain.count, lv.gamma_1d, lv.gamma_prime)
    row = {}
    row.update(_split("t", t))
    row.update(_split("r", r))
    row.update(transmittance=abs(t) ** 2, optical_depth=depth, beer_lambert=np.exp(-depth))
    return RunResult(row)


RUNNERS = {
    "transmission-sweep": transmission_sweep,
    "ss-map": ss_map,
    "propagate": propagate,
    "g2": g2,
    "bound-states": bound_states,
    "effective-propagate": effective_propagate,
    "design-budget": design_budget,
    "oracle": oracle,
}
