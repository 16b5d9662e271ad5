"""One function per CLI experiment: build objects from a config, run, write artifacts."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import plotting
from .algebra import CanonicalState, NCCouplings, verify_single_particle_algebra
from .averaging import (average_delta_h_kepler, average_delta_h_uniform, mean_square,
                        tensor_second_moment)
from .composite import (CompositeBody, ParticleSpec, check_wep_conditions, com_representation_check,
                        effective_couplings, verify_com_algebra)
from .config import BodyConfig, ScenarioConfig
from .dynamics import (EffectiveNC, KeplerField, KinematicState, UniformField, uniform_closed_form,
                       uniform_parabola)
from .files import atomic_write_text, columns_to_csv, write_trajectory_csv
from .wep import FallingBody, FreeFallScenario, fall, free_fall_compare


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _e(x: float) -> str:
    return format(float(x), ".3e")


def composite_of(body: BodyConfig) -> CompositeBody:
    return CompositeBody([ParticleSpec(p["mass"], p["c_theta"], p["c_eta"]) for p in body.particles])


def falling_of(body: BodyConfig) -> FallingBody:
    if body.direct:
        return FallingBody(body.mass, EffectiveNC(body.A, body.B), body.name)
    return FallingBody.from_composite(composite_of(body), body.name)


def _field(cfg: ScenarioConfig):
    if "GM" in cfg.field:
        return KeplerField(cfg.field["GM"])
    return UniformField(cfg.field["g"])


def _field_line(field) -> str:
    if isinstance(field, KeplerField):
        return f"field: kepler GM = {_g(field.GM)}"
    return f"field: uniform g = {_g(field.g)} (acceleration along -x1)"


def _body_lines(cfg_body: BodyConfig, body: FallingBody) -> list[str]:
    lines = [f"body {body.label}: M = {_g(body.mass)} A = {_g(body.nc.A)} B = {_g(body.nc.B)}"]
    if not cfg_body.direct:
        comp = composite_of(cfg_body)
        eff = effective_couplings(comp)
        lines.append(f"  particles = {len(comp)} effective c_theta = {_g(eff.c_theta)} "
                     f"c_eta = {_g(eff.c_eta)}")
        lines += ["  " + s for s in check_wep_conditions(comp).lines()]
    return lines


def _header(cfg: ScenarioConfig) -> list[str]:
    return [f"ncps-dyn {cfg.kind} report", f"seed: {cfg.seed}"]


def _write_report(out_dir: Path, cfg: ScenarioConfig, lines: list[str]) -> Path:
    return atomic_write_text(out_dir / f"{cfg.output['prefix']}_report.txt", "\n".join(lines) + "\n")


def _init(cfg: ScenarioConfig) -> KinematicState:
    return KinematicState(np.array(cfg.initial["x"]), np.array(cfg.initial["v"]))


def run_single(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """``uniform`` and ``kepler``: one body, trajectory CSV, report, x1(t) chart."""
    field = _field(cfg)
    body_cfg = cfg.bodies[0]
    body = falling_of(body_cfg)
    init = _init(cfg)
    ig = cfg.integrator
    traj = fall(body, field, init, ig["t_end"], ig["dt_out"], ig["method"], ig["rel_tol"],
                ig["abs_tol"], ig["r_min"])
    prefix = cfg.output["prefix"]
    written = [write_trajectory_csv(out_dir / f"{prefix}_trajectory.csv", traj)]

    lines = _header(cfg) + [_field_line(field)] + _body_lines(body_cfg, body)
    lines.append(f"method: {ig['method']} rel_tol = {_e(ig['rel_tol'])} abs_tol = {_e(ig['abs_tol'])}")
    lines.append(f"samples: {len(traj)} steps: {traj.stats.steps} rejected: {traj.stats.rejected}")
    if isinstance(field, UniformField) and ig["method"] == "integrate":
        exact = (uniform_closed_form(traj.t, init, field.g, body.nc.B) if body.nc.B > 0
                 else uniform_parabola(traj.t, init, field.g))
        lines.append(f"closed-form check: max |x - x_exact| = {_e(np.max(np.abs(traj.x - exact.x)))}")
    e0 = traj.energy[0]
    drift = np.max(np.abs(traj.energy - e0))
    lines.append(f"energy: E0 = {_g(e0)} max |E - E0| = {_e(drift)}"
                 + (f" relative = {_e(drift / abs(e0))}" if e0 != 0 else ""))
    L0 = traj.angular_momentum[0]
    lines.append(f"angular momentum x*v: L0 = [{', '.join(_g(c) for c in L0)}] "
                 f"max |L - L0| = {_e(np.max(np.abs(traj.angular_momentum - L0)))}")
    if isinstance(field, KeplerField):
        r = np.linalg.norm(traj.x, axis=1)
        lines.append(f"radius: min = {_g(r.min())} max = {_g(r.max())}")
    lines.append(f"final state: x = [{', '.join(_g(c) for c in traj.x[-1])}] "
                 f"v = [{', '.join(_g(c) for c in traj.v[-1])}]")
    written.append(_write_report(out_dir, cfg, lines))

    if cfg.output["svg"]:
        written.append(plotting.write_line_chart(
            out_dir / f"{prefix}_x1.svg", traj.t, {body.label: traj.x[:, 0]},
            ylabel="x1", title=f"{cfg.kind}: x1(t)"))
    return written


def run_wep(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    field = _field(cfg)
    bodies = [falling_of(b) for b in cfg.bodies]
    ig = cfg.integrator
    scenario = FreeFallScenario(field, _init(cfg), bodies, ig["t_end"], ig["dt_out"], ig["rel_tol"],
                                ig["abs_tol"], ig["r_min"], ig["method"])
    result = free_fall_compare(scenario)
    prefix = cfg.output["prefix"]
    written = []
    for label, traj in zip(result.labels, result.trajectories):
        written.append(write_trajectory_csv(out_dir / f"{prefix}_{label}.csv", traj))
    written.append(atomic_write_text(out_dir / f"{prefix}_deviation.csv",
                                     columns_to_csv({"t": result.t, "deviation": result.deviation})))

    lines = _header(cfg) + [_field_line(field)]
    for bc, b in zip(cfg.bodies, bodies):
        lines += _body_lines(bc, b)
    lines.append(f"method: {ig['method']} rel_tol = {_e(ig['rel_tol'])} abs_tol = {_e(ig['abs_tol'])}")
    lines.append(f"max pairwise deviation: {_e(result.max_deviation)} "
                 f"(at t = {_g(result.t[int(np.argmax(result.deviation))])})")
    lines.append(f"final pairwise deviation: {_g(result.deviation[-1])}")
    lines.append("eotvos ratio: " + ("undefined (mean accelerations vanish)" if result.eotvos is None
                                     else _e(result.eotvos)))
    same = len({(b.nc.A, b.nc.B) for b in bodies}) == 1
    lines.append(f"all bodies share (A, B): {'yes' if same else 'no'}")
    written.append(_write_report(out_dir, cfg, lines))

    if cfg.output["svg"]:
        written.append(plotting.write_line_chart(
            out_dir / f"{prefix}_x1.svg", result.t,
            {label: tr.x[:, 0] for label, tr in zip(result.labels, result.trajectories)},
            ylabel="x1", title="free fall: x1(t)"))
        written.append(plotting.write_line_chart(
            out_dir / f"{prefix}_deviation.svg", result.t, {"max pairwise": result.deviation},
            ylabel="|x_a - x_b|", title="trajectory deviation"))
    return written


def run_brackets(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    c = NCCouplings(cfg.couplings["c_theta"], cfg.couplings["c_eta"])
    report = verify_single_particle_algebra(c, cfg.check["samples"], cfg.check["tol"], cfg.seed)
    lines = _header(cfg) + [f"couplings: c_theta = {_g(c.c_theta)} c_eta = {_g(c.c_eta)}"]
    lines += report.lines()
    lines.append(f"overall: {'PASS' if report.passed else 'FAIL'}")
    return [_write_report(out_dir, cfg, lines)]


def _random_states(rng, count: int, min_radius: float = 0.1) -> list[CanonicalState]:
    states = []
    while len(states) < count:
        x, p = rng.uniform(-2, 2, size=(2, 3))
        if np.linalg.norm(x) >= min_radius:
            states.append(CanonicalState(x, p))
    return states


def run_average(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    c = NCCouplings(cfg.couplings["c_theta"], cfg.couplings["c_eta"])
    chk = cfg.check
    nodes, tol = chk["nodes"], chk["tol"]
    lines = _header(cfg) + [f"couplings: c_theta = {_g(c.c_theta)} c_eta = {_g(c.c_eta)}",
                            f"Gauss-Hermite nodes per dimension: {nodes}"]
    ok = True
    for kind, coupling in (("theta", c.c_theta), ("eta", c.c_eta)):
        worst = 0.0
        for i in range(3):
            for j in range(3):
                res = tensor_second_moment(kind, i, j, c, nodes)
                expected = coupling ** 2 / 2 if i == j else 0.0
                worst = max(worst, abs(res.value - expected))
        ok &= worst <= tol
        lines.append(f"<{kind}_i {kind}_j> vs c^2/2 delta_ij: max residual = {_e(worst)} "
                     f"mean square = {_g(mean_square(kind, c, nodes))}")
    rng = np.random.default_rng(cfg.seed)
    states = _random_states(rng, chk["states"])
    for label, fn, arg in (("uniform", average_delta_h_uniform, chk["g"]),
                           ("kepler", average_delta_h_kepler, chk["GM"])):
        values = [fn(s, chk["mass"], arg, c, nodes) for s in states]
        worst = max(abs(v.value) for v in values)
        err = max(v.error for v in values)
        passed = worst <= tol
        ok &= passed
        lines.append(f"<dH> {label}: max |value| = {_e(worst)} max quadrature error = {_e(err)} "
                     f"over {len(states)} states {'PASS' if passed else 'FAIL'}")
    lines.append("note: classical ordering; hbar-dependent terms of the Kepler remainder are excluded")
    lines.append(f"overall: {'PASS' if ok else 'FAIL'} (tol {_e(tol)})")
    return [_write_report(out_dir, cfg, lines)]


def run_composite(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    rng = np.random.default_rng(cfg.seed)
    samples, tol = cfg.check["samples"], cfg.check["tol"]
    lines = _header(cfg)
    ok = True
    for bc in cfg.bodies:
        body = composite_of(bc)
        lines += _body_lines(bc, falling_of(bc))
        algebra = verify_com_algebra(body, samples, tol, rng)
        lines.append("  center-of-mass algebra:")
        lines += ["    " + s for s in algebra.lines()]
        rep = com_representation_check(body, samples, tol, rng)
        lines.append("  center-of-mass representation:")
        lines += ["    " + s for s in rep.lines()]
        ok &= algebra.passed
    lines.append(f"overall center-of-mass algebra: {'PASS' if ok else 'FAIL'}")
    return [_write_report(out_dir, cfg, lines)]


RUNNERS = {
    "uniform": run_single,
    "kepler": run_single,
    "wep": run_wep,
    "brackets": run_brackets,
    "average": run_average,
    "composite": run_composite,
}


def run_scenario(cfg: ScenarioConfig, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return RUNNERS[cfg.kind](cfg, out_dir)
