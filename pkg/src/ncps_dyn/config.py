"""Scenario configuration files (YAML) and their validation.

``validate`` collects every problem it can find instead of stopping at the
first; ``load_scenario`` raises ``ValidationError`` listing all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any

import yaml

from .errors import ValidationError

KINDS = ("uniform", "kepler", "wep", "brackets", "average", "composite")

_COMMON = {"kind", "seed", "output"}
TOP_LEVEL_KEYS = {
    "uniform": _COMMON | {"field", "bodies", "initial", "integrator"},
    "kepler": _COMMON | {"field", "bodies", "initial", "integrator"},
    "wep": _COMMON | {"field", "bodies", "initial", "integrator"},
    "brackets": _COMMON | {"couplings", "check"},
    "average": _COMMON | {"couplings", "check"},
    "composite": _COMMON | {"bodies", "check"},
}
INTEGRATOR_KEYS = {"rel_tol", "abs_tol", "t_end", "dt_out", "r_min", "method"}
INTEGRATOR_DEFAULTS = {"rel_tol": 1e-10, "abs_tol": 1e-12, "dt_out": 0.01, "r_min": 1e-6}
CHECK_KEYS = {
    "brackets": {"samples", "tol"},
    "composite": {"samples", "tol"},
    "average": {"states", "nodes", "tol", "mass", "g", "GM"},
}
CHECK_DEFAULTS = {"samples": 100, "tol": 1e-12, "states": 50, "nodes": 20,
                  "mass": 1.0, "g": 1.0, "GM": 1.0}
OUTPUT_KEYS = {"prefix", "svg"}
PARTICLE_KEYS = {"mass", "c_theta", "c_eta"}
BODY_KEYS = {"name", "mass", "c_theta", "c_eta", "A", "B", "particles"}


@dataclass
class BodyConfig:
    name: str
    mass: float | None = None
    particles: list[dict] | None = None  # each {mass, c_theta, c_eta}
    A: float | None = None
    B: float | None = None

    @property
    def direct(self) -> bool:
        return self.A is not None


@dataclass
class ScenarioConfig:
    kind: str
    seed: int = 0
    field: dict = dc_field(default_factory=dict)
    bodies: list[BodyConfig] = dc_field(default_factory=list)
    initial: dict = dc_field(default_factory=dict)
    integrator: dict = dc_field(default_factory=dict)
    couplings: dict = dc_field(default_factory=dict)
    check: dict = dc_field(default_factory=dict)
    output: dict = dc_field(default_factory=dict)


def read_config(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"config {path} is not valid YAML: {exc}") from None


class _Checker:
    def __init__(self):
        self.problems: list[str] = []

    def fail(self, where: str, message: str):
        self.problems.append(f"{where}: {message}")

    def mapping(self, value, where: str, allowed: set[str]) -> dict:
        if value is None:
            return {}
        if not isinstance(value, dict):
            self.fail(where, "must be a mapping")
            return {}
        for key in sorted(set(value) - allowed, key=str):
            self.fail(f"{where}.{key}" if where else str(key), "unknown key")
        return {k: v for k, v in value.items() if k in allowed}

    def number(self, value, where: str, *, positive=False, nonneg=False, required=True):
        if value is None:
            if required:
                self.fail(where, "is required")
            return None
        if isinstance(value, bool):
            self.fail(where, "must be a number")
            return None
        if isinstance(value, str):
            # YAML 1.1 reads exponent literals without a dot (1e-10) as strings
            try:
                value = float(value)
            except ValueError:
                self.fail(where, f"must be a number, got {value!r}")
                return None
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            self.fail(where, f"must be a finite number, got {value!r}")
            return None
        if positive and value <= 0:
            self.fail(where, f"must be > 0, got {value}")
            return None
        if nonneg and value < 0:
            self.fail(where, f"must be >= 0, got {value}")
            return None
        return float(value)

    def integer(self, value, where: str, *, minimum: int | None = None):
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(where, f"must be an integer, got {value!r}")
            return None
        if minimum is not None and value < minimum:
            self.fail(where, f"must be >= {minimum}, got {value}")
            return None
        return value

    def vector(self, value, where: str):
        if value is None:
            return [0.0, 0.0, 0.0]
        if not isinstance(value, list) or len(value) != 3:
            self.fail(where, "must be a list of 3 numbers")
            return None
        out = [self.number(v, f"{where}[{i}]") for i, v in enumerate(value)]
        return None if None in out else out


def _check_body(ck: _Checker, raw, where: str, kind: str) -> BodyConfig | None:
    body = ck.mapping(raw, where, BODY_KEYS)
    if not isinstance(raw, dict):
        return None
    name = str(body.get("name", where.replace("[", "").replace("]", "")))
    has_particles = "particles" in body
    has_couplings = "c_theta" in body or "c_eta" in body
    has_direct = "A" in body or "B" in body
    sources = sum((has_particles, has_couplings, has_direct))
    if sources != 1:
        ck.fail(where, "give exactly one of: particle couplings (c_theta/c_eta), "
                       "a particles list, or direct A/B")
        return None
    if has_direct and kind == "composite":
        ck.fail(where, "composite checks need particle couplings, not direct A/B")
        return None
    if has_particles:
        if "mass" in body:
            ck.fail(f"{where}.mass", "not allowed with a particles list (mass is their sum)")
        plist = body["particles"]
        if not isinstance(plist, list) or not plist:
            ck.fail(f"{where}.particles", "must be a non-empty list")
            return None
        particles = []
        for k, praw in enumerate(plist):
            pw = f"{where}.particles[{k}]"
            p = ck.mapping(praw, pw, PARTICLE_KEYS)
            particles.append({"mass": ck.number(p.get("mass"), f"{pw}.mass", positive=True),
                              "c_theta": ck.number(p.get("c_theta", 0.0), f"{pw}.c_theta", nonneg=True),
                              "c_eta": ck.number(p.get("c_eta", 0.0), f"{pw}.c_eta", nonneg=True)})
        return BodyConfig(name, particles=particles)
    mass = ck.number(body.get("mass"), f"{where}.mass", positive=True)
    if has_direct:
        A = ck.number(body.get("A", 0.0), f"{where}.A", nonneg=True)
        B = ck.number(body.get("B", 0.0), f"{where}.B", nonneg=True)
        return BodyConfig(name, mass=mass, A=A, B=B)
    particle = {"mass": mass,
                "c_theta": ck.number(body.get("c_theta", 0.0), f"{where}.c_theta", nonneg=True),
                "c_eta": ck.number(body.get("c_eta", 0.0), f"{where}.c_eta", nonneg=True)}
    return BodyConfig(name, particles=[particle])


def _check(raw: Any, subcommand: str | None) -> tuple[list[str], ScenarioConfig | None]:
    ck = _Checker()
    if not isinstance(raw, dict):
        return ["<root>: config must be a mapping"], None
    kind = raw.get("kind", subcommand)
    if kind not in KINDS:
        ck.fail("kind", f"must be one of {', '.join(KINDS)}, got {kind!r}")
        return ck.problems, None
    if subcommand is not None and kind != subcommand:
        ck.fail("kind", f"config is for {kind!r} but subcommand is {subcommand!r}")
    top = ck.mapping(raw, "", TOP_LEVEL_KEYS[kind])
    cfg = ScenarioConfig(kind=kind)
    if "seed" in top:
        cfg.seed = ck.integer(top["seed"], "seed", minimum=0) or 0

    out = ck.mapping(top.get("output"), "output", OUTPUT_KEYS)
    cfg.output = {"prefix": str(out.get("prefix", kind)), "svg": out.get("svg", True)}
    if not isinstance(cfg.output["svg"], bool):
        ck.fail("output.svg", "must be true or false")
    if "/" in cfg.output["prefix"] or cfg.output["prefix"] in ("", ".", ".."):
        ck.fail("output.prefix", "must be a plain file name prefix")

    if kind in ("uniform", "kepler", "wep"):
        fld = ck.mapping(top.get("field"), "field", {"g", "GM"})
        want = {"uniform": "g", "kepler": "GM"}.get(kind)
        present = [k for k in ("g", "GM") if k in fld]
        if want is not None and present != [want]:
            ck.fail("field", f"{kind} scenarios need exactly the key {want!r}")
        elif want is None and len(present) != 1:
            ck.fail("field", "wep scenarios need exactly one of 'g' (uniform) or 'GM' (kepler)")
        for key in present:
            if key == "g":
                cfg.field["g"] = ck.number(fld["g"], "field.g", nonneg=True)
            else:
                cfg.field["GM"] = ck.number(fld["GM"], "field.GM", positive=True)

        init = ck.mapping(top.get("initial"), "initial", {"x", "v"})
        cfg.initial = {"x": ck.vector(init.get("x"), "initial.x"),
                       "v": ck.vector(init.get("v"), "initial.v")}
        if "GM" in cfg.field and cfg.initial["x"] is not None and not any(cfg.initial["x"]):
            ck.fail("initial.x", "must not be the origin in a Kepler field")

        integ = ck.mapping(top.get("integrator"), "integrator", INTEGRATOR_KEYS)
        t_end = ck.number(integ.get("t_end"), "integrator.t_end", positive=True)
        cfg.integrator = {"t_end": t_end}
        for key, default in INTEGRATOR_DEFAULTS.items():
            cfg.integrator[key] = ck.number(integ.get(key, default), f"integrator.{key}", positive=True)
        method = integ.get("method", "integrate" if kind != "wep" else "auto")
        if method not in ("auto", "analytic", "integrate"):
            ck.fail("integrator.method", f"must be auto, analytic or integrate, got {method!r}")
        elif method == "analytic" and "GM" in cfg.field:
            ck.fail("integrator.method", "analytic evaluation exists only for the uniform field")
        cfg.integrator["method"] = method
        dt = cfg.integrator["dt_out"]
        if t_end is not None and dt is not None and dt > t_end:
            ck.fail("integrator.dt_out", "must not exceed t_end")

    if kind in ("uniform", "kepler", "wep", "composite"):
        bodies = top.get("bodies")
        if not isinstance(bodies, list) or not bodies:
            ck.fail("bodies", "must be a non-empty list")
            bodies = []
        elif kind in ("uniform", "kepler") and len(bodies) != 1:
            ck.fail("bodies", f"{kind} scenarios take exactly one body")
        elif kind == "wep" and len(bodies) < 2:
            ck.fail("bodies", "wep scenarios need at least two bodies")
        for k, braw in enumerate(bodies):
            b = _check_body(ck, braw, f"bodies[{k}]", kind)
            if b is not None:
                cfg.bodies.append(b)
        names = [b.name for b in cfg.bodies]
        if len(set(names)) != len(names):
            ck.fail("bodies", "body names must be unique")

    if kind in ("brackets", "average"):
        coup = ck.mapping(top.get("couplings"), "couplings", {"c_theta", "c_eta"})
        cfg.couplings = {k: ck.number(coup.get(k, 0.0), f"couplings.{k}", nonneg=True)
                         for k in ("c_theta", "c_eta")}

    if kind in CHECK_KEYS:
        chk = ck.mapping(top.get("check"), "check", CHECK_KEYS[kind])
        for key in sorted(CHECK_KEYS[kind]):
            value = chk.get(key, CHECK_DEFAULTS[key])
            if key in ("samples", "states", "nodes"):
                cfg.check[key] = ck.integer(value, f"check.{key}", minimum=1)
            else:
                cfg.check[key] = ck.number(value, f"check.{key}", positive=(key != "g"),
                                           nonneg=(key == "g"))
    return ck.problems, (None if ck.problems else cfg)


def validate(raw: Any, subcommand: str | None = None) -> list[str]:
    """Every schema and invariant violation in a parsed config, in discovery order."""
    return _check(raw, subcommand)[0]


def parse_scenario(raw: Any, subcommand: str | None = None) -> ScenarioConfig:
    problems, cfg = _check(raw, subcommand)
    if problems:
        raise ValidationError("invalid config:\n  " + "\n  ".join(problems))
    return cfg


def load_scenario(path: str | Path, subcommand: str | None = None) -> ScenarioConfig:
    return parse_scenario(read_config(path), subcommand)
