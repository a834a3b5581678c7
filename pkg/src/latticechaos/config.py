"""Experiment configuration: TOML schema, validation, canonical echo.

A config file has an ``[experiment]`` section naming the kind, shared
``[params]``/``[integrator]`` sections, and one kind-specific section.
Validation is strict: unknown sections or keys are errors, as are
missing required keys, so a config file is an unambiguous record of
what was run.  ``canonical_dict`` produces the sorted plain-dict echo
embedded in every output file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dynamics import AtomState, SystemParams
from .integrate import IntegratorConfig

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "EXPERIMENT_KINDS",
]

EXPERIMENT_KINDS = (
    "trajectory",
    "lyapunov-map",
    "bloch-map",
    "poincare",
    "exit-scan",
    "exit-surface",
    "analytic-compare",
)


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the field."""


def _expect(table, section, required, optional=()):
    """Strict key check for one TOML table."""
    allowed = set(required) | set(optional)
    for key in table:
        if key not in allowed:
            raise ConfigError(
                f"unknown key '{key}' in [{section}] (allowed: "
                f"{', '.join(sorted(allowed))})")
    for key in required:
        if key not in table:
            raise ConfigError(f"missing required key '{key}' in [{section}]")


def _number(table, section, key, positive=False, nonnegative=False):
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"[{section}].{key} must be a number, got {val!r}")
    val = float(val)
    if not math.isfinite(val):
        raise ConfigError(f"[{section}].{key} must be finite")
    if positive and val <= 0.0:
        raise ConfigError(f"[{section}].{key} must be positive, got {val}")
    if nonnegative and val < 0.0:
        raise ConfigError(f"[{section}].{key} must be >= 0, got {val}")
    return val


def _integer(table, section, key, minimum=None):
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"[{section}].{key} must be an integer, "
                          f"got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(f"[{section}].{key} must be >= {minimum}, "
                          f"got {val}")
    return val


def _grid(table, section, key):
    """A grid axis: {min, max, n} table or an explicit list of numbers."""
    spec = table[key]
    where = f"[{section}].{key}"
    if isinstance(spec, list):
        if len(spec) < 1:
            raise ConfigError(f"{where} must be a non-empty list")
        out = []
        for v in spec:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{where} entries must be numbers")
            out.append(float(v))
        return out
    if isinstance(spec, dict):
        _expect(spec, f"{section}.{key}", ("min", "max", "n"))
        lo = _number(spec, f"{section}.{key}", "min")
        hi = _number(spec, f"{section}.{key}", "max")
        n = _integer(spec, f"{section}.{key}", "n", minimum=1)
        if n > 1 and not lo < hi:
            raise ConfigError(f"{where}: min must be < max")
        if n == 1:
            return [lo]
        step = (hi - lo) / (n - 1)
        return [lo + i * step for i in range(n)]
    raise ConfigError(f"{where} must be a list or a {{min, max, n}} table")


def _bloch_triple(table, section):
    u0 = _number(table, section, "u0")
    v0 = _number(table, section, "v0")
    z0 = _number(table, section, "z0")
    norm = u0 * u0 + v0 * v0 + z0 * z0
    if abs(norm - 1.0) > 1e-9:
        raise ConfigError(
            f"[{section}]: (u0, v0, z0) must be unit length, "
            f"got norm^2 = {norm}")
    return u0, v0, z0


@dataclass
class ExperimentConfig:
    """Validated experiment description."""

    kind: str
    raw: dict = field(repr=False)
    params: SystemParams = None
    integrator: IntegratorConfig = None
    initial: AtomState = None
    options: dict = field(default_factory=dict)

    def canonical_dict(self) -> dict:
        """Plain-dict snapshot for embedding in output files."""
        return self.raw


_TOP_SECTIONS = {
    "trajectory": ("experiment", "params", "initial", "integrator",
                   "trajectory"),
    "lyapunov-map": ("experiment", "initial", "integrator", "lyapunov-map"),
    "bloch-map": ("experiment", "params", "integrator", "bloch-map"),
    "poincare": ("experiment", "params", "integrator", "poincare"),
    "exit-scan": ("experiment", "initial", "integrator", "exit-scan",
                  "cavity"),
    "exit-surface": ("experiment", "integrator", "exit-surface", "cavity"),
    "analytic-compare": ("experiment", "params", "initial", "integrator",
                         "analytic-compare"),
}

_REQUIRED_SECTIONS = {
    "trajectory": ("params", "initial", "trajectory"),
    "lyapunov-map": ("initial", "lyapunov-map"),
    "bloch-map": ("params", "bloch-map"),
    "poincare": ("params", "poincare"),
    "exit-scan": ("initial", "exit-scan"),
    "exit-surface": ("exit-surface",),
    "analytic-compare": ("params", "initial", "analytic-compare"),
}


def _parse_params(doc) -> SystemParams:
    sec = doc["params"]
    _expect(sec, "params", ("omega_r", "delta"))
    omega_r = _number(sec, "params", "omega_r")
    delta = _number(sec, "params", "delta")
    if omega_r <= 0.0:
        raise ConfigError(f"[params].omega_r must be positive, got {omega_r}")
    return SystemParams(omega_r=omega_r, delta=delta)


def _parse_initial(doc) -> AtomState:
    sec = doc["initial"]
    _expect(sec, "initial", ("x0", "p0", "u0", "v0", "z0"))
    u0, v0, z0 = _bloch_triple(sec, "initial")
    return AtomState(
        _number(sec, "initial", "x0"), _number(sec, "initial", "p0"),
        u0, v0, z0)


def _parse_integrator(doc) -> IntegratorConfig:
    sec = doc.get("integrator", {})
    _expect(sec, "integrator", (),
            ("rel_tol", "abs_tol", "max_step", "initial_step"))
    kwargs = {}
    for key in ("rel_tol", "abs_tol", "max_step", "initial_step"):
        if key in sec:
            kwargs[key] = _number(sec, "integrator", key, positive=True)
    try:
        return IntegratorConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[integrator]: {exc}") from exc


def _parse_cavity(doc) -> dict:
    sec = doc.get("cavity", {})
    _expect(sec, "cavity", (), ("half_width", "tau_cutoff"))
    out = {}
    if "half_width" in sec:
        out["half_width"] = _number(sec, "cavity", "half_width",
                                    positive=True)
    if "tau_cutoff" in sec:
        out["tau_cutoff"] = _number(sec, "cavity", "tau_cutoff",
                                    positive=True)
    return out


def _parse_kind_options(kind, doc):
    opts = {}
    if kind == "trajectory":
        sec = doc["trajectory"]
        _expect(sec, "trajectory", ("tau_end",), ("sampling",))
        opts["tau_end"] = _number(sec, "trajectory", "tau_end",
                                  positive=True)
        sampling = sec.get("sampling", "dense")
        if sampling != "dense" and (isinstance(sampling, bool)
                                    or not isinstance(sampling, int)
                                    or sampling < 1):
            raise ConfigError("[trajectory].sampling must be 'dense' or a "
                              f"positive integer stride, got {sampling!r}")
        opts["sampling"] = sampling
    elif kind == "lyapunov-map":
        sec = doc["lyapunov-map"]
        _expect(sec, "lyapunov-map", ("omega_r", "delta"),
                ("total_tau", "renorm_interval"))
        opts["omega_r_values"] = _grid(sec, "lyapunov-map", "omega_r")
        opts["delta_values"] = _grid(sec, "lyapunov-map", "delta")
        for wr in opts["omega_r_values"]:
            if wr <= 0.0:
                raise ConfigError("[lyapunov-map].omega_r values must be "
                                  f"positive, got {wr}")
        opts["total_tau"] = _number(sec, "lyapunov-map", "total_tau",
                                    positive=True) \
            if "total_tau" in sec else 1e4
        opts["renorm_interval"] = _number(
            sec, "lyapunov-map", "renorm_interval", positive=True) \
            if "renorm_interval" in sec else 5.0
    elif kind == "bloch-map":
        sec = doc["bloch-map"]
        _expect(sec, "bloch-map", ("energy", "n"),
                ("x0", "total_tau", "renorm_interval"))
        opts["energy"] = _number(sec, "bloch-map", "energy")
        opts["n"] = _integer(sec, "bloch-map", "n", minimum=2)
        opts["x0"] = _number(sec, "bloch-map", "x0") if "x0" in sec else 0.0
        opts["total_tau"] = _number(sec, "bloch-map", "total_tau",
                                    positive=True) \
            if "total_tau" in sec else 1e4
        opts["renorm_interval"] = _number(
            sec, "bloch-map", "renorm_interval", positive=True) \
            if "renorm_interval" in sec else 5.0
    elif kind == "poincare":
        sec = doc["poincare"]
        _expect(sec, "poincare", ("energy",),
                ("n_seeds", "tau_max", "max_crossings", "x0"))
        opts["energy"] = _number(sec, "poincare", "energy")
        opts["n_seeds"] = _integer(sec, "poincare", "n_seeds", minimum=1) \
            if "n_seeds" in sec else 200
        opts["tau_max"] = _number(sec, "poincare", "tau_max", positive=True) \
            if "tau_max" in sec else 1e6
        opts["max_crossings"] = _integer(sec, "poincare", "max_crossings",
                                         minimum=1) \
            if "max_crossings" in sec else 5000
        opts["x0"] = _number(sec, "poincare", "x0") if "x0" in sec else 0.0
    elif kind == "exit-scan":
        sec = doc["exit-scan"]
        _expect(sec, "exit-scan", ("omega_r", "delta"), ())
        opts["omega_r"] = _number(sec, "exit-scan", "omega_r", positive=True)
        opts["delta_values"] = _grid(sec, "exit-scan", "delta")
        if len(opts["delta_values"]) < 2:
            raise ConfigError("[exit-scan].delta needs at least 2 samples")
        opts["cavity"] = _parse_cavity(doc)
    elif kind == "exit-surface":
        sec = doc["exit-surface"]
        _expect(sec, "exit-surface",
                ("omega_r", "delta", "p0", "u0", "v0", "z0"), ())
        opts["omega_r"] = _number(sec, "exit-surface", "omega_r",
                                  positive=True)
        opts["delta_values"] = _grid(sec, "exit-surface", "delta")
        opts["p0_values"] = _grid(sec, "exit-surface", "p0")
        if len(opts["delta_values"]) < 2 or len(opts["p0_values"]) < 2:
            raise ConfigError("[exit-surface] grids need at least 2 samples "
                              "per axis")
        opts["bloch0"] = _bloch_triple(sec, "exit-surface")
        opts["cavity"] = _parse_cavity(doc)
    elif kind == "analytic-compare":
        sec = doc["analytic-compare"]
        _expect(sec, "analytic-compare", ("branch", "tau_end"),
                ("n_samples",))
        branch = sec["branch"]
        branches = ("resonant", "raman-nath", "far-detuned", "fast-atom",
                    "doppler-rabi")
        if branch not in branches:
            raise ConfigError(
                f"[analytic-compare].branch must be one of "
                f"{', '.join(branches)}; got {branch!r}")
        opts["branch"] = branch
        opts["tau_end"] = _number(sec, "analytic-compare", "tau_end",
                                  positive=True)
        opts["n_samples"] = _integer(sec, "analytic-compare", "n_samples",
                                     minimum=2) if "n_samples" in sec \
            else 2000
    return opts


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a parsed TOML document into an ExperimentConfig."""
    if "experiment" not in doc:
        raise ConfigError("missing [experiment] section")
    exp = doc["experiment"]
    _expect(exp, "experiment", ("kind",))
    kind = exp["kind"]
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"[experiment].kind must be one of {', '.join(EXPERIMENT_KINDS)};"
            f" got {kind!r}")
    allowed = set(_TOP_SECTIONS[kind])
    for section in doc:
        if section not in allowed:
            raise ConfigError(
                f"unknown section [{section}] for kind '{kind}' (allowed: "
                f"{', '.join(sorted(allowed))})")
    for section in _REQUIRED_SECTIONS[kind]:
        if section not in doc:
            raise ConfigError(f"missing section [{section}] required by "
                              f"kind '{kind}'")
    cfg = ExperimentConfig(kind=kind, raw=doc)
    if "params" in doc:
        cfg.params = _parse_params(doc)
    if "initial" in doc:
        try:
            cfg.initial = _parse_initial(doc)
        except ValueError as exc:
            raise ConfigError(f"[initial]: {exc}") from exc
    cfg.integrator = _parse_integrator(doc)
    cfg.options = _parse_kind_options(kind, doc)
    return cfg


def load_config(path) -> ExperimentConfig:
    """Parse and validate a TOML config file."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML syntax error: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc)
