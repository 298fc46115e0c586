"""Declarative scenario configs, bundled figure recipes, and CSV emission.

A scenario names a model, its parameters, an initial state, a time grid and
one or more outputs.  Configs are INI-style text with a strict schema:
unknown sections or keys are fatal.  Identical configs produce byte-identical
CSV files (12 significant digits, LF endings, no timestamps); every data
file starts with a '#' comment listing the resolved parameters.

The bundled recipes (fig2 .. fig7, table1) are canned scenarios or special
reports with locked parameter sets; `recipe_config` exposes the canned
config text so the same run can be reproduced through `run_scenario`.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import filtering
from .analysis import dj_resonance, eigen_balance, rabi
from .basis import (BasisLabel, DeviceSystem, SpinBlock, device_to_total,
                    parse_device_label, parse_total_label, reduce_two_level)
from .dynamics import DensityMatrix, TimeSeries, projector_onto, transition_probabilities, \
    bloch_trajectory, evolve
from .model import HamiltonianBundle, ModelParams, build_bh3, build_hamiltonian, \
    build_trimer, unit_convert
from .spin_core import Spin
from .verify import brute_force_rabi

OUTDIR_ENV = "TRISPIN_OUTDIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    """Schema violation, unknown key, unknown state label or invalid grid."""


def fmt(x) -> str:
    """Canonical float formatting used in every data file."""
    return f"{float(x):.12g}"


def _parse_angle(token: str) -> float:
    """Angles as floats or simple pi expressions: 'pi', 'pi/8', '3*pi/4'."""
    text = token.strip().lower().replace(" ", "")
    if "pi" not in text:
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"bad angle {token!r}") from None
    num, denom = 1.0, 1.0
    head, _, tail = text.partition("pi")
    try:
        if head:
            if not head.endswith("*"):
                raise ValueError
            num = float(head[:-1])
        if tail:
            if not tail.startswith("/"):
                raise ValueError
            denom = float(tail[1:])
    except ValueError:
        raise ConfigError(f"bad angle {token!r}") from None
    return num * np.pi / denom


MODELS = ("general", "s_half", "s_one", "bh3", "trimer")

_DEVICE_PARAM_KEYS = ("jk2", "jk3", "jz", "jxy", "d", "thop", "b0", "g1", "g23")
_TRIPLE_PARAM_KEYS = ("j", "d")

_SCHEMA = {
    "scenario": {"model", "name", "s"},
    "params": set(_DEVICE_PARAM_KEYS) | set(_TRIPLE_PARAM_KEYS),
    "time": {"span_ps", "points"},
    "initial": {"state", "theta_in", "phi_in", "coupled"},
    "output": {"kind", "channels", "sweep_jk", "theta_out", "phi_out", "targets"},
    "scan": {"theta_in_points", "theta_out_points", "t_snapshot_ps", "from", "to"},
}

_OUTPUT_KINDS = ("channels", "bloch", "relative", "scan", "resonances")


@dataclass
class Scenario:
    """A fully resolved simulation request."""

    model: str
    name: str
    params: dict[str, float]
    s: Spin | None = None
    initial_state: str | None = None
    theta_in: float | None = None
    phi_in: float = 0.0
    coupled: str | None = None
    span_ps: float | None = None
    points: int = 1000
    outputs: tuple[str, ...] = ()
    channels: tuple[str, ...] = ()
    sweep_jk: tuple[float, ...] = ()
    theta_out: float | None = None
    phi_out: float = 0.0
    targets: tuple[str, ...] = ()
    scan: dict[str, object] = field(default_factory=dict)


def parse_config_text(text: str) -> Scenario:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config does not parse: {exc}") from None
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    if "scenario" not in cp:
        raise ConfigError("missing [scenario] section")
    sc = cp["scenario"]
    model = sc.get("model", "")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    name = sc.get("name", "scenario")

    spin = None
    if model == "general":
        if "s" not in sc:
            raise ConfigError("model=general requires key 's' in [scenario]")
        try:
            spin = Spin.of(sc["s"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    elif "s" in sc:
        raise ConfigError("key 's' is only valid for model=general")

    allowed_params = _TRIPLE_PARAM_KEYS if model in ("bh3", "trimer") else _DEVICE_PARAM_KEYS
    params = {}
    if "params" in cp:
        for key, value in cp["params"].items():
            if key not in allowed_params:
                raise ConfigError(f"parameter {key!r} is not valid for model {model}")
            try:
                params[key] = float(value)
            except ValueError:
                raise ConfigError(f"parameter {key!r} must be a number, got {value!r}") from None

    scen = Scenario(model=model, name=name, params=params, s=spin)

    if "time" in cp:
        t = cp["time"]
        if "span_ps" in t:
            scen.span_ps = float(t["span_ps"])
            if scen.span_ps <= 0:
                raise ConfigError("span_ps must be positive")
        if "points" in t:
            scen.points = int(t["points"])
            if scen.points < 2:
                raise ConfigError("points must be at least 2")

    if "initial" in cp:
        ini = cp["initial"]
        if "state" in ini:
            if "theta_in" in ini or "coupled" in ini:
                raise ConfigError("[initial] takes either 'state' or a "
                                  "'theta_in'/'coupled' pair, not both")
            scen.initial_state = ini["state"].strip()
        elif "theta_in" in ini or "coupled" in ini:
            if "theta_in" not in ini or "coupled" not in ini:
                raise ConfigError("filtered preparation needs both 'theta_in' and 'coupled'")
            scen.theta_in = _parse_angle(ini["theta_in"])
            scen.phi_in = _parse_angle(ini.get("phi_in", "0"))
            scen.coupled = ini["coupled"].strip()

    if "output" in cp:
        out = cp["output"]
        kinds = tuple(out.get("kind", "").split())
        for k in kinds:
            if k not in _OUTPUT_KINDS:
                raise ConfigError(f"unknown output kind {k!r}; valid: {_OUTPUT_KINDS}")
        if not kinds:
            raise ConfigError("[output] needs a 'kind'")
        scen.outputs = kinds
        if "channels" in out:
            scen.channels = tuple(out["channels"].split())
        if "sweep_jk" in out:
            scen.sweep_jk = tuple(float(v) for v in out["sweep_jk"].split())
        if "theta_out" in out:
            scen.theta_out = _parse_angle(out["theta_out"])
        if "phi_out" in out:
            scen.phi_out = _parse_angle(out["phi_out"])
        if "targets" in out:
            scen.targets = tuple(out["targets"].split())
    else:
        raise ConfigError("missing [output] section")

    if "scan" in cp:
        s = cp["scan"]
        scan = {}
        try:
            scan["theta_in_points"] = int(s.get("theta_in_points", "33"))
            scan["theta_out_points"] = int(s.get("theta_out_points", "33"))
            scan["t_snapshot_ps"] = float(s.get("t_snapshot_ps", "133.0"))
        except ValueError as exc:
            raise ConfigError(f"bad [scan] value: {exc}") from None
        scan["from"] = s.get("from", "1:1").strip()
        scan["to"] = s.get("to", "1:0").strip()
        if scan["theta_in_points"] < 1 or scan["theta_out_points"] < 1:
            raise ConfigError("scan grids need at least one point")
        scen.scan = scan

    _validate_scenario(scen)
    return scen


def _validate_scenario(scen: Scenario) -> None:
    needs_time = {"channels", "bloch", "relative"} & set(scen.outputs)
    if needs_time and scen.span_ps is None:
        raise ConfigError(f"outputs {sorted(needs_time)} need [time] span_ps")
    needs_initial = {"channels", "bloch", "relative"} & set(scen.outputs)
    if needs_initial and scen.initial_state is None and scen.theta_in is None:
        raise ConfigError(f"outputs {sorted(needs_initial)} need an [initial] section")
    if "channels" in scen.outputs and not scen.channels:
        raise ConfigError("output kind 'channels' needs a 'channels' list")
    if "relative" in scen.outputs:
        if scen.theta_out is None or not scen.targets:
            raise ConfigError("output kind 'relative' needs 'theta_out' and 'targets'")
        if scen.theta_in is None:
            raise ConfigError("output kind 'relative' needs a filtered [initial] "
                              "(theta_in and coupled)")
    if "scan" in scen.outputs and not scen.scan:
        raise ConfigError("output kind 'scan' needs a [scan] section")
    if scen.sweep_jk and scen.model in ("bh3", "trimer"):
        raise ConfigError("sweep_jk applies only to the device models")


def resolve_params(scen: Scenario) -> ModelParams | tuple[float, float]:
    """ModelParams for device models, (j, d) for the spin-1 triples."""
    p = scen.params
    if scen.model in ("bh3", "trimer"):
        return (p.get("j", 0.0), p.get("d", 0.0))
    spin = {"s_half": Spin(1), "s_one": Spin(2)}.get(scen.model, scen.s)
    return ModelParams(
        s2=spin, s3=spin,
        j_z=p.get("jz", 0.0), j_xy=p.get("jxy", 0.0),
        j_k2=p.get("jk2", 0.0), j_k3=p.get("jk3", 0.0),
        d=p.get("d", 0.0), t_hop=p.get("thop", 0.0),
        b0=p.get("b0", 0.0), g1=p.get("g1", 2.0), g23=p.get("g23", 2.0))


def build_system(scen: Scenario) -> tuple[HamiltonianBundle, DeviceSystem]:
    params = resolve_params(scen)
    if scen.model == "bh3":
        bundle = build_bh3(*params)
    elif scen.model == "trimer":
        bundle = build_trimer(*params)
    else:
        bundle = build_hamiltonian(params)
    return bundle, DeviceSystem.from_bundle(bundle)


def state_vector(label: str, system: DeviceSystem,
                 spins=None) -> np.ndarray:
    """Device-basis amplitudes of a device ('up:2:1') or total ('tot:2:2:1') label."""
    if label.startswith("tot:"):
        parsed = parse_total_label(label)
        s1, s2, s3 = spins
        tr = device_to_total(s1, s2, s3)
        try:
            row = tr.labels_out.index(parsed)
        except ValueError:
            raise ConfigError(f"unknown total-basis state {label!r}") from None
        return tr.matrix[row].astype(complex)
    try:
        return system.basis_state(parse_device_label(label))
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None


def _header(pairs: dict[str, object]) -> str:
    parts = []
    for key in sorted(pairs):
        val = pairs[key]
        if isinstance(val, float):
            val = fmt(val)
        parts.append(f"{key}={val}")
    return "# " + " ".join(parts)


def write_csv(path, header: str, names: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", newline="\n") as f:
        f.write(header + "\n")
        f.write(",".join(names) + "\n")
        for r in range(rows):
            cells = []
            for col in columns:
                v = col[r]
                cells.append("" if np.isnan(v) else fmt(v))
            f.write(",".join(cells) + "\n")


def _param_header(scen: Scenario) -> dict[str, object]:
    head: dict[str, object] = {"model": scen.model}
    if scen.model == "general":
        head["s"] = str(scen.s)
    params = resolve_params(scen)
    if isinstance(params, ModelParams):
        head.update(jk2=params.j_k2, jk3=params.j_k3, jz=params.j_z,
                    jxy=params.j_xy, d=params.d, thop=params.t_hop.real,
                    b0=params.b0, g1=params.g1, g23=params.g23)
    else:
        head.update(j=params[0], d=params[1])
    return head


def _initial_vector(scen: Scenario, system: DeviceSystem, bundle) -> np.ndarray:
    if scen.initial_state is not None:
        return state_vector(scen.initial_state, system, bundle.spins)
    chi = filtering.spinor(scen.theta_in, scen.phi_in)
    rho = filtering.prepare_filtered(chi, scen.coupled, system)
    vals, vecs = np.linalg.eigh(rho.matrix)
    return vecs[:, -1]


def execute(scen: Scenario, outdir: str) -> tuple[list[str], str]:
    """Run every requested output; returns (written files, summary text)."""
    os.makedirs(outdir, exist_ok=True)
    bundle, system = build_system(scen)
    head = _param_header(scen)
    files: list[str] = []
    summary: list[str] = [f"scenario {scen.name}: model={scen.model}"]

    times = None
    if scen.span_ps is not None:
        times = np.linspace(0.0, scen.span_ps, scen.points)

    for kind in scen.outputs:
        path = os.path.join(outdir, f"{scen.name}_{kind}.csv")
        if kind == "channels":
            series = _channels_output(scen, bundle, system, times)
            names = ["time_ps"] + list(series.channels)
            cols = [series.times] + [series.channels[n] for n in series.channels]
            write_csv(path, _header(head | series.meta), names, cols)
            for n in series.channels:
                summary.append(f"  max {n} = {fmt(np.nanmax(series.channels[n]))}")
        elif kind == "bloch":
            series = _bloch_output(scen, bundle, system, times)
            names = ["time_ps"] + list(series.channels)
            cols = [series.times] + [series.channels[n] for n in series.channels]
            write_csv(path, _header(head | series.meta), names, cols)
            summary.append(f"  bloch sphere basis: +z={series.meta['pole_plus']}"
                           f" -z={series.meta['pole_minus']}")
        elif kind == "relative":
            series = _relative_output(scen, bundle, system, times)
            names = ["time_ps"] + list(series.channels)
            cols = [series.times] + [series.channels[n] for n in series.channels]
            write_csv(path, _header(head | {"theta_in": scen.theta_in,
                                            "theta_out": scen.theta_out}),
                      names, cols)
            for n in series.channels:
                summary.append(f"  max rel {n} = {fmt(np.nanmax(series.channels[n]))}")
        elif kind == "scan":
            grid = _scan_output(scen)
            ti = np.repeat(grid.theta_in, len(grid.theta_out))
            to = np.tile(grid.theta_out, len(grid.theta_in))
            write_csv(path, _header(head | {"t_snapshot_ps": grid.t_snapshot,
                                            "from": scen.scan["from"],
                                            "to": scen.scan["to"]}),
                      ["theta_in", "theta_out", "value"],
                      [ti, to, grid.values.ravel()])
            summary.append(f"  scan peak = {fmt(np.nanmax(grid.values))}")
        elif kind == "resonances":
            text, names, cols = resonance_report(scen.model, resolve_params(scen),
                                                 s=scen.s)
            write_csv(path, _header(head), names, cols)
            summary.append(text)
        files.append(path)
    return files, "\n".join(summary)


def _channels_output(scen, bundle, system, times) -> TimeSeries:
    psi0 = _initial_vector(scen, system, bundle)
    vectors = {ch: state_vector(ch, system, bundle.spins) for ch in scen.channels}
    meta: dict[str, object] = {"initial": scen.initial_state or
                               f"spinor({fmt(scen.theta_in)})x{scen.coupled}"}
    if not scen.sweep_jk:
        rho0 = DensityMatrix.pure(psi0)
        states = evolve(system.h_device, rho0, times)
        projs = {ch: projector_onto(v) for ch, v in vectors.items()}
        series = transition_probabilities(states, projs, times=times)
        series.meta.update(meta)
        return series
    channels: dict[str, np.ndarray] = {}
    base = resolve_params(scen)
    for jk in scen.sweep_jk:
        p = ModelParams(s2=base.s2, s3=base.s3, j_z=base.j_z, j_xy=base.j_xy,
                        j_k2=jk, j_k3=jk, d=base.d, t_hop=base.t_hop,
                        b0=base.b0, g1=base.g1, g23=base.g23)
        sysk = DeviceSystem.from_bundle(build_hamiltonian(p))
        rho0 = DensityMatrix.pure(psi0)
        states = evolve(sysk.h_device, rho0, times)
        projs = {ch: projector_onto(v) for ch, v in vectors.items()}
        sweep = transition_probabilities(states, projs, times=times)
        for ch, vals in sweep.channels.items():
            channels[f"{ch}@jk={fmt(jk)}"] = vals
    return TimeSeries(times=times, channels=channels, meta=meta)


def _bloch_output(scen, bundle, system, times) -> TimeSeries:
    psi0 = _initial_vector(scen, system, bundle)
    support = np.nonzero(np.abs(psi0) > 1e-12)[0]
    block = None
    for b in system.blocks:
        if set(support) <= set(b.indices):
            block = b
            break
    if block is None or block.size != 2:
        raise ConfigError("bloch output needs an initial state inside a "
                          "two-state block")
    local = psi0[list(block.indices)]
    rho0 = DensityMatrix.pure(local)
    return bloch_trajectory(block, rho0, times)


def _relative_output(scen, bundle, system, times) -> TimeSeries:
    chi_in = filtering.spinor(scen.theta_in, scen.phi_in)
    rho0 = filtering.prepare_filtered(chi_in, scen.coupled, system)
    states = evolve(system.h_device, rho0, times)
    spec = filtering.FilterSpec(theta_in=scen.theta_in, theta_out=scen.theta_out,
                                phi_in=scen.phi_in, phi_out=scen.phi_out)
    return filtering.relative_transition(states, spec, list(scen.targets),
                                         system, times=times)


def _scan_output(scen) -> filtering.ScanGrid:
    params = resolve_params(scen)
    if not isinstance(params, ModelParams):
        raise ConfigError("scan outputs need one of the device models")
    sc = scen.scan
    th_in = np.linspace(0.0, np.pi, int(sc["theta_in_points"]))
    th_out = np.linspace(0.0, np.pi, int(sc["theta_out_points"]))
    return filtering.filter_scan(th_in, th_out, float(sc["t_snapshot_ps"]),
                                 params, (sc["from"], sc["to"]))


def run_scenario(config_path: str, outdir: str) -> tuple[list[str], str]:
    try:
        with open(config_path) as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from None
    scen = parse_config_text(text)
    return execute(scen, outdir)


# ---------------------------------------------------------------------------
# resonance report
# ---------------------------------------------------------------------------

def _two_level_blocks(system: DeviceSystem) -> list[SpinBlock]:
    return [b for b in system.blocks if b.size == 2]


def _match_block(system: DeviceSystem, labels) -> SpinBlock | None:
    for b in system.blocks:
        if b.labels == labels:
            return b
    return None


def _device_resonance_rows(params: ModelParams):
    """One row per 2x2 block: reduction, predicted resonance, verified peak."""
    system = DeviceSystem.from_bundle(build_hamiltonian(params))
    rows = []
    probe = (1.0, 2.0) if abs(params.j_k) < 1e-9 else \
        (params.j_k, params.j_k + (0.5 if params.j_k > 0 else -0.5))
    probed = {}
    for j in probe:
        p = ModelParams(s2=params.s2, s3=params.s3, j_z=params.j_z,
                        j_xy=params.j_xy, j_k2=j + params.delta_k / 2,
                        j_k3=j - params.delta_k / 2, d=params.d,
                        t_hop=params.t_hop, b0=params.b0, g1=params.g1,
                        g23=params.g23)
        probed[j] = DeviceSystem.from_bundle(build_hamiltonian(p))
    kind_tag = "JJ" if params.s.twice == 1 else (
        "generalized DJ" if (params.j_z != params.j_xy or
                             (params.b0 != 0 and params.g1 != params.g23))
        else "DJ")
    for block in _two_level_blocks(system):
        t = block.two_level
        row = {
            "states": block.states(), "m_total": block.m_total,
            "omega_x": t.omega_x, "omega_z": t.omega_z, "offset": t.offset,
            "p_max": rabi(t.coupling, t.omega_z).p_max if t.rabi_omega > 0 else float("nan"),
            "omega": rabi(t.coupling, t.omega_z).omega if t.rabi_omega > 0 else float("nan"),
        }
        t0 = _match_block(probed[probe[0]], block.labels)
        t1 = _match_block(probed[probe[1]], block.labels)
        if t0 is None or t1 is None or t0.size != 2 or t1.size != 2:
            row.update(resonance="none", j_r=float("nan"))
            rows.append(row)
            continue
        wz0, wz1 = t0.two_level.omega_z, t1.two_level.omega_z
        wx0, wx1 = t0.two_level.omega_x, t1.two_level.omega_x
        slope = (wz1 - wz0) / (probe[1] - probe[0])
        if abs(slope) < 1e-12:
            row.update(resonance="none", j_r=float("nan"))
            rows.append(row)
            continue
        j_r = probe[0] - wz0 / slope
        wx_r = wx0 + (wx1 - wx0) * (j_r - probe[0]) / (probe[1] - probe[0])
        if abs(wx_r) < 1e-12:
            row.update(resonance="none", j_r=float("nan"))
            rows.append(row)
            continue
        row.update(resonance=kind_tag, j_r=j_r)
        rows.append(row)
    return system, rows


def _verify_row_peak(params: ModelParams, labels, j_r: float):
    """Full-system evolution at the predicted resonance."""
    p = ModelParams(s2=params.s2, s3=params.s3, j_z=params.j_z, j_xy=params.j_xy,
                    j_k2=j_r + params.delta_k / 2, j_k3=j_r - params.delta_k / 2,
                    d=params.d, t_hop=params.t_hop, b0=params.b0,
                    g1=params.g1, g23=params.g23)
    system = DeviceSystem.from_bundle(build_hamiltonian(p))
    block = _match_block(system, labels)
    if block is None or block.size != 2:
        return float("nan"), float("nan")
    t = block.two_level
    omega = rabi(t.coupling, t.omega_z).omega
    span = 2.6 * np.pi / unit_convert(omega)
    grid = np.linspace(0.0, span, 2001)
    psi0 = system.basis_state(block.labels[1])
    tgt = system.basis_state(block.labels[0])
    return brute_force_rabi(system.h_device, psi0, tgt, grid)


def resonance_report(model: str, params, s: Spin | None = None):
    """Text table plus CSV columns describing every 2x2 block's resonance."""
    if model in ("bh3", "trimer"):
        return _triple_resonance_report(model, params)
    if not isinstance(params, ModelParams):
        raise ConfigError("device resonance report needs ModelParams")
    system, rows = _device_resonance_rows(params)
    for row in rows:
        if np.isfinite(row["j_r"]):
            omega_sim, p_sim = _verify_row_peak(params, _labels_of(system, row), row["j_r"])
            row["p_max_at_jr"] = p_sim
            row["omega_at_jr"] = omega_sim
        else:
            row["p_max_at_jr"] = float("nan")
            row["omega_at_jr"] = float("nan")
    lines = ["states                          resonance        J_R         "
             "omega_x    omega_z    p_max      p_max@J_R"]
    for row in rows:
        jr = fmt(row["j_r"]) if np.isfinite(row["j_r"]) else "-"
        pj = fmt(row["p_max_at_jr"]) if np.isfinite(row["p_max_at_jr"]) else "-"
        lines.append(f"{row['states']:<30s}  {row['resonance']:<15s}  {jr:<10s}  "
                     f"{fmt(row['omega_x']):<9s}  {fmt(row['omega_z']):<9s}  "
                     f"{fmt(row['p_max']):<9s}  {pj}")
    if params.s.twice == 1:
        lines.append("no anisotropy-driven resonance exists for spin-1/2 coupled "
                     "particles; the exchange-anisotropy (JJ) root is listed instead")
    names = ["block", "omega_x", "omega_z", "offset", "j_r", "p_max",
             "omega", "p_max_at_jr", "omega_at_jr"]
    cols = [np.arange(len(rows), dtype=float),
            np.array([r["omega_x"] for r in rows]),
            np.array([r["omega_z"] for r in rows]),
            np.array([r["offset"] for r in rows]),
            np.array([r["j_r"] for r in rows]),
            np.array([r["p_max"] for r in rows]),
            np.array([r["omega"] for r in rows]),
            np.array([r["p_max_at_jr"] for r in rows]),
            np.array([r["omega_at_jr"] for r in rows])]
    return "\n".join(lines), names, cols


def _labels_of(system: DeviceSystem, row) -> tuple:
    for b in _two_level_blocks(system):
        if b.states() == row["states"]:
            return b.labels
    raise AssertionError("row lost its block")


def _triple_resonance_report(model: str, jd: tuple[float, float]):
    j, d = jd
    bundle = build_bh3(j, d) if model == "bh3" else build_trimer(j, d)
    system = DeviceSystem.from_bundle(bundle)
    tr = device_to_total(*bundle.spins)
    h_tot = tr.matrix @ system.h_device @ tr.matrix.T
    from .basis import block_decompose
    blocks = [b for b in block_decompose(h_tot, tr.labels_out) if b.size == 2]
    lines, data = [], []
    if model == "bh3":
        lines.append("chain of three spin-1 particles: the two-state phase blocks "
                     "oscillate at omega=|J| with peak 3/4; no anisotropy-driven "
                     "resonance exists in this basis")
    else:
        blocks = [b for b in system.blocks if b.size == 2] + blocks
        lines.append("spin-1 triangle: device blocks m=+-1 peak at (J/omega)^2 "
                     "(lossless only without anisotropy), m=+-2 peak at 8/9; "
                     "the total-spin pairs swap the roles of D and J")
    lines.append("states                          omega_x    omega_z    omega      p_max")
    for b in blocks:
        t = b.two_level
        r = rabi(t.coupling, t.omega_z)
        lines.append(f"{b.states():<30s}  {fmt(t.omega_x):<9s}  {fmt(t.omega_z):<9s}  "
                     f"{fmt(r.omega):<9s}  {fmt(r.p_max)}")
        data.append((t.omega_x, t.omega_z, r.omega, r.p_max))
    names = ["block", "omega_x", "omega_z", "omega", "p_max"]
    cols = [np.arange(len(data), dtype=float)] + \
        [np.array([row[k] for row in data]) for k in range(4)]
    return "\n".join(lines), names, cols


# ---------------------------------------------------------------------------
# bundled figure recipes
# ---------------------------------------------------------------------------

_S1_PARAMS = "jk2 = -0.4\njk3 = -0.4\njz = -0.05\njxy = -0.05\nd = -0.6\nthop = 0.05\n"
_SHALF_PARAMS = "jk2 = -0.4\njk3 = -0.4\njz = -0.05\njxy = -0.05\nthop = 0.05\n"

_RECIPE_CONFIGS: dict[str, str] = {
    "fig2": ("[scenario]\nmodel = s_one\nname = fig2\n\n[params]\n" + _S1_PARAMS +
             "\n[time]\nspan_ps = 120\npoints = 1000\n\n[initial]\nstate = down:2:2\n"
             "\n[output]\nkind = channels bloch\nchannels = down:2:2 up:2:1\n"),
    "fig4": ("[scenario]\nmodel = s_half\nname = fig4\n\n[params]\n" + _SHALF_PARAMS +
             "\n[output]\nkind = scan\n\n[scan]\ntheta_in_points = 65\n"
             "theta_out_points = 65\nt_snapshot_ps = 133\nfrom = 1:1\nto = 1:0\n"),
    "fig5": ("[scenario]\nmodel = s_half\nname = fig5\n\n[params]\n" + _SHALF_PARAMS +
             "\n[time]\nspan_ps = 150\npoints = 1000\n\n[initial]\ntheta_in = pi\n"
             "phi_in = 0\ncoupled = 1:1\n\n[output]\nkind = relative\n"
             "theta_out = pi/8\nphi_out = 0\ntargets = 1:1 1:0\n"),
    "fig6": ("[scenario]\nmodel = s_one\nname = fig6\n\n[params]\n" + _S1_PARAMS +
             "\n[time]\nspan_ps = 120\npoints = 1000\n\n[initial]\nstate = down:2:2\n"
             "\n[output]\nkind = channels\nchannels = up:2:1\n"
             "sweep_jk = -0.4 -0.5 -0.3\n"),
    "fig7_s1": ("[scenario]\nmodel = s_one\nname = fig7_s1\n\n[params]\n" + _S1_PARAMS +
                "\n[time]\nspan_ps = 120\npoints = 1000\n\n[initial]\nstate = down:2:2\n"
                "\n[output]\nkind = bloch\n"),
    "fig7_shalf": ("[scenario]\nmodel = s_half\nname = fig7_shalf\n\n[params]\n" +
                   _SHALF_PARAMS +
                   "\n[time]\nspan_ps = 150\npoints = 1000\n\n[initial]\n"
                   "state = down:1:1\n\n[output]\nkind = bloch\n"),
}

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "table1")


def recipe_config(figure_id: str) -> str | None:
    """Canned config text for scenario-backed recipes, None for the others."""
    if figure_id == "fig7":
        return None
    return _RECIPE_CONFIGS.get(figure_id)


def reproduce_figure(figure_id: str, outdir: str) -> tuple[list[str], str]:
    """Emit the data series underlying one bundled figure or the table."""
    if figure_id not in FIGURE_IDS:
        raise ConfigError(f"unknown figure id {figure_id!r}; valid: {FIGURE_IDS}")
    os.makedirs(outdir, exist_ok=True)
    if figure_id in _RECIPE_CONFIGS:
        scen = parse_config_text(_RECIPE_CONFIGS[figure_id])
        return execute(scen, outdir)
    if figure_id == "fig7":
        files, summaries = [], []
        for sub in ("fig7_s1", "fig7_shalf"):
            f, s = execute(parse_config_text(_RECIPE_CONFIGS[sub]), outdir)
            files += f
            summaries.append(s)
        return files, "\n".join(summaries)
    if figure_id == "fig3":
        return _emit_balance_curves(outdir)
    return _emit_table1(outdir)


def _emit_balance_curves(outdir: str) -> tuple[list[str], str]:
    files = []
    for tag, d in (("hard", 0.60), ("easy", -0.60)):
        j_r = dj_resonance(Spin(2), d).j_r
        x = np.linspace(3.0 / 400, 3.0, 400)
        curve = eigen_balance(Spin(2), d, x * j_r)
        path = os.path.join(outdir, f"fig3_{tag}_balance.csv")
        write_csv(path, _header({"model": "s_one", "d": d, "j_r": j_r}),
                  ["j_cm1", "j_over_jr", "delta", "alpha", "beta", "c1_sq", "c2_sq"],
                  [curve.j_values, x, curve.delta, curve.alpha, curve.beta,
                   curve.c1_sq, curve.c2_sq])
        files.append(path)
    return files, "balance curves for both anisotropy signs written"


_TABLE1_ROWS = (
    ("1/2", "up:1:0", "down:1:1", "-", "8/9", "(3/4)|JK|"),
    ("1/2", "down:1:0", "up:1:-1", "-", "8/9", "(3/4)|JK|"),
    ("1", "up:2:1", "down:2:2", "2D/3", "1", "(2/3)|D|"),
    ("1", "up:2:-2", "down:2:-1", "2D/3", "1", "(2/3)|D|"),
    ("1", "up:1:0", "down:1:1", "-2D", "1", "sqrt2|D|"),
    ("1", "up:1:-1", "down:1:0", "-2D", "1", "sqrt2|D|"),
)

_TABLE1_D = -0.60
_TABLE1_JK_HALF = -0.40


def _emit_table1(outdir: str) -> tuple[list[str], str]:
    d = _TABLE1_D
    rows = []
    for s23, src, tgt, jr_sym, p_sym, om_sym in _TABLE1_ROWS:
        half = s23 == "1/2"
        spin = Spin(1) if half else Spin(2)
        if jr_sym == "-":
            j_r = _TABLE1_JK_HALF
            p_pred = 8.0 / 9.0
            om_pred = 0.75 * abs(j_r)
            jr_num = float("nan")
        else:
            j_r = (2.0 / 3.0) * d if jr_sym == "2D/3" else -2.0 * d
            jr_num = j_r
            p_pred = 1.0
            om_pred = (2.0 / 3.0) * abs(d) if jr_sym == "2D/3" else np.sqrt(2.0) * abs(d)
        p = ModelParams.isotropic(spin, j_k=j_r, j_h=-0.05,
                                  d=0.0 if half else d, t_hop=0.05)
        system = DeviceSystem.from_bundle(build_hamiltonian(p))
        psi0 = system.basis_state(parse_device_label(src))
        tgtv = system.basis_state(parse_device_label(tgt))
        span = 2.6 * np.pi / unit_convert(om_pred)
        omega_sim, p_sim = brute_force_rabi(system.h_device, psi0, tgtv,
                                            np.linspace(0.0, span, 2001))
        rows.append((s23, src, tgt, jr_sym, p_sym, om_sym,
                     jr_num, p_pred, om_pred, p_sim, omega_sim))
    path = os.path.join(outdir, "table1_table.csv")
    with open(path, "w", newline="\n") as f:
        f.write(_header({"d": d, "jk_half": _TABLE1_JK_HALF,
                         "jh": -0.05, "thop": 0.05}) + "\n")
        f.write("s23,transition_from,transition_to,j_r,p_max,omega,"
                "j_r_cm1,p_max_value,omega_cm1,p_max_sim,omega_sim_cm1\n")
        for r in rows:
            jr_cell = "" if np.isnan(r[6]) else fmt(r[6])
            f.write(",".join([r[0], r[1], r[2], r[3], r[4], r[5], jr_cell,
                              fmt(r[7]), fmt(r[8]), fmt(r[9]), fmt(r[10])]) + "\n")
    text = ["s23   transition                    J_R     P      Omega       "
            "P(sim)        Omega(sim)"]
    for r in rows:
        text.append(f"{r[0]:<5s} {r[1]:>9s} <-> {r[2]:<10s}  {r[3]:<6s}  {r[4]:<5s} "
                    f"{r[5]:<10s}  {fmt(r[9]):<12s}  {fmt(r[10])}")
    return [path], "\n".join(text)
