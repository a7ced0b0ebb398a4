"""Configuration-driven experiment runs: gate, spectra, report bundle.

A run prepares the thermal state of a register, applies one multi-controlled
NOT realization (ideal unitary, CNOT-network decomposition, or a single
transition-selective pulse), and writes the before/after target spectra with
labelled peaks, a fidelity report and cross-checks.  Identical configs
produce byte-identical output files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import compiler, gates, pulse, spectrum
from .presets import PRESET_NAMES, preset_system
from .spin_system import SpinSystem, build_system, transition_frequency
from .states import (DEFAULT_BETA_SCALE, apply_gate, population_difference,
                     populations, thermal_state)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunResult",
    "load_config",
    "run",
    "scan",
]

REALIZATIONS = ("ideal", "single_pulse", "decomposed")
DEFAULT_MIN_FIDELITY = 0.98
# pulse-path populations must match the ideal-gate path to within this
# fraction of the largest thermal population difference on the target
POPULATION_TOLERANCE = 0.05


class ConfigError(ValueError):
    """Invalid experiment configuration; message carries the field path."""


@dataclass(frozen=True)
class ExperimentConfig:
    system: SpinSystem
    system_name: str
    controls: tuple[int, ...]
    target: int
    realization: str
    beta_scale: float = DEFAULT_BETA_SCALE
    pulse_amplitude_hz: float | None = None
    pulse_shape: str = "rectangular"
    acquisition: spectrum.AcquisitionParams = field(
        default_factory=spectrum.AcquisitionParams)
    min_fidelity: float = DEFAULT_MIN_FIDELITY
    output_dir: str | None = None
    scan_amplitudes_hz: tuple[float, ...] = ()

    @property
    def n_controls(self) -> int:
        return len(self.controls)


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"{path}{key}: missing required field")
    return mapping[key]


def _config_system(value, path: str) -> tuple[SpinSystem, str]:
    if isinstance(value, str):
        if value not in PRESET_NAMES:
            raise ConfigError(
                f"{path}: unknown preset {value!r}; available: {', '.join(PRESET_NAMES)}"
            )
        return preset_system(value), value
    if isinstance(value, dict):
        try:
            return build_system(_require(value, "offsets_hz", path + "."),
                                _require(value, "couplings_hz", path + ".")), "inline"
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}: expected a preset name or an inline system mapping")


def config_from_mapping(data: dict) -> ExperimentConfig:
    """Validate a parsed config mapping; errors name the offending field."""
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a mapping")
    system, system_name = _config_system(_require(data, "system", ""), "system")

    gate_map = _require(data, "gate", "")
    if not isinstance(gate_map, dict):
        raise ConfigError("gate: expected a mapping")
    target = int(_require(gate_map, "target", "gate."))
    controls_raw = _require(gate_map, "controls", "gate.")
    if not isinstance(controls_raw, (list, tuple)) or not controls_raw:
        raise ConfigError("gate.controls: expected a non-empty list of spins")
    controls = tuple(int(c) for c in controls_raw)
    wires = set(controls) | {target}
    if len(wires) != len(controls) + 1:
        raise ConfigError("gate.controls: controls and target must be distinct")
    if not wires <= set(range(1, system.n + 1)):
        raise ConfigError(
            f"gate: wires {sorted(wires)} out of range for a {system.n}-spin system")
    if "n_controls" in gate_map and int(gate_map["n_controls"]) != len(controls):
        raise ConfigError("gate.n_controls: does not match the controls list")

    realization = _require(data, "realization", "")
    if realization not in REALIZATIONS:
        raise ConfigError(
            f"realization: {realization!r} is not one of {', '.join(REALIZATIONS)}")
    if realization == "decomposed" and len(controls) not in (2, 3):
        raise ConfigError(
            "realization: decomposed networks exist for 2 or 3 controls only")
    if realization == "single_pulse":
        missing = [c for c in controls if system.coupling(c, target) == 0.0]
        if set(controls) | {target} != set(range(1, system.n + 1)):
            raise ConfigError(
                "gate.controls: single_pulse needs every non-target spin as a control")
        if missing:
            raise ConfigError(
                f"gate.controls: spins {missing} are uncoupled to the target; "
                "single_pulse cannot resolve their transitions")

    beta_scale = float(data.get("beta_scale", DEFAULT_BETA_SCALE))
    if not beta_scale > 0.0:
        raise ConfigError("beta_scale: must be > 0")

    pulse_map = data.get("pulse", {}) or {}
    if not isinstance(pulse_map, dict):
        raise ConfigError("pulse: expected a mapping")
    amplitude = pulse_map.get("amplitude_hz")
    if amplitude is not None:
        amplitude = float(amplitude)
        if not amplitude > 0.0:
            raise ConfigError("pulse.amplitude_hz: must be > 0")
    shape = pulse_map.get("shape", "rectangular")
    if shape not in pulse.PULSE_SHAPES:
        raise ConfigError(
            f"pulse.shape: {shape!r} is not one of {', '.join(pulse.PULSE_SHAPES)}")

    acq_map = data.get("acquisition", {}) or {}
    if not isinstance(acq_map, dict):
        raise ConfigError("acquisition: expected a mapping")
    try:
        acq = spectrum.AcquisitionParams(
            dwell_s=float(acq_map.get("dwell_s", 250e-6)),
            points=int(acq_map.get("points", 16384)),
            line_broadening_hz=float(acq_map.get("line_broadening_hz", 0.5)),
        )
    except ValueError as exc:
        raise ConfigError(f"acquisition: {exc}") from exc

    checks_map = data.get("checks", {}) or {}
    min_fidelity = float(checks_map.get("min_fidelity", DEFAULT_MIN_FIDELITY))

    scan_map = data.get("scan", {}) or {}
    if not isinstance(scan_map, dict):
        raise ConfigError("scan: expected a mapping")
    scan_amps: tuple[float, ...] = ()
    if "amplitudes_hz" in scan_map:
        scan_amps = tuple(float(a) for a in scan_map["amplitudes_hz"])
    elif "amplitude_factors" in scan_map:
        j_min = min(abs(system.coupling(c, target)) for c in controls)
        scan_amps = tuple(float(f) * j_min for f in scan_map["amplitude_factors"])
    if any(a <= 0.0 for a in scan_amps):
        raise ConfigError("scan: amplitudes must be > 0")

    return ExperimentConfig(
        system=system,
        system_name=system_name,
        controls=controls,
        target=target,
        realization=realization,
        beta_scale=beta_scale,
        pulse_amplitude_hz=amplitude,
        pulse_shape=shape,
        acquisition=acq,
        min_fidelity=min_fidelity,
        output_dir=data.get("output_dir"),
        scan_amplitudes_hz=scan_amps,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    return config_from_mapping(data)


@dataclass
class RunResult:
    out_dir: Path
    passed: bool
    checks: list[tuple[str, bool, str]]
    fidelity_raw: float
    fidelity_stripped: float
    report_text: str
    files: list[str]


def _ideal_unitary(cfg: ExperimentConfig) -> np.ndarray:
    wires = list(cfg.controls) + [cfg.target]
    return gates.embed(gates.lambda_not(cfg.n_controls), wires, cfg.system.n)


def _realized_unitary(cfg: ExperimentConfig):
    """Returns (unitary, reference for fidelity, extra report lines, artifact)."""
    if cfg.realization == "ideal":
        u = _ideal_unitary(cfg)
        return u, u, [], None
    if cfg.realization == "decomposed":
        seq = compiler.decompose_toffoli() if cfg.n_controls == 2 \
            else compiler.decompose_lambda3()
        wire_map = {i + 1: w for i, w in enumerate(list(cfg.controls) + [cfg.target])}
        ops = tuple(
            compiler.GateOp(op.name, op.matrix, tuple(wire_map[w] for w in op.wires))
            for op in seq.ops)
        seq = compiler.GateSequence(ops=ops, n=cfg.system.n)
        u = compiler.sequence_unitary(seq)
        lines = [f"two_qubit_gates={seq.two_qubit_count}"]
        return u, _ideal_unitary(cfg), lines, seq
    program = compiler.lambda_pulse_program(
        cfg.system, cfg.controls, cfg.target,
        amplitude_hz=cfg.pulse_amplitude_hz, shape=cfg.pulse_shape)
    prop = pulse.program_unitary(cfg.system, program)
    ev = program.events[0]
    reference = gates.embed(gates.modified_lambda_not(cfg.n_controls),
                            list(cfg.controls) + [cfg.target], cfg.system.n)
    lines = [
        f"pulse: carrier_hz={ev.carrier_hz:.6f} amplitude_hz={ev.amplitude_hz:.6f} "
        f"duration_s={ev.duration_s:.6f} shape={ev.shape}",
        f"slices: {prop.slice_count} (max {prop.max_slice_s:.3e} s), "
        f"unitarity defect {prop.unitarity_defect:.2e}",
    ]
    return prop.matrix, reference, lines, program


def _patterns(cfg: ExperimentConfig) -> list[str]:
    width = cfg.system.n - 1
    return [format(i, f"0{width}b") for i in range(2 ** width)]


def _peak_height(spec: spectrum.Spectrum, pattern: str) -> float | None:
    for p in spec.peaks:
        if p.control_pattern == pattern:
            return p.height
    return None


def run(cfg: ExperimentConfig, out_dir=None) -> RunResult:
    """Execute one experiment and write its report bundle."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    system, target = cfg.system, cfg.target

    rho_in = thermal_state(system, cfg.beta_scale)
    u_real, u_reference, extra_lines, artifact = _realized_unitary(cfg)
    fid_raw = gates.gate_fidelity(u_real, u_reference)
    fid_stripped = gates.phase_stripped_fidelity(u_real, u_reference)
    rho_out = apply_gate(rho_in, u_real)
    rho_ideal = apply_gate(rho_in, _ideal_unitary(cfg))

    acq = cfg.acquisition
    spec_in = spectrum.spectrum_of(
        spectrum.synthesize_fid(system, spectrum.readout_prepare(rho_in, system, target),
                                target, acq), acq)
    spec_out = spectrum.spectrum_of(
        spectrum.synthesize_fid(system, spectrum.readout_prepare(rho_out, system, target),
                                target, acq), acq, phase_rad=spec_in.phase_rad)

    checks: list[tuple[str, bool, str]] = []
    expected_peaks = 2 ** (system.n - 1)
    assign_error = None
    try:
        spec_in = spectrum.assign_peaks(spec_in, system, target)
        spec_out = spectrum.assign_peaks(spec_out, system, target)
    except ValueError as exc:
        assign_error = str(exc)
    checks.append(("peak_assignment", assign_error is None,
                   assign_error or "all peaks within 2 bins of a transition"))
    n_in, n_out = len(spec_in.peaks), len(spec_out.peaks)
    checks.append(("peak_count", n_in == expected_peaks == n_out,
                   f"input {n_in}, output {n_out}, expected {expected_peaks}"))

    pop_scale = max(abs(population_difference(rho_in, system, target, pat))
                    for pat in _patterns(cfg))
    pop_err = float(np.max(np.abs(populations(rho_out) - populations(rho_ideal))))
    pop_tol = POPULATION_TOLERANCE * pop_scale
    checks.append(("population_agreement", pop_err <= pop_tol,
                   f"max deviation {pop_err:.3e} vs tolerance {pop_tol:.3e}"))

    checks.append(("gate_fidelity", fid_stripped >= cfg.min_fidelity,
                   f"phase-stripped {fid_stripped:.6f} vs minimum {cfg.min_fidelity}"))

    ones = "1" * cfg.n_controls if set(cfg.controls) | {target} == set(
        range(1, system.n + 1)) else None
    inversion_detail = "not applicable (spectator spins present)"
    inverted_ok = True
    if ones is not None:
        h_in = _peak_height(spec_in, ones)
        h_out = _peak_height(spec_out, ones)
        if h_in is None or h_out is None or h_in == 0.0:
            inverted_ok = False
            inversion_detail = f"|{ones}> line missing from a spectrum"
        else:
            ratio = h_out / h_in
            inverted_ok = ratio < 0.0
            inversion_detail = f"|{ones}> height ratio out/in = {ratio:.4f}"
    checks.append(("target_line_inverted", inverted_ok, inversion_detail))

    passed = all(ok for _, ok, _ in checks)

    # --- write the bundle ---------------------------------------------------
    files = []

    def _emit(name: str, text: str) -> None:
        (out / name).write_text(text, encoding="utf-8")
        files.append(name)

    spectrum.save_spectrum_csv(spec_in, out / "input_spectrum.csv")
    spectrum.save_spectrum_csv(spec_out, out / "output_spectrum.csv")
    files += ["input_spectrum.csv", "output_spectrum.csv"]
    _emit("input_peaks.txt", spectrum.peaks_to_text(spec_in.peaks))
    _emit("output_peaks.txt", spectrum.peaks_to_text(spec_out.peaks))
    if isinstance(artifact, pulse.PulseProgram):
        _emit("program.txt", pulse.program_to_text(artifact))
    elif isinstance(artifact, compiler.GateSequence):
        _emit("gates.txt", compiler.sequence_to_text(artifact))

    lines = [
        f"register: {system!r} (preset {cfg.system_name})",
        f"gate: multi-controlled NOT, controls {list(cfg.controls)}, target {target}",
        f"realization: {cfg.realization}",
        f"beta_scale: {cfg.beta_scale:g}",
    ]
    lines += extra_lines
    lines += [
        f"fidelity_raw={fid_raw:.9f}",
        f"fidelity_phase_stripped={fid_stripped:.9f}",
        "",
        "input peaks:",
        spectrum.peaks_to_text(spec_in.peaks).rstrip("\n"),
        "",
        "output peaks:",
        spectrum.peaks_to_text(spec_out.peaks).rstrip("\n"),
        "",
        "height changes (output vs input):",
    ]
    for pat in _patterns(cfg):
        h_in = _peak_height(spec_in, pat)
        h_out = _peak_height(spec_out, pat)
        if h_in is None or h_out is None or h_in == 0.0:
            lines.append(f"  pattern {pat}: n/a")
        else:
            lines.append(f"  pattern {pat}: ratio {h_out / h_in:+.4f}")
    lines.append("")
    lines.append("checks:")
    for name, ok, detail in checks:
        lines.append(f"  {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    lines.append(f"RESULT: {'PASS' if passed else 'FAILED'}")
    report_text = "\n".join(lines) + "\n"
    _emit("report.txt", report_text)

    from .plotting import save_spectra_figure
    save_spectra_figure(spec_in, spec_out, out / "spectra.png",
                        title=f"target spin {target}")
    files.append("spectra.png")

    return RunResult(out_dir=out, passed=passed, checks=checks,
                     fidelity_raw=fid_raw, fidelity_stripped=fid_stripped,
                     report_text=report_text, files=files)


def scan(cfg: ExperimentConfig, out_dir=None) -> list[tuple[float, float]]:
    """Selectivity curve for the configured gate; writes CSV and figure."""
    if not cfg.scan_amplitudes_hz:
        raise ConfigError("scan: no amplitudes configured (scan.amplitudes_hz "
                          "or scan.amplitude_factors)")
    out = Path(out_dir if out_dir is not None else cfg.output_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    reference = gates.embed(gates.modified_lambda_not(cfg.n_controls),
                            list(cfg.controls) + [cfg.target], cfg.system.n)

    def template(amplitude: float) -> pulse.PulseProgram:
        return compiler.lambda_pulse_program(
            cfg.system, cfg.controls, cfg.target,
            amplitude_hz=amplitude, shape=cfg.pulse_shape)

    curve = pulse.selectivity_scan(cfg.system, template, cfg.scan_amplitudes_hz,
                                   reference)
    with open(out / "scan.csv", "w", encoding="utf-8") as fh:
        fh.write("amplitude_hz,fidelity_phase_stripped\n")
        for amp, fid in curve:
            fh.write(f"{amp:.10g},{fid:.10g}\n")

    from .plotting import save_scan_figure
    save_scan_figure(curve, out / "scan.png")
    return curve
