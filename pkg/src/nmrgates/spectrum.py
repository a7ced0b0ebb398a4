"""Free induction decay synthesis, Fourier spectra and peak assignment.

The observable for one spin is the raising-operator expectation
S(t) = tr(sp_target rho(t)) after an ideal pi/2 readout rotation.  Because
the drift Hamiltonian is diagonal, every single-quantum coherence evolves
as a single complex exponential and the FID is a closed-form sum over the
2^(n-1) target transitions; no time stepping is involved.  The spectrum is
the real part of the discrete Fourier transform, phased so that the tallest
peak of a reference (normally the thermal input) is positive, and each
detected line is matched to its theoretical transition and labelled with
the control pattern.  A line's height is proportional to the population
difference across its transition.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import gates
from .spin_system import SpinSystem, hamiltonian_diagonal, transition_frequency, transition_pair
from .states import apply_gate

__all__ = [
    "AcquisitionParams",
    "Peak",
    "Spectrum",
    "readout_prepare",
    "synthesize_fid",
    "spectrum_of",
    "detect_peaks",
    "assign_peaks",
    "save_spectrum_csv",
    "peaks_to_text",
]

# detection: candidate maxima must clear the median magnitude by this factor
NOISE_FLOOR_FACTOR = 5.0
# and a fraction of the tallest line, which suppresses truncation ripples
RELATIVE_FLOOR = 0.01
# non-maximum suppression window (bins to each side)
PEAK_WINDOW_BINS = 8


@dataclass(frozen=True)
class AcquisitionParams:
    """Sampling settings: 4 kHz width and 0.24 Hz bins by default."""

    dwell_s: float = 250e-6
    points: int = 16384
    line_broadening_hz: float = 0.5

    def __post_init__(self):
        if not self.dwell_s > 0.0:
            raise ValueError("dwell must be > 0")
        p = self.points
        if p < 1024 or (p & (p - 1)) != 0:
            raise ValueError("points must be a power of 2, at least 1024")
        if self.line_broadening_hz < 0.0:
            raise ValueError("line broadening must be >= 0")

    @property
    def bin_hz(self) -> float:
        return 1.0 / (self.dwell_s * self.points)

    @property
    def spectral_width_hz(self) -> float:
        return 1.0 / self.dwell_s


@dataclass(frozen=True)
class Peak:
    center_hz: float
    height: float
    control_pattern: str | None = None


@dataclass(frozen=True)
class Spectrum:
    """Real spectrum on an ascending uniform frequency axis."""

    frequencies_hz: np.ndarray
    amplitude: np.ndarray
    phase_rad: float = 0.0
    peaks: tuple[Peak, ...] = field(default_factory=tuple)

    @property
    def bin_hz(self) -> float:
        return float(self.frequencies_hz[1] - self.frequencies_hz[0])


def readout_prepare(rho: np.ndarray, system: SpinSystem, target: int) -> np.ndarray:
    """Ideal instantaneous pi/2 rotation about y on the target spin only.

    Converts longitudinal polarization into transverse coherence on every
    target transition; excluded from any gate-fidelity accounting.
    """
    if not 1 <= target <= system.n:
        raise ValueError(f"target spin {target} out of range 1..{system.n}")
    r = gates.embed(gates.rotation("y", np.pi / 2.0), [target], system.n)
    return apply_gate(rho, r)


def synthesize_fid(system: SpinSystem, rho_read: np.ndarray, target: int,
                   acq: AcquisitionParams) -> np.ndarray:
    """Complex FID of the target spin, closed form from the diagonal drift.

    S(t_j) = tr(sp_target rho(t_j)) * exp(-pi * lb * t_j) with
    rho(t) = exp(-iHt) rho_read exp(+iHt) and t_j = j * dwell.
    """
    rho_read = np.asarray(rho_read, dtype=complex)
    energies = hamiltonian_diagonal(system)
    t = np.arange(acq.points) * acq.dwell_s
    signal = np.zeros(acq.points, dtype=complex)
    n_patterns = 2 ** (system.n - 1)
    for i in range(n_patterns):
        pattern = format(i, f"0{system.n - 1}b") if system.n > 1 else ""
        idx0, idx1 = transition_pair(system, target, pattern)
        amp = rho_read[idx1, idx0]
        if amp == 0:
            continue
        signal += amp * np.exp(-1j * (energies[idx1] - energies[idx0]) * t)
    return signal * np.exp(-np.pi * acq.line_broadening_hz * t)


def spectrum_of(fid: np.ndarray, acq: AcquisitionParams,
                phase_rad: float | None = None) -> Spectrum:
    """Real part of the Fourier transform on an ascending frequency axis.

    With phase_rad=None a zero-order phase is chosen so the bin of largest
    magnitude comes out real and positive; pass the phase of a reference
    spectrum to keep two spectra comparable.
    """
    fid = np.asarray(fid, dtype=complex)
    if fid.shape != (acq.points,):
        raise ValueError(f"fid length {fid.shape} does not match points={acq.points}")
    transform = np.fft.fftshift(np.fft.fft(fid))
    freqs = np.fft.fftshift(np.fft.fftfreq(acq.points, d=acq.dwell_s))
    if phase_rad is None:
        peak_bin = int(np.argmax(np.abs(transform)))
        peak_val = transform[peak_bin]
        phase_rad = float(-np.angle(peak_val)) if abs(peak_val) > 0.0 else 0.0
    amplitude = np.real(np.exp(1j * phase_rad) * transform)
    return Spectrum(frequencies_hz=freqs, amplitude=amplitude, phase_rad=phase_rad)


def detect_peaks(spectrum: Spectrum) -> tuple[Peak, ...]:
    """Local maxima of |amplitude| above the noise floor.

    The floor is NOISE_FLOOR_FACTOR times the median magnitude; candidates
    below RELATIVE_FLOOR of the tallest line or dominated within
    PEAK_WINDOW_BINS are discarded.
    """
    mag = np.abs(spectrum.amplitude)
    if not np.any(mag > 0.0):
        return ()
    floor = max(NOISE_FLOOR_FACTOR * float(np.median(mag)),
                RELATIVE_FLOOR * float(mag.max()))
    interior = slice(1, len(mag) - 1)
    is_max = (mag[interior] > mag[:-2]) & (mag[interior] >= mag[2:]) & (mag[interior] > floor)
    candidates = np.nonzero(is_max)[0] + 1
    peaks = []
    for i in candidates:
        lo = max(0, i - PEAK_WINDOW_BINS)
        hi = min(len(mag), i + PEAK_WINDOW_BINS + 1)
        if mag[i] >= mag[lo:hi].max():
            peaks.append(Peak(center_hz=float(spectrum.frequencies_hz[i]),
                              height=float(spectrum.amplitude[i])))
    return tuple(peaks)


def assign_peaks(spectrum: Spectrum, system: SpinSystem, target: int) -> Spectrum:
    """Label each detected peak with the control pattern of its transition.

    Every peak must fall within 2 bins of a theoretical target line; with
    all couplings positive the all-ones pattern sits at the highest
    frequency.  Returns a new Spectrum carrying the labelled peaks, sorted
    by frequency ascending.
    """
    detected = detect_peaks(spectrum)
    n_patterns = 2 ** (system.n - 1)
    theory = {}
    for i in range(n_patterns):
        pattern = format(i, f"0{system.n - 1}b") if system.n > 1 else ""
        theory[pattern] = transition_frequency(system, target, pattern)
    labelled = []
    for peak in detected:
        pattern, nu = min(theory.items(), key=lambda kv: abs(kv[1] - peak.center_hz))
        if abs(nu - peak.center_hz) > 2.0 * spectrum.bin_hz:
            raise ValueError(
                f"peak at {peak.center_hz:g} Hz is more than 2 bins from every "
                f"target-{target} transition"
            )
        labelled.append(replace(peak, control_pattern=pattern))
    labelled.sort(key=lambda p: p.center_hz)
    return replace(spectrum, peaks=tuple(labelled))


def save_spectrum_csv(spectrum: Spectrum, path) -> None:
    """Two-column CSV: frequency_hz, amplitude."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("frequency_hz,amplitude\n")
        for f, a in zip(spectrum.frequencies_hz, spectrum.amplitude):
            fh.write(f"{f:.10g},{a:.10g}\n")


def peaks_to_text(peaks) -> str:
    """Structured text records: center_hz, height, control_pattern."""
    lines = []
    for p in peaks:
        pattern = p.control_pattern if p.control_pattern is not None else "-"
        lines.append(
            f"center_hz={p.center_hz:.6f} height={p.height:.10g} "
            f"control_pattern={pattern}"
        )
    return "\n".join(lines) + "\n"
