"""Built-in spin systems and loading of system description files.

Two registers ship with the package:

* ``chlorostyrene3``: the three ring/vinyl protons of 2-chlorostyrene,
  offsets referenced to spin 3 (nu3 = 0, nu3 - nu2 = 471.8 Hz,
  nu3 - nu1 = 700.3 Hz) with J12 = 0.65, J13 = 10.9, J23 = 17.6 Hz.
* ``alanine4``: the 13C3-labelled alanine backbone with the methyl protons
  decoupled.  The Calpha carbon is spin 4 (the gate target, referenced to
  0 Hz); spins 1..3 are the alpha proton and the two remaining carbons with
  couplings to the target J14 = 144.89 Hz (H-Calpha), J24 = 53.92 Hz
  (C'-Calpha) and J34 = 34.42 Hz (Cbeta-Calpha).

Only offset differences are physical here; each preset references the pulse
target at 0 Hz so that transition frequencies and drive carriers coincide.
Couplings not resolved in the source data are set to zero; they do not move
any target-spin line.

A system file is a small YAML mapping with keys ``n``, ``offsets_hz`` and
``couplings_hz``.
"""

from __future__ import annotations

import numpy as np
import yaml

from .spin_system import SpinSystem, build_system

__all__ = ["PRESET_NAMES", "preset_system", "describe_presets", "load_system_file"]


def _chlorostyrene3() -> SpinSystem:
    couplings = np.zeros((3, 3))
    couplings[0, 1] = couplings[1, 0] = 0.65
    couplings[0, 2] = couplings[2, 0] = 10.9
    couplings[1, 2] = couplings[2, 1] = 17.6
    return build_system([-700.3, -471.8, 0.0], couplings)


def _alanine4() -> SpinSystem:
    couplings = np.zeros((4, 4))
    couplings[0, 3] = couplings[3, 0] = 144.89
    couplings[1, 3] = couplings[3, 1] = 53.92
    couplings[2, 3] = couplings[3, 2] = 34.42
    return build_system([-6000.0, -4000.0, -2000.0, 0.0], couplings)


_PRESETS = {
    "chlorostyrene3": _chlorostyrene3,
    "alanine4": _alanine4,
}

PRESET_NAMES = tuple(sorted(_PRESETS))

_DESCRIPTIONS = {
    "chlorostyrene3": (
        "chlorostyrene3: 3 coupled 1H spins of 2-chlorostyrene\n"
        "  offsets_hz = -700.3, -471.8, 0.0 (referenced to spin 3)\n"
        "  J12=0.65 Hz, J13=10.9 Hz, J23=17.6 Hz"
    ),
    "alanine4": (
        "alanine4: 13C3-labelled alanine backbone (methyl protons decoupled),"
        " target = spin 4 (Calpha)\n"
        "  offsets_hz = -6000.0, -4000.0, -2000.0, 0.0"
        " (referenced to spin 4)\n"
        "  J14=144.89 Hz (H-Calpha), J24=53.92 Hz (C'-Calpha),"
        " J34=34.42 Hz (Cbeta-Calpha)"
    ),
}


def preset_system(name: str) -> SpinSystem:
    """Return one of the embedded registers by name."""
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        ) from None
    return factory()


def describe_presets() -> str:
    """Human-readable list of every preset and its parameters."""
    return "\n".join(_DESCRIPTIONS[name] for name in PRESET_NAMES)


def load_system_file(path) -> SpinSystem:
    """Read a YAML system description (keys n, offsets_hz, couplings_hz)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping at the top level")
    for key in ("n", "offsets_hz", "couplings_hz"):
        if key not in data:
            raise ValueError(f"{path}: missing key {key!r}")
    offsets = data["offsets_hz"]
    if int(data["n"]) != len(offsets):
        raise ValueError(f"{path}: n={data['n']} does not match offsets_hz length")
    return build_system(offsets, data["couplings_hz"])
