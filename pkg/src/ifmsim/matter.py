"""Atom models and polarization-selective absorption.

The excited level is eliminated: a resonant photon in the atom's arm is
mapped in one step to a scattered mode and the atom to ``g``, which is
transparent to everything afterwards.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import BasisError, NormalizationError, RegisterError
from .optics import PHOTON, port_code, scattered_mode
from .state import JointState, Register, apply_map, norm, tensor

ATOM_BASIS = ("m+", "m-", "g")

HALF_ABSORBER = "half_absorber"
TWO_LEVEL = "two_level"
CLASSICAL = "classical_opaque"
SPECTATOR = "spectator"
VARIANTS = (HALF_ABSORBER, TWO_LEVEL, CLASSICAL, SPECTATOR)
ABSORBING = (HALF_ABSORBER, TWO_LEVEL, CLASSICAL)

NORM_ERROR_TOL = 1e-9
NORM_SILENT_TOL = 1e-12


def atom_register(name):
    return Register(name, ATOM_BASIS)


@dataclass(frozen=True)
class AtomModel:
    """One object in (or next to) the interferometer.

    ``register`` is ``None`` for the classical absorber, which has no
    internal state.  ``resonant`` (``"+"`` or ``"-"``) is used only by the
    two-level variant.
    """

    variant: str
    register: Optional[str] = None
    arm: str = "outside"
    resonant: str = "+"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown atom model {self.variant!r}")
        if self.arm not in ("upper", "lower", "outside"):
            raise ValueError(f"unknown arm {self.arm!r}")
        if self.variant == SPECTATOR and self.arm != "outside":
            raise ValueError("spectator atoms must sit outside the interferometer")
        if self.variant != SPECTATOR and self.arm == "outside":
            raise ValueError(f"{self.variant} must be placed in the upper or lower arm")
        if self.variant == CLASSICAL and self.register is not None:
            raise ValueError("classical_opaque has no atom register")
        if self.variant != CLASSICAL and not self.register:
            raise ValueError(f"{self.variant} needs a register name")
        if self.resonant not in ("+", "-"):
            raise ValueError(f"resonant polarization must be '+' or '-', got {self.resonant!r}")


def _transitions(model):
    k = port_code(model.arm)
    if model.variant == HALF_ABSORBER:
        return {
            (k + mu, "m" + mu): {(scattered_mode(model.arm, mu), "g"): 1.0}
            for mu in "+-"
        }
    if model.variant == TWO_LEVEL:
        mu = model.resonant
        return {(k + mu, "m" + mu): {(scattered_mode(model.arm, mu), "g"): 1.0}}
    raise AssertionError(model.variant)


def interact(s, model):
    """Apply the absorption rule of ``model`` to ``s``.

    The map is a partial permutation of basis states, hence an isometry.
    Components on other arms, on scattered modes or with the atom already
    in ``g`` are untouched.
    """
    if model.variant == SPECTATOR:
        s.register(model.register)
        return s
    if PHOTON not in s.register_names:
        raise RegisterError(f"state has no {PHOTON!r} register")
    k = port_code(model.arm)
    if model.variant == CLASSICAL:
        table = {k + mu: {scattered_mode(model.arm, mu): 1.0} for mu in "+-"}
        return apply_map(s, PHOTON, table)
    s.register(model.register)
    return apply_map(s, (PHOTON, model.register), _transitions(model))


def ground_population(s, register):
    p = s.position(register)
    return sum(abs(v) ** 2 for k, v in s.items() if k[p] == "g")


@dataclass(frozen=True)
class AtomInitialState:
    """Initial internal state of the atoms.

    Either ``single`` maps register name -> {label: amplitude} for
    independently prepared atoms, or ``joint`` gives
    ``(register names, {label tuple: amplitude})`` for an entangled
    preparation.  Both may be combined as long as no register appears twice.
    """

    single: Mapping[str, Mapping[str, complex]] = field(default_factory=dict)
    joint: Optional[tuple[Sequence[str], Mapping[tuple[str, ...], complex]]] = None

    def registers(self):
        names = list(self.single)
        if self.joint is not None:
            names += list(self.joint[0])
        return names


def _checked(state, what):
    n = norm(state)
    if abs(n - 1) > NORM_ERROR_TOL:
        raise NormalizationError(f"{what} has norm {n!r}, expected 1")
    if abs(n - 1) > NORM_SILENT_TOL:
        warnings.warn(f"{what} has norm {n!r}; renormalizing", RuntimeWarning, stacklevel=3)
        state = state.scaled(1 / n)
    return state


def prepare_atoms(spec, models):
    """Atomic factor for every model that carries a register, in model order."""
    names = [m.register for m in models if m.register is not None]
    if len(set(names)) != len(names):
        raise RegisterError(f"duplicate atom register in {names}")
    given = spec.registers()
    if len(set(given)) != len(given):
        raise RegisterError(f"atom register initialised twice in {given}")
    if set(given) != set(names):
        raise RegisterError(
            f"initial state covers {sorted(given)} but models declare {sorted(names)}"
        )

    factors = {}
    for name, amps in spec.single.items():
        st = JointState.from_amplitudes([atom_register(name)], {(k,): v for k, v in amps.items()})
        factors[name] = _checked(st, f"initial state of {name}")
    joint_state = None
    if spec.joint is not None:
        jnames, amps = spec.joint
        joint_state = _checked(
            JointState.from_amplitudes([atom_register(n) for n in jnames], amps),
            "joint initial state",
        )

    result = None
    placed = set()
    for name in names:
        if name in placed:
            continue
        if name in factors:
            part = factors[name]
        else:
            part = joint_state
        placed.update(part.register_names)
        result = part if result is None else tensor(result, part)
    if result is not None and list(result.register_names) != names:
        result = reorder(result, names)
    return result


def reorder(s, names):
    """Permute registers of ``s`` into the order ``names``."""
    if sorted(names) != sorted(s.register_names):
        raise BasisError(f"cannot reorder {s.register_names} as {names}")
    perm = [s.position(n) for n in names]
    return JointState.from_amplitudes(
        [s.registers[p] for p in perm],
        {tuple(k[p] for p in perm): v for k, v in s.items()},
    )
