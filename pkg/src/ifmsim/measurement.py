"""Ideal detectors at the two output ports and post-selected atomic states."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import NormalizationError, RegisterError
from .optics import PHOTON, SCATTERED, to_photon_basis
from .state import (
    DensityMatrix,
    JointState,
    is_normalized,
    norm,
    normalize,
    project,
    reduced_state,
)

ANALYSIS_BASES = ("none", "circular", "linear")
DETECTORS = (("Du", "u"), ("Dl", "l"))
ABSORBED = "absorbed"
MIN_PROBABILITY = 1e-12


@dataclass(frozen=True)
class DetectorConfig:
    analysis_basis: str = "none"

    def __post_init__(self):
        if self.analysis_basis not in ANALYSIS_BASES:
            raise ValueError(
                f"analysis_basis must be one of {ANALYSIS_BASES}, got {self.analysis_basis!r}"
            )


@dataclass(frozen=True)
class Outcome:
    tag: str
    polarization: Optional[str]
    probability: float
    posterior: Optional[DensityMatrix]

    @property
    def key(self):
        return self.tag if self.polarization is None else f"{self.tag},{self.polarization}"


class Budget(NamedTuple):
    absorbed: float
    Du: float
    Dl: float


def _atom_names(s):
    return [n for n in s.register_names if n != PHOTON]


def _posterior(component, atoms, p):
    if p < MIN_PROBABILITY or not atoms:
        return None
    rho = reduced_state(component, atoms)
    return DensityMatrix(rho.registers, rho.matrix / p)


def measure(s, cfg=DetectorConfig()):
    """Outcome distribution of ``s`` for detectors analysing in ``cfg``.

    Order: ``Du`` outcomes, ``Dl`` outcomes, then ``absorbed``.  With
    polarization analysis each detector yields one outcome per polarization
    label (``+``/``-`` or ``x``/``y``).  Posteriors are normalized reduced
    states of every non-photon register; they are ``None`` for outcomes
    below 1e-12 probability or when there is no atom register.
    """
    if isinstance(cfg, str):
        cfg = DetectorConfig(cfg)
    if PHOTON not in s.register_names:
        raise RegisterError(f"state has no {PHOTON!r} register")
    if not is_normalized(s):
        raise NormalizationError(f"measure needs a normalized state, norm is {norm(s)!r}")
    atoms = _atom_names(s)
    if cfg.analysis_basis == "linear":
        s = to_photon_basis(s, "linear")
        pols = ("x", "y")
    else:
        s = to_photon_basis(s, "circular")
        pols = ("+", "-")

    outcomes = []
    for tag, port in DETECTORS:
        if cfg.analysis_basis == "none":
            groups = [(None, [port + p for p in pols])]
        else:
            groups = [(p, [port + p]) for p in pols]
        for pol, labels in groups:
            component = project(s, PHOTON, labels)
            p = norm(component) ** 2
            outcomes.append(Outcome(tag, pol, p, _posterior(component, atoms, p)))
    component = project(s, PHOTON, SCATTERED)
    p = norm(component) ** 2
    outcomes.append(Outcome(ABSORBED, None, p, _posterior(component, atoms, p)))
    return outcomes


def post_select(s, tag, polarization=None):
    """Normalized joint state conditioned on one detector outcome."""
    if tag == ABSORBED:
        return normalize(project(s, PHOTON, SCATTERED))
    port = dict(DETECTORS)[tag]
    if polarization in ("x", "y"):
        s = to_photon_basis(s, "linear")
        labels = [port + polarization]
    else:
        s = to_photon_basis(s, "circular")
        labels = [port + p for p in ("+", "-")] if polarization is None else [port + polarization]
    return normalize(project(s, PHOTON, labels))


def outcome_budget(s):
    """Total probability absorbed and at each detector."""
    totals = {"absorbed": 0.0, "Du": 0.0, "Dl": 0.0}
    for o in measure(s, DetectorConfig("none")):
        totals[o.tag] += o.probability
    return Budget(**totals)


def _target_vector(target, registers):
    if isinstance(target, JointState):
        if target.registers != tuple(registers):
            raise RegisterError(
                f"target registers {target.register_names} do not match posterior "
                f"{tuple(r.name for r in registers)}"
            )
        return target.to_vector() / norm(target)
    vec = np.asarray(target, dtype=complex).reshape(-1)
    if vec.shape[0] != int(np.prod([r.dim for r in registers])):
        raise RegisterError("target vector dimension does not match posterior")
    return vec / np.linalg.norm(vec)


def state_fidelity(rho, target):
    """<target|rho|target> for a pure target (JointState or dense vector)."""
    v = _target_vector(target, rho.registers)
    return float(np.real(v.conj() @ rho.matrix @ v))


def posterior_fidelity(outcome, target):
    if outcome.posterior is None:
        raise ValueError(f"outcome {outcome.key} has no posterior")
    return state_fidelity(outcome.posterior, target)
