"""Dense reference implementation for cross-checking the sparse pipeline.

Everything here works on flat complex vectors indexed by mixed-radix
integers; no label maps or helpers from :mod:`ifmsim.state` are used for the
physics, so a convention slip has to be made twice to go unnoticed.

Photon index: ``2*port + pol`` for port u=0/l=1 and pol +=0/-=1; scattered
modes follow as S+ = 4, S- = 5 (lower-arm absorber) and Su+ = 6, Su- = 7
(upper-arm absorber).  Atom index: m+ = 0, m- = 1, g = 2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .matter import ATOM_BASIS
from .measurement import DetectorConfig, Outcome
from .optics import PolarizationSpec
from .scenario import AtomSpec, Entangled, PhotonSpec, Scenario, validate
from .state import DensityMatrix, Register

NPH = 8
NAT = 3
PORT = {"upper": 0, "lower": 1}
ATOM_INDEX = {"m+": 0, "m-": 1, "g": 2}
PH_LABELS = ("u+", "u-", "l+", "l-", "S+", "S-", "Su+", "Su-")
AT_LABELS = ("m+", "m-", "g")

_S = 1 / np.sqrt(2)
_BS = np.array([[1j * _S, _S], [_S, 1j * _S]])
# linear analysers written in the circular (+, -) basis
_ANALYSER = {
    "x": np.array([-_S, _S], dtype=complex),
    "y": np.array([1j * _S, 1j * _S]),
}


@dataclass(frozen=True)
class DenseEvolution:
    basis_index: list
    bs1: np.ndarray
    interactions: list
    bs2: np.ndarray
    composed: np.ndarray


def _dims(n_atoms):
    return [NPH] + [NAT] * n_atoms


def _flat(idx, dims):
    return int(np.ravel_multi_index(idx, dims))


def _beam_splitter(dims):
    dim = int(np.prod(dims))
    m = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        idx = list(np.unravel_index(j, dims))
        ph = idx[0]
        if ph >= 4:
            m[j, j] = 1
            continue
        port, pol = divmod(ph, 2)
        for out_port in (0, 1):
            idx[0] = 2 * out_port + pol
            m[_flat(idx, dims), j] += _BS[out_port, port]
    return m


def _interaction(dims, atom_slot, variant, port, resonant):
    """Absorption as an explicit partial-permutation matrix.

    ``atom_slot`` is the position of the atom among the registers (None for
    the classical absorber); ``resonant`` is the set of absorbed
    polarization indices.
    """
    dim = int(np.prod(dims))
    m = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        idx = list(np.unravel_index(j, dims))
        ph = idx[0]
        target = j
        if ph < 4 and ph // 2 == port:
            pol = ph % 2
            scattered = (4 if port == 1 else 6) + pol
            if variant == "classical_opaque":
                idx[0] = scattered
                target = _flat(idx, dims)
            elif pol in resonant and idx[atom_slot] == pol:
                idx[0] = scattered
                idx[atom_slot] = 2
                target = _flat(idx, dims)
        m[target, j] = 1
    return m


def dense_evolution(sc):
    names = sc.atom_registers
    dims = _dims(len(names))
    bs = _beam_splitter(dims)
    inter = []
    for a in sc.atoms:
        if a.model == "spectator":
            continue
        slot = None if a.model == "classical_opaque" else 1 + names.index(a.id)
        if a.model == "two_level":
            resonant = {0} if a.resonant == "sigma+" else {1}
        else:
            resonant = {0, 1}
        inter.append(_interaction(dims, slot, a.model, PORT[a.arm], resonant))
    composed = bs
    for m in inter:
        composed = m @ composed
    composed = bs @ composed
    basis = list(itertools.product(PH_LABELS, *([AT_LABELS] * len(names))))
    return DenseEvolution(basis, bs, inter, bs.copy(), composed)


def _photon_vector(sc):
    pol = sc.photon.polarization
    if pol.kind == "sigma+":
        circ = np.array([1, 0], dtype=complex)
    elif pol.kind == "sigma-":
        circ = np.array([0, 1], dtype=complex)
    elif pol.kind == "custom":
        circ = np.array([pol.plus, pol.minus], dtype=complex)
    else:
        circ = _ANALYSER[pol.kind]
    v = np.zeros(NPH, dtype=complex)
    base = 2 * PORT[sc.photon.port]
    v[base:base + 2] = circ
    return v


def _atom_vector(sc):
    names = sc.atom_registers
    dims = [NAT] * len(names)
    v = np.zeros(int(np.prod(dims)) if names else 1, dtype=complex)
    if not names:
        v[0] = 1
        return v
    parts = []  # (slots, {index tuple: amp})
    for a in sc.atoms:
        if a.initial is not None:
            parts.append(([names.index(a.id)], {(ATOM_INDEX[k],): c for k, c in a.initial.items()}))
    if sc.entangled is not None:
        slots = [names.index(n) for n in sc.entangled.atoms]
        amps = {tuple(ATOM_INDEX[l] for l in k): c for k, c in sc.entangled.amplitudes.items()}
        parts.append((slots, amps))
    for combo in itertools.product(*(p[1].items() for p in parts)):
        idx = [0] * len(names)
        amp = 1 + 0j
        for (slots, _), (key, c) in zip(parts, combo):
            for s, k in zip(slots, key):
                idx[s] = k
            amp *= c
        v[_flat(idx, dims)] += amp
    return v / np.linalg.norm(v)


def oracle_state(sc):
    """Dense output vector reshaped to (photon, atoms) and the atom registers."""
    names = sc.atom_registers
    psi_in = np.kron(_photon_vector(sc), _atom_vector(sc))
    psi = dense_evolution(sc).composed @ psi_in
    return psi.reshape(NPH, -1), names


def _posterior(block, p, regs):
    if p < 1e-12 or not regs:
        return None
    rho = block.T @ block.conj() / p  # sum over traced photon rows of |a><a|
    return DensityMatrix(regs, rho)


def oracle_run(sc):
    """Outcome list in the same order and format as ``measure``."""
    psi, names = oracle_state(sc)
    regs = [Register(n, AT_LABELS) for n in names]
    basis = sc.detector.analysis_basis
    outcomes = []
    for tag, port in (("Du", 0), ("Dl", 1)):
        rows = psi[2 * port:2 * port + 2]
        if basis == "none":
            blocks = [(None, rows)]
        elif basis == "circular":
            blocks = [("+", rows[0:1]), ("-", rows[1:2])]
        else:
            blocks = [(k, (_ANALYSER[k].conj() @ rows)[None, :]) for k in ("x", "y")]
        for pol, block in blocks:
            p = float(np.sum(np.abs(block) ** 2))
            outcomes.append(Outcome(tag, pol, p, _posterior(block, p, regs)))
    block = psi[4:]
    p = float(np.sum(np.abs(block) ** 2))
    outcomes.append(Outcome("absorbed", None, p, _posterior(block, p, regs)))
    return outcomes


def compare(outcomes_a, outcomes_b):
    """Largest discrepancy between two outcome lists (inf on structural
    mismatch)."""
    if [(o.tag, o.polarization) for o in outcomes_a] != [(o.tag, o.polarization) for o in outcomes_b]:
        return float("inf")
    worst = 0.0
    for a, b in zip(outcomes_a, outcomes_b):
        worst = max(worst, abs(a.probability - b.probability))
        if (a.posterior is None) != (b.posterior is None):
            # one side may drop a posterior right at the cutoff
            if max(a.probability, b.probability) > 2e-12:
                return float("inf")
            continue
        if a.posterior is not None:
            if a.posterior.registers != b.posterior.registers:
                return float("inf")
            worst = max(worst, float(np.max(np.abs(a.posterior.matrix - b.posterior.matrix))))
    return worst


def random_scenario(rng):
    """Random scenario over the supported experiment family.

    Random atomic superpositions (including a small |g> component now and
    then), random complex input polarization, random absorber type and arm,
    optionally a second atom that is either a spectator sharing an
    entangled state or an absorber in the other arm.
    """
    def cvec(n):
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        return z / np.linalg.norm(z)

    def single():
        labels = ATOM_BASIS if rng.random() < 0.2 else ATOM_BASIS[:2]
        z = cvec(len(labels))
        return dict(zip(labels, z))

    plus, minus = cvec(2)
    photon = PhotonSpec(str(rng.choice(["upper", "lower"])), PolarizationSpec.custom(plus, minus))
    arm = str(rng.choice(["upper", "lower"]))
    other = "upper" if arm == "lower" else "lower"
    model = str(rng.choice(["half_absorber", "half_absorber", "two_level", "classical_opaque"]))
    resonant = str(rng.choice(["sigma+", "sigma-"]))
    first = AtomSpec("a1", model, arm, resonant if model == "two_level" else "sigma+",
                     None if model == "classical_opaque" else single())
    atoms = [first]
    entangled = None
    extra = rng.integers(0, 3)
    if extra == 1:
        atoms.append(AtomSpec("a2", "half_absorber", other, "sigma+", single()))
    elif extra == 2 and model != "classical_opaque":
        z = cvec(4)
        amps = dict(zip(itertools.product(("m+", "m-"), repeat=2), z))
        atoms = [AtomSpec("a1", model, arm, first.resonant, None), AtomSpec("a2", "spectator")]
        entangled = Entangled(("a1", "a2"), amps)
    basis = str(rng.choice(["none", "circular", "linear"]))
    sc = Scenario(photon, tuple(atoms), DetectorConfig(basis), entangled, name="random")
    validate(sc)
    return sc
