"""Photon modes, the 50/50 beam splitter and polarization basis changes.

Polarization convention (spherical basis)::

    a+ = -(ax + i ay)/sqrt(2)        ax = (a- - a+)/sqrt(2)
    a- =  (ax - i ay)/sqrt(2)        ay = i (a- + a+)/sqrt(2)

Photon labels are ``<port><pol>``: ``u+``, ``l-``, ``lx``, ... plus the
scattered modes that result from absorption: ``S+`` / ``S-`` for the σ+ / σ-
transition of an absorber in the lower arm and ``Su+`` / ``Su-`` for one in
the upper arm.  Scattered modes are never touched by optical elements.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisError
from .state import JointState, Register, apply_map

PHOTON = "photon"
PORTS = ("u", "l")
SCATTERED = ("S+", "S-", "Su+", "Su-")
CIRCULAR_BASIS = ("u+", "u-", "l+", "l-") + SCATTERED
LINEAR_BASIS = ("ux", "uy", "lx", "ly") + SCATTERED

_R2 = np.sqrt(0.5)

# Beam-splitter action on the (upper, lower) amplitude pair of one polarization.
BS_MATRIX = _R2 * np.array([[1j, 1.0], [1.0, 1j]])

# Columns: circular components (+, -); rows: linear components (x, y).
CIRC_TO_LIN = _R2 * np.array([[-1.0, 1.0], [-1j, -1j]])

_PORT_NAMES = {"upper": "u", "lower": "l", "u": "u", "l": "l"}
_POL_ALIASES = {
    "sigma+": "+", "sigma-": "-", "+": "+", "-": "-",
    "σ+": "+", "σ-": "-", "σ−": "-", "x": "x", "y": "y",
}


def scattered_mode(arm, pol):
    """Label of the photon scattered by an absorber in ``arm`` on the σ``pol``
    transition."""
    return ("S" if port_code(arm) == "l" else "Su") + pol


def photon_register(basis="circular"):
    return Register(PHOTON, CIRCULAR_BASIS if basis == "circular" else LINEAR_BASIS)


def port_code(port):
    try:
        return _PORT_NAMES[port]
    except KeyError:
        raise BasisError(f"unknown port {port!r}; expected 'upper' or 'lower'") from None


@dataclass(frozen=True)
class PolarizationSpec:
    """Input polarization.

    ``kind`` is ``sigma+``, ``sigma-``, ``x``, ``y`` or ``custom``; for
    ``custom`` the photon is ``plus*|σ+> + minus*|σ->`` (normalized by the
    caller).
    """

    kind: str
    plus: complex = 0j
    minus: complex = 0j

    def __post_init__(self):
        if self.kind != "custom":
            try:
                code = _POL_ALIASES[self.kind]
            except KeyError:
                raise BasisError(f"unknown polarization {self.kind!r}") from None
            object.__setattr__(self, "kind", {"+": "sigma+", "-": "sigma-"}.get(code, code))

    @classmethod
    def custom(cls, plus, minus):
        return cls("custom", complex(plus), complex(minus))

    def circular_components(self):
        """(amplitude on σ+, amplitude on σ-)."""
        if self.kind == "sigma+":
            return 1 + 0j, 0j
        if self.kind == "sigma-":
            return 0j, 1 + 0j
        if self.kind == "custom":
            return self.plus, self.minus
        # invert CIRC_TO_LIN (unitary) for a pure linear state
        lin = np.array([1, 0] if self.kind == "x" else [0, 1], dtype=complex)
        plus, minus = CIRC_TO_LIN.conj().T @ lin
        return complex(plus), complex(minus)


def photon_input(port, pol):
    """Single photon entering ``port`` with polarization ``pol``, written in
    the circular basis."""
    if not isinstance(pol, PolarizationSpec):
        pol = PolarizationSpec(pol)
    p = port_code(port)
    plus, minus = pol.circular_components()
    return JointState.from_amplitudes(
        [photon_register()], {(p + "+",): plus, (p + "-",): minus}
    )


def _photon_basis_kind(s):
    basis = s.register(PHOTON).basis
    if basis == CIRCULAR_BASIS:
        return "circular"
    if basis == LINEAR_BASIS:
        return "linear"
    raise BasisError(f"unrecognised photon basis {basis}")


def beam_splitter(s):
    """50/50 beam splitter, identical for every polarization; works in
    either polarization basis."""
    pols = ("+", "-") if _photon_basis_kind(s) == "circular" else ("x", "y")
    table = {}
    for pol in pols:
        u, l = "u" + pol, "l" + pol
        table[u] = {u: BS_MATRIX[0, 0], l: BS_MATRIX[1, 0]}
        table[l] = {u: BS_MATRIX[0, 1], l: BS_MATRIX[1, 1]}
    return apply_map(s, PHOTON, table)


def basis_change_matrix():
    """Map from the circular photon basis to the linear one."""
    m = np.eye(len(CIRCULAR_BASIS), dtype=complex)
    for k, port in enumerate(PORTS):
        block = slice(2 * k, 2 * k + 2)
        m[block, block] = CIRC_TO_LIN
    return m


def circular_to_linear(s):
    if _photon_basis_kind(s) != "circular":
        raise BasisError("photon register is not in the circular basis")
    return apply_map(
        s, PHOTON, basis_change_matrix(), basis_in=CIRCULAR_BASIS, basis_out=LINEAR_BASIS
    )


def linear_to_circular(s):
    if _photon_basis_kind(s) != "linear":
        raise BasisError("photon register is not in the linear basis")
    return apply_map(
        s, PHOTON, basis_change_matrix().conj().T,
        basis_in=LINEAR_BASIS, basis_out=CIRCULAR_BASIS,
    )


def to_photon_basis(s, kind):
    """Return ``s`` with the photon register expressed in ``kind`` basis."""
    current = _photon_basis_kind(s)
    if current == kind:
        return s
    return circular_to_linear(s) if kind == "linear" else linear_to_circular(s)
