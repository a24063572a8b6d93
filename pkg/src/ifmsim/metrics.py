"""Scalar diagnostics of atomic density matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BasisError
from .measurement import state_fidelity

QUBIT_LABELS = ("m+", "m-")
SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def purity(d):
    """Tr(rho^2)."""
    m = d.matrix
    return float(np.real(np.trace(m @ m)))


def qubit_block(d, tol=1e-12):
    """Restrict every register of ``d`` to the metastable pair ``m+``/``m-``.

    Raises :class:`BasisError` if more than ``tol`` population sits on any
    other level.
    """
    return d.restrict({r.name: QUBIT_LABELS for r in d.registers}, tol=tol)


def l1_coherence(d):
    """Sum of |off-diagonal| entries over the metastable subspace."""
    m = qubit_block(d).matrix
    return float(np.sum(np.abs(m[~np.eye(len(m), dtype=bool)])))


def fidelity(d, target):
    """<psi|rho|psi> for a pure target state."""
    return state_fidelity(d, target)


def concurrence(d):
    """Wootters concurrence of a two-atom density matrix.

    ``d`` must span exactly two registers.  Three-level atom registers are
    accepted as long as they carry no population outside ``m+``/``m-``.
    """
    if len(d.registers) != 2:
        raise BasisError(f"concurrence needs two registers, got {len(d.registers)}")
    if any(r.dim == 3 for r in d.registers):
        d = qubit_block(d)
    rho = d.matrix
    if rho.shape != (4, 4):
        raise BasisError(f"concurrence needs a 4x4 matrix, got {rho.shape}")
    # With rho = X X^dag, the square roots of the eigenvalues of
    # rho (sy x sy) rho* (sy x sy) are the singular values of X^T (sy x sy) X.
    # This avoids square roots of round-off-sized eigenvalues.
    w, u = np.linalg.eigh((rho + rho.conj().T) / 2)
    x = u * np.sqrt(np.clip(w, 0.0, None))
    flip = np.kron(SIGMA_Y, SIGMA_Y)
    lam = np.linalg.svd(x.T @ flip @ x, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class MetricReport:
    purity: float
    l1_coherence: Optional[float]
    fidelity_vs_initial: Optional[float]
    concurrence: Optional[float] = None


def metric_report(d, initial=None):
    """Collect every applicable metric for ``d``.

    Metrics that need the metastable subspace (coherence, concurrence) are
    ``None`` when the state has population on ``g``.
    """
    try:
        coh = l1_coherence(d)
    except BasisError:
        coh = None
    conc = None
    if len(d.registers) == 2:
        try:
            conc = concurrence(d)
        except BasisError:
            conc = None
    fid = fidelity(d, initial) if initial is not None else None
    return MetricReport(purity(d), coh, fid, conc)
