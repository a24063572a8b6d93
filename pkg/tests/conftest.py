import numpy as np
import pytest

from ifmsim.matter import atom_register
from ifmsim.optics import photon_register
from ifmsim.state import JointState

R2 = np.sqrt(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def equal_superposition():
    return JointState.from_amplitudes([atom_register("atom")], {("m+",): R2, ("m-",): R2})


@pytest.fixture
def bell():
    return JointState.from_amplitudes(
        [atom_register("atom1"), atom_register("atom2")],
        {("m-", "m+"): R2, ("m+", "m-"): R2},
    )


def random_photon_atom_state(rng, n_atoms=1, basis="circular", propagating=False):
    """Random normalized photon x atoms state.

    ``propagating=True`` leaves the scattered modes empty, i.e. draws from
    the domain on which absorption is an isometry.
    """
    regs = [photon_register(basis)] + [atom_register(f"a{i}") for i in range(n_atoms)]
    dims = [r.dim for r in regs]
    z = rng.normal(size=dims) + 1j * rng.normal(size=dims)
    if propagating:
        z[4:] = 0
    z /= np.linalg.norm(z)
    amps = {}
    for idx in np.ndindex(*dims):
        amps[tuple(r.basis[i] for r, i in zip(regs, idx))] = z[idx]
    return JointState.from_amplitudes(regs, amps)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
