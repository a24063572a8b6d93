"""Labeled-basis pure states and density matrices.

A :class:`JointState` is a sparse map from label tuples (one label per
register) to complex amplitudes.  The reachable states of the interferometer
have at most a handful of nonzero amplitudes, so keeping symbolic labels is
both cheap and makes the physics readable in tests.
"""
from __future__ import annotations

import contextlib
import contextvars
import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import BasisError, NormalizationError, RegisterError

PRUNE_THRESHOLD = 1e-15
NORM_TOL = 1e-12

_prune = contextvars.ContextVar("ifmsim_prune", default=PRUNE_THRESHOLD)


@contextlib.contextmanager
def pruning(threshold=PRUNE_THRESHOLD):
    """Temporarily change the amplitude pruning threshold.

    ``pruning(0.0)`` disables pruning entirely (exact zeros are still
    dropped).  The setting is context-local, so concurrent runs in other
    threads are unaffected.
    """
    token = _prune.set(threshold)
    try:
        yield
    finally:
        _prune.reset(token)


def prune_threshold():
    return _prune.get()


@dataclass(frozen=True)
class Register:
    """A named tensor factor with an ordered set of basis labels."""

    name: str
    basis: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        if len(set(self.basis)) != len(self.basis):
            raise BasisError(f"register {self.name!r} has duplicate labels")

    @property
    def dim(self):
        return len(self.basis)

    def index(self, label):
        try:
            return self.basis.index(label)
        except ValueError:
            raise BasisError(
                f"label {label!r} not in basis of register {self.name!r}: {self.basis}"
            ) from None


def _clean(amplitudes):
    eps = _prune.get()
    return {k: complex(v) for k, v in amplitudes.items() if v != 0 and abs(v) >= eps}


@dataclass(frozen=True)
class JointState:
    """Pure state of a composite system over labeled registers.

    Build instances through :meth:`from_amplitudes` (or the helpers below),
    which validates labels and prunes negligible amplitudes.
    """

    registers: tuple[Register, ...]
    amplitudes: Mapping[tuple[str, ...], complex] = field(repr=False)

    @classmethod
    def from_amplitudes(cls, registers, amplitudes):
        registers = tuple(registers)
        names = [r.name for r in registers]
        if len(set(names)) != len(names):
            raise RegisterError(f"duplicate register name in {names}")
        amps = {}
        for key, value in amplitudes.items():
            key = (key,) if isinstance(key, str) else tuple(key)
            if len(key) != len(registers):
                raise BasisError(
                    f"label tuple {key} does not have one label per register {names}"
                )
            for reg, label in zip(registers, key):
                reg.index(label)
            amps[key] = amps.get(key, 0) + complex(value)
        return cls(registers, MappingProxyType(_clean(amps)))

    @classmethod
    def basis_state(cls, register, label):
        return cls.from_amplitudes([register], {(label,): 1.0})

    @property
    def register_names(self):
        return tuple(r.name for r in self.registers)

    def register(self, name):
        for r in self.registers:
            if r.name == name:
                return r
        raise RegisterError(f"no register named {name!r}; have {self.register_names}")

    def position(self, name):
        self.register(name)
        return self.register_names.index(name)

    def amplitude(self, *labels):
        return self.amplitudes.get(tuple(labels), 0j)

    def __len__(self):
        return len(self.amplitudes)

    def items(self):
        return self.amplitudes.items()

    def scaled(self, factor):
        return JointState.from_amplitudes(
            self.registers, {k: factor * v for k, v in self.amplitudes.items()}
        )

    def __add__(self, other):
        if self.registers != other.registers:
            raise RegisterError("cannot add states over different registers")
        amps = dict(self.amplitudes)
        for k, v in other.amplitudes.items():
            amps[k] = amps.get(k, 0) + v
        return JointState.from_amplitudes(self.registers, amps)

    def __rmul__(self, factor):
        return self.scaled(factor)

    def to_vector(self):
        """Dense amplitude vector in row-major order over the register bases."""
        vec = np.zeros([r.dim for r in self.registers], dtype=complex)
        for key, value in self.amplitudes.items():
            vec[tuple(r.index(l) for r, l in zip(self.registers, key))] = value
        return vec.reshape(-1)

    def inner(self, other):
        """<self|other>, matching registers by name and basis."""
        if self.registers != other.registers:
            raise RegisterError("inner product needs identical register declarations")
        return sum(
            (np.conj(v) * other.amplitudes.get(k, 0) for k, v in self.amplitudes.items()),
            0j,
        )


def tensor(a, b):
    """Tensor product; labels of ``b`` are appended after those of ``a``."""
    clash = set(a.register_names) & set(b.register_names)
    if clash:
        raise RegisterError(f"duplicate register name(s) {sorted(clash)}")
    amps = {ka + kb: va * vb for ka, va in a.items() for kb, vb in b.items()}
    return JointState.from_amplitudes(a.registers + b.registers, amps)


def norm(s):
    return float(np.sqrt(sum(abs(v) ** 2 for v in s.amplitudes.values())))


def normalize(s):
    n = norm(s)
    if n <= NORM_TOL:
        raise NormalizationError(f"cannot normalize a state of norm {n:.3g}")
    return s.scaled(1.0 / n)


def is_normalized(s, tol=NORM_TOL):
    return abs(norm(s) - 1.0) <= tol


def _as_label_key(label, width):
    if isinstance(label, str):
        label = (label,)
    label = tuple(label)
    if len(label) != width:
        raise BasisError(f"label {label} should have {width} component(s)")
    return label


def apply_map(s, register, matrix, *, basis_in=None, basis_out=None):
    """Apply a linear map acting on one register (or a group of registers).

    ``register`` is a register name or a sequence of names.  ``matrix`` is
    either

    * a 2-D array whose columns are indexed by ``basis_in`` and rows by
      ``basis_out`` (defaults: the current basis of the register; for a
      group of registers, the row-major product of their bases), or
    * a mapping ``{label_in: {label_out: coefficient}}``; labels missing
      from the mapping pass through unchanged.

    When ``basis_out`` differs from the register basis, the register is
    re-declared with ``basis_out`` (rectangular maps, basis changes).  Only
    the single-register case may change the basis.
    """
    names = (register,) if isinstance(register, str) else tuple(register)
    positions = [s.position(n) for n in names]
    regs = [s.registers[p] for p in positions]
    width = len(names)

    if width == 1:
        default = [(l,) for l in regs[0].basis]
    else:
        default = list(itertools.product(*(r.basis for r in regs)))
    b_in = default if basis_in is None else [_as_label_key(l, width) for l in basis_in]
    b_out = b_in if basis_out is None else [_as_label_key(l, width) for l in basis_out]

    if isinstance(matrix, Mapping):
        table = {
            _as_label_key(k, width): {_as_label_key(o, width): complex(c) for o, c in v.items()}
            for k, v in matrix.items()
        }
    else:
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (len(b_out), len(b_in)):
            raise BasisError(
                f"map of shape {m.shape} does not match basis sizes "
                f"({len(b_out)} out, {len(b_in)} in)"
            )
        table = {
            lin: {b_out[i]: m[i, j] for i in range(len(b_out)) if m[i, j] != 0}
            for j, lin in enumerate(b_in)
        }

    new_regs = list(s.registers)
    if basis_out is not None and width == 1:
        new_regs[positions[0]] = Register(names[0], [l[0] for l in b_out])
    elif basis_out is not None and set(b_out) != set(default):
        raise BasisError("multi-register maps must keep the register bases")

    in_set = set(b_in)
    out = {}
    for key, amp in s.items():
        local = tuple(key[p] for p in positions)
        if local not in in_set:
            raise BasisError(f"state component {local} on {names} is outside the map's input basis")
        images = table.get(local, {local: 1.0})
        for image, coeff in images.items():
            new_key = list(key)
            for p, lab in zip(positions, image):
                new_key[p] = lab
            new_key = tuple(new_key)
            out[new_key] = out.get(new_key, 0) + coeff * amp
    return JointState.from_amplitudes(new_regs, out)


def project(s, register, labels):
    """Keep only the components whose ``register`` label is in ``labels``."""
    p = s.position(register)
    keep = set(labels)
    for lab in keep:
        s.registers[p].index(lab)
    return JointState.from_amplitudes(
        s.registers, {k: v for k, v in s.items() if k[p] in keep}
    )


@dataclass(frozen=True)
class DensityMatrix:
    """Density operator over the product basis of ``registers``.

    Rows and columns follow :attr:`basis`, the row-major product of the
    register bases.
    """

    registers: tuple[Register, ...]
    matrix: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = int(np.prod([r.dim for r in self.registers]))
        if m.shape != (dim, dim):
            raise BasisError(f"matrix shape {m.shape} does not match basis dimension {dim}")
        m.flags.writeable = False
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "matrix", m)

    @property
    def register_names(self):
        return tuple(r.name for r in self.registers)

    @property
    def basis(self):
        return list(itertools.product(*(r.basis for r in self.registers)))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def trace(self):
        return float(np.trace(self.matrix).real)

    def normalized(self):
        t = self.trace()
        if t <= NORM_TOL:
            raise NormalizationError(f"cannot normalize a density matrix of trace {t:.3g}")
        return DensityMatrix(self.registers, self.matrix / t)

    def element(self, row, col):
        basis = self.basis
        return self.matrix[basis.index(tuple(row)), basis.index(tuple(col))]

    def population(self, labels):
        """Total diagonal weight on basis tuples whose label for any register
        is in ``labels``."""
        labels = set(labels)
        return float(
            sum(self.matrix[i, i].real for i, key in enumerate(self.basis) if labels & set(key))
        )

    def restrict(self, labels_per_register, tol=NORM_TOL):
        """Drop basis labels, e.g. ``{"atom": ["m+", "m-"]}``.

        Raises if the discarded part carries more than ``tol`` weight.
        """
        regs = []
        for r in self.registers:
            keep = labels_per_register.get(r.name, r.basis)
            for lab in keep:
                r.index(lab)
            regs.append(Register(r.name, [l for l in r.basis if l in keep]))
        basis = self.basis
        idx = [basis.index(k) for k in itertools.product(*(r.basis for r in regs))]
        dropped = sum(
            self.matrix[i, i].real for i in range(len(basis)) if i not in set(idx)
        )
        if dropped > tol:
            raise BasisError(f"restriction discards population {dropped:.3g}")
        return DensityMatrix(regs, self.matrix[np.ix_(idx, idx)])

    def allclose(self, other, atol=1e-12):
        return self.registers == other.registers and np.allclose(
            self.matrix, other.matrix, rtol=0, atol=atol
        )

    @classmethod
    def from_pure(cls, s):
        v = s.to_vector()
        return cls(s.registers, np.outer(v, v.conj()))


def to_density(s):
    return DensityMatrix.from_pure(s)


def partial_trace(d, keep):
    """Trace out every register of ``d`` not named in ``keep``.

    ``keep`` order is ignored; the retained registers stay in their original
    order.
    """
    keep = [keep] if isinstance(keep, str) else list(keep)
    if not keep:
        raise RegisterError("partial_trace needs at least one register to keep")
    for name in keep:
        if name not in d.register_names:
            raise RegisterError(f"no register named {name!r}; have {d.register_names}")
    kept_pos = [i for i, n in enumerate(d.register_names) if n in keep]
    kept_regs = [d.registers[i] for i in kept_pos]
    kept_basis = list(itertools.product(*(r.basis for r in kept_regs)))
    kept_index = {k: i for i, k in enumerate(kept_basis)}

    # Group full-basis indices by (kept labels, traced labels).
    groups = {}
    for i, key in enumerate(d.basis):
        kept = tuple(key[p] for p in kept_pos)
        traced = tuple(l for p, l in enumerate(key) if p not in kept_pos)
        groups.setdefault(traced, []).append((kept_index[kept], i))

    out = np.zeros((len(kept_basis), len(kept_basis)), dtype=complex)
    for members in groups.values():
        for a, i in members:
            for b, j in members:
                out[a, b] += d.matrix[i, j]
    return DensityMatrix(kept_regs, out)


def reduced_state(s, keep):
    """Unnormalized reduced density matrix of a (possibly unnormalized) pure
    state, computed directly from the sparse amplitudes."""
    keep = [keep] if isinstance(keep, str) else list(keep)
    if not keep:
        raise RegisterError("reduced_state needs at least one register to keep")
    kept_pos = [s.position(n) for n in s.register_names if n in keep]
    if len(kept_pos) != len(set(keep)):
        missing = set(keep) - set(s.register_names)
        raise RegisterError(f"no register(s) named {sorted(missing)}")
    kept_regs = [s.registers[p] for p in kept_pos]
    index = {
        k: i for i, k in enumerate(itertools.product(*(r.basis for r in kept_regs)))
    }
    by_env = {}
    for key, amp in s.items():
        env = tuple(l for p, l in enumerate(key) if p not in kept_pos)
        by_env.setdefault(env, []).append((index[tuple(key[p] for p in kept_pos)], amp))
    out = np.zeros((len(index), len(index)), dtype=complex)
    for members in by_env.values():
        for a, x in members:
            for b, y in members:
                out[a, b] += x * np.conj(y)
    return DensityMatrix(kept_regs, out)


def check_density(d, tol_herm=1e-12, tol_trace=1e-12, tol_eig=1e-10):
    """Return a list of violated density-matrix invariants (empty if valid)."""
    problems = []
    m = d.matrix
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol_herm:
        problems.append("not Hermitian")
    if abs(np.trace(m).real - 1.0) > tol_trace:
        problems.append(f"trace {np.trace(m).real!r} != 1")
    if m.size and np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -tol_eig:
        problems.append("negative eigenvalue")
    return problems


def fidelity_overlap(a, b):
    """Phase-insensitive overlap |<a|b>| of two states after normalization."""
    return abs(normalize(a).inner(normalize(b)))


__all__ = [
    "PRUNE_THRESHOLD",
    "Register",
    "JointState",
    "DensityMatrix",
    "tensor",
    "apply_map",
    "project",
    "norm",
    "normalize",
    "is_normalized",
    "to_density",
    "partial_trace",
    "reduced_state",
    "check_density",
    "fidelity_overlap",
    "pruning",
]
