"""Declarative experiments: schema, validation, pipeline and reports.

A scenario file is YAML (JSON is accepted too, being a subset).  See the
README for the full schema; in short::

    name: sigma_plus
    photon: {port: lower, polarization: sigma+}
    atoms:
      - {id: atom, model: half_absorber, arm: lower,
         initial: {m+: 0.7071067811865476, m-: 0.7071067811865476}}
    detector: {analysis: circular}

Complex amplitudes are written either as a plain number or as ``[re, im]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import yaml

from . import matter
from .errors import ConfigSyntaxError, ValidationError
from .matter import AtomInitialState, AtomModel, ground_population, interact, prepare_atoms
from .measurement import ANALYSIS_BASES, DetectorConfig, measure, outcome_budget
from .metrics import metric_report
from .optics import PolarizationSpec, beam_splitter, photon_input
from .state import JointState, Register, tensor

CONVENTION = (
    "beam splitter |u> -> (i|u> + |l>)/sqrt2, |l> -> (|u> + i|l>)/sqrt2; "
    "x = (sigma- - sigma+)/sqrt2, y = i(sigma- + sigma+)/sqrt2; "
    "S+/S- (Su+/Su-) are photons scattered on the sigma+/sigma- transitions "
    "by a lower-arm (upper-arm) absorber"
)

PORTS = ("upper", "lower")
POLARIZATIONS = ("sigma+", "sigma-", "x", "y")
NORM_TOL = 1e-9


@dataclass(frozen=True)
class PhotonSpec:
    port: str = "lower"
    polarization: PolarizationSpec = PolarizationSpec("sigma+")


@dataclass(frozen=True)
class AtomSpec:
    id: str
    model: str
    arm: str = "outside"
    resonant: str = "sigma+"
    initial: Optional[dict] = None

    def to_model(self):
        register = None if self.model == matter.CLASSICAL else self.id
        return AtomModel(self.model, register, self.arm, self.resonant[-1])


@dataclass(frozen=True)
class Entangled:
    atoms: tuple
    amplitudes: dict


@dataclass(frozen=True)
class Scenario:
    photon: PhotonSpec
    atoms: tuple = ()
    detector: DetectorConfig = DetectorConfig()
    entangled: Optional[Entangled] = None
    targets: dict = field(default_factory=dict)
    name: str = "scenario"
    description: str = ""

    @property
    def atom_registers(self):
        return [a.id for a in self.atoms if a.model != matter.CLASSICAL]

    def models(self):
        return [a.to_model() for a in self.atoms]

    def to_dict(self):
        """Plain-data echo; ``parse_scenario`` of its JSON/YAML dump gives
        back an equal scenario."""
        pol = self.photon.polarization
        if pol.kind == "custom":
            pol_out = {"sigma+": _enc(pol.plus), "sigma-": _enc(pol.minus)}
        else:
            pol_out = pol.kind
        atoms = []
        for a in self.atoms:
            entry = {"id": a.id, "model": a.model, "arm": a.arm}
            if a.model == matter.TWO_LEVEL:
                entry["resonant"] = a.resonant
            if a.initial is not None:
                entry["initial"] = {k: _enc(v) for k, v in a.initial.items()}
            atoms.append(entry)
        out = {
            "name": self.name,
            "description": self.description,
            "photon": {"port": self.photon.port, "polarization": pol_out},
            "atoms": atoms,
            "detector": {"analysis": self.detector.analysis_basis},
        }
        if self.entangled is not None:
            out["entangled"] = {
                "atoms": list(self.entangled.atoms),
                "amplitudes": {",".join(k): _enc(v) for k, v in self.entangled.amplitudes.items()},
            }
        if self.targets:
            out["targets"] = {
                name: {",".join(k): _enc(v) for k, v in amps.items()}
                for name, amps in self.targets.items()
            }
        return out


def _enc(z):
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- parsing

_TOP_FIELDS = {"name", "description", "photon", "atoms", "detector", "entangled", "targets"}
_ATOM_FIELDS = {"id", "model", "arm", "resonant", "initial"}


def _check_fields(data, allowed, path):
    if not isinstance(data, dict):
        raise ValidationError(path, f"expected a mapping, got {type(data).__name__}")
    for key in data:
        if key not in allowed:
            raise ValidationError(f"{path}.{key}" if path else str(key), "unknown field")


def _amplitude(value, path):
    if isinstance(value, bool):
        raise ValidationError(path, "amplitude must be a number or [re, im]")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ValidationError(path, "amplitude must be a number or [re, im]")


def _amplitude_map(data, path, width):
    if not isinstance(data, dict) or not data:
        raise ValidationError(path, "expected a nonempty mapping of labels to amplitudes")
    out = {}
    for key, value in data.items():
        labels = tuple(s.strip() for s in str(key).split(","))
        if len(labels) != width:
            raise ValidationError(f"{path}.{key}", f"expected {width} comma-separated label(s)")
        for lab in labels:
            if lab not in matter.ATOM_BASIS:
                raise ValidationError(f"{path}.{key}", f"unknown atomic label {lab!r}")
        out[labels] = _amplitude(value, f"{path}.{key}")
    return out


def _norm_check(amps, path):
    n = math.sqrt(sum(abs(v) ** 2 for v in amps.values()))
    if abs(n - 1) > NORM_TOL:
        raise ValidationError(path, f"amplitudes have norm {n:.12g}, expected 1")


def _polarization(value, path):
    if isinstance(value, str):
        if value not in POLARIZATIONS:
            raise ValidationError(path, f"unknown polarization {value!r}; expected one of {POLARIZATIONS}")
        return PolarizationSpec(value)
    if isinstance(value, dict):
        _check_fields(value, {"sigma+", "sigma-"}, path)
        plus = _amplitude(value.get("sigma+", 0), f"{path}.sigma+")
        minus = _amplitude(value.get("sigma-", 0), f"{path}.sigma-")
        _norm_check({0: plus, 1: minus}, path)
        return PolarizationSpec.custom(plus, minus)
    raise ValidationError(path, "polarization must be a name or a {sigma+, sigma-} mapping")


def scenario_from_dict(data):
    """Build and validate a :class:`Scenario` from plain data."""
    _check_fields(data, _TOP_FIELDS, "")
    photon = data.get("photon")
    if photon is None:
        raise ValidationError("photon", "missing required field")
    _check_fields(photon, {"port", "polarization"}, "photon")
    port = photon.get("port", "lower")
    if port not in PORTS:
        raise ValidationError("photon.port", f"expected one of {PORTS}, got {port!r}")
    if "polarization" not in photon:
        raise ValidationError("photon.polarization", "missing required field")
    pol = _polarization(photon["polarization"], "photon.polarization")

    raw_atoms = data.get("atoms", []) or []
    if not isinstance(raw_atoms, list):
        raise ValidationError("atoms", "expected a list")
    atoms = []
    for i, entry in enumerate(raw_atoms):
        path = f"atoms[{i}]"
        _check_fields(entry, _ATOM_FIELDS, path)
        for req in ("id", "model"):
            if req not in entry:
                raise ValidationError(f"{path}.{req}", "missing required field")
        model = entry["model"]
        if model not in matter.VARIANTS:
            raise ValidationError(f"{path}.model", f"expected one of {matter.VARIANTS}, got {model!r}")
        default_arm = "outside" if model == matter.SPECTATOR else None
        arm = entry.get("arm", default_arm)
        if arm is None:
            raise ValidationError(f"{path}.arm", "absorbing atoms need an arm (upper or lower)")
        if model == matter.SPECTATOR and arm != "outside":
            raise ValidationError(f"{path}.arm", "spectator atoms sit outside the interferometer")
        if model != matter.SPECTATOR and arm not in PORTS:
            raise ValidationError(f"{path}.arm", f"expected one of {PORTS}, got {arm!r}")
        resonant = entry.get("resonant", "sigma+")
        if "resonant" in entry and model != matter.TWO_LEVEL:
            raise ValidationError(f"{path}.resonant", "only two_level atoms take a resonant polarization")
        if resonant not in ("sigma+", "sigma-"):
            raise ValidationError(f"{path}.resonant", f"expected sigma+ or sigma-, got {resonant!r}")
        initial = None
        if "initial" in entry:
            if model == matter.CLASSICAL:
                raise ValidationError(f"{path}.initial", "classical_opaque has no internal state")
            initial = {k[0]: v for k, v in _amplitude_map(entry["initial"], f"{path}.initial", 1).items()}
            _norm_check(initial, f"{path}.initial")
        atoms.append(AtomSpec(str(entry["id"]), model, arm, resonant, initial))

    entangled = None
    if data.get("entangled") is not None:
        ent = data["entangled"]
        _check_fields(ent, {"atoms", "amplitudes"}, "entangled")
        names = ent.get("atoms")
        if not isinstance(names, list) or not names:
            raise ValidationError("entangled.atoms", "expected a nonempty list of atom ids")
        amps = _amplitude_map(ent.get("amplitudes"), "entangled.amplitudes", len(names))
        _norm_check(amps, "entangled.amplitudes")
        entangled = Entangled(tuple(str(n) for n in names), amps)

    targets = {}
    raw_targets = data.get("targets") or {}
    if not isinstance(raw_targets, dict):
        raise ValidationError("targets", "expected a mapping of name to amplitudes")
    width = len([a for a in atoms if a.model != matter.CLASSICAL])
    for name, amps in raw_targets.items():
        t = _amplitude_map(amps, f"targets.{name}", width)
        _norm_check(t, f"targets.{name}")
        targets[str(name)] = t

    detector = data.get("detector", {}) or {}
    _check_fields(detector, {"analysis"}, "detector")
    analysis = detector.get("analysis", "none")
    if analysis not in ANALYSIS_BASES:
        raise ValidationError("detector.analysis", f"expected one of {ANALYSIS_BASES}, got {analysis!r}")

    sc = Scenario(
        photon=PhotonSpec(port, pol),
        atoms=tuple(atoms),
        detector=DetectorConfig(analysis),
        entangled=entangled,
        targets=targets,
        name=str(data.get("name", "scenario")),
        description=str(data.get("description", "") or ""),
    )
    validate(sc)
    return sc


def validate(sc):
    """Check the cross-field invariants of a scenario; raise ValidationError."""
    ids = [a.id for a in sc.atoms]
    for i, a in enumerate(sc.atoms):
        if ids.index(a.id) != i:
            raise ValidationError(f"atoms[{i}].id", f"duplicate atom id {a.id!r}")
        try:
            a.to_model()
        except ValueError as exc:
            raise ValidationError(f"atoms[{i}]", str(exc)) from None
    for arm in PORTS:
        absorbers = [i for i, a in enumerate(sc.atoms) if a.arm == arm and a.model in matter.ABSORBING]
        if len(absorbers) > 1:
            raise ValidationError(
                f"atoms[{absorbers[1]}].arm", f"at most one absorbing atom per arm ({arm} already taken)"
            )
    joint = set(sc.entangled.atoms) if sc.entangled else set()
    if sc.entangled is not None:
        if len(joint) != len(sc.entangled.atoms):
            raise ValidationError("entangled.atoms", "atom listed twice")
        for name in sc.entangled.atoms:
            if name not in ids:
                raise ValidationError("entangled.atoms", f"unknown atom id {name!r}")
            atom = sc.atoms[ids.index(name)]
            if atom.model == matter.CLASSICAL:
                raise ValidationError("entangled.atoms", f"{name!r} is classical and has no state")
    for i, a in enumerate(sc.atoms):
        if a.model == matter.CLASSICAL:
            continue
        if a.id in joint and a.initial is not None:
            raise ValidationError(f"atoms[{i}].initial", "atom is already part of the entangled state")
        if a.id not in joint and a.initial is None:
            raise ValidationError(f"atoms[{i}].initial", "missing initial state")


def parse_scenario(text):
    """Parse YAML (or JSON) scenario text into a validated Scenario."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ConfigSyntaxError(str(exc.problem or exc), line, col) from None
    except yaml.YAMLError as exc:
        raise ConfigSyntaxError(str(exc)) from None
    if not isinstance(data, dict):
        raise ValidationError("", "scenario must be a mapping at top level")
    return scenario_from_dict(data)


def load_scenario(path):
    with open(path, "rb") as fh:
        return parse_scenario(fh.read())


def canned_names():
    files = resources.files("ifmsim").joinpath("scenarios").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".yaml"))


def canned(name):
    """Load one of the bundled scenarios (see :func:`canned_names`)."""
    if name not in canned_names():
        raise KeyError(f"no canned scenario {name!r}; have {canned_names()}")
    return parse_scenario(
        resources.files("ifmsim").joinpath("scenarios", f"{name}.yaml").read_bytes()
    )


# ---------------------------------------------------------------- pipeline


def initial_atoms(sc):
    """Atomic factor of the input state, or None without atom registers."""
    spec = AtomInitialState(
        single={a.id: a.initial for a in sc.atoms if a.initial is not None},
        joint=(sc.entangled.atoms, sc.entangled.amplitudes) if sc.entangled else None,
    )
    models = sc.models()
    if not any(m.register for m in models):
        return None
    return prepare_atoms(spec, models)


def input_state(sc):
    photon = photon_input(sc.photon.port, sc.photon.polarization)
    atoms = initial_atoms(sc)
    return photon if atoms is None else tensor(photon, atoms)


def evolve(sc, state=None):
    """Input state (or ``state``) through BS1, the absorbers and BS2."""
    s = input_state(sc) if state is None else state
    s = beam_splitter(s)
    for model in sc.models():
        s = interact(s, model)
    return beam_splitter(s)


def target_state(sc, amplitudes):
    regs = [Register(n, matter.ATOM_BASIS) for n in sc.atom_registers]
    return JointState.from_amplitudes(regs, amplitudes)


@dataclass(frozen=True)
class OutcomeRow:
    tag: str
    polarization: Optional[str]
    probability: float
    posterior: object
    metrics: object
    target_fidelity: dict


@dataclass(frozen=True)
class Report:
    scenario: Scenario
    rows: tuple
    budget: object
    warnings: tuple = ()
    convention: str = CONVENTION

    def row(self, tag, polarization=None):
        for r in self.rows:
            if r.tag == tag and r.polarization == polarization:
                return r
        raise KeyError((tag, polarization))

    def probabilities(self):
        return {(r.tag, r.polarization): r.probability for r in self.rows}


def run(sc):
    """Full pipeline: evolve, measure, and attach metrics to every outcome."""
    validate(sc)
    notes = []
    init = initial_atoms(sc)
    if init is not None:
        for name in init.register_names:
            pg = ground_population(init, name)
            if pg > 0:
                notes.append(f"atom {name!r} starts with population {pg:.6g} on g (transparent)")
    out = evolve(sc)
    targets = {name: target_state(sc, amps) for name, amps in sc.targets.items()}
    rows = []
    for o in measure(out, sc.detector):
        metrics = None
        fids = {}
        if o.posterior is not None:
            metrics = metric_report(o.posterior, init)
            fids = {name: metric_report(o.posterior, t).fidelity_vs_initial for name, t in targets.items()}
        rows.append(OutcomeRow(o.tag, o.polarization, o.probability, o.posterior, metrics, fids))
    return Report(sc, tuple(rows), outcome_budget(out), tuple(notes))


# ---------------------------------------------------------------- rendering


def _matrix_dict(d):
    return {
        "registers": [r.name for r in d.registers],
        "basis": [",".join(k) for k in d.basis],
        "matrix": [[_enc(z) for z in row] for row in d.matrix],
    }


def report_to_dict(r):
    rows = []
    for row in r.rows:
        m = row.metrics
        rows.append({
            "tag": row.tag,
            "polarization": row.polarization,
            "probability": row.probability,
            "posterior": None if row.posterior is None else _matrix_dict(row.posterior),
            "metrics": None if m is None else {
                "purity": m.purity,
                "l1_coherence": m.l1_coherence,
                "fidelity_vs_initial": m.fidelity_vs_initial,
                "concurrence": m.concurrence,
            },
            "target_fidelity": dict(row.target_fidelity),
        })
    return {
        "scenario": r.scenario.to_dict(),
        "convention": r.convention,
        "budget": r.budget._asdict(),
        "outcomes": rows,
        "warnings": list(r.warnings),
    }


def _fmt(x, width=10):
    return f"{'-':>{width}}" if x is None else f"{x:>{width}.6f}"


def render_table(r):
    sc = r.scenario
    lines = [
        f"scenario: {sc.name}",
        f"photon:   {sc.photon.port} port, {sc.photon.polarization.kind}",
        f"atoms:    " + (", ".join(f"{a.id} ({a.model}, {a.arm})" for a in sc.atoms) or "none"),
        f"analysis: {sc.detector.analysis_basis}",
        "",
    ]
    tnames = list(sc.targets)
    head = f"{'outcome':<12}{'probability':>14}{'purity':>10}{'l1 coh':>10}{'F(init)':>10}{'concur.':>10}"
    head += "".join(f"{('F(' + t + ')')[:10]:>10}" for t in tnames)
    lines += [head, "-" * len(head)]
    for row in r.rows:
        key = row.tag if row.polarization is None else f"{row.tag},{row.polarization}"
        m = row.metrics
        line = f"{key:<12}{row.probability:>14.10f}"
        if m is None:
            line += _fmt(None) * 4
        else:
            line += _fmt(m.purity) + _fmt(m.l1_coherence) + _fmt(m.fidelity_vs_initial) + _fmt(m.concurrence)
        line += "".join(_fmt(row.target_fidelity.get(t)) for t in tnames)
        lines.append(line)
    b = r.budget
    lines += [
        "",
        f"budget: absorbed {b.absorbed:.10f}   Du {b.Du:.10f}   Dl {b.Dl:.10f}",
    ]
    for row in r.rows:
        if row.posterior is None:
            continue
        key = row.tag if row.polarization is None else f"{row.tag},{row.polarization}"
        lines.append("")
        lines.append(f"posterior [{key}] over {','.join(row.posterior.register_names)}:")
        labels = [",".join(k) for k in row.posterior.basis]
        lines.append(" " * 8 + "".join(f"{l:>18}" for l in labels))
        for lab, mrow in zip(labels, row.posterior.matrix):
            lines.append(f"{lab:>8}" + "".join(f"{z.real:>9.5f}{z.imag:>+8.5f}j" for z in mrow))
    for w in r.warnings:
        lines.append(f"warning: {w}")
    lines.append(f"convention: {r.convention}")
    return "\n".join(lines) + "\n"


def render_report(r, format="machine"):
    """Render as ``machine`` (JSON) or ``table`` (fixed-width text) bytes."""
    if format == "machine":
        return (json.dumps(report_to_dict(r), indent=2) + "\n").encode("utf-8")
    if format == "table":
        return render_table(r).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")
