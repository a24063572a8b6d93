import json

import numpy as np
import pytest

from ifmsim import cli
from ifmsim.errors import ConfigSyntaxError, ValidationError
from ifmsim.scenario import (
    canned,
    canned_names,
    parse_scenario,
    render_report,
    report_to_dict,
    run,
    scenario_from_dict,
)
from ifmsim.oracle import random_scenario

MINIMAL = """
photon:
  port: lower
  polarization: sigma+
atoms:
  - id: atom
    model: half_absorber
    arm: lower
    initial: {m+: 0.7071067811865476, m-: 0.7071067811865476}
"""

BELL = """
name: bell
photon: {port: lower, polarization: x}
atoms:
  - {id: atom1, model: half_absorber, arm: lower}
  - {id: atom2, model: spectator}
entangled:
  atoms: [atom1, atom2]
  amplitudes:
    m-,m+: 0.7071067811865476
    m+,m-: 0.7071067811865476
detector: {analysis: linear}
"""


def test_canned_library():
    assert canned_names() == sorted(
        ["no_atom", "classical_ev", "two_level", "sigma_plus", "linear_x", "bell_linear", "bell_circular"]
    )
    for name in canned_names():
        assert canned(name).name == name


class TestParse:
    def test_minimal(self):
        sc = parse_scenario(MINIMAL)
        assert sc.photon.port == "lower"
        assert sc.atoms[0].initial == pytest.approx({"m+": 0.7071067811865476, "m-": 0.7071067811865476})
        assert sc.detector.analysis_basis == "none"

    def test_bytes_input(self):
        assert parse_scenario(MINIMAL.encode()) == parse_scenario(MINIMAL)

    def test_bell(self):
        sc = parse_scenario(BELL)
        assert sc.atom_registers == ["atom1", "atom2"]
        assert [a.arm for a in sc.atoms] == ["lower", "outside"]
        assert sc.entangled.amplitudes[("m-", "m+")] == pytest.approx(2 ** -0.5)

    def test_two_absorbers_in_one_arm(self):
        text = MINIMAL + "  - {id: other, model: classical_opaque, arm: lower}\n"
        with pytest.raises(ValidationError) as exc:
            parse_scenario(text)
        assert exc.value.path == "atoms[1].arm"

    def test_complex_amplitudes(self):
        sc = parse_scenario(MINIMAL.replace("m-: 0.7071067811865476", "m-: [0, 0.7071067811865476]"))
        assert sc.atoms[0].initial["m-"] == pytest.approx(0.7071067811865476j)

    @pytest.mark.parametrize(
        "patch, path",
        [
            (("port: lower", "port: middle"), "photon.port"),
            (("polarization: sigma+", "polarization: z"), "photon.polarization"),
            (("arm: lower", "arm: outside"), "atoms[0].arm"),
            (("model: half_absorber", "model: bomb"), "atoms[0].model"),
            (("m+: 0.7071067811865476", "m+: 0.9"), "atoms[0].initial"),
            (("m+: 0.7071067811865476", "e: 0.7071067811865476"), "atoms[0].initial.e"),
            (("    initial", "    colour: red\n    initial"), "atoms[0].colour"),
            (("photon:", "extra: 1\nphoton:"), "extra"),
        ],
    )
    def test_field_errors(self, patch, path):
        with pytest.raises(ValidationError) as exc:
            parse_scenario(MINIMAL.replace(*patch))
        assert exc.value.path == path

    def test_missing_initial(self):
        with pytest.raises(ValidationError) as exc:
            parse_scenario(MINIMAL.replace("    initial: {m+: 0.7071067811865476, m-: 0.7071067811865476}\n", ""))
        assert exc.value.path == "atoms[0].initial"

    def test_initial_and_entangled_conflict(self):
        text = BELL.replace("{id: atom2, model: spectator}", "{id: atom2, model: spectator, initial: {m+: 1}}")
        with pytest.raises(ValidationError) as exc:
            parse_scenario(text)
        assert exc.value.path == "atoms[1].initial"

    def test_syntax_error_location(self):
        with pytest.raises(ConfigSyntaxError) as exc:
            parse_scenario("photon:\n  port: lower\n  polarization: [x\n")
        assert exc.value.line is not None and exc.value.column is not None
        assert "line" in str(exc.value)

    def test_top_level_must_be_mapping(self):
        with pytest.raises(ValidationError):
            parse_scenario("- 1\n- 2\n")


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["no_atom", "classical_ev", "two_level", "sigma_plus", "linear_x", "bell_linear", "bell_circular"])
    def test_canned_echo(self, name):
        sc = canned(name)
        echo = json.loads(render_report(run(sc), "machine"))["scenario"]
        assert parse_scenario(json.dumps(echo)) == sc

    def test_random_echo(self, rng):
        for _ in range(50):
            sc = random_scenario(rng)
            assert scenario_from_dict(json.loads(json.dumps(sc.to_dict()))) == sc


class TestRun:
    def test_sigma_plus_row(self):
        r = run(canned("sigma_plus"))
        row = r.row("Dl", "+")
        assert row.probability == pytest.approx(0.125, abs=1e-12)
        np.testing.assert_allclose(row.posterior.matrix, np.diag([1, 0, 0]), atol=1e-12)
        assert row.metrics.l1_coherence == pytest.approx(0, abs=1e-12)
        assert row.target_fidelity["m+"] == pytest.approx(1, abs=1e-12)

    def test_classical_ev(self):
        b = run(canned("classical_ev")).budget
        assert (b.absorbed, b.Du, b.Dl) == pytest.approx((0.5, 0.25, 0.25), abs=1e-12)

    def test_two_level(self):
        assert run(canned("two_level")).budget.Dl == pytest.approx(0.25, abs=1e-12)

    def test_ground_population_flagged(self):
        sc = parse_scenario(MINIMAL.replace("m-: 0.7071067811865476", "g: 0.7071067811865476"))
        r = run(sc)
        assert any("population" in w and "g" in w for w in r.warnings)

    def test_probabilities_sum(self):
        for name in canned_names():
            r = run(canned(name))
            assert sum(row.probability for row in r.rows) == pytest.approx(1, abs=1e-12)

    def test_deterministic(self):
        for name in canned_names():
            a = render_report(run(canned(name)), "machine")
            b = render_report(run(canned(name)), "machine")
            assert a == b

    def test_machine_numbers_full_precision(self):
        d = report_to_dict(run(canned("linear_x")))
        entry = d["outcomes"][2]["posterior"]
        assert entry["basis"] == ["m+", "m-", "g"]
        # full double precision survives the JSON round trip
        raw = json.loads(render_report(run(canned("linear_x")), "machine"))
        assert raw["outcomes"][2]["posterior"]["matrix"][0][1][0] == d["outcomes"][2]["posterior"]["matrix"][0][1][0]

    def test_table_format(self):
        text = render_report(run(canned("sigma_plus")), "table").decode()
        assert "Dl,+" in text and "0.1250000000" in text
        assert "budget:" in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render_report(run(canned("no_atom")), "xml")


class TestCli:
    def test_list(self, capsys):
        assert cli.main(["run", "--list-canned"]) == 0
        assert "sigma_plus" in capsys.readouterr().out.split()

    def test_canned_machine_check(self, capsys):
        assert cli.main(["run", "--canned", "linear_x", "--format", "machine", "--check"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["budget"]["Dl"] == pytest.approx(0.125, abs=1e-12)

    def test_file_and_out(self, tmp_path):
        src = tmp_path / "s.yaml"
        src.write_text(BELL)
        dest = tmp_path / "r.json"
        assert cli.main(["run", str(src), "--format", "machine", "--out", str(dest)]) == 0
        assert json.loads(dest.read_text())["scenario"]["name"] == "bell"

    def test_validation_error_exit(self, tmp_path, capsys):
        src = tmp_path / "bad.yaml"
        src.write_text(MINIMAL.replace("port: lower", "port: middle"))
        assert cli.main(["run", str(src)]) == 1
        assert "photon.port" in capsys.readouterr().err

    def test_syntax_error_exit(self, tmp_path):
        src = tmp_path / "bad.yaml"
        src.write_text("photon: [\n")
        assert cli.main(["run", str(src)]) == 1

    def test_missing_file(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "nope.yaml")]) == 1

    def test_needs_one_source(self):
        assert cli.main(["run"]) == 1

    def test_mismatch_exit(self, monkeypatch):
        from dataclasses import replace

        real = cli.oracle_run
        monkeypatch.setattr(
            cli, "oracle_run",
            lambda sc: [replace(o, probability=o.probability + 1e-6) for o in real(sc)],
        )
        assert cli.main(["run", "--canned", "sigma_plus", "--check"]) == 2
