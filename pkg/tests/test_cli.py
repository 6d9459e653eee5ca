"""End-to-end CLI behavior: schemas, exit codes, artifacts, determinism."""

import json

import pytest

from carnapkit import SEUAgent, probe_tradeoff_records
from carnapkit.cli import main

from helpers import DESK, space_of

MODEL = {
    "diseases": ["d1", "d2", "d3"],
    "prior": [0.5, 0.3, 0.2],
    "lambda": 2,
    "horizon": 100,
}
CARNAP_AGENT = {
    "kind": "carnap",
    "diseases": ["d1", "d2", "d3"],
    "interval": {"lo": 0, "hi": 1},
    "model": {"prior": [0.5, 0.3, 0.2], "lambda": 2, "horizon": 100},
    "utility": "linear",
}
URN_AGENT = {
    "kind": "urn",
    "diseases": ["d1", "d2", "d3"],
    "interval": {"lo": 0, "hi": 1},
    "tickets": [4, 4, 4],
}
MIXTURE_AGENT = {
    "kind": "mixture",
    "diseases": ["d1", "d2", "d3"],
    "interval": {"lo": 0, "hi": 1},
    "components": [
        {"prior": [0.6, 0.3, 0.1], "lambda": 2},
        {"prior": [0.1, 0.3, 0.6], "lambda": 2},
    ],
    "weights": [0.5, 0.5],
}
CHOQUET_AGENT = {
    "kind": "choquet",
    "diseases": ["d1", "d2"],
    "interval": {"lo": 0, "hi": 100},
    "capacity": [
        {"members": [], "value": 0.0},
        {"members": ["d1"], "value": 0.4},
        {"members": ["d2"], "value": 0.4},
        {"members": ["d1", "d2"], "value": 1.0},
    ],
}


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestUpdateCommand:
    def test_posterior_and_csv(self, tmp_path):
        model = write(tmp_path, "model.json", MODEL)
        evidence = write(tmp_path, "evidence.json", {"evidence": ["d1", "d1", "d2"]})
        out = tmp_path / "out"
        assert main(["--out", str(out), "update", model, evidence]) == 0
        result = json.loads((out / "update.json").read_text())
        assert result["posterior"] == [0.6, 0.32, 0.08]
        csv_lines = (out / "update.csv").read_text().splitlines()
        assert csv_lines[0] == "disease,prior,count,posterior"
        assert csv_lines[1] == "d1,0.5,2,0.6"

    def test_posterior_round_trips_as_model(self, tmp_path):
        model = write(tmp_path, "model.json", MODEL)
        evidence = write(tmp_path, "evidence.json", ["d1", "d1"])
        out = tmp_path / "out"
        assert main(["--out", str(out), "update", model, evidence]) == 0
        first = json.loads((out / "update.json").read_text())
        assert first["lambda"] == 4.0
        next_model = write(tmp_path, "model2.json", first)
        out2 = tmp_path / "out2"
        assert main(["--out", str(out2), "update", next_model,
                     write(tmp_path, "e2.json", ["d2"])]) == 0
        chained = json.loads((out2 / "update.json").read_text())
        # matches updating on the concatenated evidence in one shot
        out3 = tmp_path / "out3"
        assert main(["--out", str(out3), "update", model,
                     write(tmp_path, "e3.json", ["d1", "d1", "d2"])]) == 0
        direct = json.loads((out3 / "update.json").read_text())
        assert chained["posterior"] == pytest.approx(direct["posterior"], abs=1e-12)

    def test_unknown_label_names_it_and_exits_2(self, tmp_path, capsys):
        model = write(tmp_path, "model.json", MODEL)
        evidence = write(tmp_path, "evidence.json", ["dX"])
        code = main(["--out", str(tmp_path / "out"), "update", model, evidence])
        assert code == 2
        assert "dX" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        assert main(
            ["--out", str(tmp_path), "update", str(tmp_path / "nope.json"),
             str(tmp_path / "nope.json")]
        ) == 2


class TestAxiomsCommand:
    def _audit(self, tmp_path, agent, probes=8):
        path = write(tmp_path, "agent.json", agent)
        out = tmp_path / "out"
        assert main(
            ["--seed", "3", "--out", str(out), "axioms", path, "--probes", str(probes)]
        ) == 0
        return json.loads((out / "axioms.json").read_text())["audit"]

    def test_carnap_agent_passes_everything(self, tmp_path):
        audit = self._audit(tmp_path, CARNAP_AGENT)
        assert audit["positive_relatedness"]["pass"]
        assert audit["exchangeability"]["pass"]
        assert audit["disjoint_causality"]["pass"]
        assert audit["utility_stability"]["pass"]

    def test_urn_agent_fails_positive_relatedness_with_witnesses(self, tmp_path):
        audit = self._audit(tmp_path, URN_AGENT)
        section = audit["positive_relatedness"]
        assert not section["pass"]
        assert len(section["witnesses"]) == section["probes"]
        assert audit["exchangeability"]["pass"]

    def test_mixture_fails_disjoint_causality_only(self, tmp_path):
        audit = self._audit(tmp_path, MIXTURE_AGENT)
        assert not audit["disjoint_causality"]["pass"]
        assert audit["disjoint_causality"]["witnesses"]
        assert audit["exchangeability"]["pass"]
        assert audit["positive_relatedness"]["pass"]

    def test_two_disease_agent_marks_disjoint_causality_inapplicable(self, tmp_path):
        agent = {
            "kind": "carnap",
            "diseases": ["d1", "d2"],
            "interval": {"lo": 0, "hi": 1},
            "model": {"prior": [0.5, 0.5], "lambda": 1, "horizon": 100},
        }
        audit = self._audit(tmp_path, agent)
        assert audit["disjoint_causality"]["status"] == "inapplicable"


class TestIdentifyCommand:
    def test_carnap_agent(self, tmp_path):
        path = write(tmp_path, "agent.json", CARNAP_AGENT)
        out = tmp_path / "out"
        assert main(["--out", str(out), "identify", path]) == 0
        result = json.loads((out / "identify.json").read_text())
        assert result["lambda"] == pytest.approx(2.0, rel=1e-9)
        assert result["prior"] == pytest.approx([0.5, 0.3, 0.2], abs=1e-9)

    def test_urn_agent_exits_3(self, tmp_path):
        path = write(tmp_path, "agent.json", URN_AGENT)
        assert main(["--out", str(tmp_path / "out"), "identify", path]) == 3


class TestElicitCommand:
    def test_sequence_and_svg(self, tmp_path):
        path = write(tmp_path, "agent.json", CARNAP_AGENT)
        out = tmp_path / "out"
        assert main(
            ["--out", str(out), "elicit", path, "--event", "d1",
             "--gauge-high", "0.1", "--steps", "5"]
        ) == 0
        result = json.loads((out / "elicit.json").read_text())
        assert result["points"] == pytest.approx(
            [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], abs=1e-9
        )
        assert (out / "elicit.svg").read_text().startswith("<svg")


class TestConsistencyCommand:
    def test_seu_records_are_clean(self, tmp_path):
        agent = SEUAgent(space_of(2), DESK, (0.4, 0.6))
        records = probe_tradeoff_records(agent, levels=4)
        rows = [
            {
                "alpha": r.alpha,
                "beta": r.beta,
                "gamma": r.gamma,
                "delta": r.delta,
                "event": sorted(r.event.members),
                "f": {"outcomes": r.f.as_dict()},
                "g": {"outcomes": r.g.as_dict()},
                "evidence": [],
            }
            for r in records
        ]
        path = write(
            tmp_path,
            "records.json",
            {"diseases": ["d1", "d2"], "interval": {"lo": 0, "hi": 100},
             "records": rows},
        )
        out = tmp_path / "out"
        assert main(["--out", str(out), "consistency", str(path)]) == 0
        result = json.loads((out / "consistency.json").read_text())
        assert result["violations"] == []
        assert result["pairs"] == len(rows)

    def test_choquet_agent_probed_directly(self, tmp_path):
        path = write(tmp_path, "agent.json", CHOQUET_AGENT)
        out = tmp_path / "out"
        assert main(["--out", str(out), "consistency", str(path)]) == 0
        result = json.loads((out / "consistency.json").read_text())
        assert len(result["violations"]) >= 1
        assert result["violations"][0]["code"] == "TC-VIOLATION"


class TestWeightsCommand:
    def test_diagonal_fit(self, tmp_path):
        samples = [[k / 10, k / 10] for k in range(1, 10)]
        path = write(tmp_path, "samples.json", {"samples": samples, "family": "tk"})
        out = tmp_path / "out"
        assert main(["--out", str(out), "weights", str(path)]) == 0
        result = json.loads((out / "weights.json").read_text())
        assert result["fit"]["params"][0] == pytest.approx(1.0, abs=1e-7)
        assert (out / "weights.svg").exists()


class TestDebiasCommand:
    def test_corrects_table(self, tmp_path):
        payload = {
            "diseases": ["d1", "d2"],
            "capacity": [
                {"members": ["d1"], "value": 0.3},
                {"members": ["d2"], "value": 0.3},
            ],
            "weighting": {"family": "linear", "params": []},
        }
        path = write(tmp_path, "capacity.json", payload)
        out = tmp_path / "out"
        assert main(["--out", str(out), "debias", str(path)]) == 0
        result = json.loads((out / "debias.json").read_text())
        values = {tuple(row["members"]): row["value"]
                  for row in result["phi"]["capacity"]}
        assert values[("d1",)] == 0.3
        assert result["flags"][0]["code"] == "NONADDITIVE"


class TestSimulateCommand:
    SPEC = {
        "diseases": ["d1", "d2", "d3"],
        "q": [0.4, 0.3, 0.3],
        "support": 0.7,
        "steps": 30,
        "lambda": 1.0,
        "runs": 2,
    }

    def test_writes_trajectories(self, tmp_path):
        path = write(tmp_path, "spec.json", self.SPEC)
        out = tmp_path / "out"
        assert main(["--seed", "5", "--out", str(out), "simulate", str(path)]) == 0
        assert (out / "trajectory_seed5.csv").exists()
        assert (out / "trajectory_seed6.csv").exists()
        assert (out / "trajectory.svg").exists()
        finals = json.loads((out / "simulate.json").read_text())["finals"]
        assert len(finals) == 2
        header = (out / "trajectory_seed5.csv").read_text().splitlines()[0]
        assert header == "step,measure,disease,value"

    def test_byte_identical_reruns(self, tmp_path):
        path = write(tmp_path, "spec.json", self.SPEC)
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            assert main(["--seed", "5", "--out", str(out), "simulate", str(path)]) == 0
        for name in ("trajectory_seed5.csv", "trajectory_seed6.csv", "trajectory.svg"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


class TestExitCodes:
    def test_numerical_failures_exit_4(self, tmp_path, monkeypatch):
        import argparse

        import carnapkit.cli as cli
        from carnapkit import NumericalError

        def boom(args):
            raise NumericalError("solver gave up")

        fake = argparse.Namespace(func=boom, command="identify")
        monkeypatch.setattr(
            argparse.ArgumentParser, "parse_args", lambda self, argv=None: fake
        )
        assert cli.main([]) == 4
