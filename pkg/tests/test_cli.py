import json

import numpy as np
import pytest

from _helpers import dsbs_source
from mtrd.cli import main
from mtrd.oracles import common_info_channel
from mtrd.probability import dsbs


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def region_config(**overrides):
    cfg = {
        "source": {"preset": "dsbs", "p": 0.1},
        "distortion": {"preset": "hamming"},
        "D": [0.05, 0.05],
        "sets": ["in", "out1", "out3", "cap13"],
        "sizes": {"x1": 2, "x2": 2},
        "weights": 4,
        "budget": 8,
        "seed": 7,
    }
    cfg.update(overrides)
    return cfg


class TestRegionCommand:
    def test_four_set_run(self, tmp_path):
        cfg = write(tmp_path, "cfg.json", region_config())
        out = tmp_path / "out"
        assert main(["region", "--config", cfg, "--out", str(out)]) == 0
        for sid in ("in", "out1", "out3", "cap13"):
            assert (out / f"region_{sid}.csv").exists()
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["tool"] == "mtrd"
        assert "heuristic under-approximations" in meta["caveat"]
        assert meta["master_seed"] == 7
        report = json.loads((out / "nesting_report.json").read_text())
        assert report["ok"] is True

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = write(tmp_path, "cfg.json", region_config(sets=["in", "out1"]))
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["region", "--config", cfg, "--out", str(a)]) == 0
        assert main(["region", "--config", cfg, "--out", str(b)]) == 0
        for sid in ("in", "out1"):
            fa = (a / f"region_{sid}.csv").read_bytes()
            fb = (b / f"region_{sid}.csv").read_bytes()
            assert fa == fb

    def test_negative_distortion_rejected(self, tmp_path, caplog):
        cfg = write(tmp_path, "cfg.json", region_config(D=[-0.1, 0]))
        assert main(["region", "--config", cfg, "--out", str(tmp_path)]) == 1
        assert "D" in caplog.text

    def test_unknown_set_rejected(self, tmp_path):
        cfg = write(tmp_path, "cfg.json", region_config(sets=["out2"]))
        assert main(["region", "--config", cfg, "--out", str(tmp_path)]) == 1

    def test_missing_config_file(self, tmp_path):
        assert main(["region", "--config", str(tmp_path / "nope.json")]) == 1


class TestDpiCommand:
    def test_chain_holds(self, tmp_path, capsys):
        bsc = lambda p: np.array([[1 - p, p], [p, 1 - p]])
        t = 0.5 * bsc(0.1)[:, :, None] * bsc(0.2)[None, :, :]
        cfg = write(tmp_path, "dpi.json", {"tensor": {"axes": ["X", "Y", "Z"], "values": t.tolist()}})
        assert main(["dpi", "--config", cfg]) == 0
        out = json.loads(capsys.readouterr().out)
        assert abs(out["checks"][0]["lam_i_AC"] - 0.48) < 1e-9

    def test_violation_detected(self, tmp_path):
        t = np.zeros((2, 2, 2))
        for x in range(2):
            for y in range(2):
                t[x, y, x] = 0.25
        cfg = write(tmp_path, "dpi.json", {"tensor": {"values": t.tolist()}})
        assert main(["dpi", "--config", cfg]) == 3

    def test_malformed_tensor(self, tmp_path):
        cfg = write(tmp_path, "dpi.json", {"tensor": {"values": [[0.5, 0.6]]}})
        assert main(["dpi", "--config", cfg]) == 1


class TestFeasibleCommand:
    def test_product_channel_in(self, tmp_path):
        ch = np.einsum(
            "ux,vy->uvxy",
            np.array([[0.9, 0.1], [0.3, 0.7]]),
            np.array([[0.8, 0.2], [0.25, 0.75]]),
        )
        cfg = write(tmp_path, "f.json", {"channel": ch.tolist()})
        assert main(["feasible", "--config", cfg, "--set", "in"]) == 0

    def test_common_info_channel_verdicts(self, tmp_path):
        src = dsbs_source(0.1)
        cc = common_info_channel(src, lambda u: u, lambda v: v, 2)
        cfg = write(
            tmp_path, "f.json",
            {"channel": cc.values.tolist(), "source": {"preset": "dsbs", "p": 0.1}},
        )
        assert main(["feasible", "--config", cfg, "--set", "out1"]) == 0
        assert main(["feasible", "--config", cfg, "--set", "out3"]) == 3
        assert main(["feasible", "--config", cfg, "--set", "out1", "--set", "out3"]) == 3

    def test_channel_source_size_mismatch(self, tmp_path):
        ch = np.full((3, 2, 2, 2), 0.25)
        cfg = write(
            tmp_path, "f.json",
            {"channel": ch.tolist(), "source": {"preset": "dsbs", "p": 0.1}},
        )
        assert main(["feasible", "--config", cfg, "--set", "out3"]) == 1


class TestValidateCommand:
    def test_clean_suite(self, tmp_path, capsys):
        cfg = write(
            tmp_path, "v.json",
            {"source": {"preset": "dsbs", "p": 0.1}, "trials": 10,
             "n": [1, 2], "sizes": {"x1": 2, "x2": 2}, "seed": 3},
        )
        assert main(["validate", "--config", cfg]) == 0
        out = json.loads(capsys.readouterr().out)
        assert all(r["failures"] == 0 for r in out)

    def test_self_test_flags_adversarial(self, tmp_path):
        cfg = write(
            tmp_path, "v.json",
            {"source": {"preset": "dsbs", "p": 0.1}, "trials": 3,
             "n": 1, "sizes": {"x1": 4, "x2": 4}},
        )
        assert main(["validate", "--config", cfg, "--self-test"]) == 3

    def test_zero_trials_rejected(self, tmp_path):
        cfg = write(tmp_path, "v.json", {"trials": 0})
        assert main(["validate", "--config", cfg]) == 1
