import io
import json
import subprocess
import sys

import pytest

from conftest import EXAMPLE_AUT, SAMPLES
from influence.cli import RunConfig, main, run
from influence.lts import read_aut
from influence.pbes import IA1, IA2, IaVariant

P1 = SAMPLES / "p1.mc"


def _run(config):
    out, err = io.StringIO(), io.StringIO()
    code = run(config, out, err)
    return code, out.getvalue(), err.getvalue()


def test_annotate_p1(capsys):
    assert main(["annotate", str(P1), "--ia", "1"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert rows == [
        "0  keep: x   hide: y",
        "1  keep: x   hide: y",
        "2  keep: x   hide: y",
        "3  keep: -   hide: x,y",
        "4  keep: -   hide: x,y",
    ]


def test_annotate_empty_aut(tmp_path, capsys):
    path = tmp_path / "empty.aut"
    path.write_text("des (0, 0, 1)\n")
    assert main(["annotate", str(path), "--ia", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[1:] == ["0  keep: -   hide: -"]


def test_random_aut_with_oracle(tmp_path, capsys):
    for seed in range(25):
        assert main(["random", "--seed", str(seed)]) == 0
        path = tmp_path / f"r{seed}.aut"
        path.write_text(capsys.readouterr().out)
        assert main(["annotate", str(path), "--ia", "2", "--oracle"]) == 0
        capsys.readouterr()


def test_oracle_does_not_change_report(tmp_path):
    path = tmp_path / "m.aut"
    path.write_text(EXAMPLE_AUT)
    plain = _run(RunConfig(path, IA2))
    checked = _run(RunConfig(path, IA2, oracle=True))
    assert plain[0] == checked[0] == 0
    assert plain[1] == checked[1]


def test_oracle_mismatch_exit_2(tmp_path, monkeypatch):
    import influence.cli as cli

    path = tmp_path / "m.aut"
    path.write_text(EXAMPLE_AUT)
    monkeypatch.setattr(cli, "global_solve", lambda lts, v: {k: False for k in _all_keys(lts, v)})
    code, _, err = _run(RunConfig(path, IA1, oracle=True))
    assert code == 2
    assert "oracle mismatch" in err


def _all_keys(lts, variant):
    from influence.pbes import BesNodeKey

    return [BesNodeKey(variant, s, v) for s in lts.states for v in lts.universe]


def test_json_and_deterministic(tmp_path):
    cfg = RunConfig(P1, IaVariant(4, ["y"]), output="json")
    a, b = _run(cfg), _run(cfg)
    assert a == b
    doc = json.loads(a[1])
    assert doc["variant"] == "IA4" and doc["property_vars"] == ["y"]


def test_emit_files(tmp_path):
    aut, blk, fig = tmp_path / "p1.aut", tmp_path / "p1.blk", tmp_path / "p1.png"
    code, _, _ = _run(RunConfig(P1, IA1, emit_aut=aut, emit_blk=blk, blk_eval="x", figure=fig))
    assert code == 0
    assert aut.read_text() == EXAMPLE_AUT
    text = blk.read_text()
    assert text.startswith("block mu B is\n") and text.endswith("eval B:Y1_x\n")
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_emitted_aut_reloads(tmp_path, capsys):
    aut = tmp_path / "out.aut"
    assert main(["annotate", str(P1), "--emit-aut", str(aut)]) == 0
    first = capsys.readouterr().out
    assert main(["annotate", str(aut)]) == 0
    assert capsys.readouterr().out == first
    assert read_aut(aut.read_text()).num_states == 5


def test_diagnose_appends_dot(capsys):
    assert main(["annotate", str(P1), "--diagnose", "1:x"]) == 0
    out = capsys.readouterr().out
    assert 'digraph "Y_1_x" {' in out
    assert "Y_0_x -> TRUE;" in out


def test_diagnose_unreachable_state(tmp_path, capsys):
    path = tmp_path / "u.aut"
    path.write_text('des (0, 1, 3)\n(2, "BOOL x", 1)\n')
    assert main(["annotate", str(path), "--diagnose", "2:x"]) == 0
    assert "Y_2_x -> TRUE;" in capsys.readouterr().out


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.mc"
    bad.write_text("int x; x = z;")
    assert main(["annotate", str(bad)]) == 1
    assert "undeclared variable z" in capsys.readouterr().err
    badaut = tmp_path / "bad.aut"
    badaut.write_text('des (0, 1, 2)\n(0, "JUMP", 1)\n')
    assert main(["annotate", str(badaut)]) == 1
    assert main(["annotate", str(tmp_path / "missing.mc")]) == 1


@pytest.mark.parametrize("argv", [
    ["annotate", str(P1), "--ia", "5"],
    ["annotate", str(P1), "--ia", "1", "--property-vars", "x"],
    ["annotate", str(P1), "--diagnose", "x0"],
    ["annotate", str(P1), "--diagnose", "9:x"],
    ["annotate", str(P1), "--ia", "4", "--property-vars", "nope"],
    ["annotate", str(P1), "--jobs", "0"],
    ["annotate", str(P1), "--emit-blk", "/tmp/x.blk", "--blk-eval", "q"],
    ["annotate", str(SAMPLES / "p1.txt")],
    [],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 64


def test_kind_override(tmp_path, capsys):
    path = tmp_path / "model.txt"
    path.write_text(EXAMPLE_AUT)
    assert main(["annotate", str(path), "--kind", "aut"]) == 0


def test_jobs(capsys):
    assert main(["annotate", str(P1), "--jobs", "2"]) == 0
    parallel = capsys.readouterr().out
    assert main(["annotate", str(P1)]) == 0
    assert capsys.readouterr().out == parallel


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "influence", "annotate", str(P1), "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["states"][0]["keep"] == ["x"]
