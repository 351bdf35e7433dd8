import csv
import json

import numpy as np
import pytest

from kpod.cli import main
from kpod.data import from_arrays, gen2d, write_libsvm


@pytest.fixture
def spiral(tmp_path):
    tr, te = tmp_path / "train.txt", tmp_path / "test.txt"
    assert main(["gen2d", "--case", "spiral", "--n", "60", "--seed", "1", "--out", str(tr)]) == 0
    assert main(["gen2d", "--case", "spiral", "--n", "60", "--seed", "2", "--out", str(te)]) == 0
    model = tmp_path / "m.json"
    assert main(["train", "--train", str(tr), "--model", str(model), "--sigma", "1.2",
                 "--energy", "1.0"]) == 0
    return tr, te, model


def test_train_output(spiral, capsys, tmp_path):
    tr, _, _ = spiral
    capsys.readouterr()
    assert main(["train", "--train", str(tr), "--model", str(tmp_path / "x.json"),
                 "--sigma", "1.2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["class_sizes"] == [[0, 60], [1, 60]]
    assert len(out["subspaces"]) == 2
    assert all(s["modes"] >= 1 for s in out["subspaces"])


def test_train_balance_reports_three_subspaces(tmp_path, capsys):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(38, 4))
    y = [-1] * 27 + [1] * 11
    path = tmp_path / "leu_like.txt"
    write_libsvm(from_arrays(X, y), str(path))
    assert main(["train", "--train", str(path), "--model", str(tmp_path / "m.json"),
                 "--balance"]) == 0
    assert "subspaces: 3" in capsys.readouterr().out


def test_predict_self_consistency_and_determinism(spiral, tmp_path):
    tr, _, model = spiral
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["predict", "--model", str(model), "--data", str(tr), "--out", str(a)]) == 0
    assert main(["predict", "--model", str(model), "--data", str(tr), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    _, y = gen2d("spiral", 60, seed=1)
    assert a.read_text().split() == [str(v) for v in y]


def test_predict_distances(spiral, tmp_path):
    _, te, model = spiral
    out = tmp_path / "d.csv"
    assert main(["predict", "--model", str(model), "--data", str(te), "--out", str(out),
                 "--distances"]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["label", "d_0", "d_1"]
    assert all(len(r) == 3 for r in rows)
    assert len(rows) == 121


def test_eval_and_baseline(spiral, tmp_path, capsys):
    _, te, model = spiral
    base = tmp_path / "svm.txt"
    base.write_text("0\n" * 120)
    capsys.readouterr()
    assert main(["eval", "--model", str(model), "--data", str(te), "--baseline", str(base),
                 "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["baseline_accuracy"] == 0.5
    assert out["n"] == 120 and np.sum(out["confusion"]) == 120
    assert main(["eval", "--model", str(model), "--data", str(te)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("accuracy: ") and "true\\pred" in text


def test_grid(tmp_path):
    X, y = gen2d("connected", 80, seed=4)
    data, model, out = tmp_path / "c.txt", tmp_path / "m.json", tmp_path / "g.csv"
    write_libsvm(from_arrays(X, y), str(data))
    assert main(["train", "--train", str(data), "--model", str(model), "--sigma", "1.2"]) == 0
    assert main(["grid", "--model", str(model), "--out", str(out), "--resolution", "100"]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "y", "predicted_label", "min_distance"]
    assert len(rows) == 10001
    labels = np.array([r[2] for r in rows[1:]])
    xs = np.array([float(r[0]) for r in rows[1:]])
    assert set(labels) <= {"0", "1"}
    # class 0 sits at (-1, 0): it must own most of the left half-plane
    assert np.mean(labels[xs < -0.5] == "0") > 0.9
    assert np.mean(labels[xs > 0.5] == "1") > 0.9


def test_addclass_rmclass(spiral, tmp_path, capsys):
    _, _, model = spiral
    X, _ = gen2d("connected", 20, seed=7)
    extra = tmp_path / "extra.txt"
    write_libsvm(from_arrays(X + [0, 6], ["new"] * 40), str(extra))
    grown, back = tmp_path / "g.json", tmp_path / "b.json"
    capsys.readouterr()
    assert main(["addclass", "--model", str(model), "--data", str(extra), "--out", str(grown),
                 "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"computed": [["new", 0]], "reused": 2}
    old_lines = model.read_text().splitlines()
    new_lines = grown.read_text().splitlines()
    assert [l.rstrip(",") for l in new_lines[1:3]] == [l.rstrip(",") for l in old_lines[1:3]]
    assert main(["rmclass", "--model", str(grown), "--label", "new", "--out", str(back)]) == 0
    assert back.read_text().splitlines()[1:] == old_lines[1:]


def test_search(spiral, capsys):
    tr, te, _ = spiral
    capsys.readouterr()
    assert main(["search", "--train", str(tr), "--test", str(te), "--sigmas", "0.5,1.2",
                 "--energies", "0.999,1.0", "--folds", "3", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["table"]) == 4
    assert out["sigma"] in (0.5, 1.2)
    assert 0.0 <= out["test_accuracy"] <= 1.0


def test_exit_codes(spiral, tmp_path, capsys):
    tr, _, model = spiral
    missing = tmp_path / "nope.txt"
    assert main(["train", "--train", str(missing), "--model", str(tmp_path / "x")]) == 2
    assert str(missing) in capsys.readouterr().err
    assert main(["train", "--train", str(tr), "--model", "x", "--sigma", "-1"]) == 1
    assert main(["train", "--train", str(tr), "--model", "x", "--energy", "2"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["train", "--bogus"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["grid", "--model", str(model), "--out", "g", "--resolution", "0"])
    assert info.value.code == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2:1 1:3\n")
    assert main(["train", "--train", str(bad), "--model", "x"]) == 2
    assert "line 1" in capsys.readouterr().err
    single = tmp_path / "one.txt"
    single.write_text("0 1:1\n1 1:2\n1 1:3\n")
    assert main(["train", "--train", str(single), "--model", str(tmp_path / "y.json"),
                 "--centered"]) == 3
    assert main(["rmclass", "--model", str(model), "--label", "0"]) == 2
