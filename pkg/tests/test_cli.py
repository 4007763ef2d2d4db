import json

from ncrit import cli
from ncrit.hitsets.hitsets import read


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_corpus_listing(capsys):
    code, report = _run(capsys, "corpus")
    assert code == cli.EXIT_OK
    names = [entry["name"] for entry in report["entries"]]
    assert names[:3] == ["x1", "inv-cancel", "comm"]
    assert {entry["expected"] for entry in report["entries"]} == {"identity", "nonzero"}


def test_eval_prints_the_matrix(tmp_path, capsys):
    formula = _write(tmp_path, "f.txt", "x1*x2\n")
    point = _write(tmp_path, "p.json", json.dumps([[["1", "2"], ["3", "4"]], [["0", "1"], ["1", "0"]]]))
    code, report = _run(capsys, "eval", "--formula", formula, "--point", point)
    assert code == cli.EXIT_OK
    assert report == {"command": "eval", "result": "VALUE", "matrix": [["2", "1"], ["4", "3"]]}


def test_eval_reports_undefined_gate(tmp_path, capsys):
    formula = _write(tmp_path, "f.txt", "inv(x1)")
    point = _write(tmp_path, "p.json", json.dumps({"point": [[["0"]]], "field": "Q"}))
    code, report = _run(capsys, "eval", "--formula", formula, "--point", point)
    assert code == cli.EXIT_OK
    assert report["result"] == "NOT_DEFINED"
    assert report["path"] == "inv"


def test_test_command_random_mode(tmp_path, capsys):
    formula = _write(tmp_path, "f.txt", "x1*x2 - x2*x1")
    code, report = _run(capsys, "test", "--formula", formula, "--mode", "random", "--max-dim", "2", "--trials", "10")
    assert code == cli.EXIT_OK
    assert report["verdicts"]["random"]["verdict"] == "NONZERO"
    assert "hitset" not in report["verdicts"]


def test_test_command_both_modes(tmp_path, capsys):
    formula = _write(tmp_path, "f.txt", "x1")
    code, report = _run(capsys, "test", "--formula", formula, "--mode", "both", "--max-dim", "1", "--trials", "3")
    assert code == cli.EXIT_OK
    assert report["verdicts"]["hitset"]["verdict"] == "NONZERO"
    assert report["verdicts"]["hitset"]["witness_index"] == 0
    assert report["verdicts"]["random"]["source"] == "random"


def test_hitset_written_to_file(tmp_path, capsys):
    out = str(tmp_path / "h0.json")
    code, report = _run(capsys, "hitset", "--n", "1", "--s", "1", "--height", "0", "--out", out)
    assert code == cli.EXIT_OK
    assert report["header"]["field"] == "Q"
    hs = read(out)
    assert len(hs) == report["header"]["count"] == 36


def test_full_size_schedule_is_print_only(capsys):
    code = cli.main(["hitset", "--n", "2", "--s", "3", "--height", "1", "--mode", "paper-faithful-print"])
    captured = capsys.readouterr()
    assert code == cli.EXIT_OK
    report = json.loads(captured.out)
    assert report["schedule"]["mode"] == "paper-faithful"
    assert report["schedule"]["kappa"] == 15
    assert "print-only" in captured.err


def test_exit_codes(tmp_path, capsys):
    bad_formula = _write(tmp_path, "bad.txt", "x1 +")
    assert cli.main(["test", "--formula", bad_formula]) == cli.EXIT_SYNTAX

    deep = _write(tmp_path, "deep.txt", "inv(x1)")
    assert cli.main(["test", "--formula", deep, "--height", "0"]) == cli.EXIT_USAGE

    assert cli.main(["test", "--formula", str(tmp_path / "missing.txt")]) == cli.EXIT_IO

    formula = _write(tmp_path, "f.txt", "x1")
    broken = _write(tmp_path, "p.json", "[[1, 2")
    assert cli.main(["eval", "--formula", formula, "--point", broken]) == cli.EXIT_IO

    assert cli.main(["--desk", "fs_depth=1", "hitset", "--n", "1", "--s", "1", "--height", "0"]) == cli.EXIT_INFEASIBLE
    assert cli.main(["--desk", "kappa=0", "corpus"]) == cli.EXIT_USAGE
    assert cli.main(["--desk", "colour=1", "corpus"]) == cli.EXIT_USAGE
    capsys.readouterr()
