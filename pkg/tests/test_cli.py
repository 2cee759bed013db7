import json
import subprocess
import sys
from pathlib import Path

import pytest

from helpers import DATA
from ud2lf import cli
from ud2lf.cli import main

FIXTURES = Path(__file__).resolve().parent / "fixtures"
CORPUS = str(DATA / "corpus.conllu")
GOLDEN = str(DATA / "golden.conllu")


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    return main([*argv, "--out", str(out)]), out


def read_summary(out):
    return dict(line.split("\t") for line in (out / "summary.tsv").read_text().splitlines()[1:])


def test_convert_corpus(tmp_path):
    rc, out = run(tmp_path, "convert", "--in", CORPUS)
    assert rc == 0
    summary = read_summary(out)
    assert (summary["total"], summary["converted"], summary["rate"]) == ("50", "40", "0.8")
    lines = (out / "conversions.jsonl").read_text().splitlines()
    assert len(lines) == 50
    recs = [json.loads(x) for x in lines]
    assert sum(r["status"] == "ok" for r in recs) == 40
    doc = json.loads((out / "summary.json").read_text())
    assert doc["rate"] == 0.8 and sum(doc["failures"].values()) == 10


def test_empty_input(tmp_path):
    empty = tmp_path / "empty.conllu"
    empty.write_text("")
    rc, out = run(tmp_path, "convert", "--in", str(empty))
    assert rc == 0
    assert (out / "conversions.jsonl").read_text() == ""
    assert read_summary(out)["total"] == "0"


def test_missing_rule_file(tmp_path):
    rc, out = run(tmp_path, "convert", "--in", CORPUS, "--rules-lf", str(tmp_path / "nope"))
    assert rc == 1 and not out.exists()


def test_bad_rule_file(tmp_path, capsys):
    bad = tmp_path / "bad.rules"
    bad.write_text("1 | a | (node (upos X)) | explode\n")
    rc, out = run(tmp_path, "convert", "--in", CORPUS, "--rules-rewrite", str(bad))
    assert rc == 1 and not out.exists()
    assert "invalid rules" in capsys.readouterr().err


def test_input_errors(tmp_path):
    assert run(tmp_path, "convert", "--in", str(tmp_path / "missing.conllu"))[0] == 2
    broken = tmp_path / "broken.conllu"
    broken.write_text("1\ta\ta\tX\t_\t_\tzero\troot\t_\t_\n")
    rc, out = run(tmp_path, "stats", "--in", str(broken))
    assert rc == 2 and not out.exists()


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["convert"], ["agree", "--in", GOLDEN],
    ["convert", "--in", GOLDEN, "--jobs", "0"], ["trends", "--in", GOLDEN, "--smooth", "4"],
    ["convert", "--in", GOLDEN, "--lang", "fr"], ["compare", "--in", GOLDEN, "--in", GOLDEN,
                                                  "--threshold", "much"],
])
def test_usage_errors(argv):
    assert main(argv) == 1


def test_internal_error_exit_code(tmp_path, monkeypatch, capsys):
    def boom(cfg):
        raise RuntimeError("kaboom")
    monkeypatch.setitem(cli.HANDLERS, "convert", boom)
    assert run(tmp_path, "convert", "--in", GOLDEN)[0] == 3
    assert "internal error" in capsys.readouterr().err


def test_stdout_without_out(capsys):
    assert main(["agree", "--in", GOLDEN, "--in", GOLDEN]) == 0
    assert "LAS=1.0 UAS=1.0" in capsys.readouterr().out


def test_config_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text(f"# settings\nin = {GOLDEN}, {GOLDEN}\nthreshold = 0.5\nexclude-punct = yes\n")
    rc, out = run(tmp_path, "agree", "--config", str(conf))
    assert rc == 0
    doc = json.loads((out / "agreement.json").read_text())
    assert doc["tokens"] == sum(1 for line in Path(GOLDEN).read_text().splitlines()
                                if line[:1].isdigit() and "\tPUNCT\t" not in line)
    cfg = cli.build_config(cli.build_parser().parse_args(
        ["compare", "--config", str(conf), "--threshold", "0.01"]))
    assert cfg.threshold == 0.01 and cfg.exclude_punct is True and len(cfg.inputs) == 2
    conf.write_text("colour = red\n")
    assert run(tmp_path, "convert", "--in", GOLDEN, "--config", str(conf))[0] == 1


def test_flags_either_side_of_command(tmp_path):
    before = main(["--jobs", "2", "--out", str(tmp_path / "a"), "convert", "--in", GOLDEN])
    after = main(["convert", "--in", GOLDEN, "--jobs", "2", "--out", str(tmp_path / "b")])
    assert before == after == 0
    for name in ["conversions.jsonl", "summary.tsv", "summary.json"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_jobs_determinism(tmp_path):
    outs = []
    for jobs in ("1", "8"):
        rc, out = run(tmp_path, "convert", "--in", CORPUS, "--jobs", jobs, name=f"j{jobs}")
        assert rc == 0
        outs.append(out)
    for name in ["conversions.jsonl", "summary.tsv", "summary.json"]:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_stats(tmp_path):
    rc, out = run(tmp_path, "stats", "--in", CORPUS)
    assert rc == 0
    rows = {r.split("\t")[0]: r.split("\t") for r in (out / "labels.tsv").read_text().splitlines()}
    assert rows["dobj"][1] == "30" and rows["dobj"][4] == "26"
    doc = json.loads((out / "labels.json").read_text())
    assert doc["conversion_rate"] == 0.8 and doc["sentences"] == 50


def test_agree_flip(tmp_path):
    rc, out = run(tmp_path, "agree", "--in", str(FIXTURES / "flip_a.conllu"),
                  "--in", str(FIXTURES / "flip_b.conllu"))
    assert rc == 0
    doc = json.loads((out / "agreement.json").read_text())
    assert (doc["las"], doc["uas"]) == (0.75, 1.0)


def test_trends_exact_line(tmp_path):
    rc, out = run(tmp_path, "trends", "--in", str(FIXTURES / "trend_line.conllu"), "--smooth", "3")
    assert rc == 0
    dobj = json.loads((out / "trends.json").read_text())["labels"]["dobj"]
    assert abs(dobj["slope"] - 0.1) <= 1e-12 and dobj["significant"] is True
    assert (out / "points.tsv").exists()


def test_trends_need_three_sessions(tmp_path):
    assert run(tmp_path, "trends", "--in", GOLDEN)[0] == 2


def test_compare(tmp_path):
    rc, out = run(tmp_path, "compare", "--in", GOLDEN, "--in", GOLDEN)
    assert rc == 0
    assert json.loads((out / "compare.json").read_text())["rows"] == []
    rc, out = run(tmp_path, "compare", "--in", GOLDEN, "--in", CORPUS, "--threshold", "0",
                  name="c2")
    assert rc == 0 and len((out / "compare.tsv").read_text().splitlines()) > 1


def test_derive(tmp_path):
    rc, out = run(tmp_path, "derive", "--in", GOLDEN, "--sentence", "g01")
    assert rc == 0
    text = (out / "derivation.txt").read_text()
    assert "g01" in text
    rc, _ = run(tmp_path, "derive", "--in", GOLDEN, "--sentence", "zzz", name="d2")
    assert rc == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ud2lf", "convert", "--in", GOLDEN],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 38


def test_compare_extra_dobj_fixture(tmp_path):
    from ud2lf.treebank import Token, read_conllu, serialize_corpus, with_tokens
    trees = read_conllu(GOLDEN)
    plus = [with_tokens(t, list(t.tokens) + [Token(len(t) + 1, "it", "it", "PRON",
                                                   head=t.root().id, deprel="dobj")])
            for t in trees]
    path = tmp_path / "plus.conllu"
    path.write_text(serialize_corpus(plus), encoding="utf-8")
    rc, out = run(tmp_path, "compare", "--in", GOLDEN, "--in", str(path))
    assert rc == 0
    rows = json.loads((out / "compare.json").read_text())["rows"]
    assert [r["label"] for r in rows if r["higher"] == "B"] == ["dobj"]
    # hand diff: 38 added tokens dilute every other label by count/N - count/(N+38)
    counts, n = {}, 0
    for t in trees:
        for tok in t.tokens:
            counts[tok.deprel] = counts.get(tok.deprel, 0) + 1
            n += 1
    diluted = {lab for lab, c in counts.items() if lab != "dobj" and c / n - c / (n + 38) > 0.005}
    assert {r["label"] for r in rows} == diluted | {"dobj"}
