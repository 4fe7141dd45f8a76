import json
import random
from pathlib import Path

import pytest

from careertrace.cli import run

from conftest import lines, rec


def write_corpus(path: Path, records):
    path.write_text("\n".join(lines(*records)) + "\n", encoding="utf-8")


@pytest.fixture
def small_corpus(tmp_path):
    records = [
        rec("p1", 2005, [("a1", ["CHN"])], cites=3),
        rec("p2", 2007, [("a1", ["USA"])], cites=1),
        rec("p3", 2014, [("a1", ["CHN"]), ("a2", ["CHN"])], cites=8),
        rec("p4", 2014, [("a2", ["CHN"]), ("a3", ["USA"])], cites=2),
    ]
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, records)
    return path


def data_files(root: Path) -> dict[str, bytes]:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file() and not p.name.endswith("manifest.json"):
            out[str(p.relative_to(root))] = p.read_bytes()
    return out


def test_validate_ok_exit_zero(small_corpus):
    assert run(["validate", str(small_corpus)]) == 0


def test_validate_bad_corpus_exit_one(tmp_path, capsys):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"nope": 1}\n', encoding="utf-8")
    assert run(["validate", str(path)]) == 1
    assert "bad.jsonl" in capsys.readouterr().err


def test_validate_duplicate_exit_one(tmp_path):
    record = rec("p1", 2005, [("a1", ["CHN"])])
    path = tmp_path / "dup.jsonl"
    path.write_text("\n".join(lines(record, record)) + "\n", encoding="utf-8")
    assert run(["validate", str(path)]) == 1


def test_unknown_subcommand_exits_two(capsys):
    assert run(["frobnicate"]) == 2
    assert run([]) == 2


def test_missing_file_exit_one(tmp_path):
    assert run(["validate", str(tmp_path / "absent.jsonl")]) == 1


def test_timelines_output(small_corpus, tmp_path):
    out = tmp_path / "tl.csv"
    assert run(["timelines", str(small_corpus), "-o", str(out), "--no-cache"]) == 0
    text = out.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "author_id,year,source_pub,dominant,weights,origin_ambiguous"
    assert "a1,2005,p1,CHN,CHN:1.0,0" in text
    manifest = json.loads((tmp_path / "tl.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "timelines"
    assert manifest["version"]


def test_moves_output(small_corpus, tmp_path):
    out = tmp_path / "mv"
    assert run(["moves", str(small_corpus), "-o", str(out), "--no-cache"]) == 0
    moves = (out / "moves.csv").read_text(encoding="utf-8").splitlines()
    assert moves[0] == "author_id,from,to,year"
    assert "a1,CHN,USA,2007" in moves
    assert "a1,USA,CHN,2014" in moves
    states = (out / "states.csv").read_text(encoding="utf-8")
    assert "a1,2014,\"ReturneeResident(CHN,USA)\",2014" in states
    assert (out / "manifest.json").exists()


def test_stocks_output(small_corpus, tmp_path):
    out = tmp_path / "stocks.csv"
    assert run([
        "stocks", str(small_corpus), "-o", str(out), "--no-cache", "--end-year", "2016",
    ]) == 0
    body = out.read_text(encoding="utf-8")
    assert body.splitlines()[0] == "class,year,preceding,new_movement,total"
    assert "\"Overseas(CHN,USA)\",2007,0,1,1" in body


def test_indicators_and_report(small_corpus, tmp_path):
    out = tmp_path / "ind"
    assert run(["indicators", str(small_corpus), "-o", str(out), "--no-cache"]) == 0
    for name in ("pp10.csv", "shares.csv", "intl.csv", "class_intl.csv",
                 "direction.csv", "stocks.csv", "ratio.csv", "manifest.json"):
        assert (out / name).exists(), name
    assert run(["report", str(out)]) == 0
    report = out / "report"
    assert (report / "summary.txt").exists()
    assert list(report.glob("*.svg"))


def test_metric_selection(small_corpus, tmp_path):
    out = tmp_path / "ind2"
    assert run(["indicators", str(small_corpus), "-o", str(out), "--no-cache",
                "--metrics", "pp10"]) == 0
    assert (out / "pp10.csv").exists()
    assert not (out / "shares.csv").exists()


def test_unknown_metric_fails(small_corpus, tmp_path):
    assert run(["indicators", str(small_corpus), "-o", str(tmp_path / "x"),
                "--no-cache", "--metrics", "bogus"]) == 1


def test_run_config_file_and_flag_precedence(small_corpus, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("home = CHN\ngrace_years = 1\n# comment\nmetrics = stocks\n")
    out = tmp_path / "ind3"
    assert run(["indicators", str(small_corpus), "-o", str(out),
                "--no-cache", "--config", str(cfg), "--metrics", "pp10"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["grace_years"] == 1
    assert manifest["config"]["metrics"] == ["pp10"]  # flag wins over file


def test_synth_roundtrip_and_determinism(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    for target in (a, b):
        assert run(["synth", "--seed", "3", "--n-authors", "40",
                    "-o", str(target), "--truth", str(target.with_suffix(".truth"))]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".truth").read_bytes() == b.with_suffix(".truth").read_bytes()
    assert run(["validate", str(a)]) == 0


def test_cache_hit_observable_in_manifest(small_corpus, tmp_path):
    cache = tmp_path / "cache"
    out1 = tmp_path / "m1"
    out2 = tmp_path / "m2"
    assert run(["moves", str(small_corpus), "-o", str(out1), "--cache-dir", str(cache)]) == 0
    m1 = json.loads((out1 / "manifest.json").read_text())
    stages1 = {s["stage"]: s["cache"] for s in m1["stages"]}
    assert stages1["timelines"] == "miss"
    assert stages1["states"] == "miss"
    assert run(["moves", str(small_corpus), "-o", str(out2), "--cache-dir", str(cache)]) == 0
    m2 = json.loads((out2 / "manifest.json").read_text())
    stages2 = {s["stage"]: s["cache"] for s in m2["stages"]}
    assert stages2["timelines"] == "hit"
    assert stages2["states"] == "hit"
    assert data_files(out1) == data_files(out2)


def test_stocks_cache_skips_parse(small_corpus, tmp_path):
    cache = tmp_path / "cache"
    cold = tmp_path / "cold.csv"
    warm = tmp_path / "warm.csv"
    assert run(["stocks", str(small_corpus), "-o", str(cold), "--cache-dir", str(cache),
                "--end-year", "2016"]) == 0
    assert run(["stocks", str(small_corpus), "-o", str(warm), "--cache-dir", str(cache),
                "--end-year", "2016"]) == 0
    assert cold.read_bytes() == warm.read_bytes()
    manifest = json.loads((tmp_path / "warm.csv.manifest.json").read_text())
    stages = {s["stage"]: s["cache"] for s in manifest["stages"]}
    assert stages == {"stocks": "hit"}  # no parse, no timeline rebuild


def test_cache_miss_after_one_byte_edit(small_corpus, tmp_path):
    cache = tmp_path / "cache"
    out1 = tmp_path / "m1"
    assert run(["moves", str(small_corpus), "-o", str(out1), "--cache-dir", str(cache)]) == 0
    # one-byte change: different citation count
    body = small_corpus.read_text(encoding="utf-8").replace('"cites": 3', '"cites": 4')
    small_corpus.write_text(body, encoding="utf-8")
    out2 = tmp_path / "m2"
    assert run(["moves", str(small_corpus), "-o", str(out2), "--cache-dir", str(cache)]) == 0
    m2 = json.loads((out2 / "manifest.json").read_text())
    stages2 = {s["stage"]: s["cache"] for s in m2["stages"]}
    assert stages2["timelines"] == "miss"


def test_corrupt_cache_rebuilt(small_corpus, tmp_path, capsys):
    cache = tmp_path / "cache"
    cold = tmp_path / "cold"
    assert run(["moves", str(small_corpus), "-o", str(cold), "--cache-dir", str(cache)]) == 0
    # truncate every cache table
    for entry in cache.glob("*.csv"):
        entry.write_bytes(entry.read_bytes()[: len(entry.read_bytes()) // 2])
    warm = tmp_path / "warm"
    assert run(["moves", str(small_corpus), "-o", str(warm), "--cache-dir", str(cache)]) == 0
    err = capsys.readouterr().err
    assert "discarding corrupt cache entry" in err
    assert data_files(cold) == data_files(warm)


def test_pipeline_determinism_under_shuffle_and_jobs(tmp_path):
    rng = random.Random(77)
    records = []
    from conftest import random_records

    records = random_records(rng, 150)
    base = tmp_path / "in.jsonl"
    write_corpus(base, records)
    shuffled = list(records)
    rng.shuffle(shuffled)
    shuf = tmp_path / "shuf.jsonl"
    write_corpus(shuf, shuffled)

    outs = []
    for i, (src, jobs) in enumerate([(base, 1), (base, 2), (shuf, 1), (shuf, 3)]):
        out = tmp_path / f"run{i}"
        assert run(["indicators", str(src), "-o", str(out), "--no-cache",
                    "--jobs", str(jobs)]) == 0
        outs.append(data_files(out))
    assert outs[0] == outs[1] == outs[2] == outs[3]


def test_version_flag(capsys):
    assert run(["--version"]) == 0
    assert "careertrace" in capsys.readouterr().out


def test_moves_origin_table(small_corpus, tmp_path):
    out = tmp_path / "mv"
    assert run(["moves", str(small_corpus), "-o", str(out), "--no-cache"]) == 0
    body = (out / "origins.csv").read_text(encoding="utf-8").splitlines()
    assert body[0] == "author_id,origin,origin_ambiguous"
    assert "a1,CHN,0" in body
    assert "a3,USA,0" in body


def test_tie_rule_config(tmp_path):
    # a 50/50 year after a USA year: hysteresis keeps USA, label_order picks CHN
    records = [
        rec("p1", 2005, [("a1", ["USA"])]),
        rec("p2", 2006, [("a1", ["CHN", "USA"])]),
    ]
    src = tmp_path / "c.jsonl"
    write_corpus(src, records)
    out_h = tmp_path / "h.csv"
    out_l = tmp_path / "l.csv"
    assert run(["timelines", str(src), "-o", str(out_h), "--no-cache"]) == 0
    assert run(["timelines", str(src), "-o", str(out_l), "--no-cache",
                "--tie-rule", "label_order"]) == 0
    assert "a1,2006,p2,USA," in out_h.read_text()
    assert "a1,2006,p2,CHN," in out_l.read_text()


def test_validate_with_custom_scheme(tmp_path):
    scheme_path = tmp_path / "two_region.json"
    scheme_path.write_text(json.dumps({
        "regions": {"ASIA": ["CHN", "JPN"], "WEST": ["USA", "DEU"]},
        "label_order": ["ASIA", "WEST", "OTHER"],
    }))
    corpus = tmp_path / "c.jsonl"
    write_corpus(corpus, [rec("p0", 2005, [("a1", ["JPN"])])])
    assert run(["validate", str(corpus), "--scheme", str(scheme_path)]) == 0
    out = tmp_path / "tl.csv"
    assert run(["timelines", str(corpus), "-o", str(out), "--no-cache",
                "--scheme", str(scheme_path)]) == 0
    assert "a1,2005,p0,ASIA,ASIA:1.0,0" in out.read_text()


def test_bad_scheme_file_exit_one(tmp_path):
    scheme_path = tmp_path / "bad.json"
    scheme_path.write_text('{"regions": {"A": ["CHN"], "B": ["CHN"]}, "label_order": ["A","B","OTHER"]}')
    corpus = tmp_path / "c.jsonl"
    write_corpus(corpus, [rec("p0", 2005, [("a1", ["CHN"])])])
    assert run(["validate", str(corpus), "--scheme", str(scheme_path)]) == 1


def test_manifest_rerun_identical_except_timestamp(small_corpus, tmp_path):
    outs = []
    for name in ("m1", "m2"):
        out = tmp_path / name
        assert run(["moves", str(small_corpus), "-o", str(out), "--no-cache"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        manifest.pop("timestamp")
        outs.append(manifest)
    assert outs[0] == outs[1]
