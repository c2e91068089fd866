import pytest

from phrasedex.cli import main

LINES = [
    "not only that but the rivers define boundaries",
    "the fragrant red rose of the rivers",
    "but that only not the gallic war",
    "the the of of a a not only that but",
]


@pytest.fixture()
def corpus(tmp_path):
    f = tmp_path / "corpus.txt"
    f.write_text("\n".join(LINES) + "\n", encoding="utf-8")
    cfg = tmp_path / "build.cfg"
    cfg.write_text("# small vocabulary\nstop_size = 8\nfrequent_size = 6\n", encoding="utf-8")
    return f, cfg


@pytest.fixture()
def built(tmp_path, corpus, capsys):
    f, cfg = corpus
    out = tmp_path / "ix"
    assert main(["build", "--corpus", str(f), "--out", str(out), "--config", str(cfg)]) == 0
    capsys.readouterr()
    return out, f


def test_build(built):
    out, _ = built
    for name in ("lexicon.pxlx", "keys.pxkv", "header.pxhd", "basic.pxdt", "documents.pxds", "manifest.tsv"):
        assert (out / name).exists(), name
    assert (out / "segments" / "000.seg").exists()


def test_build_refuses_non_empty(built, capsys):
    out, f = built
    assert main(["build", "--corpus", str(f), "--out", str(out)]) == 2
    assert "must be empty" in capsys.readouterr().err


def test_search_stop_phrase(built, capsys):
    out, _ = built
    assert main(["search", "--index", str(out), "--query", "not only that but"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[:3] == ["0\t3\t0,1,2,3", "2\t3\t0,1,2,3", "3\t3\t6,7,8,9"]
    assert lines[-1].startswith("# matches=3 ")
    assert lines[-1].endswith("phrase=3")


def test_search_exact_order(built, capsys):
    out, _ = built
    main(["search", "--index", str(out), "--query", "not only that but", "--exact-order"])
    assert capsys.readouterr().out.splitlines()[:2] == ["0\t3\t0,1,2,3", "3\t3\t6,7,8,9"]


def test_search_single_stop_word(built, capsys):
    out, _ = built
    assert main(["search", "--index", str(out), "--query", "the"]) == 2
    assert "unsupported" in capsys.readouterr().err


def test_missing_index(tmp_path, capsys):
    assert main(["search", "--index", str(tmp_path / "none"), "--query", "rivers"]) == 2
    assert "usage" in capsys.readouterr().err


def test_missing_corpus(tmp_path, capsys):
    assert main(["build", "--corpus", str(tmp_path / "none"), "--out", str(tmp_path / "ix")]) == 2


def test_bad_config(tmp_path, corpus, capsys):
    f, cfg = corpus
    cfg.write_text("stop_size = lots\n", encoding="utf-8")
    assert main(["build", "--corpus", str(f), "--out", str(tmp_path / "ix2"), "--config", str(cfg)]) == 2


def test_stats(built, capsys):
    out, _ = built
    assert main(["stats", "--index", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("documents\t4\n")
    for name in ("stop_phrase", "expanded", "basic", "baseline", "total"):
        assert f"\n{name}\t" in text


def test_verify(built, capsys):
    out, f = built
    assert main(["verify", "--index", str(out), "--corpus", str(f), "--queries", "20"]) == 0
    assert "all checks passed" in capsys.readouterr().out


def test_verify_detects_corruption(built, capsys):
    out, f = built
    seg = out / "segments" / "000.seg"
    data = bytearray(seg.read_bytes())
    for i in range(0, len(data), 7):
        data[i] ^= 0x5A
    seg.write_bytes(bytes(data))
    assert main(["verify", "--index", str(out), "--corpus", str(f), "--queries", "20"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_bench_with_report(built, tmp_path, capsys):
    out, _ = built
    report = tmp_path / "bench.tsv"
    assert main(["bench", "--index", str(out), "--queries", "30", "--seed", "1", "--report", str(report)]) == 0
    assert "postings ratio" in capsys.readouterr().out
    rows = report.read_text().splitlines()
    assert rows[0].split("\t")[:4] == ["system", "length", "mode", "queries"]
    assert rows[1].startswith("additional\tall\tall\t30\t")
