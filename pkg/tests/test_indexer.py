import pytest

from helpers import build, build_small
from phrasedex import IngestConfig, ReadStats, ingest, open_index
from phrasedex.indexer import CorpusManifest, DocumentEntry, read_corpus, verify
from phrasedex.planner import QueryPlanner

GAUL = "gaul is divided into three parts and the whole of gaul is taken as a thing"
SMALL = [GAUL, "not only that but the rivers define boundaries", "the fragrant red rose", "reports about gallic war"]


def test_empty_corpus_gives_valid_index(tmp_path):
    index = build(tmp_path / "ix", [])
    assert index.n_docs == 0
    assert QueryPlanner(index).search("rivers define") == []
    assert verify(tmp_path / "ix", []).passed
    index.close()


def test_queries_from_gaul_document_are_found(tmp_path):
    index = build_small(tmp_path / "ix", SMALL)
    planner = QueryPlanner(index)
    tokens = GAUL.split()
    for n in (3, 4, 5):
        for i in range(len(tokens) - n + 1):
            found = planner.search(tokens[i:i + n])
            assert any(m.doc == 0 for m in found), tokens[i:i + n]
    index.close()


def test_single_gaul_document(tmp_path):
    index = build_small(tmp_path / "ix", ["Gaul, taken as a whole, is divided into three parts"])
    planner = QueryPlanner(index)
    tokens = index.documents.tokens(0)
    assert tokens[:3] == ["gaul", "taken", "as"]
    for n in (2, 3, 4, 5):
        for i in range(len(tokens) - n + 1):
            assert [m.doc for m in planner.search(tokens[i:i + n])] == [0], tokens[i:i + n]
    index.close()


def test_duplicate_documents_double_postings(tmp_path):
    one = build_small(tmp_path / "one", [GAUL])
    two = build_small(tmp_path / "two", [GAUL, GAUL])
    for query in ("gaul divided three", "the whole of", "taken as a thing"):
        s1, s2 = ReadStats(), ReadStats()
        QueryPlanner(one).search(query, s1)
        QueryPlanner(two).search(query, s2)
        assert s2.postings_read == 2 * s1.postings_read
    lex = one.lexicon
    for f in range(len(lex)):
        assert two.baseline.list_length(f) == 2 * one.baseline.list_length(f)
    one.close()
    two.close()


def test_read_corpus_directory(tmp_path):
    (tmp_path / "b").mkdir()
    (tmp_path / "b" / "x.txt").write_text("rivers define", encoding="utf-8")
    (tmp_path / "a.txt").write_text("the rose", encoding="utf-8")
    (tmp_path / "bad.txt").write_bytes(b"\xff\xfe\xfa rivers")
    docs, skipped = read_corpus(tmp_path)
    assert docs == [("a.txt", "the rose"), ("b/x.txt", "rivers define")]
    assert skipped == [("bad.txt", "UnicodeDecodeError")]


def test_unreadable_file_is_noted_in_manifest(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    (src / "ok.txt").write_text("rivers define boundaries", encoding="utf-8")
    (src / "bad.txt").write_bytes(b"\xff\xff")
    ingest(src, tmp_path / "ix", created="test")
    m = CorpusManifest.load(tmp_path / "ix")
    assert [d.source for d in m.documents] == ["ok.txt"]
    assert m.skipped == [("bad.txt", "UnicodeDecodeError")]


def test_read_corpus_line_file(tmp_path):
    f = tmp_path / "corpus.txt"
    f.write_text("rivers define\n\nthe rose\n", encoding="utf-8")
    docs, skipped = read_corpus(f)
    assert docs == [("corpus.txt:1", "rivers define"), ("corpus.txt:2", ""), ("corpus.txt:3", "the rose")]
    assert skipped == []


def test_read_corpus_iterable():
    docs, _ = read_corpus(["a b", ("named", "c d")])
    assert docs == [("doc0", "a b"), ("named", "c d")]


def test_non_empty_output_dir_rejected(tmp_path):
    out = tmp_path / "ix"
    out.mkdir()
    (out / "keep.txt").write_text("x")
    with pytest.raises(FileExistsError):
        ingest(SMALL, out)
    assert (out / "keep.txt").exists()


def test_failed_build_leaves_nothing(tmp_path, monkeypatch):
    import phrasedex.indexer as indexer

    def boom(*args, **kwargs):
        raise RuntimeError("disk full")

    monkeypatch.setattr(indexer.CorpusManifest, "to_text", boom)
    with pytest.raises(RuntimeError):
        ingest(SMALL, tmp_path / "ix")
    assert not (tmp_path / "ix").exists()


def test_manifest_round_trip():
    m = CorpusManifest([DocumentEntry(0, "a.txt", 12, 3), DocumentEntry(1, "b c.txt", 0, 0)],
                       [("bad.txt", "UnicodeDecodeError")], "2026-01-01T00:00:00")
    back = CorpusManifest.from_text(m.to_text())
    assert back == m
    assert back.total_tokens == 12 and back.stop_only_tokens == 3


def test_manifest_counts(tmp_path):
    build_small(tmp_path / "ix", ["the of a rivers", "the the"]).close()
    m = CorpusManifest.load(tmp_path / "ix")
    assert [(d.tokens, d.stop_only) for d in m.documents] == [(4, 3), (2, 2)]


def test_verify_passes_then_fails_after_corruption(tmp_path):
    docs = SMALL * 3
    build_small(tmp_path / "ix", docs, IngestConfig(key_codec="varint")).close()
    report = verify(tmp_path / "ix", docs, oracle_queries=50)
    assert report.passed, report.to_text()
    assert len(report.checks) == 9
    seg = tmp_path / "ix" / "segments" / "000.seg"
    data = bytearray(seg.read_bytes())
    data[len(data) // 2] ^= 0xFF
    seg.write_bytes(bytes(data))
    report = verify(tmp_path / "ix", docs, oracle_queries=50)
    assert not report.passed
    assert "verification FAILED" in report.to_text()


def test_verify_against_wrong_corpus(tmp_path):
    build_small(tmp_path / "ix", SMALL).close()
    report = verify(tmp_path / "ix", SMALL[:2], oracle_queries=10)
    assert not report["documents"].passed


def test_verify_missing_index(tmp_path):
    report = verify(tmp_path / "nothing", SMALL)
    assert not report.passed and report.checks[0].name == "open"


def test_open_missing_index(tmp_path):
    with pytest.raises(FileNotFoundError):
        open_index(tmp_path / "nothing")
