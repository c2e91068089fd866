from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import build, build_small
from phrasedex import IngestConfig, ReadStats
from phrasedex.errors import SequenceError, UnsupportedQuery
from phrasedex.oracle import analyze_corpus, brute_stop_phrases
from phrasedex.stop_phrase_index import StopKeyCodec, StopPhraseQueue
from phrasedex.storage.huffman import HuffmanTable

IDENTITY = {i: i for i in range(100)}


def _run(items, min_length=2, max_length=5, cap=64):
    q = StopPhraseQueue(min_length, max_length, IDENTITY, cap=cap)
    out = []
    for pos, forms in enumerate(items):
        out += q.push(0, pos, forms)
    out += q.flush()
    return out


def test_ten_stop_tokens_window_counts():
    lengths = Counter(len(k) for k, _ in _run([[7]] * 10))
    assert lengths == {2: 9, 3: 8, 4: 7, 5: 6}


def test_below_min_length_emits_nothing():
    assert _run([[1]]) == []


def test_exactly_min_length_emits_once():
    assert _run([[1], [2]]) == [((1, 2), (0, 0))]


def test_flush_of_three_items():
    q = StopPhraseQueue(2, 5, IDENTITY)
    for pos in range(3):
        assert q.push(0, pos, [pos]) == []
    out = q.flush()
    assert sorted((p.pos, len(k)) for k, p in out) == [(0, 2), (0, 3), (1, 2)]


def test_flush_of_empty_queue():
    assert StopPhraseQueue(2, 5, IDENTITY).flush() == []


def test_five_single_form_items_give_ten():
    assert len(_run([[i] for i in range(5)])) == 10


def test_emit_front_single_forms():
    q = StopPhraseQueue(2, 5, IDENTITY)
    for pos, f in enumerate([3, 1, 2]):
        q.push(0, 10 + pos, [f])
    assert sorted(q.emit_front()) == [((1, 2, 3), (0, 10)), ((1, 3), (0, 10))]


def test_emit_front_cartesian_product():
    q = StopPhraseQueue(2, 2, IDENTITY)
    q.push(0, 0, [0, 1])
    q.push(0, 1, [2])
    assert sorted(q.emit_front()) == [((0, 2), (0, 0)), ((1, 2), (0, 0))]


def test_multiset_key_keeps_repeats():
    assert _run([[4], [4]]) == [((4, 4), (0, 0))]


def test_gap_without_flush_is_a_sequence_error():
    q = StopPhraseQueue(2, 5, IDENTITY)
    q.push(0, 0, [1])
    with pytest.raises(SequenceError):
        q.push(0, 2, [1])


def test_cap_truncates_fan_out(caplog):
    out = _run([[0, 1, 2, 3]] * 4, min_length=4, max_length=4, cap=8)
    assert len(out) == 8
    assert "exceeds cap" in caplog.text


@given(st.lists(st.integers(1, 12), min_size=1, max_size=6))
def test_window_count_identity_per_run(runs):
    q = StopPhraseQueue(2, 5, IDENTITY)
    out = []
    pos = 0
    for s in runs:
        for _ in range(s):
            out += q.push(0, pos, [5])
            pos += 1
        out += q.flush()
        pos += 1  # a non-stop token separates runs
    got = Counter(len(k) for k, _ in out)
    for length in range(2, 6):
        assert got[length] == sum(max(0, s - length + 1) for s in runs)


@given(st.lists(st.integers(0, 40), max_size=12))
def test_key_codecs_round_trip(ranks):
    ranks = sorted(ranks)
    table = HuffmanTable.from_counts({i: 41 - i for i in range(41)}, 41)
    for codec in (StopKeyCodec(table), StopKeyCodec(None)):
        raw = codec.encode(ranks)
        assert raw[0] == 0x01 and codec.decode(raw) == tuple(ranks)


@pytest.fixture()
def phrases(tmp_path):
    docs = ["gallic not only that but the river", "but that only not gallic", "not only gallic that but",
            "which it would be if walk"]
    return build_small(tmp_path / "ix", docs)


def _forms(index, text):
    return [index.lexicon.analyze(w) for w in text.split()]


def test_lookup_any_order(phrases):
    got = list(phrases.stop_phrases.lookup_phrase(_forms(phrases, "not only that but")))
    assert [tuple(p) for p in got] == [(0, 1), (1, 0)]


def test_lookup_max_length_is_one_key(phrases):
    stats = ReadStats()
    got = list(phrases.stop_phrases.lookup_phrase(_forms(phrases, "which it would be if"), stats))
    assert [tuple(p) for p in got] == [(3, 0)]
    assert stats.keys_probed == 1 and stats.by_kind == {"phrase": 1}


def test_lookup_never_adjacent(phrases):
    assert list(phrases.stop_phrases.lookup_phrase(_forms(phrases, "which the"))) == []


def test_lookup_length_out_of_range(phrases):
    with pytest.raises(UnsupportedQuery):
        phrases.stop_phrases.lookup_arrays(_forms(phrases, "not"))
    with pytest.raises(UnsupportedQuery):
        phrases.stop_phrases.lookup_arrays(_forms(phrases, "not only that but the which"))


@pytest.mark.parametrize("codec", ["huffman", "varint"])
@settings(max_examples=20, deadline=None)
@given(st.lists(st.lists(st.sampled_from(["the", "of", "a", "and", "rose", "walk", "for", "not"]), max_size=40),
                max_size=5))
def test_index_matches_window_scan(tmp_path_factory, codec, docs):
    # "rose" carries a frequent and, here, a stop form
    index = build(tmp_path_factory.mktemp("sp") / "ix", [" ".join(d) for d in docs],
                  IngestConfig(key_codec=codec, stop_size=5, frequent_size=2),
                  lemma_table={"the": ["the", "rose"]})
    want = brute_stop_phrases(analyze_corpus(docs, index.lexicon), index.lexicon, 2, 5)
    got = {k: {tuple(p) for p in ps} for k, ps in index.stop_phrases.entries()}
    assert got == want
    index.close()
