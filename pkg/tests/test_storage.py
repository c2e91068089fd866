import os

import pytest

from phrasedex.config import IngestConfig
from phrasedex.errors import ConfigError, DecodeError, OrderViolation, StoreClosed
from phrasedex.storage import KeyStore, ReadStats, SegmentReader, SegmentWriter, StreamDescriptor
from phrasedex.storage.docstore import DocStore, write_docstore
from phrasedex.storage.header import IndexHeader
from phrasedex.storage.streams import EMPTY_DESCRIPTOR, segment_files


def test_append_and_read_stream(tmp_path):
    with SegmentWriter(tmp_path) as w:
        d = w.append_stream([(0, 3), (0, 7), (2, 1)])
    assert d.count == 3
    stats = ReadStats()
    reader = SegmentReader(tmp_path)
    assert [tuple(p) for p in reader.read_stream(d, stats)] == [(0, 3), (0, 7), (2, 1)]
    assert stats.postings_read == 3
    assert stats.bytes_read == d.byte_len


def test_empty_stream(tmp_path):
    with SegmentWriter(tmp_path) as w:
        d = w.append_stream([])
    assert d.count == 0 and d.byte_len == 0 and d == EMPTY_DESCRIPTOR
    stats = ReadStats()
    assert list(SegmentReader(tmp_path).read_stream(d, stats)) == []
    assert stats.postings_read == 0


def test_unsorted_stream_rejected(tmp_path):
    with SegmentWriter(tmp_path) as w, pytest.raises(OrderViolation):
        w.append_stream([(0, 7), (0, 3)])


def test_truncated_segment_is_a_decode_error(tmp_path):
    with SegmentWriter(tmp_path) as w:
        d = w.append_stream([(0, 3), (0, 7), (2, 1)])
    seg = segment_files(tmp_path)[0]
    os.truncate(seg, d.byte_len - 1)
    with pytest.raises(DecodeError):
        list(SegmentReader(tmp_path).read_stream(d))


def test_segments_roll_at_cap_and_streams_never_straddle(tmp_path):
    with SegmentWriter(tmp_path, cap=16) as w:
        ds = [w.append_stream([(i, j) for j in range(5)]) for i in range(6)]
    assert len(segment_files(tmp_path)) > 1
    reader = SegmentReader(tmp_path)
    for i, d in enumerate(ds):
        assert d.offset + d.byte_len <= max(16, d.byte_len)
        assert [tuple(p) for p in reader.read_stream(d)] == [(i, j) for j in range(5)]


def test_reader_after_close(tmp_path):
    with SegmentWriter(tmp_path) as w:
        d = w.append_stream([(0, 1)])
    reader = SegmentReader(tmp_path)
    reader.close()
    with pytest.raises(StoreClosed):
        reader.read_bytes(d)


def test_read_stats_merge_and_reset():
    a, b = ReadStats(), ReadStats()
    a.add("s1", 3)
    b.add("s1", 2)
    b.add("pair", 4)
    b.keys_probed = 1
    a.merge(b)
    assert a.postings_read == 9 and a.by_kind == {"s1": 5, "pair": 4} and a.keys_probed == 1
    a.reset()
    assert a.postings_read == 0 and not a.by_kind


def test_keystore_map_laws(tmp_path):
    ks = KeyStore()
    d1, d2 = StreamDescriptor(0, 0, 3, 1), StreamDescriptor(0, 3, 4, 2)
    ks.put(b"\x01k", d1)
    assert ks.get(b"\x01k") == d1
    assert ks.get(b"\x01unseen") is None
    ks.put(b"\x01k", d2)
    assert ks.get(b"\x01k") == d2
    ks.put(b"\x02a", d1)
    ks.put(b"\x01a", d1)
    assert ks.keys() == [b"\x01a", b"\x01k", b"\x02a"]
    assert [k for k, _ in ks.items(b"\x01")] == [b"\x01a", b"\x01k"]
    ks.save(tmp_path / "keys")
    again = KeyStore.load(tmp_path / "keys")
    assert list(again.items()) == list(ks.items())
    ks.close()
    with pytest.raises(StoreClosed):
        ks.get(b"\x01k")


def test_keystore_rejects_garbage(tmp_path):
    (tmp_path / "keys").write_bytes(b"nope")
    with pytest.raises(DecodeError):
        KeyStore.load(tmp_path / "keys")


def test_header_round_trip(tmp_path):
    cfg = IngestConfig(key_codec="varint", stop_size=12, top_tier_fraction=0.25, build_baseline=False)
    h = IndexHeader(cfg, 42, [1, 2, 3, 3])
    h.save(tmp_path / "h")
    again = IndexHeader.load(tmp_path / "h")
    assert again == h


def test_header_rejects_bad_magic():
    with pytest.raises(DecodeError):
        IndexHeader.from_bytes(b"XXXX" + bytes(60))


def test_docstore_round_trip(tmp_path):
    docs = [["a", "b"], [], ["c"]]
    write_docstore(tmp_path / "d", docs)
    store = DocStore(tmp_path / "d")
    assert len(store) == 3
    assert [store.tokens(i) for i in range(3)] == docs
    with pytest.raises(IndexError):
        store.tokens(3)


class TestConfig:
    def test_text_round_trip(self):
        cfg = IngestConfig(stop_size=5, key_codec="varint", build_baseline=False, top_tier_fraction=0.5)
        assert IngestConfig.from_text(cfg.to_text()) == cfg

    def test_defaults(self):
        cfg = IngestConfig()
        assert (cfg.min_length, cfg.max_length) == (2, 5)
        assert (cfg.max_distance_frequent, cfg.max_distance_ordinary) == (5, 7)
        assert (cfg.processing_distance_top, cfg.processing_distance_rest) == (7, 5)

    @pytest.mark.parametrize("text", ["min_length=1", "max_length=1", "bogus=3", "min_length", "build_baseline=maybe",
                                      "ordinary_distance=1", "key_codec=lz4"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            IngestConfig.from_text(text)

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("# build\n\nstop_size = 3\n", encoding="utf-8")
        assert IngestConfig.from_file(path).stop_size == 3
