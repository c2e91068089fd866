import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from phrasedex.errors import EmptyQuery
from phrasedex.estimator import PhraseSearchIndex

DOCS = [
    "not only that but the rivers define boundaries",
    "the fragrant red rose",
    "reports about gallic war",
    "rivers define boundaries and rivers define boundaries",
]


def small(**kw):
    return PhraseSearchIndex(stop_size=5, frequent_size=5, **kw)


def test_params_round_trip():
    est = small(fallback=False)
    params = est.get_params()
    assert params["stop_size"] == 5 and params["fallback"] is False
    est.set_params(max_length=4)
    assert est.get_params()["max_length"] == 4
    assert est.ingest_config().max_length == 4


def test_clone_is_unfitted():
    est = small().fit(DOCS)
    c = clone(est)
    assert c.get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        c.predict(["rivers"])


def test_not_fitted():
    with pytest.raises(NotFittedError):
        small().search("rivers")
    with pytest.raises(NotFittedError):
        small().transform(["rivers"])


def test_fit_predict_transform():
    est = small().fit(DOCS)
    assert est.n_documents_ == 4
    pred = est.predict(["rivers define boundaries", "fragrant rose", "zzz"])
    assert [p.tolist() for p in pred] == [[0, 3], [1], []]
    counts = est.transform(["rivers define boundaries"])
    assert counts.shape == (1, 4)
    assert counts[0].tolist() == [1, 0, 0, 2]
    assert est.transform([["gallic", "war"]])[0].tolist() == [0, 0, 1, 0]


def test_search_with_stats():
    est = small().fit(DOCS)
    found, stats = est.search_with_stats("fragrant red rose")
    assert [m.doc for m in found] == [1]
    assert stats.postings_read > 0


def test_max_results():
    est = small(max_results=1).fit(DOCS)
    assert len(est.search("rivers define boundaries")) == 1


def test_token_list_documents(tmp_path):
    est = small(index_dir=tmp_path / "ix").fit([d.split() for d in DOCS])
    assert (tmp_path / "ix" / "manifest.tsv").exists()
    assert est.predict(["gallic war"])[0].tolist() == [2]


def test_refit_releases_temporary_index():
    est = small().fit(DOCS)
    first = est.index_.path
    est.fit(DOCS[:2])
    assert not first.exists()
    assert est.n_documents_ == 2


@pytest.mark.parametrize("bad", ["one string", {"a": "b"}, 5, [1, 2], b"bytes"])
def test_rejects_bad_documents(bad):
    with pytest.raises(TypeError):
        small().fit(bad)


def test_rejects_bad_queries():
    est = small().fit(DOCS)
    with pytest.raises(EmptyQuery):
        est.search(" ... ")
    with pytest.raises(TypeError):
        est.predict("rivers")
    with pytest.raises(TypeError):
        est.search(42)


@pytest.mark.parametrize("value", [0, -1, 1.5, True])
def test_rejects_bad_max_results(value):
    with pytest.raises(ValueError):
        small(max_results=value).fit(DOCS)


def test_bad_config_rejected():
    from phrasedex.errors import ConfigError

    with pytest.raises(ConfigError):
        small(min_length=9).fit(DOCS)


def test_predict_dtype():
    est = small().fit(DOCS)
    assert est.predict(["gallic war"])[0].dtype == np.int64
