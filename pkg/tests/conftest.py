import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phrasedex import ingest, open_index  # noqa: E402
from phrasedex.oracle import ScanOracle  # noqa: E402
from phrasedex.synthetic import desk_config, zipf_corpus  # noqa: E402


@pytest.fixture(scope="session")
def desk_corpus():
    return zipf_corpus(n_docs=500, doc_length=400, seed=1)


@pytest.fixture(scope="session")
def desk_index_dir(desk_corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("desk") / "index"
    ingest(desk_corpus.texts(), out, desk_config(), lemma_table=desk_corpus.lemma_table, created="test")
    return out


@pytest.fixture(scope="session")
def desk_index(desk_index_dir):
    index = open_index(desk_index_dir)
    yield index
    index.close()


@pytest.fixture(scope="session")
def desk_oracle(desk_corpus, desk_index):
    return ScanOracle(desk_corpus.documents, desk_index.lexicon, desk_index.config)
