import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from textbench import AnnotatorConfig, RawDocument, build  # noqa: E402


@pytest.fixture(scope="session")
def cat_docs():
    """Three docs each containing body term 'cat' exactly once."""
    return [
        RawDocument("c0", ["earn"], {"body": "cat on the mat"}),
        RawDocument("c1", ["earn", "acq"], {"body": "a cat sat"}),
        RawDocument("c2", [], {"body": "the cat slept"}),
    ]


@pytest.fixture(scope="session")
def cat_index(cat_docs, tmp_path_factory):
    return build(iter(cat_docs), AnnotatorConfig(),
                 tmp_path_factory.mktemp("catidx"))
