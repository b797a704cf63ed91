from __future__ import annotations

import pytest

from corpus import build_eval_corpus


@pytest.fixture(scope="session")
def eval_corpus(tmp_path_factory):
    """Dataset/fixture/exclusion files for the constructed 48-rule evaluation."""

    directory = tmp_path_factory.mktemp("corpus")
    return build_eval_corpus(directory)
