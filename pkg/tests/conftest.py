from pathlib import Path

import pytest

from dialogue_acts.corpus import default_schema, parse_corpus
from dialogue_acts.features import (default_cue_lexicon, default_pos_tagger,
                                    default_verb_lexicon)

DATA_DIR = Path(__file__).parent.parent / "src" / "dialogue_acts" / "data"


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def sample_corpus(schema):
    return parse_corpus(DATA_DIR / "sample_corpus.jsonl", schema)


@pytest.fixture(scope="session")
def cues():
    return default_cue_lexicon()


@pytest.fixture(scope="session")
def verbs():
    return default_verb_lexicon()


@pytest.fixture(scope="session")
def tagger():
    return default_pos_tagger()
