from pathlib import Path

import pytest

from common.config import Settings
from data_setup import initialise_corpus

CORPUS_DIR = Path(__file__).resolve().parent.parent / "data" / "corpus"


@pytest.fixture(scope="session")
def settings():
    return Settings()


@pytest.fixture(scope="session")
def c1(settings):
    return initialise_corpus(CORPUS_DIR / "c1_nil_hecke.json", settings)


@pytest.fixture(scope="session")
def c2(settings):
    return initialise_corpus(CORPUS_DIR / "c2_two_vertex.json", settings)


@pytest.fixture(scope="session")
def c3(settings):
    return initialise_corpus(CORPUS_DIR / "c3_nonsymmetric.json", settings)


@pytest.fixture(scope="session")
def l1l2(c2, settings):
    from common.convolution import convolve

    return convolve(c2.module("L1"), c2.module("L2"), settings)
