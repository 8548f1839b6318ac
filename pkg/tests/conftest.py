from pathlib import Path

import pytest

from threatlens.corpus import build_corpus, parse_capec, parse_cwe, parse_nvd_feed
from threatlens.graphs import parse_spec_graphml, parse_topology_graphml
from threatlens.matching import match_system

FIXTURES = Path(__file__).parent / "fixtures"
UAS = FIXTURES / "uas"


@pytest.fixture(scope="session")
def uas_topology_text() -> str:
    return (UAS / "uas.graphml").read_text()


@pytest.fixture(scope="session")
def uas_spec_text() -> str:
    return (UAS / "uas-spec.graphml").read_text()


@pytest.fixture(scope="session")
def uas_topology(uas_topology_text):
    return parse_topology_graphml(uas_topology_text)


@pytest.fixture(scope="session")
def uas_spec(uas_spec_text):
    return parse_spec_graphml(uas_spec_text)


@pytest.fixture(scope="session")
def uas_corpus():
    entries = []
    entries += parse_capec((UAS / "capec.xml").read_text())
    entries += parse_cwe((UAS / "cwe.xml").read_text())
    entries += parse_nvd_feed((UAS / "nvd.json").read_text())
    return build_corpus(entries)


@pytest.fixture(scope="session")
def uas_matchmap(uas_topology, uas_corpus):
    return match_system(uas_topology, uas_corpus)


RADIO_MODULES = (
    "Control Radio Module",
    "Imagery Radio Module",
    "Telemetry Radio Module",
)
