"""Ingest the CAPEC, CWE, and NVD datasets into one indexed corpus.

Attack patterns relate to weakness classes; vulnerabilities point at the
weakness classes they instantiate. Those cross-dataset links are what later
lets 100k+ vulnerabilities be abstracted to weakness-class scale.
"""

import tempfile
from pathlib import Path

from threatlens import build_corpus, load_corpus, parse_capec, parse_cwe, parse_nvd_feed, save_corpus

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

diagnostics = []
entries = (
    parse_capec((FIXTURES / "capec.xml").read_text(), diagnostics)
    + parse_cwe((FIXTURES / "cwe.xml").read_text(), diagnostics)
    + parse_nvd_feed((FIXTURES / "nvd.json").read_text(), diagnostics)
)
corpus = build_corpus(entries, diagnostics)

print("entries per source:", corpus.by_source)
for diagnostic in diagnostics:
    print(" ", diagnostic)

# the text index drives attribute matching
print("entries mentioning 'zigbee':", sorted(corpus.text_index["zigbee"]))

# relations are closed symmetrically on build
weakness = corpus.entry("CWE-9118")
print("CWE-9118 relations:", weakness.relations)

# snapshots persist as line-delimited JSON with a version header
with tempfile.TemporaryDirectory() as tmp:
    snapshot = Path(tmp) / "corpus.jsonl"
    save_corpus(corpus, snapshot)
    print("snapshot round-trip ok:", load_corpus(snapshot).by_source == corpus.by_source)
