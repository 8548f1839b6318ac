"""Full pipeline through a session: bundle, commands, replayable log, report.

The same flow is scriptable from the shell:

    threatlens ingest --capec capec.xml --cwe cwe.xml --nvd nvd.json -o corpus.jsonl
    threatlens bundle --topology uas.graphml --spec uas-spec.graphml \\
        --corpus corpus.jsonl --seed 7 -o uas.zip
    threatlens report --bundle uas.zip --format markdown
    threatlens serve --bundle uas.zip        # session API for the dashboard
"""

import tempfile
from pathlib import Path

from threatlens import build_corpus, parse_capec, parse_cwe, parse_nvd_feed, save_corpus
from threatlens.corpus import corpus_sha256
from threatlens.project import ProjectBundle, load_bundle
from threatlens.shell import load_project, run_report, save_session, select

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures" / "uas"

with tempfile.TemporaryDirectory() as tmp:
    snapshot = Path(tmp) / "corpus.jsonl"
    save_corpus(
        build_corpus(
            parse_capec((FIXTURES / "capec.xml").read_text())
            + parse_cwe((FIXTURES / "cwe.xml").read_text())
            + parse_nvd_feed((FIXTURES / "nvd.json").read_text())
        ),
        snapshot,
    )
    bundle = ProjectBundle(
        topology_doc=(FIXTURES / "uas.graphml").read_text(),
        spec_doc=(FIXTURES / "uas-spec.graphml").read_text(),
        corpus_path=str(snapshot),
        corpus_sha256=corpus_sha256(snapshot),
        layout_seed=7,
    )
    session = load_project(bundle)
    print("surface:", session.surface_snapshot()["node_ids"])

    # selections mirror across panes: picking the spec's component reference
    # also selects the topology node and filters the attack-vector pane
    select(session, "spec", "Imagery Radio Module")
    print("selection:", session.selection_snapshot()["selection"])
    print("filtered vectors:", sorted(session.filtered_av_ids()))

    session.apply_command({"command": "bucket_add", "id": "CVE-2020-21001"})
    select(session, "topology", "Primary Application Processor")

    saved = Path(tmp) / "uas.zip"
    save_session(session, saved)
    replayed = load_project(load_bundle(saved), saved)
    print("replay reproduces the session:", run_report(replayed) == run_report(session))

    print("\n" + run_report(session, "markdown"))
