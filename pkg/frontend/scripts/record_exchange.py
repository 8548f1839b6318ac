"""Record a scripted API exchange against the real session service.

The dashboard's contract tests replay this fixture: every response the UI
renders from must be byte-equal to what the backend actually served. Re-run
this script whenever the wire protocol changes:

    python3 frontend/scripts/record_exchange.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "src"))

from threatlens.corpus import (  # noqa: E402
    build_corpus, corpus_sha256, parse_capec, parse_cwe, parse_nvd_feed, save_corpus,
)
from threatlens.project import ProjectBundle, save_bundle  # noqa: E402
from threatlens.service import create_app  # noqa: E402

UAS = REPO / "tests" / "fixtures" / "uas"
OUT = REPO / "frontend" / "tests" / "fixtures" / "recorded-exchange.json"

TARGET = "Primary Application Processor"


def main() -> None:
    exchange = []
    with tempfile.TemporaryDirectory() as tmp:
        snapshot = Path(tmp) / "corpus.jsonl"
        save_corpus(
            build_corpus(
                parse_capec((UAS / "capec.xml").read_text())
                + parse_cwe((UAS / "cwe.xml").read_text())
                + parse_nvd_feed((UAS / "nvd.json").read_text())
            ),
            snapshot,
        )
        bundle_path = Path(tmp) / "uas.zip"
        save_bundle(
            ProjectBundle(
                topology_doc=(UAS / "uas.graphml").read_text(),
                spec_doc=(UAS / "uas-spec.graphml").read_text(),
                corpus_path=str(snapshot),
                corpus_sha256=corpus_sha256(snapshot),
                layout_seed=7,
            ),
            bundle_path,
        )

        client = TestClient(create_app())
        response = client.post("/projects", json={"bundle_path": str(bundle_path)})
        response.raise_for_status()
        sid = response.json()["session_id"]

        def record(method, path, body=None):
            if method == "GET":
                res = client.get(path)
            else:
                res = client.post(path, json=body)
            res.raise_for_status()
            exchange.append(
                {
                    "method": method,
                    "path": path.replace(sid, "SID"),
                    "body": body,
                    "response": res.json(),
                }
            )
            return res.json()

        base = f"/sessions/{sid}"
        for resource in (
            "topology", "spec", "av-graph", "surface", "bucket", "selection",
            "av-filter", "projection", "positions/topology", "positions/spec",
            "positions/av",
        ):
            record("GET", f"{base}/{resource}")
        record("GET", f"{base}/chains?target={TARGET.replace(' ', '%20')}")

        # linked selection: clicking the spec's component reference
        record("POST", f"{base}/commands",
               {"command": "select", "pane": "spec", "id": "Imagery Radio Module"})
        record("GET", f"{base}/selection")
        record("GET", f"{base}/av-filter")

        # curate the bucket and project it over the topology
        record("POST", f"{base}/commands", {"command": "bucket_add", "id": "CVE-2020-21001"})
        record("POST", f"{base}/commands", {"command": "bucket_add", "id": "CVE-2021-33001"})
        record("POST", f"{base}/commands",
               {"command": "project", "ids": ["CVE-2020-21001", "CVE-2021-33001"]})
        record("GET", f"{base}/bucket")
        record("GET", f"{base}/projection")

        # expansion reveals consumed vulnerabilities in the AV pane
        record("POST", f"{base}/commands", {"command": "expand", "id": "CWE-9120"})
        record("GET", f"{base}/av-graph")
        record("GET", f"{base}/positions/av")

        # detail pop-up payload
        record("GET", f"{base}/entries/CVE-2020-21001")

    OUT.write_text(json.dumps(exchange, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT} ({len(exchange)} steps)")


if __name__ == "__main__":
    main()
