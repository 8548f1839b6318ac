"""Project bundles: the single-archive persistence format for analysis sessions.

A bundle is a zip holding the original topology and specification GraphML
documents, a reference to the corpus snapshot it was analyzed against (path
plus content hash), and a session-state document with the match
configuration, the layout seed, and the replayable command log. Loading a
bundle and replaying its log reproduces the exact session state.
"""

import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError
from .matching import MatchConfig

FORMAT_VERSION = 1

_TOPOLOGY_MEMBER = "topology.graphml"
_SPEC_MEMBER = "spec.graphml"
_SESSION_MEMBER = "session.json"


@dataclass
class ProjectBundle:
    topology_doc: str
    spec_doc: str
    corpus_path: str
    corpus_sha256: str
    match_config: MatchConfig = MatchConfig()
    layout_seed: int = 0
    commands: list[dict] = field(default_factory=list)
    format_version: int = FORMAT_VERSION

    def resolve_corpus_path(self, bundle_path: str | Path | None) -> Path:
        """Resolve the corpus reference, relative to the bundle's directory."""
        corpus = Path(self.corpus_path)
        if corpus.is_absolute() or bundle_path is None:
            return corpus
        return Path(bundle_path).parent / corpus


def save_bundle(bundle: ProjectBundle, path: str | Path) -> None:
    state = {
        "format_version": bundle.format_version,
        "corpus": {"path": bundle.corpus_path, "sha256": bundle.corpus_sha256},
        "match_config": {
            "fields_searched": list(bundle.match_config.fields_searched),
            "min_token_len": bundle.match_config.min_token_len,
            "require_all_tokens_of_value": bundle.match_config.require_all_tokens_of_value,
        },
        "layout_seed": bundle.layout_seed,
        "commands": bundle.commands,
    }
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as archive:
        archive.writestr(_TOPOLOGY_MEMBER, bundle.topology_doc)
        archive.writestr(_SPEC_MEMBER, bundle.spec_doc)
        archive.writestr(_SESSION_MEMBER, json.dumps(state, indent=2, sort_keys=True))


def load_bundle(path: str | Path) -> ProjectBundle:
    try:
        with zipfile.ZipFile(path) as archive:
            members = set(archive.namelist())
            missing = {_TOPOLOGY_MEMBER, _SPEC_MEMBER, _SESSION_MEMBER} - members
            if missing:
                raise FormatError(f"{path}: bundle is missing {sorted(missing)}")
            topology_doc = archive.read(_TOPOLOGY_MEMBER).decode("utf-8")
            spec_doc = archive.read(_SPEC_MEMBER).decode("utf-8")
            state = json.loads(archive.read(_SESSION_MEMBER))
    except zipfile.BadZipFile as exc:
        raise FormatError(f"{path}: not a project bundle archive") from exc
    version = state.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported bundle format_version {version}")
    config = state.get("match_config", {})
    return ProjectBundle(
        topology_doc=topology_doc,
        spec_doc=spec_doc,
        corpus_path=state["corpus"]["path"],
        corpus_sha256=state["corpus"]["sha256"],
        match_config=MatchConfig(
            fields_searched=tuple(config.get("fields_searched", ("name", "description", "extra_text"))),
            min_token_len=config.get("min_token_len", 2),
            require_all_tokens_of_value=config.get("require_all_tokens_of_value", True),
        ),
        layout_seed=state.get("layout_seed", 0),
        commands=list(state.get("commands", [])),
    )
