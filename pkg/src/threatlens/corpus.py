"""Attack-vector corpus: CAPEC / CWE / NVD parsing, normalization, and indexing.

The three public datasets are normalized into a single entry shape and merged
into a relation-indexed, text-indexed corpus. Attack patterns relate to
weakness classes, weakness classes form their own hierarchy, and concrete
vulnerabilities point at the weakness classes they instantiate; those links
are what later lets the vulnerability space be abstracted to weakness-class
granularity.

Parsers consume local files only; tests and analyses never touch the network.
"""

import gzip
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .errors import Diagnostic, FormatError, ParseError

CAPEC, CWE, CVE = "CAPEC", "CWE", "CVE"
SOURCES = (CAPEC, CWE, CVE)

# Relation kinds. Hierarchy kinds stay within one dataset; RelatedWeakness
# links attack patterns and weaknesses both ways; WeaknessOf points from a
# vulnerability to the weakness class it instantiates.
HIERARCHY_KINDS = ("ChildOf", "ParentOf", "PeerOf", "CanPrecede", "CanFollow")
RELATION_KINDS = HIERARCHY_KINDS + ("RelatedWeakness", "WeaknessOf")

_INVERSE_KIND = {
    "ChildOf": "ParentOf",
    "ParentOf": "ChildOf",
    "CanPrecede": "CanFollow",
    "CanFollow": "CanPrecede",
    "PeerOf": "PeerOf",
    "RelatedWeakness": "RelatedWeakness",
}

_ID_PATTERNS = {
    CAPEC: re.compile(r"^CAPEC-\d+$"),
    CWE: re.compile(r"^CWE-\d+$"),
    CVE: re.compile(r"^CVE-\d{4}-\d{4,}$"),
}

# Tokens are lowercase alphanumeric runs of length >= 2; dotted version
# strings ("802.11", "3.5.1") are kept whole so protocol and release names
# survive tokenization.
_TOKEN_RE = re.compile(r"[0-9]+(?:\.[0-9]+)+|[a-z0-9]+")


def tokenize(text: str, min_len: int = 2) -> list[str]:
    """Split text into the corpus token stream used for indexing and matching."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= min_len]


@dataclass
class AttackEntry:
    """One normalized CAPEC attack pattern, CWE weakness, or CVE vulnerability."""

    source: str
    native_id: str
    name: str
    description: str
    severity: float | None = None
    relations: list[tuple[str, str]] = field(default_factory=list)
    extra_text: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if not _ID_PATTERNS[self.source].match(self.native_id):
            raise ValueError(f"{self.native_id!r} is not a valid {self.source} id")
        if self.severity is not None:
            if self.source != CVE:
                raise ValueError("severity is only carried by CVE entries")
            if not 0.0 <= self.severity <= 10.0:
                raise ValueError(f"severity {self.severity} outside [0, 10]")
        for kind, _target in self.relations:
            if kind not in RELATION_KINDS:
                raise ValueError(f"unknown relation kind {kind!r}")


@dataclass
class Corpus:
    """Merged, deduplicated, relation- and text-indexed attack-vector corpus."""

    entries: dict[str, AttackEntry] = field(default_factory=dict)
    by_source: dict[str, int] = field(default_factory=dict)
    text_index: dict[str, set[str]] = field(default_factory=dict)
    # Reverse of the CVE -> CWE instantiation links (WeaknessOf has no
    # inverse relation kind, so the reverse direction lives here).
    cves_by_cwe: dict[str, set[str]] = field(default_factory=dict)

    def __post_init__(self):
        self._field_tokens: dict[tuple[str, str], tuple[str, ...]] = {}

    def entry(self, native_id: str) -> AttackEntry:
        try:
            return self.entries[native_id]
        except KeyError:
            raise FormatError(f"no corpus entry {native_id!r}") from None

    def field_tokens(self, native_id: str, field_name: str) -> tuple[str, ...]:
        """Token sequence of one searchable field, memoized per entry."""
        key = (native_id, field_name)
        cached = self._field_tokens.get(key)
        if cached is None:
            entry = self.entries[native_id]
            if field_name == "name":
                text = entry.name
            elif field_name == "description":
                text = entry.description
            elif field_name == "extra_text":
                text = " \n ".join(entry.extra_text)
            else:
                raise ValueError(f"unknown searchable field {field_name!r}")
            cached = tuple(tokenize(text))
            self._field_tokens[key] = cached
        return cached


# --- XML helpers -----------------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_catalog(xml_text: str, expected_root: str) -> ET.Element:
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        line = exc.position[0] if exc.position else None
        raise ParseError(f"malformed XML: {exc.msg.split(':')[0]}", line=line) from exc
    if _local(root.tag) != expected_root:
        raise FormatError(
            f"unrecognized catalog root <{_local(root.tag)}>, expected <{expected_root}>"
        )
    return root


def _text_of(element: ET.Element | None) -> str:
    if element is None:
        return ""
    return " ".join("".join(element.itertext()).split())


def _children_named(element: ET.Element, name: str):
    for child in element.iter():
        if _local(child.tag) == name:
            yield child


# --- CAPEC -----------------------------------------------------------------


def parse_capec(
    xml_text: str, diagnostics: list[Diagnostic] | None = None
) -> list[AttackEntry]:
    """Parse a CAPEC v3.x attack-pattern catalog.

    Deprecated patterns are skipped (with a diagnostic). Related weaknesses
    become RelatedWeakness links to CWE ids; related attack patterns become
    hierarchy links within CAPEC.
    """
    root = _parse_catalog(xml_text, "Attack_Pattern_Catalog")
    entries = []
    for pattern in _children_named(root, "Attack_Pattern"):
        pattern_id = pattern.get("ID")
        if not pattern_id:
            continue
        native_id = f"CAPEC-{pattern_id}"
        if pattern.get("Status", "").lower() == "deprecated":
            if diagnostics is not None:
                diagnostics.append(
                    Diagnostic("warning", "skipping deprecated attack pattern", native_id)
                )
            continue
        relations = []
        for rel in _children_named(pattern, "Related_Attack_Pattern"):
            nature, target = rel.get("Nature", ""), rel.get("CAPEC_ID")
            if nature in HIERARCHY_KINDS and target:
                relations.append((nature, f"CAPEC-{target}"))
        for rel in _children_named(pattern, "Related_Weakness"):
            target = rel.get("CWE_ID")
            if target:
                relations.append(("RelatedWeakness", f"CWE-{target}"))
        extra = [_text_of(p) for p in _children_named(pattern, "Prerequisite")]
        entries.append(
            AttackEntry(
                source=CAPEC,
                native_id=native_id,
                name=pattern.get("Name", native_id),
                description=_text_of(next(_children_named(pattern, "Description"), None)),
                relations=relations,
                extra_text=[t for t in extra if t],
            )
        )
    return entries


# --- CWE -------------------------------------------------------------------


def parse_cwe(
    xml_text: str, diagnostics: list[Diagnostic] | None = None
) -> list[AttackEntry]:
    """Parse a CWE v4.x weakness catalog.

    Related weaknesses become hierarchy links within CWE; related attack
    patterns become RelatedWeakness back-references to CAPEC ids.
    """
    root = _parse_catalog(xml_text, "Weakness_Catalog")
    entries = []
    for weakness in _children_named(root, "Weakness"):
        weakness_id = weakness.get("ID")
        if not weakness_id:
            continue
        native_id = f"CWE-{weakness_id}"
        if weakness.get("Status", "").lower() in ("deprecated", "obsolete"):
            if diagnostics is not None:
                diagnostics.append(
                    Diagnostic("warning", "skipping deprecated weakness", native_id)
                )
            continue
        relations = []
        for rel in _children_named(weakness, "Related_Weakness"):
            nature, target = rel.get("Nature", ""), rel.get("CWE_ID")
            if nature in HIERARCHY_KINDS and target:
                relations.append((nature, f"CWE-{target}"))
        for rel in _children_named(weakness, "Related_Attack_Pattern"):
            target = rel.get("CAPEC_ID")
            if target:
                relations.append(("RelatedWeakness", f"CAPEC-{target}"))
        platforms = []
        for applicable in _children_named(weakness, "Applicable_Platforms"):
            for plat in applicable:
                name = plat.get("Name") or plat.get("Class")
                if name:
                    platforms.append(name)
        entries.append(
            AttackEntry(
                source=CWE,
                native_id=native_id,
                name=weakness.get("Name", native_id),
                description=_text_of(next(_children_named(weakness, "Description"), None)),
                relations=relations,
                extra_text=platforms,
            )
        )
    return entries


# --- NVD -------------------------------------------------------------------

_CWE_REF_RE = re.compile(r"^CWE-\d+$")


def parse_nvd_feed(
    feed: str | bytes, diagnostics: list[Diagnostic] | None = None
) -> list[AttackEntry]:
    """Parse an NVD JSON feed (schema 1.1; gzip-compressed bytes accepted).

    Rejected/reserved CVEs are skipped, problemtype CWE references become
    WeaknessOf links, and the CVSS v3 base score is preferred over v2.
    """
    if isinstance(feed, bytes):
        if feed[:2] == b"\x1f\x8b":
            feed = gzip.decompress(feed)
        feed = feed.decode("utf-8")
    try:
        doc = json.loads(feed)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno) from exc
    items = doc.get("CVE_Items")
    if items is None:
        raise FormatError("not an NVD 1.1 feed: missing CVE_Items")
    entries = []
    for item in items:
        cve = item.get("cve", {})
        native_id = cve.get("CVE_data_meta", {}).get("ID")
        if not native_id:
            raise FormatError("feed item without a CVE id")
        description = _english_description(cve)
        if description.startswith("** REJECT **"):
            if diagnostics is not None:
                diagnostics.append(Diagnostic("warning", "skipping rejected CVE", native_id))
            continue
        relations = []
        for ptype in cve.get("problemtype", {}).get("problemtype_data", []):
            for desc in ptype.get("description", []):
                value = desc.get("value", "")
                if _CWE_REF_RE.match(value):
                    relations.append(("WeaknessOf", value))
        entries.append(
            AttackEntry(
                source=CVE,
                native_id=native_id,
                name=native_id,
                description=description,
                severity=_base_score(item),
                relations=relations,
                extra_text=_cpe_terms(item),
            )
        )
    return entries


def _english_description(cve: dict) -> str:
    data = cve.get("description", {}).get("description_data", [])
    for desc in data:
        if desc.get("lang") == "en":
            return desc.get("value", "")
    return data[0].get("value", "") if data else ""


def _base_score(item: dict) -> float | None:
    impact = item.get("impact", {})
    v3 = impact.get("baseMetricV3", {}).get("cvssV3", {}).get("baseScore")
    if v3 is not None:
        return float(v3)
    v2 = impact.get("baseMetricV2", {}).get("cvssV2", {}).get("baseScore")
    if v2 is not None:
        return float(v2)
    return None


def _cpe_terms(item: dict) -> list[str]:
    """Vendor/product terms from configuration CPE URIs, deduplicated in order."""
    terms: list[str] = []
    nodes = list(item.get("configurations", {}).get("nodes", []))
    while nodes:
        node = nodes.pop(0)
        nodes.extend(node.get("children", []))
        for match in node.get("cpe_match", []):
            uri = match.get("cpe23Uri", "")
            parts = uri.split(":")
            if len(parts) >= 6:
                for term in (parts[3], parts[4]):
                    term = term.replace("_", " ")
                    if term not in ("*", "-", "") and term not in terms:
                        terms.append(term)
    return terms


# --- corpus build and persistence -------------------------------------------


def build_corpus(
    entries: list[AttackEntry], diagnostics: list[Diagnostic] | None = None
) -> Corpus:
    """Merge parsed entries into an indexed corpus.

    Entries sharing a native id are deduplicated last-wins (with a diagnostic
    per discarded entry). Invertible relations are closed symmetrically, the
    reverse of the CVE->CWE links is indexed, dangling relation targets are
    flagged, and the text index is built over name, description, and extra
    text tokens.
    """
    merged: dict[str, AttackEntry] = {}
    for entry in entries:
        if entry.native_id in merged and diagnostics is not None:
            diagnostics.append(
                Diagnostic("warning", "duplicate entry replaced", entry.native_id)
            )
        merged[entry.native_id] = entry

    # Symmetric closure of invertible relation kinds.
    relation_sets = {nid: set(e.relations) for nid, e in merged.items()}
    for native_id, relations in list(relation_sets.items()):
        for kind, target in list(relations):
            inverse = _INVERSE_KIND.get(kind)
            if inverse and target in relation_sets:
                relation_sets[target].add((inverse, native_id))

    corpus = Corpus()
    for native_id in merged:
        entry = merged[native_id]
        entry.relations = sorted(relation_sets[native_id])
        corpus.entries[native_id] = entry

    for entry in corpus.entries.values():
        corpus.by_source[entry.source] = corpus.by_source.get(entry.source, 0) + 1
        for kind, target in entry.relations:
            if target not in corpus.entries and diagnostics is not None:
                diagnostics.append(
                    Diagnostic(
                        "warning",
                        f"relation {kind} -> {target} has no corpus entry",
                        entry.native_id,
                    )
                )
            if kind == "WeaknessOf":
                corpus.cves_by_cwe.setdefault(target, set()).add(entry.native_id)
        for token in set(
            tokenize(" \n ".join([entry.name, entry.description, *entry.extra_text]))
        ):
            corpus.text_index.setdefault(token, set()).add(entry.native_id)
    return corpus


SNAPSHOT_FORMAT = "corpus-snapshot"
SNAPSHOT_VERSION = 1


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus snapshot: a header line then one JSON entry per line.

    Paths ending in .gz are gzip-compressed.
    """
    path = Path(path)
    header = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "counts": {s: corpus.by_source.get(s, 0) for s in SOURCES},
    }
    lines = [json.dumps(header, sort_keys=True)]
    for native_id in sorted(corpus.entries):
        entry = corpus.entries[native_id]
        lines.append(
            json.dumps(
                {
                    "source": entry.source,
                    "native_id": entry.native_id,
                    "name": entry.name,
                    "description": entry.description,
                    "severity": entry.severity,
                    "relations": entry.relations,
                    "extra_text": entry.extra_text,
                },
                sort_keys=True,
            )
        )
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    if path.suffix == ".gz":
        path.write_bytes(gzip.compress(payload))
    else:
        path.write_bytes(payload)


def load_corpus(path: str | Path) -> Corpus:
    """Read a snapshot written by save_corpus and rebuild the indexes."""
    path = Path(path)
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    lines = raw.decode("utf-8").splitlines()
    if not lines:
        raise FormatError(f"{path}: empty snapshot")
    header = json.loads(lines[0])
    if header.get("format") != SNAPSHOT_FORMAT:
        raise FormatError(f"{path}: not a corpus snapshot")
    if header.get("version") != SNAPSHOT_VERSION:
        raise FormatError(f"{path}: unsupported snapshot version {header.get('version')}")
    entries = []
    for line in lines[1:]:
        if not line.strip():
            continue
        record = json.loads(line)
        entries.append(
            AttackEntry(
                source=record["source"],
                native_id=record["native_id"],
                name=record["name"],
                description=record["description"],
                severity=record["severity"],
                relations=[tuple(r) for r in record["relations"]],
                extra_text=list(record["extra_text"]),
            )
        )
    return build_corpus(entries)


def corpus_sha256(path: str | Path) -> str:
    """Content hash used by project bundles to pin their corpus snapshot."""
    import hashlib

    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
