"""Mapping of model attributes onto recorded attack vectors.

Every attribute value on a topology node or edge is tokenized the same way
the corpus text index is, then looked up across the searched entry fields.
By default a multi-token value must occur as a contiguous phrase, which keeps
the evidence precise; single tokens fall back to plain containment. The
matcher is deliberately a deterministic, oracle-testable strategy, and the
produced match map is the one contract every downstream analysis consumes.
"""

from dataclasses import dataclass, field

from .corpus import Corpus, tokenize
from .errors import UnknownIdError
from .graphs import SystemTopology

SEARCHABLE_FIELDS = ("name", "description", "extra_text")

# One match: (entry native id, attribute key that fired, normalized term).
Match = tuple[str, str, str]


@dataclass(frozen=True)
class MatchConfig:
    """Tuning for attribute-to-entry matching."""

    fields_searched: tuple[str, ...] = SEARCHABLE_FIELDS
    min_token_len: int = 2
    require_all_tokens_of_value: bool = True

    def __post_init__(self):
        if not self.fields_searched:
            raise ValueError("fields_searched must not be empty")
        unknown = set(self.fields_searched) - set(SEARCHABLE_FIELDS)
        if unknown:
            raise ValueError(f"unknown searchable fields: {sorted(unknown)}")
        if self.min_token_len < 2:
            raise ValueError("min_token_len must be >= 2")


@dataclass
class MatchMap:
    """Match sets for every node and every edge of one topology snapshot."""

    node_matches: dict[str, frozenset[Match]] = field(default_factory=dict)
    edge_matches: dict[str, frozenset[Match]] = field(default_factory=dict)

    def node_ids_matched(self, node_id: str) -> frozenset[str]:
        """Native ids of the entries matched by one node."""
        return frozenset(m[0] for m in self.node_matches.get(node_id, frozenset()))

    def edge_ids_matched(self, edge_id: str) -> frozenset[str]:
        return frozenset(m[0] for m in self.edge_matches.get(edge_id, frozenset()))

    def all_matched_ids(self) -> frozenset[str]:
        """Every native id matched anywhere in the system."""
        ids: set[str] = set()
        for matches in self.node_matches.values():
            ids.update(m[0] for m in matches)
        for matches in self.edge_matches.values():
            ids.update(m[0] for m in matches)
        return frozenset(ids)

    def nodes_matching(self, native_id: str) -> frozenset[str]:
        """Topology node ids whose match set contains the given entry."""
        return frozenset(
            node_id
            for node_id, matches in self.node_matches.items()
            if any(m[0] == native_id for m in matches)
        )


def _contains_phrase(haystack: tuple[str, ...], phrase: list[str]) -> bool:
    if len(phrase) == 1:
        return phrase[0] in haystack
    n = len(phrase)
    return any(list(haystack[i : i + n]) == phrase for i in range(len(haystack) - n + 1))


def match_element(
    attributes: dict[str, str], corpus: Corpus, config: MatchConfig
) -> frozenset[Match]:
    """Match one element's attribute map against the corpus.

    An entry matches when some attribute value, tokenized per corpus rules,
    occurs in the entry's searched fields; each match records the attribute
    key and the normalized term that fired.
    """
    matches: set[Match] = set()
    for key, value in attributes.items():
        value_tokens = tokenize(value, config.min_token_len)
        if not value_tokens:
            continue
        if config.require_all_tokens_of_value:
            candidates: set[str] | None = None
            for token in value_tokens:
                hits = corpus.text_index.get(token, set())
                candidates = hits.copy() if candidates is None else candidates & hits
                if not candidates:
                    break
            term = " ".join(value_tokens)
            for native_id in candidates or ():
                if any(
                    _contains_phrase(corpus.field_tokens(native_id, f), value_tokens)
                    for f in config.fields_searched
                ):
                    matches.add((native_id, key, term))
        else:
            for token in value_tokens:
                for native_id in corpus.text_index.get(token, set()):
                    if any(
                        token in corpus.field_tokens(native_id, f)
                        for f in config.fields_searched
                    ):
                        matches.add((native_id, key, token))
    return frozenset(matches)


def match_system(
    topology: SystemTopology, corpus: Corpus, config: MatchConfig | None = None
) -> MatchMap:
    """Match every node and every attributed edge of the topology."""
    config = config or MatchConfig()
    matchmap = MatchMap()
    for node_id, node in topology.nodes.items():
        matchmap.node_matches[node_id] = match_element(node.attributes, corpus, config)
    for edge_id, edge in topology.edges.items():
        matchmap.edge_matches[edge_id] = match_element(edge.attributes, corpus, config)
    return matchmap


def rematch_incremental(
    matchmap: MatchMap,
    topology: SystemTopology,
    changed_element_id: str,
    corpus: Corpus,
    config: MatchConfig | None = None,
) -> MatchMap:
    """Recompute the match set of a single edited node or edge.

    Equivalent to a full match_system on the edited topology; only the changed
    element is recomputed.
    """
    config = config or MatchConfig()
    updated = MatchMap(dict(matchmap.node_matches), dict(matchmap.edge_matches))
    if changed_element_id in topology.nodes:
        updated.node_matches[changed_element_id] = match_element(
            topology.nodes[changed_element_id].attributes, corpus, config
        )
    elif changed_element_id in topology.edges:
        updated.edge_matches[changed_element_id] = match_element(
            topology.edges[changed_element_id].attributes, corpus, config
        )
    else:
        raise UnknownIdError(f"unknown topology element {changed_element_id!r}")
    return updated
