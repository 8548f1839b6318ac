"""Model-based security analysis for cyber-physical system designs.

Links a system-topology graph, a mission/requirements hierarchy, and an
attack-vector corpus built from the public CAPEC / CWE / NVD datasets, and
computes attack surfaces, exploit chains, and requirement-violation traces
over them.
"""

from .analysis import (
    AttackSurface,
    AttributeEdit,
    ChainSearchResult,
    ExploitChain,
    ProjectionOverlay,
    ViolationTrace,
    apply_attribute_edit,
    attack_surface,
    exploit_chains,
    project_bucket,
    violation_trace,
)
from .corpus import (
    AttackEntry,
    Corpus,
    build_corpus,
    corpus_sha256,
    load_corpus,
    parse_capec,
    parse_cwe,
    parse_nvd_feed,
    save_corpus,
    tokenize,
)
from .errors import (
    Diagnostic,
    EditError,
    FormatError,
    GraphValidationError,
    ParseError,
    ToolError,
    UnknownIdError,
)
from .graphs import (
    ChannelEdge,
    ComponentNode,
    SpecNode,
    Specification,
    SystemTopology,
    parse_spec_graphml,
    parse_topology_graphml,
    serialize_graphml,
    validate,
)
from .layout import LayoutParams, banded_hierarchical, fruchterman_reingold
from .matching import MatchConfig, MatchMap, match_element, match_system, rematch_incremental
from .session import (
    AVGraph,
    AVVertex,
    Bucket,
    BucketRow,
    Query,
    bucket_add,
    bucket_export,
    bucket_remove,
    build_av_graph,
    delete_vertices,
    expand_vertex,
    filter_vertices,
)

__version__ = "0.1.0"
