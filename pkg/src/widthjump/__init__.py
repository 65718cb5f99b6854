"""Width-based lookahead search over typed STRIPS models, relational graph
encodings of transitions, and a greedy jump-policy executor."""

from .pddl import (
    ActionSchema,
    Domain,
    Instance,
    Lifted,
    PddlError,
    PredicateDef,
    TypeTree,
    is_subtype,
    parse_domain,
    parse_instance,
)
from .ground import (
    AtomRegistry,
    GroundAction,
    Grounder,
    PreconditionError,
    State,
    applicable_actions,
    apply,
    grounder_for,
    initial_state,
    intern,
    is_goal,
)
from .novelty import (
    AbstractAtom,
    KERNEL_NAME,
    NoveltyTable,
    Reduction,
    abstraction_forms,
    novel_capacity_bound,
    table_for,
)
from .lookahead import (
    LookaheadConfig,
    LookaheadTree,
    TreeNode,
    extract_plan,
    jump_candidates,
    lookahead,
)
from .encode import (
    GraphPair,
    RelGraph,
    deserialize_graph,
    encode_aa,
    encode_ad,
    encode_external,
    encode_internal,
    encode_internal_delta,
    encode_state,
    iter_graphs,
    serialize_graph,
)
from .policy import (
    EpisodeLimits,
    EpisodeResult,
    OracleScorer,
    ScoreRequest,
    Scorer,
    SubprocessScorer,
    ZeroScorer,
    branching_factor,
    oracle_scorer,
    run_episode,
    zero_scorer,
)

__version__ = "0.1.0"
