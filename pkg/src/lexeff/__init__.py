"""Toolkit for measuring the communicative efficiency of lexicalization strategies.

A lexicon maps word forms to concepts. When a new concept needs a name,
speakers either reuse an existing form or combine two existing forms. This
package scores such encodings on two competing costs, expected word length
and expected information loss for a listener who only knows the existing
lexicon, estimates the Pareto frontier of optimal encodings over a tradeoff
parameter grid, generates near-synonym and random baseline encodings, and
runs the item-level and aggregate statistics used to compare them.
"""

from lexeff.lexicon import (
    Concept,
    Encoding,
    EncodingItem,
    Form,
    Lexicon,
    LexiconEntry,
    LexiconError,
    NeedProductionModel,
    Universe,
    joint_distribution,
    load_encoding,
    load_lexicon,
    load_universe,
    need_marginal,
)
from lexeff.semantics import (
    ListenerParams,
    Prototype,
    PrototypeCache,
    cosine_distance,
    listener_distribution,
    prototype,
)
from lexeff.costs import CostPoint, encoding_cost, item_cost, scalarized_cost, surprisal
from lexeff.frontier import (
    CandidateSpace,
    EfficiencyLoss,
    FrontierParams,
    FrontierPoint,
    FrontierResult,
    efficiency_loss,
    estimate_frontier,
    optimal_label,
)
from lexeff.baselines import (
    BaselineSummary,
    NearSynonymParams,
    ReplicateSpec,
    baseline_summary,
    near_synonym_set,
    sample_near_synonym_encoding,
    sample_random_encoding,
)
from lexeff.taxonomy import (
    TaxonomyError,
    TaxonomyGraph,
    augment_reuse_with_heads,
    classify_compound,
    is_literal,
    leacock_chodorow,
    wu_palmer,
)
from lexeff.stats import TTestResult, bootstrap_ci, correlation, t_test_pooled

__version__ = "0.1.0"
