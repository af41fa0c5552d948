"""spanforest: uniform spanning trees and rooted spanning forests on finite
graphs and lattice boxes.

Sampling (Wilson's algorithm with free/wired/rooted boundary handling), exact
Kirchhoff counting and edge marginals, window conditional resampling, trunk
and near-intersection statistics, and entropy-per-site tooling, all under a
reproducible counter-based randomness contract.
"""

__version__ = "0.1.0"

from .errors import CapacityError, DisconnectedGraphError, SpanforestError, ValidationError
from .graphs import (
    Contraction,
    Forest,
    Graph,
    UnionFind,
    Window,
    build_box,
    build_torus,
    contract,
    induced_window,
    load_forest,
    load_graph,
    parse_graph,
    save_forest,
    save_graph,
)
from .randomness import RandomStream
from .sampler import (
    RootedSampler,
    WalkPath,
    loop_erase,
    sample_boundary_mode,
    wilson_rooted_forest,
    wilson_tree,
)
from .kirchhoff import (
    LogCount,
    MarginalTable,
    count_rooted_forests,
    count_spanning_trees,
    deletion_contraction_marginal,
    edge_marginal,
    edge_marginals,
    enumerate_forests,
)
from .gibbs import (
    BoundaryPartition,
    EscapeClosure,
    TrunkClosure,
    admissible_window_patterns,
    compatible_window_sets,
    escape_closure,
    inside_relation,
    outside_relation,
    strong_gibbs_resample,
    trunk_closure,
    weak_gibbs_resample,
)
from .foreststats import (
    ComponentStats,
    HarmonicityReport,
    NearIntersectionConfig,
    NuEstimate,
    TrunkSet,
    all_horizontal_forest,
    check_harmonicity,
    component_stats,
    count_fncp,
    count_near_intersections,
    detect_trunks,
    estimate_nu_A,
    estimate_nu_A_curve,
    fit_log_decay_slope,
    hitting_probability_exact,
    trunk_root_targets,
    wilson_score_interval,
)
from .entropy import (
    EntropyRecord,
    EntropyReport,
    GapReport,
    entropy_gap_experiment,
    per_site_entropy_sequence,
    plugin_entropy,
    torus_entropy_oracle,
    torus_tree_per_site,
)
from .corpus import corpus, corpus_names
