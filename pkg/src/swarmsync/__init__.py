"""swarmsync: synchronization and consensus of multi-agent swarms.

Linear consensus on vector spaces, phase synchronization on the circle
(continuous sine coupling, discrete averaging with inertia, reshaped
coupling profiles), equilibrium and stability analysis, randomized
neighbor-selection synchronization with exact expected hitting times,
auxiliary-variable synchronization, and the canned flocking / pursuit /
spin scenarios, all over weighted digraphs and switching schedules.
"""

from .graphs import (
    Connectivity,
    ConnectivityKind,
    GraphSequence,
    WeightedDigraph,
    classify_connectivity,
    complete_graph,
    directed_tree,
    graph_from_json,
    graph_to_json,
    is_uniformly_connected,
    make_standard,
    path_graph,
    ring_directed,
    ring_undirected,
    vertex_interconnection,
)
from .circle import (
    CouplingProfile,
    SINE,
    Trajectory,
    ct_rhs,
    ct_rhs_projection_form,
    dt_step,
    integrate,
    make_profile,
    order_parameter,
    run_discrete,
    v_circ,
    wrap,
)
from .gossip import (
    GossipConfig,
    expected_sync_time,
    gossip_step,
    monte_carlo_sync_time,
    run_until_sync,
)
from .aux_consensus import aux_rhs, simulate_aux
from .scenarios import (
    Scenario,
    VicsekState,
    hopfield_energy,
    hopfield_step,
    make_scenario,
    proximity_graph,
    vicsek_divergence_setup,
    vicsek_step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
