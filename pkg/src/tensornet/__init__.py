"""Tensor networks for multilinear maps.

Networks are hypergraphs of mode-labeled tensors over exact fields; plans
are contraction trees priced by the data-oblivious max-step cost model.
The package ships exact minimum-cost planning, Kronecker-power lifting of
executions, the classic constructions (Strassen, FFT, convolution, Yates,
Kruskal, Ryser, homomorphism counting along branch decompositions), and
exact socket-width lower-bound certificates.
"""

from .errors import TensorNetError
from .execution import CostReport, ExecutionPlan, amortized_cost, plan_cost, run, simulate
from .fields import (
    FLOAT64,
    GF,
    GF_DFT,
    RATIONAL,
    Field,
    Scalar,
    arithmetic,
    field_from_tag,
    field_tag,
    primitive_root_of_unity,
)
from .kronpow import LiftedPlan, lift, low_rank_execution, outer_power_input, power_network
from .lowerbound import (
    SocketTree,
    WidthCertificate,
    balanced_edge,
    closed_form_bound,
    coarse_tensor,
    enumerate_socket_trees,
    formify,
    socket_width,
    tree_width,
)
from .network import (
    MapSpec,
    Network,
    SocketedNetwork,
    merged_vertex_id,
    random_network,
    realize,
    socket_tensor,
)
from .patterns import NAMED_PATTERNS, PatternGraph
from .planner import Objective, PlanRequest, Strategy, greedy_plan, normalize, optimal_plan
from .tensor import Mode, Tensor, matrix_rank, refine, unflatten

__all__ = [name for name in dir() if not name.startswith("_")]
