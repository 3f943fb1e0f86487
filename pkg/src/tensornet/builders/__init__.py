"""Concrete tensor networks and execution plans for the maps in scope."""

from .fourier import (
    bind_fft,
    convolution_network,
    fft_network,
    hadamard2,
    mobius2,
    read_fft_result,
    wht_network,
    yates_network,
    zeta2,
)
from .homcount import (
    BranchDecomposition,
    bind_pform,
    branch_decomposition_search,
    branchwidth_evaluation,
    pform_network,
)
from .kruskal import bind_kruskal, kruskal_network, read_kruskal_result
from .matmul import (
    bind_matmul,
    matmul_network,
    read_matmul_result,
    rect_matmul_network,
    strassen_components,
    strassen_core,
    strassen_realization,
    strassen_base_plan,
)
from .ryser import bind_ryser, ryser_network

__all__ = [
    "BranchDecomposition",
    "bind_fft",
    "bind_kruskal",
    "bind_matmul",
    "bind_pform",
    "bind_ryser",
    "branch_decomposition_search",
    "branchwidth_evaluation",
    "convolution_network",
    "fft_network",
    "hadamard2",
    "kruskal_network",
    "matmul_network",
    "mobius2",
    "pform_network",
    "read_fft_result",
    "read_kruskal_result",
    "read_matmul_result",
    "rect_matmul_network",
    "ryser_network",
    "strassen_base_plan",
    "strassen_components",
    "strassen_core",
    "strassen_realization",
    "wht_network",
    "yates_network",
    "zeta2",
]
