"""Ball-growing clustering from capped geometric offsets, with spanner, LDD and
distributed-simulation pipelines built on top."""
from .clustering import Clustering, cluster, cluster_with_offsets, strong_diameter, verify_tree_support
from .distribution import GeomCapParams, Offsets, geom_cap_pmf, sample_offsets
from .graph import Graph, load_edge_list, parse_gen_spec
from .ldd import CutStats, estimate_cut_prob, ldd, ldd_params
from .spanner import SparsifiedDecomposition, build_spanner, verify_coverage, verify_stretch

__version__ = "0.1.0"

__all__ = [
    "Clustering", "cluster", "cluster_with_offsets", "strong_diameter", "verify_tree_support",
    "GeomCapParams", "Offsets", "geom_cap_pmf", "sample_offsets",
    "Graph", "load_edge_list", "parse_gen_spec",
    "CutStats", "estimate_cut_prob", "ldd", "ldd_params",
    "SparsifiedDecomposition", "build_spanner", "verify_coverage", "verify_stretch",
]
