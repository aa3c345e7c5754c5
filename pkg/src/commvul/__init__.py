"""Entropy-based vulnerability of communities in undirected networks."""
from .community import (GreedyModularity, MergeTrace, Partition, community_degree,
                        detect_communities, load_partition, modularity)
from .entropy import (SimilarityMatrix, community_profile, q_index, relative_entropy,
                      similarity_matrix, tsallis_structure_entropy)
from .graph import (Graph, betweenness, degree, degree_distribution, load_adjacency_csv,
                    load_edge_list, topology_summary)
from .sensitivity import SamplePlan, SobolAnalyzer, SobolReport, sample_weights, sobol_indices
from .vulnerability import (CommunityFeatures, CommunityVulnerability, Conventions,
                            VulnerabilityReport, WeightVector, analyze, assemble_features,
                            classical_vulnerability, external_edges, internal_edges,
                            proposed_vulnerability, rank_report)

__version__ = "0.1.0"
