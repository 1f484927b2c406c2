from .fastq import Read, ReadSet, read_fastq, write_fastq
from .filters import filter_reads, barcode_prefilter
from .align import AlignedReads, orient_and_align
from .cluster import ClusterResult, cluster_iterative, rank_blocks
from .consensus import ConsensusKeys, consensus_call, call_clusters, filter_consensus
from .diversity import estimate_diversity, DiversityEstimate
from .table import write_consensus_table, read_consensus_table

__all__ = [
    "Read", "ReadSet", "read_fastq", "write_fastq", "filter_reads",
    "barcode_prefilter", "AlignedReads", "orient_and_align", "ClusterResult",
    "cluster_iterative", "rank_blocks", "ConsensusKeys", "consensus_call", "call_clusters",
    "filter_consensus", "estimate_diversity", "DiversityEstimate",
    "write_consensus_table", "read_consensus_table",
]
