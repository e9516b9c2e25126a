//! Mutual kNN similarity graphs, K selection and community detection.

mod export;
mod graph;
mod knn;
mod louvain;
mod modularity;
mod select;

pub use export::{to_graphml, write_edge_list, write_ktrace, write_partition};
pub use graph::{average_degree, degree_stats, isolate_fraction, Partition, SimilarityGraph};
pub use knn::{knn_lists, mutual_knn, top_k_neighbors};
pub use louvain::detect_communities;
pub use modularity::modularity;
pub use select::{
    argmax_score, evaluate_k, finalize, penalty_ad, penalty_if, score, score_k, select_k, summarize, ClusterSet,
    GraphSummary, KEvaluation, KSelection, KTrace,
};
