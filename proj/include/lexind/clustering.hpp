#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexind/embeddings.hpp"
#include "lexind/induction.hpp"
#include "lexind/numerics.hpp"

namespace lexind {

struct SignedEdge {
    std::size_t i;  // i < j
    std::size_t j;
    double weight;
};

struct DroppedWord {
    std::string word;
    std::string reason;
};

struct SignedGraph {
    std::string construct;
    std::vector<std::string> node_words;
    std::vector<double> node_ratings;
    std::vector<SignedEdge> edges;  // sorted by (i, j), no self-loops, no zero weights
    std::vector<DroppedWord> dropped;
    double rho = 0.0;

    std::size_t size() const noexcept { return node_words.size(); }
};

struct GraphOptions {
    std::size_t knn = 20;
    std::optional<double> rho;  // default: half the construct's rating range
    bool clip_cosine = true;    // max(cos, 0) before gating by rating agreement
};

// kNN graph by cosine similarity (union-symmetrised) with weights
// w_ij = max(cos_ij, 0) * (1 - |r_i - r_j| / rho): positive for words with
// close ratings, negative once the rating gap exceeds rho.
SignedGraph build_signed_graph(const Lexicon& lexicon, std::string_view construct, const EmbeddingTable& table,
                               const GraphOptions& options = {});

enum class LaplacianKind { unnormalized, symmetric };

// L = D - W with D_ii = sum_j |w_ij| (or D^-1/2 L D^-1/2). Throws when a
// node has no edges, listing the isolated words.
DenseMatrix signed_laplacian(const SignedGraph& graph, LaplacianKind kind = LaplacianKind::unnormalized);

// Same operator in sparse form.
SparseMatrix signed_laplacian_sparse(const SignedGraph& graph, LaplacianKind kind = LaplacianKind::unnormalized);

struct ClusterOptions {
    std::size_t k = 50;
    GraphOptions graph;
    LaplacianKind laplacian = LaplacianKind::unnormalized;
    std::uint64_t seed = 0;
    std::size_t restarts = 10;
    EigenOptions eigen;
};

struct Cluster {
    std::size_t id = 0;
    std::vector<std::string> words;  // by rating, descending
    std::vector<double> ratings;     // parallel to words
    double mean_rating = 0.0;
};

struct ClusterResult {
    std::size_t k = 0;
    std::string construct;
    std::vector<std::string> words;          // clustered words, graph node order
    std::vector<std::size_t> assignment;     // parallel to words, in [0, k)
    std::vector<Cluster> clusters;           // indexed by id
    std::vector<DroppedWord> dropped;        // zero embeddings, isolated nodes
    std::vector<double> eigenvalues;         // k smallest of the signed Laplacian
    double lambda_min = 0.0;
    double rho = 0.0;
    std::size_t edges = 0;
    std::size_t negative_edges = 0;
};

ClusterResult cluster_lexicon(const Lexicon& lexicon, std::string_view construct, const EmbeddingTable& table,
                              const ClusterOptions& options = {});

// Cluster ids ordered by mean rating, highest first.
std::vector<std::size_t> clusters_by_mean(const ClusterResult& result);

// TSV: cluster_id, word, rating, cluster_mean_rating, manual_label (empty).
void write_clusters(const std::filesystem::path& path, const ClusterResult& result);

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace lexind
