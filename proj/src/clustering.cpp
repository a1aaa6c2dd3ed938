#include "lexind/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "lexind/dsv.hpp"
#include "lexind/error.hpp"
#include "lexind/kernels.hpp"

namespace lexind {

SignedGraph build_signed_graph(const Lexicon& lexicon, std::string_view construct, const EmbeddingTable& table,
                               const GraphOptions& options) {
    const std::size_t c = lexicon.construct_index(construct);
    SignedGraph g;
    g.construct = std::string(construct);
    std::vector<std::vector<double>> vectors;
    for (const auto& [word, values] : lexicon.entries()) {
        auto v = table.vector(word);
        double n = norm2(v);
        if (n == 0.0) {
            g.dropped.push_back({word, table.contains(word) ? "zero embedding" : "no embedding"});
            continue;
        }
        for (auto& x : v) x /= n;
        g.node_words.push_back(word);
        g.node_ratings.push_back(values[c]);
        vectors.push_back(std::move(v));
    }
    const std::size_t n = g.node_words.size();
    if (options.knn == 0) throw UsageError("knn must be positive");
    if (n < options.knn + 1)
        throw EmptyInputError("signed graph needs at least knn+1 = " + std::to_string(options.knn + 1) +
                              " embedded words, have " + std::to_string(n));

    if (options.rho) {
        if (!(*options.rho > 0.0)) throw UsageError("rho must be positive");
        g.rho = *options.rho;
    } else {
        auto [mn, mx] = std::minmax_element(g.node_ratings.begin(), g.node_ratings.end());
        g.rho = (*mx - *mn) / 2.0;
        if (!(g.rho > 0.0)) g.rho = 1.0;
    }

    DenseMatrix unit(n, table.dim());
    for (std::size_t i = 0; i < n; ++i) std::copy(vectors[i].begin(), vectors[i].end(), unit.row(i).begin());
    auto neighbours = kernels::knn_unit_rows(unit, options.knn);

    std::map<std::pair<std::size_t, std::size_t>, double> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& nb : neighbours[i]) {
            std::size_t a = std::min(i, nb.index), b = std::max(i, nb.index);
            if (edges.count({a, b})) continue;
            double cos = dot(unit.row(a), unit.row(b));
            if (options.clip_cosine) cos = std::max(cos, 0.0);
            const double gate = 1.0 - std::abs(g.node_ratings[a] - g.node_ratings[b]) / g.rho;
            edges.emplace(std::make_pair(a, b), cos * gate);
        }
    }
    for (const auto& [key, w] : edges)
        if (w != 0.0) g.edges.push_back({key.first, key.second, w});
    return g;
}

namespace {

std::vector<double> abs_degrees(const SignedGraph& g) {
    std::vector<double> deg(g.size(), 0.0);
    for (const auto& e : g.edges) {
        deg[e.i] += std::abs(e.weight);
        deg[e.j] += std::abs(e.weight);
    }
    return deg;
}

void require_no_isolated(const SignedGraph& g, const std::vector<double>& deg) {
    std::string isolated;
    std::size_t count = 0;
    for (std::size_t i = 0; i < deg.size(); ++i) {
        if (deg[i] > 0.0) continue;
        if (count++ < 20) isolated += (isolated.empty() ? "" : ", ") + g.node_words[i];
    }
    if (count) throw Error("signed Laplacian: " + std::to_string(count) + " isolated node(s): " + isolated);
}

}  // namespace

DenseMatrix signed_laplacian(const SignedGraph& graph, LaplacianKind kind) {
    return signed_laplacian_sparse(graph, kind).to_dense();
}

SparseMatrix signed_laplacian_sparse(const SignedGraph& graph, LaplacianKind kind) {
    const std::size_t n = graph.size();
    auto deg = abs_degrees(graph);
    require_no_isolated(graph, deg);
    std::vector<std::map<std::size_t, double>> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = deg[i];
    for (const auto& e : graph.edges) {
        rows[e.i][e.j] -= e.weight;
        rows[e.j][e.i] -= e.weight;
    }
    if (kind == LaplacianKind::symmetric) {
        for (std::size_t i = 0; i < n; ++i)
            for (auto& [j, v] : rows[i]) v /= std::sqrt(deg[i] * deg[j]);
    }
    SparseMatrix l(n);
    std::vector<std::pair<std::size_t, double>> entries;
    for (const auto& r : rows) {
        entries.assign(r.begin(), r.end());
        l.append_row(entries);
    }
    return l;
}

ClusterResult cluster_lexicon(const Lexicon& lexicon, std::string_view construct, const EmbeddingTable& table,
                              const ClusterOptions& options) {
    if (options.k < 2) throw UsageError("k must be at least 2");
    if (options.k > lexicon.size())
        throw UsageError("k=" + std::to_string(options.k) + " exceeds the lexicon's " + std::to_string(lexicon.size()) +
                         " words");
    SignedGraph full = build_signed_graph(lexicon, construct, table, options.graph);

    // Drop isolated nodes and compact indices.
    auto deg = abs_degrees(full);
    SignedGraph g;
    g.construct = full.construct;
    g.rho = full.rho;
    g.dropped = full.dropped;
    std::vector<std::size_t> remap(full.size(), kernels::kMissing);
    for (std::size_t i = 0; i < full.size(); ++i) {
        if (deg[i] > 0.0) {
            remap[i] = g.node_words.size();
            g.node_words.push_back(full.node_words[i]);
            g.node_ratings.push_back(full.node_ratings[i]);
        } else {
            g.dropped.push_back({full.node_words[i], "isolated (no nonzero edge)"});
        }
    }
    for (const auto& e : full.edges) g.edges.push_back({remap[e.i], remap[e.j], e.weight});
    const std::size_t n = g.size();
    if (options.k > n)
        throw UsageError("k=" + std::to_string(options.k) + " exceeds the " + std::to_string(n) + " clusterable words");

    EigenPairs eig;
    if (n <= options.eigen.dense_threshold) {
        eig = sym_eig_smallest(signed_laplacian(g, options.laplacian), options.k, options.eigen);
    } else {
        SparseMatrix l = signed_laplacian_sparse(g, options.laplacian);
        double bound = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (double v : l.row_values(i)) s += std::abs(v);
            bound = std::max(bound, s);
        }
        SymmetricOperator op = [&l](std::span<const double> x, std::span<double> y) { l.multiply(x, y); };
        EigenOptions eo = options.eigen;
        eo.seed = options.seed;
        eig = sym_eig_smallest(op, n, bound, options.k, eo);
    }

    DenseMatrix embed = eig.vectors;
    for (std::size_t i = 0; i < n; ++i) {
        double nr = norm2(embed.row(i));
        if (nr > 0.0)
            for (auto& x : embed.row(i)) x /= nr;
    }
    KMeansOptions ko;
    ko.seed = options.seed;
    ko.restarts = options.restarts;
    KMeansResult km = kmeans(embed, options.k, ko);

    ClusterResult res;
    res.k = options.k;
    res.construct = g.construct;
    res.words = g.node_words;
    res.assignment = km.assignment;
    res.dropped = g.dropped;
    res.eigenvalues = eig.values;
    res.lambda_min = eig.values.front();
    res.rho = g.rho;
    res.edges = g.edges.size();
    for (const auto& e : g.edges) res.negative_edges += e.weight < 0.0;
    res.clusters.resize(options.k);
    for (std::size_t c = 0; c < options.k; ++c) res.clusters[c].id = c;
    std::vector<std::vector<std::size_t>> members(options.k);
    for (std::size_t i = 0; i < n; ++i) members[km.assignment[i]].push_back(i);
    for (std::size_t c = 0; c < options.k; ++c) {
        auto& m = members[c];
        std::sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
            if (g.node_ratings[a] != g.node_ratings[b]) return g.node_ratings[a] > g.node_ratings[b];
            return g.node_words[a] < g.node_words[b];
        });
        double sum = 0.0;
        for (auto i : m) {
            res.clusters[c].words.push_back(g.node_words[i]);
            res.clusters[c].ratings.push_back(g.node_ratings[i]);
            sum += g.node_ratings[i];
        }
        res.clusters[c].mean_rating = m.empty() ? 0.0 : sum / static_cast<double>(m.size());
    }
    return res;
}

std::vector<std::size_t> clusters_by_mean(const ClusterResult& result) {
    std::vector<std::size_t> ids;
    for (const auto& c : result.clusters)
        if (!c.words.empty()) ids.push_back(c.id);
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        return result.clusters[a].mean_rating > result.clusters[b].mean_rating;
    });
    return ids;
}

void write_clusters(const std::filesystem::path& path, const ClusterResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_dsv_row(out, {"cluster_id", "word", "rating", "cluster_mean_rating", "manual_label"}, '\t');
    for (auto id : clusters_by_mean(result)) {
        const auto& c = result.clusters[id];
        for (std::size_t i = 0; i < c.words.size(); ++i)
            write_dsv_row(out, {std::to_string(id), c.words[i], format_double(c.ratings[i]), format_double(c.mean_rating), ""},
                          '\t');
    }
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw DimensionError("ARI: labelings differ in length");
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::map<std::pair<std::size_t, std::size_t>, double> table;
    std::map<std::size_t, double> ra, rb;
    for (std::size_t i = 0; i < n; ++i) {
        table[{a[i], b[i]}] += 1.0;
        ra[a[i]] += 1.0;
        rb[b[i]] += 1.0;
    }
    auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [k, v] : table) index += c2(v);
    for (const auto& [k, v] : ra) sa += c2(v);
    for (const auto& [k, v] : rb) sb += c2(v);
    const double expected = sa * sb / c2(static_cast<double>(n));
    const double maximum = 0.5 * (sa + sb);
    if (maximum == expected) return 1.0;
    return (index - expected) / (maximum - expected);
}

}  // namespace lexind
