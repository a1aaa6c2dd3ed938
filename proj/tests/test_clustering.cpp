#include <doctest.h>

#include <cmath>
#include <set>

#include "lexind/clustering.hpp"
#include "lexind/error.hpp"
#include "testing.hpp"

using namespace lexind;

namespace {

struct Groups {
    Lexicon lexicon;
    EmbeddingTable table{1, {}, {}};
    std::map<std::string, std::size_t> label;
};

// Each group gets its own orthogonal direction and a narrow rating band.
Groups planted_groups(std::size_t groups, std::size_t per_group, double noise, const std::vector<double>& ratings,
                      std::uint64_t seed, std::size_t dim = 8) {
    Rng rng(seed);
    Groups g;
    std::vector<std::string> words;
    std::vector<float> values;
    std::map<std::string, std::vector<double>> entries;
    for (std::size_t b = 0; b < groups; ++b)
        for (std::size_t i = 0; i < per_group; ++i) {
            std::string w = testing::word_name(("g" + std::to_string(b) + "_").c_str(), i);
            words.push_back(w);
            for (std::size_t d = 0; d < dim; ++d) values.push_back(static_cast<float>((d == b ? 1.0 : 0.0) + rng.normal(0.0, noise)));
            entries[w] = {ratings[b] + rng.uniform(-0.05, 0.05)};
            g.label[w] = b;
        }
    g.lexicon = Lexicon({"empathy"}, entries);
    g.table = EmbeddingTable(dim, words, values);
    return g;
}

std::vector<std::size_t> planted_labels(const Groups& g, const ClusterResult& r) {
    std::vector<std::size_t> out;
    for (const auto& w : r.words) out.push_back(g.label.at(w));
    return out;
}

SignedGraph random_graph(Rng& rng, std::size_t n, double density) {
    SignedGraph g;
    for (std::size_t i = 0; i < n; ++i) g.node_words.push_back(testing::word_name("n", i));
    g.node_ratings.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        // A chain keeps every node attached.
        if (i + 1 < n) g.edges.push_back({i, i + 1, rng.uniform(-1, 1) + 1e-3});
        for (std::size_t j = i + 2; j < n; ++j)
            if (rng.bernoulli(density)) g.edges.push_back({i, j, rng.uniform(-1, 1)});
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    return g;
}

}  // namespace

TEST_CASE("edge weight examples") {
    EmbeddingTable t(2, {"a", "b"}, {1, 1, 1, 1});
    GraphOptions o;
    o.knn = 1;
    o.rho = 1.0;
    SignedGraph same = build_signed_graph(Lexicon({"e"}, {{"a", {3.0}}, {"b", {3.0}}}), "e", t, o);
    REQUIRE(same.edges.size() == 1);
    CHECK(same.edges[0].weight == doctest::Approx(1.0));
    SignedGraph apart = build_signed_graph(Lexicon({"e"}, {{"a", {1.0}}, {"b", {3.0}}}), "e", t, {.knn = 1, .rho = 1.0});
    REQUIRE(apart.edges.size() == 1);
    CHECK(apart.edges[0].weight == doctest::Approx(-1.0));

    Lexicon three({"e"}, {{"a", {1.0}}, {"b", {3.0}}, {"c", {2.0}}});
    CHECK_THROWS_AS(build_signed_graph(three, "e", t, {.knn = 1, .rho = 0.0}), UsageError);
    CHECK_THROWS_AS(build_signed_graph(three, "e", t, {.knn = 0}), UsageError);
    // "c" has no embedding, leaving only two usable words.
    CHECK_THROWS_AS(build_signed_graph(three, "e", t, {.knn = 2}), EmptyInputError);
    CHECK(build_signed_graph(three, "e", t, {.knn = 1}).dropped.size() == 1);
    // Default rho is half the rating range: (3 - 1) / 2.
    CHECK(build_signed_graph(three, "e", t, {.knn = 1}).rho == 1.0);
}

TEST_CASE("planted groups give signed edges by group") {
    Groups g = planted_groups(2, 30, 0.2, {1.0, 5.0}, 3);
    SignedGraph graph = build_signed_graph(g.lexicon, "empathy", g.table, {.knn = 10});
    CHECK(graph.rho == doctest::Approx(2.0).epsilon(0.05));
    std::size_t positive = 0;
    for (const auto& e : graph.edges) {
        CHECK(e.i < e.j);
        CHECK(e.weight != 0.0);
        bool same = g.label.at(graph.node_words[e.i]) == g.label.at(graph.node_words[e.j]);
        if (same) CHECK(e.weight > 0.0);
        else CHECK(e.weight <= 0.0);
        positive += e.weight > 0.0;
    }
    CHECK(positive > 0);

    ClusterOptions co;
    co.k = 2;
    co.graph.knn = 10;
    co.seed = 9;
    ClusterResult r = cluster_lexicon(g.lexicon, "empathy", g.table, co);
    CHECK(adjusted_rand_index(r.assignment, planted_labels(g, r)) >= 0.9);
    auto order = clusters_by_mean(r);
    REQUIRE(order.size() == 2);
    CHECK(r.clusters[order[0]].mean_rating > 4.0);
    CHECK(r.clusters[order[1]].mean_rating < 2.0);
    for (const auto& c : r.clusters)
        for (std::size_t i = 1; i < c.ratings.size(); ++i) CHECK(c.ratings[i - 1] >= c.ratings[i]);
}

TEST_CASE("signed Laplacian examples") {
    SignedGraph pos;
    pos.node_words = {"a", "b"};
    pos.node_ratings = {0, 0};
    pos.edges = {{0, 1, 1.0}};
    CHECK(signed_laplacian(pos) == DenseMatrix::from_rows({{1, -1}, {-1, 1}}));
    EigenPairs ep = sym_eig_smallest(signed_laplacian(pos), 2);
    CHECK(ep.values[0] == doctest::Approx(0.0));
    CHECK(ep.values[1] == doctest::Approx(2.0));

    SignedGraph neg = pos;
    neg.edges = {{0, 1, -1.0}};
    DenseMatrix ln = signed_laplacian(neg);
    CHECK(ln == DenseMatrix::from_rows({{1, 1}, {1, 1}}));
    EigenPairs en = sym_eig_smallest(ln, 2);
    CHECK(en.values[0] == doctest::Approx(0.0));
    CHECK(en.values[1] == doctest::Approx(2.0));
    // The null vector gives the pair opposite signs.
    CHECK(en.vectors(0, 0) * en.vectors(1, 0) < 0.0);

    SignedGraph lonely = pos;
    lonely.node_words.push_back("hermit");
    lonely.node_ratings.push_back(0);
    try {
        signed_laplacian(lonely);
        FAIL("expected an isolated-node error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("hermit") != std::string::npos);
    }
}

TEST_CASE("signed Laplacian quadratic form, PSD and sparse form") {
    Rng rng(15);
    for (int t = 0; t < 20; ++t) {
        SignedGraph g = random_graph(rng, 3 + rng.index(20), 0.3);
        DenseMatrix l = signed_laplacian(g);
        std::vector<double> x(g.size());
        for (auto& v : x) v = rng.normal();
        double lhs = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) lhs += x[i] * l(i, j) * x[j];
        double rhs = 0.0;
        for (const auto& e : g.edges) {
            double s = e.weight > 0 ? 1.0 : -1.0;
            rhs += std::abs(e.weight) * (x[e.i] - s * x[e.j]) * (x[e.i] - s * x[e.j]);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
        CHECK(jacobi_eigen(l).values.front() >= -1e-8);
        CHECK(signed_laplacian_sparse(g).to_dense() == l);

        DenseMatrix s = signed_laplacian(g, LaplacianKind::symmetric);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(s(i, i) == doctest::Approx(1.0));
        CHECK(jacobi_eigen(s).values.front() >= -1e-8);
    }
}

TEST_CASE("scaling edge weights scales the Laplacian and keeps the assignment") {
    Groups g = planted_groups(3, 15, 0.3, {1.0, 3.0, 5.0}, 4);
    SignedGraph graph = build_signed_graph(g.lexicon, "empathy", g.table, {.knn = 8});
    SignedGraph scaled = graph;
    for (auto& e : scaled.edges) e.weight *= 4.0;
    DenseMatrix l = signed_laplacian(graph), ls = signed_laplacian(scaled);
    for (std::size_t i = 0; i < l.rows(); ++i)
        for (std::size_t j = 0; j < l.cols(); ++j) CHECK(ls(i, j) == doctest::Approx(4.0 * l(i, j)).epsilon(1e-14));

    auto assign = [](const DenseMatrix& lap) {
        EigenPairs ep = sym_eig_smallest(lap, 3);
        DenseMatrix rows = ep.vectors;
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            double n = norm2(rows.row(i));
            if (n > 0)
                for (auto& v : rows.row(i)) v /= n;
        }
        return kmeans(rows, 3, {.seed = 6}).assignment;
    };
    CHECK(assign(l) == assign(ls));
}

TEST_CASE("positive components become clusters") {
    Groups g = planted_groups(3, 10, 0.02, {2.0, 2.5, 3.0}, 5);
    ClusterOptions co;
    co.k = 3;
    co.graph.knn = 5;
    co.graph.rho = 10.0;
    co.seed = 1;
    ClusterResult r = cluster_lexicon(g.lexicon, "empathy", g.table, co);
    CHECK(r.negative_edges == 0);
    CHECK(adjusted_rand_index(r.assignment, planted_labels(g, r)) == 1.0);
    CHECK(r.lambda_min >= -1e-8);
}

TEST_CASE("clustering bookkeeping") {
    Groups g = planted_groups(2, 12, 0.2, {1.0, 5.0}, 6);
    // Add a word without an embedding and one with a zero embedding.
    auto entries = g.lexicon.entries();
    entries["absent"] = {3.0};
    entries["zero"] = {3.0};
    Lexicon lex({"empathy"}, entries);
    std::vector<std::string> words = g.table.words();
    std::vector<float> values(g.table.values().begin(), g.table.values().begin() + static_cast<std::ptrdiff_t>(words.size() * 8));
    words.push_back("zero");
    values.resize(values.size() + 8, 0.0f);
    EmbeddingTable table(8, words, values);

    ClusterOptions co;
    co.k = 2;
    co.graph.knn = 5;
    co.seed = 3;
    ClusterResult a = cluster_lexicon(lex, "empathy", table, co);
    std::set<std::string> seen(a.words.begin(), a.words.end());
    for (const auto& d : a.dropped) {
        CHECK_FALSE(d.reason.empty());
        seen.insert(d.word);
    }
    CHECK(seen.size() == lex.size());
    CHECK(a.words.size() + a.dropped.size() == lex.size());
    CHECK(a.assignment.size() == a.words.size());
    for (auto c : a.assignment) CHECK(c < 2);

    ClusterResult b = cluster_lexicon(lex, "empathy", table, co);
    CHECK(a.assignment == b.assignment);
    CHECK(a.eigenvalues == b.eigenvalues);

    co.laplacian = LaplacianKind::symmetric;
    ClusterResult s = cluster_lexicon(lex, "empathy", table, co);
    CHECK(adjusted_rand_index(s.assignment, planted_labels(g, s)) >= 0.9);

    auto dir = testing::scratch_dir("clusters");
    write_clusters(dir / "c.tsv", a);
    CHECK(testing::read_text(dir / "c.tsv").rfind("cluster_id\tword\trating\tcluster_mean_rating\tmanual_label\n", 0) == 0);

    co.k = 1;
    CHECK_THROWS_AS(cluster_lexicon(lex, "empathy", table, co), UsageError);
    co.k = lex.size() + 1;
    CHECK_THROWS_AS(cluster_lexicon(lex, "empathy", table, co), UsageError);
}

TEST_CASE("adjusted Rand index") {
    std::vector<std::size_t> a{0, 0, 1, 1, 2, 2}, perm{2, 2, 0, 0, 1, 1};
    CHECK(adjusted_rand_index(a, a) == 1.0);
    CHECK(adjusted_rand_index(a, perm) == doctest::Approx(1.0));
    // Pair counts: sum C(n_ij,2) = 0, row and column sums 2 each, C(4,2) = 6.
    std::vector<std::size_t> x{0, 0, 1, 1}, y{0, 1, 0, 1};
    CHECK(adjusted_rand_index(x, y) == doctest::Approx(-0.5));
    std::vector<std::size_t> shorter{0, 1};
    CHECK_THROWS_AS(adjusted_rand_index(a, shorter), DimensionError);
}
