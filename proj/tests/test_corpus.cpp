#include <doctest.h>

#include <sstream>

#include "lexind/corpus.hpp"
#include "lexind/dsv.hpp"
#include "lexind/error.hpp"
#include "testing.hpp"

using namespace lexind;
namespace fs = std::filesystem;

TEST_CASE("tokenize") {
    CHECK(tokenize("A sad, sad story.") == TokenList{"a", "sad", "sad", "story"});
    CHECK(tokenize("Dunno...") == TokenList{"dunno"});
    CHECK(tokenize("!!") == TokenList{"!!"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("  \t\n ").empty());
    CHECK(tokenize("\"Hello\" (world)") == TokenList{"hello", "world"});
    CHECK(tokenize("don't WON'T") == TokenList{"don't", "won't"});
    CHECK(tokenize("caf\xc3\xa9!") == TokenList{"caf\xc3\xa9"});
}

TEST_CASE("tokenize is idempotent on its joined output") {
    Rng rng(5);
    const std::string alphabet = "abcXYZ019 .,!?'\"-()\t";
    for (int t = 0; t < 200; ++t) {
        std::string text;
        std::size_t len = rng.index(40);
        for (std::size_t i = 0; i < len; ++i) text += alphabet[rng.index(alphabet.size())];
        auto once = tokenize(text);
        std::string joined;
        for (const auto& tok : once) joined += (joined.empty() ? "" : " ") + tok;
        CHECK(tokenize(joined) == once);
    }
}

TEST_CASE("dsv quoting and parsing") {
    std::istringstream in("\xEF\xBB\xBFid,text\n1,\"a, \"\"quoted\"\"\nline\"\n\n2,plain\n");
    DsvTable t = read_dsv(in, ',');
    REQUIRE(t.rows.size() == 2);
    CHECK(t.header == std::vector<std::string>{"id", "text"});
    CHECK(t.rows[0][1] == "a, \"quoted\"\nline");
    CHECK(t.rows[1][1] == "plain");
    CHECK(t.row_lines[1] == 5);
    CHECK(dsv_escape("a,b", ',') == "\"a,b\"");
    CHECK(dsv_escape("a\tb", ',') == "a\tb");
    CHECK(delimiter_for("x.csv") == ',');
    CHECK(delimiter_for("x.tsv") == '\t');

    std::istringstream bad("a,b\n1,2,3\n");
    CHECK_THROWS_AS(read_dsv(bad, ','), RowError);

    CHECK(parse_double("2.5") == 2.5);
    CHECK_FALSE(parse_double("2.5x").has_value());
    CHECK_FALSE(parse_double("").has_value());
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(parse_double(format_double(v)) == v);
}

TEST_CASE("load_corpus") {
    fs::path dir = testing::scratch_dir("corpus");
    testing::write_text(dir / "toy.csv", "id,text,empathy\nd1,a sad story,6.0\nd2,a sad joke,2.0\n");
    Corpus c = load_corpus(dir / "toy.csv", "text", {"empathy"}, {.id_column = std::string("id")});
    REQUIRE(c.size() == 2);
    CHECK(c.documents()[0].id == "d1");
    std::vector<std::string> vocab;
    for (const auto& [w, df] : c.vocab()) vocab.push_back(w);
    CHECK(vocab == std::vector<std::string>{"a", "joke", "sad", "story"});
    CHECK(c.inverted_index().at("sad") == std::vector<std::size_t>{0, 1});
    CHECK(c.inverted_index().at("joke") == std::vector<std::size_t>{1});
    CHECK(c.vocab().at("a") == 2);

    SUBCASE("missing column names the column") {
        try {
            load_corpus(dir / "toy.csv", "text", {"distress"});
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find("distress") != std::string::npos);
        }
    }
    SUBCASE("unparsable rating reports the line") {
        testing::write_text(dir / "bad.csv", "text,empathy\nfine,1\nbroken,abc\n");
        try {
            load_corpus(dir / "bad.csv", "text", {"empathy"});
            FAIL("expected RowError");
        } catch (const RowError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("documents without tokens are dropped and reported") {
        testing::write_text(dir / "mixed.tsv", "text\ty\n   \t1\nword\t2\n\t3\n");
        Corpus m = load_corpus(dir / "mixed.tsv", "text", {"y"});
        CHECK(m.size() == 1);
        CHECK(m.report().dropped_empty == 2);
        CHECK(m.report().dropped_ids.size() == 2);
    }
    SUBCASE("corpus that is empty after filtering") {
        testing::write_text(dir / "empty.csv", "text,y\n\" \",1\n");
        CHECK_THROWS_AS(load_corpus(dir / "empty.csv", "text", {"y"}), EmptyInputError);
    }
    SUBCASE("punctuation-only text is a token, not an empty document") {
        testing::write_text(dir / "punct.csv", "text,y\n...,1\n");
        Corpus p = load_corpus(dir / "punct.csv", "text", {"y"});
        CHECK(p.documents()[0].tokens == TokenList{"..."});
    }
    SUBCASE("tokenizer seam") {
        CorpusOptions opts;
        opts.tokenizer = [](std::string_view s) { return TokenList{std::string(s)}; };
        Corpus whole = load_corpus(dir / "toy.csv", "text", {"empathy"}, opts);
        CHECK(whole.vocab().count("a sad story") == 1);
    }
    SUBCASE("min_df") {
        CorpusOptions opts;
        opts.min_df = 2;
        Corpus f = load_corpus(dir / "toy.csv", "text", {"empathy"}, opts);
        CHECK(f.vocab().size() == 2);
        CHECK(f.inverted_index().count("story") == 0);
    }
    CHECK_THROWS_AS(c.construct_index("valence"), SchemaError);
}

TEST_CASE("inverted index invariants and round trip") {
    Rng rng(17);
    fs::path dir = testing::scratch_dir("corpus_roundtrip");
    for (int t = 0; t < 10; ++t) {
        Corpus c = testing::random_corpus(rng, 1 + rng.index(40), 1 + rng.index(30));
        for (const auto& [w, docs] : c.inverted_index()) {
            CHECK(c.vocab().at(w) == docs.size());
            CHECK(docs.size() >= 1);
            CHECK(docs.size() <= c.size());
            for (std::size_t i = 0; i < c.size(); ++i) {
                const auto& tok = c.documents()[i].tokens;
                bool has = std::find(tok.begin(), tok.end(), w) != tok.end();
                CHECK(has == std::binary_search(docs.begin(), docs.end(), i));
            }
        }
        CHECK(c.vocab().size() == c.inverted_index().size());

        write_corpus(dir / "c.csv", c);
        Corpus back = load_corpus(dir / "c.csv", "text", {"y"}, {.id_column = std::string("id")});
        REQUIRE(back.size() == c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            CHECK(back.documents()[i].tokens == c.documents()[i].tokens);
            CHECK(back.documents()[i].ratings == c.documents()[i].ratings);
        }
        CHECK(back.fingerprint() == c.fingerprint());
    }
}

TEST_CASE("subset keeps order and rebuilds the index") {
    Rng rng(3);
    Corpus c = testing::random_corpus(rng, 20, 15);
    Corpus s = c.subset({5, 2, 9});
    REQUIRE(s.size() == 3);
    CHECK(s.documents()[0].id == c.documents()[5].id);
    for (const auto& [w, docs] : s.inverted_index())
        for (auto i : docs) CHECK(i < 3);
}

TEST_CASE("load_gold_lexicon") {
    fs::path dir = testing::scratch_dir("gold");
    testing::write_text(dir / "norms.tsv", "word\tvalence\nsad\t2.10\nHappy\t8.47\n");
    GoldWordLexicon g = load_gold_lexicon(dir / "norms.tsv", "word", {"valence"});
    CHECK(g.ratings.size() == 2);
    CHECK(g.ratings.at("happy") == std::vector<double>{8.47});

    testing::write_text(dir / "dup.tsv", "word\tvalence\nsad\t2\nsad\t3\n");
    GoldWordLexicon d = load_gold_lexicon(dir / "dup.tsv", "word", {"valence"});
    CHECK(d.ratings.size() == 1);
    CHECK(d.ratings.at("sad")[0] == 3.0);
    CHECK(d.report.duplicates == 1);

    testing::write_text(dir / "empty.tsv", "word\tvalence\n");
    CHECK_THROWS_AS(load_gold_lexicon(dir / "empty.tsv", "word", {"valence"}), EmptyInputError);
    CHECK_THROWS_AS(load_gold_lexicon(dir / "norms.tsv", "term", {"valence"}), SchemaError);
}
