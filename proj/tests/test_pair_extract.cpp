#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "xlmap/fixtures.hpp"
#include "xlmap/pair_extract.hpp"

using namespace xlmap;

namespace {

LinkCounts counts_of(std::initializer_list<oracle::Triple> triples) {
    LinkCounts lc;
    for (const auto& t : triples) lc.add(t.src, t.tgt, t.count);
    return lc;
}

LinkCounts random_counts(fixtures::Rng& rng, std::size_t n_src, std::size_t n_tgt) {
    std::uniform_int_distribution<std::uint64_t> count(1, 60);
    std::uniform_int_distribution<std::size_t> width(1, 4), tgt(0, n_tgt - 1);
    LinkCounts lc;
    for (std::size_t s = 0; s < n_src; ++s) {
        for (std::size_t k = width(rng); k > 0; --k) {
            // small count range so ties are common
            lc.add("s" + std::to_string(s), "t" + std::to_string(tgt(rng)), (count(rng) / 10 + 1) * 10);
        }
    }
    return lc;
}

}  // namespace

TEST_CASE("accumulate_counts examples") {
    const Corpus one{{{"a", "b"}, {"x"}}};
    const std::vector<AlignmentLinks> links{{{0, 0}, {1, 0}}};
    auto r = accumulate_counts(one, links);
    CHECK(r.counts.count("a", "x") == 1);
    CHECK(r.counts.count("b", "x") == 1);
    CHECK(r.counts.total("a") == 1);
    CHECK(r.counts.total("b") == 1);
    CHECK(r.out_of_range.empty());

    auto twice = accumulate_counts({one[0], one[0]}, {links[0], links[0]});
    CHECK(twice.counts.count("a", "x") == 2);
    CHECK(twice.counts.total("b") == 2);
}

TEST_CASE("accumulate_counts skips out-of-range links and rejects length mismatch") {
    const Corpus c{{{"a"}, {"x"}}, {{"a", "b"}, {"x"}}};
    auto r = accumulate_counts(c, {{{0, 0}, {0, 3}}, {{2, 0}, {1, 0}}});
    REQUIRE(r.out_of_range.size() == 2);
    CHECK(r.out_of_range[0].sentence == 0);
    CHECK(r.out_of_range[1].sentence == 1);
    CHECK(r.out_of_range[1].link == Link{2, 0});
    CHECK(r.counts.count("a", "x") == 1);
    CHECK(r.counts.count("b", "x") == 1);
    CHECK_THROWS_AS(accumulate_counts(c, {{}}), DataError);
}

TEST_CASE("accumulate_counts equals a brute-force counter") {
    fixtures::ParallelCorpusSpec spec;
    spec.sentences = 100;
    spec.vocab = 15;
    spec.min_len = 2;
    spec.max_len = 9;
    auto fx = fixtures::make_parallel_corpus(spec, 99);
    // add noise links to make the table many-to-many
    fixtures::Rng rng(4);
    for (std::size_t n = 0; n < fx.corpus.size(); ++n) {
        std::uniform_int_distribution<std::size_t> i(0, fx.corpus[n].src.size() - 1), j(0, fx.corpus[n].tgt.size() - 1);
        fx.links[n].emplace(i(rng), j(rng));
    }
    auto r = accumulate_counts(fx.corpus, fx.links);
    auto ref = oracle::count_links(fx.corpus, fx.links);
    std::uint64_t ref_links = 0;
    for (const auto& t : ref) {
        CHECK(r.counts.count(t.src, t.tgt) == t.count);
        ref_links += t.count;
    }
    CHECK(oracle::flatten(r.counts).size() == ref.size());
    std::uint64_t totals = 0;
    for (const auto& [s, tot] : r.counts.src_totals) totals += tot;
    CHECK(totals == ref_links);
}

TEST_CASE("best_match") {
    // English "and": 1.1M links to "et" out of all its links, fraction 0.87.
    auto table1 = counts_of({{"and", "et", 1100000}, {"and", "de", 100000}, {"and", "ainsi", 64368}});
    auto m = best_match(table1, "and");
    REQUIRE(m);
    CHECK(m->tgt == "et");
    CHECK(m->count == 1100000);
    CHECK(std::round(m->fraction * 100) / 100 == 0.87);

    auto h = best_match(counts_of({{"a", "x", 3}, {"a", "y", 1}}), "a");
    REQUIRE(h);
    CHECK(*h == TranslationPair{"a", "x", 3, 0.75});

    auto tie = best_match(counts_of({{"a", "y", 2}, {"a", "x", 2}}), "a");
    REQUIRE(tie);
    CHECK(*tie == TranslationPair{"a", "x", 2, 0.5});

    CHECK_FALSE(best_match(table1, "or").has_value());
}

TEST_CASE("extract_pairs examples") {
    // Fraction exactly 0.5 passes the inclusive threshold.
    auto mr = extract_pairs(counts_of({{"Mr", "Monsieur", 99000}, {"Mr", "Messieurs", 50000}, {"Mr", "M", 49000}}));
    REQUIRE(mr.size() == 1);
    CHECK(mr[0] == TranslationPair{"Mr", "Monsieur", 99000, 0.5});

    // a's best target is consumed by the higher-count b.
    auto lc = counts_of({{"a", "x", 27}, {"a", "q", 3}, {"b", "x", 36}, {"b", "r", 4}});
    auto got = extract_pairs(lc);
    REQUIRE(got.size() == 1);
    CHECK(got[0].src == "b");
    CHECK(got[0].tgt == "x");
    CHECK(got == oracle::greedy_pairs(oracle::flatten(lc), 25, 0.5));

    auto low = extract_pairs(counts_of({{"c", "y", 10}, {"c", "z", 0}}));
    CHECK(counts_of({{"c", "z", 0}}).counts.empty());
    CHECK(low.empty());
    CHECK(extract_pairs(counts_of({{"c", "y", 25}})).size() == 1);
    CHECK(extract_pairs(counts_of({{"c", "y", 24}})).empty());
}

TEST_CASE("extract_pairs agrees with the brute-force greedy reference") {
    fixtures::Rng rng(123);
    std::uniform_int_distribution<std::uint64_t> mc(0, 40);
    std::uniform_real_distribution<double> mf(0.0, 0.9);
    for (int trial = 0; trial < 300; ++trial) {
        const auto lc = random_counts(rng, 20, 8);
        const std::uint64_t min_count = mc(rng);
        const double min_fraction = mf(rng);
        const auto got = extract_pairs(lc, min_count, min_fraction);
        CHECK(got == oracle::greedy_pairs(oracle::flatten(lc), min_count, min_fraction));

        std::set<std::string> srcs, tgts;
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(srcs.insert(got[k].src).second);
            CHECK(tgts.insert(got[k].tgt).second);
            if (k) CHECK(got[k].count <= got[k - 1].count);
            CHECK(got[k].count >= min_count);
            CHECK(got[k].fraction >= min_fraction);
            CHECK(lc.count(got[k].src, got[k].tgt) == got[k].count);
            CHECK(got[k].fraction == static_cast<double>(got[k].count) / static_cast<double>(lc.total(got[k].src)));
        }
    }
}

TEST_CASE("filter_by_frequency") {
    const std::vector<TranslationPair> pairs{{"a", "x", 30, 1.0}, {"b", "y", 30, 1.0}, {"c", "z", 30, 1.0}};
    const FrequencyTable src{{"a", 500}, {"b", 499}, {"c", 900}};
    const FrequencyTable tgt{{"x", 500}, {"y", 900}};
    auto kept = filter_by_frequency(pairs, src, tgt);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].src == "a");
    CHECK(filter_by_frequency(pairs, src, tgt, 500, FrequencySide::Source).size() == 2);
    CHECK(filter_by_frequency(pairs, src, tgt, 500, FrequencySide::Target).size() == 2);
    CHECK(parse_frequency_side("target") == FrequencySide::Target);

    fixtures::Rng rng(8);
    std::uniform_int_distribution<std::uint64_t> f(0, 1000);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TranslationPair> ps;
        FrequencyTable sf, tf;
        for (int k = 0; k < 30; ++k) {
            ps.push_back({"s" + std::to_string(k), "t" + std::to_string(k), 1, 1.0});
            if (k % 5) sf[ps.back().src] = f(rng);
            if (k % 7) tf[ps.back().tgt] = f(rng);
        }
        std::vector<TranslationPair> ref;
        for (const auto& p : ps) {
            if (sf.count(p.src) && sf[p.src] >= 500 && tf.count(p.tgt) && tf[p.tgt] >= 500) ref.push_back(p);
        }
        CHECK(filter_by_frequency(ps, sf, tf, 500) == ref);
    }
}

TEST_CASE("shared_vocab_pairs") {
    fixtures::Rng rng(2);
    const auto a = fixtures::random_model("w", 6, 3, rng);   // w0..w5
    VocabModel::Builder bb(3);
    for (const char* w : {"w3", "w4", "w5", "w6", "the"}) bb.add(w, fixtures::gaussian_matrix(1, 3, rng).row(0));
    const auto b = std::move(bb).build();
    const FrequencyTable freqs{{"w3", 800}, {"w4", 499}, {"w5", 10000}, {"w0", 9000}, {"w6", 9000}};
    auto pairs = shared_vocab_pairs(a, b, freqs);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == TranslationPair{"w5", "w5", 10000, 1.0});
    CHECK(pairs[1] == TranslationPair{"w3", "w3", 800, 1.0});

    // brute-force intersection
    std::vector<std::string> ref;
    for (const auto& w : a.words()) {
        for (const auto& v : b.words()) {
            if (w == v) ref.push_back(w);
        }
    }
    CHECK(shared_vocab_pairs(a, b, freqs, 0).size() == ref.size());
}

TEST_CASE("pairs file round trip and errors") {
    const std::vector<TranslationPair> pairs{{"and", "et", 1100000, 0.87}, {"Mr", "Monsieur", 99000, 0.5}};
    std::ostringstream out;
    write_pairs(pairs, out);
    CHECK(out.str() == "and\tet\t1100000\t0.87\nMr\tMonsieur\t99000\t0.5\n");
    std::istringstream in(out.str());
    CHECK(read_pairs(in) == pairs);

    std::istringstream bad("a\tb\t3\n");
    CHECK_THROWS_AS(read_pairs(bad), FormatError);
    std::istringstream freq("# comment\nthe 10\nthe 5\ncat x\n");
    CHECK_THROWS_AS(read_frequency_table(freq), FormatError);
}

TEST_CASE("corpus frequencies count tokens per side") {
    auto f = corpus_frequencies({{{"a", "a", "b"}, {"x"}}, {{"a"}, {"x", "y"}}});
    CHECK(f.src["a"] == 3);
    CHECK(f.src["b"] == 1);
    CHECK(f.tgt["x"] == 2);
}
