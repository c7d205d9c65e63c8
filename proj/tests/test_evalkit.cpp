#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "xlmap/evalkit.hpp"
#include "xlmap/fixtures.hpp"
#include "xlmap/model_merge.hpp"

using namespace xlmap;

namespace {

std::vector<double> random_with_ties(fixtures::Rng& rng, std::size_t n) {
    std::uniform_int_distribution<int> v(0, 9);
    std::vector<double> out(n);
    for (auto& x : out) x = v(rng);
    return out;
}

// Model whose pairwise cosines reproduce the dataset ranking: words on the unit circle.
VocabModel circle_model(std::size_t n) {
    VocabModel::Builder b(2);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = 0.1 * static_cast<double>(k);
        b.add("c" + std::to_string(k), Eigen::RowVector2d(std::cos(t), std::sin(t)));
    }
    return std::move(b).build();
}

}  // namespace

TEST_CASE("spearman examples") {
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) == 1.0);
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == -1.0);
    // Tied x ranks (1, 2.5, 2.5, 4) against (1, 3, 2, 4): 4.5 / sqrt(4.5 * 5) = 3/sqrt(10).
    CHECK(spearman(std::vector<double>{1, 2, 2, 4}, std::vector<double>{1, 3, 2, 4}) ==
          doctest::Approx(0.9486832980505139).epsilon(1e-12));
    CHECK(average_ranks(std::vector<double>{5, 1, 5, 3}) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("spearman errors") {
    CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{2}), DataError);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DataError);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST_CASE("spearman matches the tied-rank reference and is rank invariant") {
    fixtures::Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_with_ties(rng, 5 + static_cast<std::size_t>(trial % 40));
        const auto y = random_with_ties(rng, x.size());
        if (std::set<double>(x.begin(), x.end()).size() < 2 || std::set<double>(y.begin(), y.end()).size() < 2) continue;
        const double rho = spearman(x, y);
        CHECK(std::abs(rho - oracle::spearman(x, y)) <= 1e-9);
        std::vector<double> fx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) fx[i] = std::exp(x[i]) + 3.0 * x[i];
        CHECK(spearman(fx, y) == rho);
    }
}

TEST_CASE("eval_similarity on a perfectly ranked model scores 100") {
    const auto m = circle_model(12);
    SimilarityDataset ds;
    for (std::size_t k = 1; k < 12; ++k) ds.items.push_back({"c0", "c" + std::to_string(k), 12.0 - k});
    auto r = eval_similarity(m, ds);
    CHECK(r.score == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(r.evaluated == 11);
    CHECK(r.skipped_items == 0);
}

TEST_CASE("eval_similarity skips items with out-of-vocabulary words") {
    const auto m = circle_model(5);
    SimilarityDataset ds{{{"c0", "c1", 4}, {"c0", "c2", 3}, {"c0", "c3", 2}, {"c0", "nope", 1}}};
    auto r = eval_similarity(m, ds);
    CHECK(r.skipped_items == 1);
    CHECK(r.unseen_words == 1);
    CHECK(r.oov_slots == 1);
    CHECK(r.evaluated + r.skipped_items == ds.items.size());

    SimilarityDataset tiny{{{"c0", "c1", 4}, {"c0", "x", 3}}};
    CHECK_THROWS_AS(eval_similarity(m, tiny), DataError);
}

TEST_CASE("eval_similarity matches a brute-force scorer and ignores global scaling") {
    fixtures::Rng rng(8);
    const auto m = fixtures::random_model("w", 30, 8, rng);
    std::uniform_int_distribution<std::size_t> pick(0, 29);
    std::uniform_real_distribution<double> human(0, 10);
    SimilarityDataset ds;
    std::vector<double> hs, cs;
    while (ds.items.size() < 50) {
        const auto i = pick(rng), j = pick(rng);
        if (i == j) continue;
        ds.items.push_back({m.words()[i], m.words()[j], std::round(human(rng))});
        const Vector u = m.row(i), v = m.row(j);
        hs.push_back(ds.items.back().human);
        cs.push_back(oracle::cosine({u.data(), u.data() + 8}, {v.data(), v.data() + 8}));
    }
    const double score = eval_similarity(m, ds).score;
    CHECK(std::abs(score - 100.0 * oracle::spearman(hs, cs)) <= 1e-9);
    CHECK(std::abs(eval_similarity(m.with_matrix(7.5 * m.matrix()), ds).score - score) <= 1e-9);
}

TEST_CASE("translated evaluation reduces to direct evaluation") {
    fixtures::Rng rng(12);
    const auto src = fixtures::random_model("w", 40, 6, rng);
    TranslationTable identity;
    for (const auto& w : src.words()) identity.entries.emplace(w, w);
    SimilarityDataset ds;
    std::uniform_int_distribution<std::size_t> pick(0, 39);
    std::uniform_real_distribution<double> human(0, 10);
    while (ds.items.size() < 60) {
        auto i = pick(rng), j = pick(rng);
        if (i != j) ds.items.push_back({src.words()[i], src.words()[j], human(rng)});
    }
    const double direct = eval_similarity(src, ds).score;
    CHECK(eval_similarity_translated(src, LinearMap{Matrix::Identity(6, 6)}, identity, ds).score == direct);
    CHECK(std::abs(eval_similarity_translated(src, LinearMap{3.0 * Matrix::Identity(6, 6)}, identity, ds).score -
                   direct) <= 1e-9);

    // target = source * X0 with an exact map
    const Matrix X0 = fixtures::random_invertible(6, rng);
    const auto tgt = src.with_matrix(src.matrix() * X0);
    CHECK(std::abs(eval_similarity_translated(src, LinearMap{X0}, identity, ds).score - eval_similarity(tgt, ds).score) <=
          1e-9);

    TranslationTable partial = identity;
    partial.entries.erase(src.words()[0]);
    auto r = eval_similarity_translated(src, LinearMap{Matrix::Identity(6, 6)}, partial, ds);
    CHECK(r.unseen_words <= 1);
    CHECK(r.evaluated + r.skipped_items == ds.items.size());
}

TEST_CASE("parallelogram analogies are solved by both methods") {
    const auto fx = fixtures::make_parallelogram_fixture(6, 50, 30, 3);
    const AnalogySolver solver(fx.model);
    for (const auto& item : fx.analogy.items) {
        for (auto method : {AnalogyMethod::CosSum, AnalogyMethod::CosMul}) {
            auto ans = solver.solve(item.a, item.a_star, item.b, method);
            REQUIRE(ans);
            CHECK(ans->word == item.b_star);
            CHECK(ans->word != item.a);
            CHECK(ans->word != item.a_star);
            CHECK(ans->word != item.b);
        }
        auto mul = solver.solve(item.a, item.a_star, item.b, AnalogyMethod::CosMul);
        CHECK(*mul->min_denominator >= solver.epsilon());
    }
    auto report = eval_analogy(fx.model, fx.analogy);
    CHECK(report.cossum.score == 1.0);
    CHECK(report.cosmul.score == 1.0);
}

TEST_CASE("king - man + woman = queen") {
    VocabModel::Builder b(3);
    b.add("man", Eigen::RowVector3d(1, 0, 1));
    b.add("woman", Eigen::RowVector3d(1, 0, -1));
    b.add("king", Eigen::RowVector3d(0, 1, 1));
    b.add("queen", Eigen::RowVector3d(0, 1, -1));
    b.add("apple", Eigen::RowVector3d(-1, -1, 0));
    const auto m = std::move(b).build();
    CHECK(solve_analogy(m, "man", "woman", "king", AnalogyMethod::CosSum) == "queen");
    CHECK(solve_analogy(m, "man", "woman", "king", AnalogyMethod::CosMul) == "queen");
    CHECK_FALSE(solve_analogy(m, "man", "woman", "prince", AnalogyMethod::CosSum).has_value());
}

TEST_CASE("a == a_star reduces CosSum to the nearest neighbor of b") {
    fixtures::Rng rng(4);
    const auto m = fixtures::random_model("w", 25, 5, rng);
    for (std::size_t b = 1; b < 10; ++b) {
        auto ans = solve_analogy(m, "w0", "w0", m.words()[b], AnalogyMethod::CosSum);
        auto nn = nearest_neighbors(m, m.row(b), 1, {"w0", m.words()[b]});
        REQUIRE(ans);
        CHECK(*ans == nn[0].word);
    }
}

TEST_CASE("analogy solvers never return query words and CosMul denominators stay above epsilon") {
    fixtures::Rng rng(6);
    const auto m = fixtures::random_model("w", 12, 3, rng);
    const AnalogySolver solver(m, 0.001);
    std::uniform_int_distribution<std::size_t> pick(0, 11);
    for (int k = 0; k < 300; ++k) {
        const auto& a = m.words()[pick(rng)];
        const auto& as = m.words()[pick(rng)];
        const auto& b = m.words()[pick(rng)];
        for (auto method : {AnalogyMethod::CosSum, AnalogyMethod::CosMul}) {
            auto ans = solver.solve(a, as, b, method);
            if (!ans) continue;
            CHECK(ans->word != a);
            CHECK(ans->word != as);
            CHECK(ans->word != b);
            if (method == AnalogyMethod::CosMul) CHECK(*ans->min_denominator >= 0.001);
        }
    }
    for (double c = -1.0; c <= 1.0; c += 0.125) CHECK(cosmul_denominator(c, 0.001) >= 0.001);
    CHECK_THROWS_AS(AnalogySolver(m, 0.0), DataError);
}

TEST_CASE("analogy items with unknown words count as wrong") {
    const auto fx = fixtures::make_parallelogram_fixture(4, 50, 5, 9);
    AnalogyDataset ds;
    for (auto item : fx.analogy.items) {
        item.b_star = "missing_" + item.b_star;
        ds.items.push_back(item);
    }
    auto r = eval_analogy(fx.model, ds);
    CHECK(r.cossum.score == 0.0);
    CHECK(r.cosmul.score == 0.0);
    CHECK(r.cossum.unseen_words == 4);
    CHECK(r.cossum.oov_slots == ds.items.size());

    AnalogyDataset query_oov{{{"x0_a", "x0_b", "nope", "x1_b"}, fx.analogy.items[0]}};
    auto q = eval_analogy(fx.model, query_oov);
    CHECK(q.cossum.skipped_items == 1);
    CHECK(q.cossum.evaluated == 1);
    CHECK(q.cossum.score == 0.5);
    CHECK_THROWS_AS(eval_analogy(fx.model, AnalogyDataset{}), DataError);
}

TEST_CASE("merged model answers at least as many analogies as the base") {
    const auto fx = fixtures::make_merge_fixture({}, 21);
    const auto pairs = shared_vocab_pairs(fx.donor, fx.base, fx.freqs);
    const auto map = fit(build_matrices(pairs, fx.donor, fx.base));
    const auto merged = import_missing(fx.base, fx.donor, map).merged;
    const auto base_r = eval_analogy(fx.base, fx.analogy);
    const auto merged_r = eval_analogy(merged, fx.analogy);
    CHECK(merged_r.cossum.score >= base_r.cossum.score);
    CHECK(merged_r.cosmul.score >= base_r.cosmul.score);
    CHECK(merged_r.cossum.unseen_words == 0);
    CHECK(base_r.cossum.unseen_words > 0);
}

TEST_CASE("dataset readers") {
    std::istringstream sim("# header\nold new 3.5\n\ncat\tdog\t7\n");
    auto s = read_similarity_dataset(sim);
    REQUIRE(s.items.size() == 2);
    CHECK(s.items[1].w2 == "dog");
    CHECK(s.items[1].human == 7.0);

    std::istringstream an(": capital\ngood best smart smartest\n");
    auto a = read_analogy_dataset(an);
    REQUIRE(a.items.size() == 1);
    CHECK(a.items[0].b_star == "smartest");

    std::istringstream tt("chat\tcat\n");
    CHECK(read_translation_table(tt).translate("chat") == "cat");

    std::istringstream bad_sim("a b\n");
    CHECK_THROWS_AS(read_similarity_dataset(bad_sim), FormatError);
    std::istringstream bad_an("a b c\n");
    CHECK_THROWS_AS(read_analogy_dataset(bad_an), FormatError);
}
