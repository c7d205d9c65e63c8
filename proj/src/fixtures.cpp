#include "xlmap/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace xlmap::fixtures {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double stddev) {
    std::normal_distribution<double> normal(0.0, stddev);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
}

VocabModel random_model(const std::string& prefix, std::size_t n, int dim, Rng& rng) {
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
    return VocabModel(std::move(words), gaussian_matrix(static_cast<Eigen::Index>(n), dim, rng));
}

Matrix random_invertible(int dim, Rng& rng) {
    const Eigen::MatrixXd g = gaussian_matrix(dim, dim, rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    for (int j = 0; j < dim; ++j) q.col(j) *= scale(rng);
    return q;
}

SyntheticParallel make_parallel_corpus(const ParallelCorpusSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    SyntheticParallel out;
    const std::size_t n_func = std::max<std::size_t>(spec.function_words, 1);
    const double probs[] = {1.0, 0.85, 0.6, 0.5, 0.4};
    std::uniform_int_distribution<std::size_t> pick_prob(0, std::size(probs) - 1);
    std::uniform_int_distribution<std::size_t> pick_func(0, n_func - 1);

    for (std::size_t k = 0; k < spec.vocab; ++k) {
        LexiconEntry e;
        e.src = "s" + std::to_string(k);
        // every seventh source word is a synonym of the previous one
        e.primary = (k % 7 == 6) ? out.lexicon[k - 1].primary : "t" + std::to_string(k);
        e.secondary = "f" + std::to_string(pick_func(rng));
        e.primary_prob = probs[pick_prob(rng)];
        out.lexicon.push_back(std::move(e));
    }

    std::vector<double> weights(spec.vocab);
    for (std::size_t k = 0; k < spec.vocab; ++k) weights[k] = std::pow(static_cast<double>(k + 1), -spec.zipf_exponent);
    std::discrete_distribution<std::size_t> zipf(weights.begin(), weights.end());
    std::uniform_int_distribution<std::size_t> length(spec.min_len, spec.max_len);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t n = 0; n < spec.sentences; ++n) {
        SentencePair pair;
        // (target token, source position or -1 for unaligned filler)
        std::vector<std::pair<std::string, long>> tgt;
        const std::size_t len = length(rng);
        for (std::size_t i = 0; i < len; ++i) {
            const auto& e = out.lexicon[zipf(rng)];
            pair.src.push_back(e.src);
            tgt.emplace_back(unit(rng) < e.primary_prob ? e.primary : e.secondary, static_cast<long>(i));
        }
        for (std::size_t j = 0; j + 1 < tgt.size(); ++j) {
            if (unit(rng) < spec.swap_prob) {
                std::swap(tgt[j], tgt[j + 1]);
                ++j;
            }
        }
        if (unit(rng) < spec.null_insert_prob) {
            std::uniform_int_distribution<std::size_t> where(0, tgt.size());
            tgt.insert(tgt.begin() + static_cast<std::ptrdiff_t>(where(rng)), {"tnull", -1});
        }
        AlignmentLinks links;
        for (std::size_t j = 0; j < tgt.size(); ++j) {
            pair.tgt.push_back(tgt[j].first);
            if (tgt[j].second >= 0) links.emplace(static_cast<std::size_t>(tgt[j].second), j);
        }
        out.corpus.push_back(std::move(pair));
        out.links.push_back(std::move(links));
    }
    return out;
}

BilingualFixture make_bilingual_fixture(const ParallelCorpusSpec& spec, int dim, std::uint64_t seed) {
    BilingualFixture fx{make_parallel_corpus(spec, seed), VocabModel(dim), VocabModel(dim), {}, {}, {}};
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

    std::vector<std::string> src_words;
    for (const auto& e : fx.parallel.lexicon) src_words.push_back(e.src);
    Matrix src = gaussian_matrix(static_cast<Eigen::Index>(src_words.size()), dim, rng);
    fx.true_map = random_invertible(dim, rng);

    VocabModel::Builder tgt(dim);
    std::vector<std::string> primaries;
    for (std::size_t k = 0; k < fx.parallel.lexicon.size(); ++k) {
        const auto& e = fx.parallel.lexicon[k];
        const Vector v = src.row(static_cast<Eigen::Index>(k)) * fx.true_map;
        if (tgt.add(e.primary, v)) {
            primaries.push_back(e.primary);
            fx.table.entries.emplace(e.primary, e.src);
        }
    }
    const std::size_t n_func = std::max<std::size_t>(spec.function_words, 1);
    for (std::size_t f = 0; f < n_func; ++f) tgt.add("f" + std::to_string(f), gaussian_matrix(1, dim, rng).row(0));
    tgt.add("tnull", gaussian_matrix(1, dim, rng).row(0));

    fx.src_model = VocabModel(std::move(src_words), std::move(src));
    fx.tgt_model = std::move(tgt).build();

    std::uniform_int_distribution<std::size_t> pick(0, primaries.size() - 1);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    const std::size_t want = std::min<std::size_t>(40, primaries.size() * (primaries.size() - 1) / 2);
    while (seen.size() < want) {
        auto i = pick(rng), j = pick(rng);
        if (i == j || !seen.emplace(std::min(i, j), std::max(i, j)).second) continue;
        const auto& w1 = primaries[i];
        const auto& w2 = primaries[j];
        fx.tgt_similarity.items.push_back({w1, w2, cosine(*lookup(fx.tgt_model, w1), *lookup(fx.tgt_model, w2))});
    }
    return fx;
}

namespace {

// Parallelogram group vectors: u_i orthogonal to r, |u_i| = u_norm.
std::vector<std::pair<Vector, Vector>> parallelogram_groups(std::size_t groups, int dim, double u_norm,
                                                            double r_norm, Rng& rng) {
    Vector r = gaussian_matrix(1, dim, rng).row(0);
    r *= r_norm / r.norm();
    std::vector<std::pair<Vector, Vector>> out;
    for (std::size_t g = 0; g < groups; ++g) {
        Vector u = gaussian_matrix(1, dim, rng).row(0);
        u -= (u.dot(r) / r.squaredNorm()) * r;
        u *= u_norm / u.norm();
        out.emplace_back(u - r, u + r);
    }
    return out;
}

AnalogyDataset all_group_analogies(const std::vector<std::string>& a_words, const std::vector<std::string>& b_words) {
    AnalogyDataset ds;
    for (std::size_t i = 0; i < a_words.size(); ++i) {
        for (std::size_t j = 0; j < a_words.size(); ++j) {
            if (i != j) ds.items.push_back({a_words[i], b_words[i], a_words[j], b_words[j]});
        }
    }
    return ds;
}

}  // namespace

ParallelogramFixture make_parallelogram_fixture(std::size_t groups, int dim, std::size_t distractors,
                                                std::uint64_t seed) {
    Rng rng(seed);
    const double u_norm = 1.0;
    VocabModel::Builder b(dim);
    std::vector<std::string> a_words, b_words;
    auto vecs = parallelogram_groups(groups, dim, u_norm, 0.6 * u_norm, rng);
    for (std::size_t g = 0; g < groups; ++g) {
        a_words.push_back("x" + std::to_string(g) + "_a");
        b_words.push_back("x" + std::to_string(g) + "_b");
        b.add(a_words.back(), vecs[g].first);
        b.add(b_words.back(), vecs[g].second);
    }
    for (std::size_t k = 0; k < distractors; ++k) b.add("d" + std::to_string(k), gaussian_matrix(1, dim, rng).row(0));
    return {std::move(b).build(), all_group_analogies(a_words, b_words)};
}

MergeFixture make_merge_fixture(const MergeFixtureSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    MergeFixture fx{VocabModel(spec.dim), VocabModel(spec.dim), VocabModel(spec.dim), {}, {}, {}, {}};
    const double scale = std::sqrt(static_cast<double>(spec.dim));

    // Ground-truth space: plain words plus parallelogram analogy groups.
    VocabModel::Builder truth(spec.dim);
    Matrix plain = gaussian_matrix(static_cast<Eigen::Index>(spec.vocab), spec.dim, rng);
    for (std::size_t i = 0; i < spec.vocab; ++i) truth.add("w" + std::to_string(i), plain.row(static_cast<Eigen::Index>(i)));
    std::vector<std::string> a_words, b_words;
    auto groups = parallelogram_groups(spec.analogy_groups, spec.dim, scale, 0.6 * scale, rng);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        a_words.push_back("ga" + std::to_string(g));
        b_words.push_back("gb" + std::to_string(g));
        truth.add(a_words.back(), groups[g].first);
        truth.add(b_words.back(), groups[g].second);
    }
    fx.truth = std::move(truth).build();

    // Test vocabulary: leading plain words, every analogy word, and a few unknowns.
    std::vector<std::string> known_test;
    for (std::size_t i = 0; i < std::min(spec.test_words, spec.vocab); ++i) known_test.push_back("w" + std::to_string(i));
    known_test.insert(known_test.end(), a_words.begin(), a_words.end());
    known_test.insert(known_test.end(), b_words.begin(), b_words.end());
    fx.test_words = known_test;
    for (std::size_t k = 0; k < spec.absent_everywhere; ++k) fx.test_words.push_back("zz" + std::to_string(k));

    std::vector<std::string> shuffled = known_test;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto n_missing = static_cast<std::size_t>(std::llround(spec.missing_fraction * static_cast<double>(shuffled.size())));
    const std::unordered_set<std::string> missing(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_missing));

    const Matrix donor_map = random_invertible(spec.dim, rng);
    std::normal_distribution<double> base_noise(0.0, spec.base_noise);
    std::normal_distribution<double> donor_noise(0.0, spec.donor_noise);
    std::uniform_int_distribution<std::uint64_t> freq(300, 20000);

    VocabModel::Builder base(spec.dim), donor(spec.dim);
    for (std::size_t i = 0; i < fx.truth.size(); ++i) {
        const auto& w = fx.truth.words()[i];
        const Vector t = fx.truth.row(i);
        if (!missing.count(w)) {
            Vector v = t;
            for (Eigen::Index d = 0; d < v.size(); ++d) v(d) += base_noise(rng);
            base.add(w, v);
        }
        Vector dv = t * donor_map;
        for (Eigen::Index d = 0; d < dv.size(); ++d) dv(d) += donor_noise(rng);
        donor.add(w, dv);
        fx.freqs[w] = freq(rng);
    }
    fx.base = std::move(base).build();
    fx.donor = std::move(donor).build();

    std::uniform_int_distribution<std::size_t> pick(0, fx.test_words.size() - 1);
    std::uniform_real_distribution<double> random_score(0.0, 10.0);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    const std::size_t want = std::min<std::size_t>(3 * fx.test_words.size() / 2,
                                                   fx.test_words.size() * (fx.test_words.size() - 1) / 2);
    while (seen.size() < want) {
        auto i = pick(rng), j = pick(rng);
        if (i == j || !seen.emplace(std::min(i, j), std::max(i, j)).second) continue;
        const auto& w1 = fx.test_words[i];
        const auto& w2 = fx.test_words[j];
        auto v1 = lookup(fx.truth, w1), v2 = lookup(fx.truth, w2);
        // human-style scores on a 0..10 scale
        const double human = (v1 && v2) ? 5.0 * (cosine(*v1, *v2) + 1.0) : random_score(rng);
        fx.similarity.items.push_back({w1, w2, human});
    }
    fx.analogy = all_group_analogies(a_words, b_words);
    return fx;
}

}  // namespace xlmap::fixtures
