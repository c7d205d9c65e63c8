#ifndef XLMAP_FIXTURES_HPP
#define XLMAP_FIXTURES_HPP

// Seeded synthetic data: parallel corpora with known alignments, bilingual
// embedding pairs related by a known linear map, base/donor models of one
// language, and exact-parallelogram analogy sets.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xlmap/aligner.hpp"
#include "xlmap/embed_io.hpp"
#include "xlmap/evalkit.hpp"

namespace xlmap::fixtures {

using Rng = std::mt19937_64;

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double stddev = 1.0);

// Random model with words prefix0..prefix{n-1}.
VocabModel random_model(const std::string& prefix, std::size_t n, int dim, Rng& rng);

// Orthogonal matrix scaled column-wise into [0.5, 2]; well conditioned by construction.
Matrix random_invertible(int dim, Rng& rng);

struct LexiconEntry {
    std::string src;
    std::string primary;
    std::string secondary;
    double primary_prob;
};

struct ParallelCorpusSpec {
    std::size_t sentences = 500;
    std::size_t vocab = 30;
    std::size_t min_len = 20;
    std::size_t max_len = 40;
    double zipf_exponent = 1.0;
    double swap_prob = 0.3;         // adjacent target reordering
    double null_insert_prob = 0.3;  // unaligned target filler word
    std::size_t function_words = 4; // secondary translations drawn from these
};

struct SyntheticParallel {
    Corpus corpus;
    std::vector<AlignmentLinks> links;  // gold alignment of every sentence
    std::vector<LexiconEntry> lexicon;
};

SyntheticParallel make_parallel_corpus(const ParallelCorpusSpec& spec, std::uint64_t seed);

struct BilingualFixture {
    SyntheticParallel parallel;
    VocabModel src_model;
    VocabModel tgt_model;
    Matrix true_map;                     // tgt vector of a primary translation = src vector * true_map
    SimilarityDataset tgt_similarity;    // target-language words, human = true cosine
    TranslationTable table;              // target word -> source word
};

BilingualFixture make_bilingual_fixture(const ParallelCorpusSpec& spec, int dim, std::uint64_t seed);

struct MergeFixtureSpec {
    int dim = 20;
    std::size_t vocab = 600;
    std::size_t test_words = 120;
    double missing_fraction = 0.3;  // share of test words the base model lacks
    std::size_t absent_everywhere = 6;
    double base_noise = 0.6;
    double donor_noise = 0.02;
    std::size_t analogy_groups = 12;
};

struct MergeFixture {
    VocabModel truth;
    VocabModel base;
    VocabModel donor;
    FrequencyTable freqs;
    std::vector<std::string> test_words;
    SimilarityDataset similarity;
    AnalogyDataset analogy;
};

MergeFixture make_merge_fixture(const MergeFixtureSpec& spec, std::uint64_t seed);

struct ParallelogramFixture {
    VocabModel model;
    AnalogyDataset analogy;
};

// Words x{i}_a = u_i - r and x{i}_b = u_i + r with u_i orthogonal to r and of
// equal norm, so b - a + a* lands exactly on b* even after normalization.
ParallelogramFixture make_parallelogram_fixture(std::size_t groups, int dim, std::size_t distractors,
                                                std::uint64_t seed);

}  // namespace xlmap::fixtures

#endif  // XLMAP_FIXTURES_HPP
