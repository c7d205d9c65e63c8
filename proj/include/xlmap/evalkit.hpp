#ifndef XLMAP_EVALKIT_HPP
#define XLMAP_EVALKIT_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xlmap/embed_io.hpp"
#include "xlmap/linmap.hpp"

namespace xlmap {

struct SimilarityItem {
    std::string w1;
    std::string w2;
    double human = 0.0;
};

struct SimilarityDataset {
    std::vector<SimilarityItem> items;
};

struct AnalogyItem {
    std::string a;
    std::string a_star;
    std::string b;
    std::string b_star;
};

// a is to a_star as b is to b_star.
struct AnalogyDataset {
    std::vector<AnalogyItem> items;
};

// Target-language test word -> source-language word.
struct TranslationTable {
    std::unordered_map<std::string, std::string> entries;

    std::optional<std::string_view> translate(std::string_view word) const;
};

// "w1 w2 score" per line, '#' comments.
SimilarityDataset read_similarity_dataset(std::istream& in);
SimilarityDataset read_similarity_dataset_file(const std::string& path);
// "a a_star b b_star" per line; '#' comments and ':' section headers are skipped.
AnalogyDataset read_analogy_dataset(std::istream& in);
AnalogyDataset read_analogy_dataset_file(const std::string& path);
// "target_word\tsource_word" per line.
TranslationTable read_translation_table(std::istream& in);
TranslationTable read_translation_table_file(const std::string& path);

struct EvalReport {
    double score = 0.0;  // Spearman rho x 100, or accuracy in [0,1]
    std::size_t evaluated = 0;
    std::size_t skipped_items = 0;
    std::size_t unseen_words = 0;  // distinct out-of-vocabulary tokens
    std::size_t oov_slots = 0;     // token occurrences that were out of vocabulary

    std::size_t total() const { return evaluated + skipped_items; }
};

// Fractional (average) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of the average ranks. Throws DataError for fewer than
// two values or a constant side.
double spearman(std::span<const double> x, std::span<const double> y);

using VectorResolver = std::function<std::optional<Vector>(std::string_view)>;

// Items with an unresolvable word are skipped. Throws DataError with fewer
// than two evaluated items.
EvalReport eval_similarity(const VectorResolver& resolve, const SimilarityDataset& ds);
EvalReport eval_similarity(const VocabModel& model, const SimilarityDataset& ds);

// Words go through the table into the source model and are mapped with
// src_to_target before cosine; table misses count as unseen.
EvalReport eval_similarity_translated(const VocabModel& src_model, const LinearMap& src_to_target,
                                      const TranslationTable& table, const SimilarityDataset& ds);

enum class AnalogyMethod { CosSum, CosMul };

std::string_view to_string(AnalogyMethod method);

inline constexpr double kDefaultCosMulEpsilon = 0.001;

// Denominator of the multiplicative objective for a raw cosine in [-1,1].
inline double cosmul_denominator(double cos_a, double epsilon) { return (cos_a + 1.0) / 2.0 + epsilon; }

struct AnalogyAnswer {
    std::string word;
    double score;
    // CosMul only: smallest denominator evaluated over the candidates.
    std::optional<double> min_denominator;
};

// Holds a unit-normalized copy of the model for repeated queries.
class AnalogySolver {
   public:
    explicit AnalogySolver(const VocabModel& model, double epsilon = kDefaultCosMulEpsilon);

    // Absent when a query word is out of vocabulary or has a zero vector.
    std::optional<AnalogyAnswer> solve(std::string_view a, std::string_view a_star, std::string_view b,
                                       AnalogyMethod method) const;

    const VocabModel& normalized() const { return normalized_; }
    double epsilon() const { return epsilon_; }

   private:
    VocabModel normalized_;
    std::vector<bool> zero_row_;
    double epsilon_;
};

std::optional<std::string> solve_analogy(const VocabModel& model, std::string_view a, std::string_view a_star,
                                         std::string_view b, AnalogyMethod method,
                                         double epsilon = kDefaultCosMulEpsilon);

struct AnalogyReport {
    EvalReport cossum;
    EvalReport cosmul;
};

// Accuracy over all items; an item with an out-of-vocabulary query word is
// counted wrong (skipped_items) rather than dropped.
AnalogyReport eval_analogy(const VocabModel& model, const AnalogyDataset& ds, double epsilon = kDefaultCosMulEpsilon);

}  // namespace xlmap

#endif  // XLMAP_EVALKIT_HPP
