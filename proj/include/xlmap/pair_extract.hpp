#ifndef XLMAP_PAIR_EXTRACT_HPP
#define XLMAP_PAIR_EXTRACT_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlmap/aligner.hpp"
#include "xlmap/embed_io.hpp"

namespace xlmap {

// Confidence matrix: how often each source word was aligned to each target word.
struct LinkCounts {
    std::map<std::string, std::map<std::string, std::uint64_t, std::less<>>, std::less<>> counts;
    std::map<std::string, std::uint64_t, std::less<>> src_totals;

    void add(const std::string& src, const std::string& tgt, std::uint64_t n = 1);  // n == 0 is a no-op
    std::uint64_t count(std::string_view src, std::string_view tgt) const;
    std::uint64_t total(std::string_view src) const;
};

struct OutOfRangeLink {
    std::size_t sentence;  // 0-based
    Link link;
};

struct CountResult {
    LinkCounts counts;
    std::vector<OutOfRangeLink> out_of_range;
};

// Throws DataError when links and corpus differ in length.
CountResult accumulate_counts(const Corpus& corpus, const std::vector<AlignmentLinks>& links);

struct TranslationPair {
    std::string src;
    std::string tgt;
    std::uint64_t count = 0;
    double fraction = 0.0;

    friend bool operator==(const TranslationPair&, const TranslationPair&) = default;
};

// Most frequent target of src (lexicographically smallest on ties).
std::optional<TranslationPair> best_match(const LinkCounts& counts, std::string_view src);

inline constexpr std::uint64_t kDefaultMinCount = 25;
inline constexpr double kDefaultMinFraction = 0.5;
inline constexpr std::uint64_t kDefaultMinFreq = 500;

// Greedy one-to-one matching over best matches in decreasing count order
// (source-lexicographic on ties). Thresholds are inclusive.
std::vector<TranslationPair> extract_pairs(const LinkCounts& counts, std::uint64_t min_count = kDefaultMinCount,
                                           double min_fraction = kDefaultMinFraction);

enum class FrequencySide { Both, Source, Target };

FrequencySide parse_frequency_side(std::string_view name);

// Missing tokens have frequency 0. Order is preserved.
std::vector<TranslationPair> filter_by_frequency(const std::vector<TranslationPair>& pairs,
                                                 const FrequencyTable& src_freqs, const FrequencyTable& tgt_freqs,
                                                 std::uint64_t min_freq = kDefaultMinFreq,
                                                 FrequencySide side = FrequencySide::Both);

// Identity pairs (w, w) for frequent words present in both models, count = freq, fraction = 1.
std::vector<TranslationPair> shared_vocab_pairs(const VocabModel& model_a, const VocabModel& model_b,
                                                const FrequencyTable& freqs,
                                                std::uint64_t min_freq = kDefaultMinFreq);

struct CorpusFrequencies {
    FrequencyTable src;
    FrequencyTable tgt;
};

CorpusFrequencies corpus_frequencies(const Corpus& corpus);

// "token count" per line ('#' comments and blank lines ignored).
FrequencyTable read_frequency_table(std::istream& in);
FrequencyTable read_frequency_table_file(const std::string& path);

// Pairs file: "src\ttgt\tcount\tfraction" per line in acceptance order.
void write_pairs(const std::vector<TranslationPair>& pairs, std::ostream& out);
std::vector<TranslationPair> read_pairs(std::istream& in);
std::vector<TranslationPair> read_pairs_file(const std::string& path);

}  // namespace xlmap

#endif  // XLMAP_PAIR_EXTRACT_HPP
