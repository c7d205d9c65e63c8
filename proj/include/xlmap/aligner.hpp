#ifndef XLMAP_ALIGNER_HPP
#define XLMAP_ALIGNER_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xlmap {

struct SentencePair {
    std::vector<std::string> src;
    std::vector<std::string> tgt;
};

using Corpus = std::vector<SentencePair>;

// (source index, target index)
using Link = std::pair<std::size_t, std::size_t>;
using AlignmentLinks = std::set<Link>;

// Two line-parallel files, one whitespace-tokenized sentence per line.
Corpus read_parallel_corpus(std::istream& src, std::istream& tgt);
Corpus read_parallel_corpus_files(const std::string& src_path, const std::string& tgt_path);
// One file with "source ||| target" per line.
Corpus read_joined_corpus(std::istream& in);
Corpus read_joined_corpus_file(const std::string& path);

// Swaps the two sides of every sentence pair.
Corpus reversed(const Corpus& corpus);

// "i-j i-j ..." per line; line n belongs to sentence pair n.
std::vector<AlignmentLinks> parse_alignment_file(std::istream& in);
std::vector<AlignmentLinks> parse_alignment_file(const std::string& path);
void write_alignments(const std::vector<AlignmentLinks>& links, std::ostream& out);

inline constexpr std::size_t kDefaultMaxSentenceLength = 200;

// Lexical translation table t(tgt | src) of IBM Model 1, with an implicit
// NULL source word that is distinct from every real token.
class Model1Table {
   public:
    double prob(std::string_view src, std::string_view tgt) const;
    double null_prob(std::string_view tgt) const;

    // Sum over targets of t(. | src); 0 for unknown sources.
    double row_sum(std::string_view src) const;
    double null_row_sum() const;

    std::size_t source_types() const { return src_words_.size(); }
    const std::vector<std::string>& source_words() const { return src_words_; }
    const std::vector<std::string>& target_words() const { return tgt_words_; }

   private:
    friend class Model1Trainer;
    friend std::vector<AlignmentLinks> align_forward(const Corpus&, const Model1Table&, std::size_t);

    static constexpr std::uint32_t kUnknown = UINT32_MAX;
    std::uint32_t src_id(std::string_view w) const;
    std::uint32_t tgt_id(std::string_view w) const;
    double prob_ids(std::uint32_t src_row, std::uint32_t tgt) const;

    // Row 0 is NULL; row k+1 holds source word src_words_[k].
    std::vector<std::unordered_map<std::uint32_t, double>> rows_;
    std::vector<std::string> src_words_;
    std::vector<std::string> tgt_words_;
    std::unordered_map<std::string, std::uint32_t> src_index_;
    std::unordered_map<std::string, std::uint32_t> tgt_index_;
};

struct Model1Options {
    int iterations = 5;
    std::size_t max_sentence_length = kDefaultMaxSentenceLength;
};

struct Model1Result {
    Model1Table table;
    // log_likelihood[0] is the uniform initialization, [k] follows iteration k.
    std::vector<double> log_likelihood;
    std::size_t skipped_pairs = 0;  // empty or over-long sentence pairs
};

// IBM Model 1 EM over src -> tgt. Throws DataError on an empty (or fully skipped) corpus.
Model1Result train_model1(const Corpus& corpus, const Model1Options& options = {});

// Sum over usable pairs of sum_j log( sum_{i in NULL+src} t(f_j|e_i) / (|src|+1) ).
double corpus_log_likelihood(const Corpus& corpus, const Model1Table& table,
                             std::size_t max_sentence_length = kDefaultMaxSentenceLength);

enum class Symmetrization { Union, Intersection };

Symmetrization parse_symmetrization(std::string_view name);
std::string_view to_string(Symmetrization mode);

// Viterbi links of one direction: each target position j goes to the real
// source index maximizing t(f_j|e_i) (smallest index on ties) unless NULL
// scores strictly higher.
std::vector<AlignmentLinks> align_forward(const Corpus& corpus, const Model1Table& forward,
                                          std::size_t max_sentence_length = kDefaultMaxSentenceLength);

// forward: t(tgt|src) trained on corpus; reverse: t(src|tgt) trained on reversed(corpus).
std::vector<AlignmentLinks> align_corpus(const Corpus& corpus, const Model1Table& forward,
                                         const Model1Table& reverse,
                                         Symmetrization mode = Symmetrization::Union,
                                         std::size_t max_sentence_length = kDefaultMaxSentenceLength);

AlignmentLinks symmetrize(const AlignmentLinks& forward, const AlignmentLinks& reverse, Symmetrization mode);

}  // namespace xlmap

#endif  // XLMAP_ALIGNER_HPP
