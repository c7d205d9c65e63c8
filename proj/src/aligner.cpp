#include "xlmap/aligner.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "text_util.hpp"
#include "xlmap/error.hpp"

namespace xlmap {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    for (auto t : detail::split_ws(line)) out.emplace_back(t);
    return out;
}

bool usable(const SentencePair& p, std::size_t max_len) {
    return !p.src.empty() && !p.tgt.empty() && p.src.size() <= max_len && p.tgt.size() <= max_len;
}

}  // namespace

Corpus read_parallel_corpus(std::istream& src, std::istream& tgt) {
    Corpus corpus;
    std::string ls, lt;
    std::size_t line_no = 0;
    while (true) {
        const bool has_s = static_cast<bool>(std::getline(src, ls));
        const bool has_t = static_cast<bool>(std::getline(tgt, lt));
        if (!has_s && !has_t) break;
        ++line_no;
        if (has_s != has_t) throw FormatError("parallel corpus sides have different line counts", line_no);
        corpus.push_back({tokenize(ls), tokenize(lt)});
    }
    return corpus;
}

Corpus read_parallel_corpus_files(const std::string& src_path, const std::string& tgt_path) {
    auto s = detail::open_in(src_path);
    auto t = detail::open_in(tgt_path);
    try {
        return read_parallel_corpus(s, t);
    } catch (const FormatError& e) {
        throw FormatError(src_path + " / " + tgt_path + ": " + e.what());
    }
}

Corpus read_joined_corpus(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto sep = line.find("|||");
        if (sep == std::string::npos) throw FormatError("missing '|||' separator", line_no);
        if (line.find("|||", sep + 3) != std::string::npos) throw FormatError("more than one '|||'", line_no);
        std::string_view view(line);
        corpus.push_back({tokenize(view.substr(0, sep)), tokenize(view.substr(sep + 3))});
    }
    return corpus;
}

Corpus read_joined_corpus_file(const std::string& path) {
    auto in = detail::open_in(path);
    try {
        return read_joined_corpus(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

Corpus reversed(const Corpus& corpus) {
    Corpus out;
    out.reserve(corpus.size());
    for (const auto& p : corpus) out.push_back({p.tgt, p.src});
    return out;
}

std::vector<AlignmentLinks> parse_alignment_file(std::istream& in) {
    std::vector<AlignmentLinks> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        AlignmentLinks links;
        for (auto tok : detail::split_ws(line)) {
            const auto dash = tok.find('-');
            if (dash == std::string_view::npos) {
                throw FormatError("alignment token '" + std::string(tok) + "' has no '-'", line_no);
            }
            auto i = detail::parse_int<std::size_t>(tok.substr(0, dash));
            auto j = detail::parse_int<std::size_t>(tok.substr(dash + 1));
            if (!i || !j) throw FormatError("alignment token '" + std::string(tok) + "' is not 'i-j'", line_no);
            links.emplace(*i, *j);
        }
        out.push_back(std::move(links));
    }
    return out;
}

std::vector<AlignmentLinks> parse_alignment_file(const std::string& path) {
    auto in = detail::open_in(path);
    try {
        return parse_alignment_file(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_alignments(const std::vector<AlignmentLinks>& links, std::ostream& out) {
    std::string buf;
    for (const auto& sent : links) {
        bool first = true;
        for (const auto& [i, j] : sent) {
            if (!first) buf += ' ';
            first = false;
            buf += std::to_string(i);
            buf += '-';
            buf += std::to_string(j);
        }
        buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    detail::check_written(out, "alignment file");
}

// ---------------------------------------------------------------------------
// Model 1 table

std::uint32_t Model1Table::src_id(std::string_view w) const {
    auto it = src_index_.find(std::string(w));
    return it == src_index_.end() ? kUnknown : it->second + 1;
}

std::uint32_t Model1Table::tgt_id(std::string_view w) const {
    auto it = tgt_index_.find(std::string(w));
    return it == tgt_index_.end() ? kUnknown : it->second;
}

double Model1Table::prob_ids(std::uint32_t src_row, std::uint32_t tgt) const {
    if (src_row == kUnknown || tgt == kUnknown) return 0.0;
    const auto& row = rows_[src_row];
    auto it = row.find(tgt);
    return it == row.end() ? 0.0 : it->second;
}

double Model1Table::prob(std::string_view src, std::string_view tgt) const {
    return prob_ids(src_id(src), tgt_id(tgt));
}

double Model1Table::null_prob(std::string_view tgt) const {
    return rows_.empty() ? 0.0 : prob_ids(0, tgt_id(tgt));
}

double Model1Table::row_sum(std::string_view src) const {
    const auto id = src_id(src);
    if (id == kUnknown) return 0.0;
    double s = 0.0;
    for (const auto& [t, p] : rows_[id]) s += p;
    return s;
}

double Model1Table::null_row_sum() const {
    if (rows_.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [t, p] : rows_[0]) s += p;
    return s;
}

class Model1Trainer {
   public:
    Model1Trainer(const Corpus& corpus, std::size_t max_len) {
        for (const auto& p : corpus) {
            if (!usable(p, max_len)) {
                ++skipped_;
                continue;
            }
            Sentence s;
            s.src.push_back(0);
            for (const auto& w : p.src) s.src.push_back(intern(table_.src_index_, table_.src_words_, w) + 1);
            for (const auto& w : p.tgt) s.tgt.push_back(intern(table_.tgt_index_, table_.tgt_words_, w));
            sentences_.push_back(std::move(s));
        }
        if (sentences_.empty()) throw DataError("Model 1 training corpus has no usable sentence pairs");
        table_.rows_.assign(table_.src_words_.size() + 1, {});
    }

    // t(f|e) = 1 / |{f co-occurring with e}|
    void initialize_uniform() {
        for (const auto& s : sentences_) {
            for (auto e : s.src) {
                for (auto f : s.tgt) table_.rows_[e].emplace(f, 0.0);
            }
        }
        for (auto& row : table_.rows_) {
            const double u = row.empty() ? 0.0 : 1.0 / static_cast<double>(row.size());
            for (auto& [f, p] : row) p = u;
        }
    }

    void em_iteration() {
        std::vector<std::unordered_map<std::uint32_t, double>> counts(table_.rows_.size());
        std::vector<double> totals(table_.rows_.size(), 0.0);
        std::vector<double> post;
        for (const auto& s : sentences_) {
            post.resize(s.src.size());
            for (auto f : s.tgt) {
                double denom = 0.0;
                for (std::size_t i = 0; i < s.src.size(); ++i) {
                    post[i] = table_.prob_ids(s.src[i], f);
                    denom += post[i];
                }
                if (denom <= 0.0) continue;
                for (std::size_t i = 0; i < s.src.size(); ++i) {
                    const double c = post[i] / denom;
                    counts[s.src[i]][f] += c;
                    totals[s.src[i]] += c;
                }
            }
        }
        for (std::size_t e = 0; e < counts.size(); ++e) {
            auto& row = table_.rows_[e];
            for (auto& [f, p] : row) {
                auto it = counts[e].find(f);
                p = (it == counts[e].end() || totals[e] <= 0.0) ? 0.0 : it->second / totals[e];
            }
        }
    }

    double log_likelihood() const {
        double ll = 0.0;
        for (const auto& s : sentences_) {
            const double norm = static_cast<double>(s.src.size());
            for (auto f : s.tgt) {
                double p = 0.0;
                for (auto e : s.src) p += table_.prob_ids(e, f);
                ll += std::log(p / norm);
            }
        }
        return ll;
    }

    std::size_t skipped() const { return skipped_; }
    Model1Table take() && { return std::move(table_); }
    Model1Table& table() { return table_; }

   private:
    struct Sentence {
        std::vector<std::uint32_t> src;  // includes NULL at position 0
        std::vector<std::uint32_t> tgt;
    };

    static std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& index,
                                std::vector<std::string>& words, const std::string& w) {
        auto [it, inserted] = index.emplace(w, static_cast<std::uint32_t>(words.size()));
        if (inserted) words.push_back(w);
        return it->second;
    }

    Model1Table table_;
    std::vector<Sentence> sentences_;
    std::size_t skipped_ = 0;
};

Model1Result train_model1(const Corpus& corpus, const Model1Options& options) {
    if (corpus.empty()) throw DataError("Model 1 training corpus is empty");
    if (options.iterations < 1) throw DataError("Model 1 needs at least one EM iteration");
    Model1Trainer trainer(corpus, options.max_sentence_length);
    trainer.initialize_uniform();
    Model1Result result;
    result.log_likelihood.push_back(trainer.log_likelihood());
    for (int it = 0; it < options.iterations; ++it) {
        trainer.em_iteration();
        result.log_likelihood.push_back(trainer.log_likelihood());
    }
    result.skipped_pairs = trainer.skipped();
    result.table = std::move(trainer).take();
    return result;
}

double corpus_log_likelihood(const Corpus& corpus, const Model1Table& table, std::size_t max_sentence_length) {
    double ll = 0.0;
    for (const auto& p : corpus) {
        if (!usable(p, max_sentence_length)) continue;
        const double norm = static_cast<double>(p.src.size() + 1);
        for (const auto& f : p.tgt) {
            double s = table.null_prob(f);
            for (const auto& e : p.src) s += table.prob(e, f);
            ll += std::log(s / norm);
        }
    }
    return ll;
}

// ---------------------------------------------------------------------------
// Viterbi links and symmetrization

Symmetrization parse_symmetrization(std::string_view name) {
    if (name == "union") return Symmetrization::Union;
    if (name == "intersection") return Symmetrization::Intersection;
    throw DataError("unknown symmetrization '" + std::string(name) + "'");
}

std::string_view to_string(Symmetrization mode) {
    return mode == Symmetrization::Union ? "union" : "intersection";
}

std::vector<AlignmentLinks> align_forward(const Corpus& corpus, const Model1Table& forward,
                                          std::size_t max_sentence_length) {
    std::vector<AlignmentLinks> out(corpus.size());
    std::vector<std::uint32_t> src_ids;
    for (std::size_t n = 0; n < corpus.size(); ++n) {
        const auto& p = corpus[n];
        if (!usable(p, max_sentence_length) || forward.rows_.empty()) continue;
        src_ids.clear();
        for (const auto& e : p.src) src_ids.push_back(forward.src_id(e));
        for (std::size_t j = 0; j < p.tgt.size(); ++j) {
            const auto f = forward.tgt_id(p.tgt[j]);
            double best = -1.0;
            std::size_t best_i = 0;
            for (std::size_t i = 0; i < src_ids.size(); ++i) {
                const double t = forward.prob_ids(src_ids[i], f);
                if (t > best) {
                    best = t;
                    best_i = i;
                }
            }
            if (best > 0.0 && best >= forward.prob_ids(0, f)) out[n].emplace(best_i, j);
        }
    }
    return out;
}

AlignmentLinks symmetrize(const AlignmentLinks& forward, const AlignmentLinks& reverse, Symmetrization mode) {
    AlignmentLinks out;
    if (mode == Symmetrization::Union) {
        out = forward;
        out.insert(reverse.begin(), reverse.end());
    } else {
        for (const auto& l : forward) {
            if (reverse.count(l)) out.insert(l);
        }
    }
    return out;
}

std::vector<AlignmentLinks> align_corpus(const Corpus& corpus, const Model1Table& forward,
                                         const Model1Table& reverse, Symmetrization mode,
                                         std::size_t max_sentence_length) {
    auto fwd = align_forward(corpus, forward, max_sentence_length);
    auto rev_flipped = align_forward(reversed(corpus), reverse, max_sentence_length);
    std::vector<AlignmentLinks> out(corpus.size());
    for (std::size_t n = 0; n < corpus.size(); ++n) {
        AlignmentLinks rev;
        for (const auto& [j, i] : rev_flipped[n]) rev.emplace(i, j);
        out[n] = symmetrize(fwd[n], rev, mode);
    }
    return out;
}

}  // namespace xlmap
