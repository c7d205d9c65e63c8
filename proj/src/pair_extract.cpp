#include "xlmap/pair_extract.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "text_util.hpp"

namespace xlmap {

void LinkCounts::add(const std::string& src, const std::string& tgt, std::uint64_t n) {
    if (n == 0) return;
    auto row = counts.find(src);
    if (row == counts.end()) row = counts.emplace(src, std::map<std::string, std::uint64_t, std::less<>>{}).first;
    auto cell = row->second.find(tgt);
    if (cell == row->second.end()) {
        row->second.emplace(tgt, n);
    } else {
        cell->second += n;
    }
    auto tot = src_totals.find(src);
    if (tot == src_totals.end()) {
        src_totals.emplace(src, n);
    } else {
        tot->second += n;
    }
}

std::uint64_t LinkCounts::count(std::string_view src, std::string_view tgt) const {
    auto row = counts.find(src);
    if (row == counts.end()) return 0;
    auto cell = row->second.find(tgt);
    return cell == row->second.end() ? 0 : cell->second;
}

std::uint64_t LinkCounts::total(std::string_view src) const {
    auto it = src_totals.find(src);
    return it == src_totals.end() ? 0 : it->second;
}

CountResult accumulate_counts(const Corpus& corpus, const std::vector<AlignmentLinks>& links) {
    if (corpus.size() != links.size()) {
        throw DataError("alignment has " + std::to_string(links.size()) + " lines for a corpus of " +
                        std::to_string(corpus.size()) + " sentence pairs");
    }
    CountResult result;
    for (std::size_t n = 0; n < corpus.size(); ++n) {
        const auto& p = corpus[n];
        for (const auto& link : links[n]) {
            if (link.first >= p.src.size() || link.second >= p.tgt.size()) {
                result.out_of_range.push_back({n, link});
                continue;
            }
            result.counts.add(p.src[link.first], p.tgt[link.second]);
        }
    }
    return result;
}

std::optional<TranslationPair> best_match(const LinkCounts& counts, std::string_view src) {
    auto row = counts.counts.find(src);
    if (row == counts.counts.end() || row->second.empty()) return std::nullopt;
    // Rows are ordered by target, so the first maximum is the lexicographically smallest.
    const std::string* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [tgt, c] : row->second) {
        if (c > best_count) {
            best_count = c;
            best = &tgt;
        }
    }
    if (!best) return std::nullopt;
    const std::uint64_t total = counts.total(src);
    return TranslationPair{row->first, *best, best_count,
                           static_cast<double>(best_count) / static_cast<double>(total)};
}

std::vector<TranslationPair> extract_pairs(const LinkCounts& counts, std::uint64_t min_count, double min_fraction) {
    if (min_fraction < 0.0) throw DataError("min_fraction must be non-negative");
    std::vector<TranslationPair> candidates;
    candidates.reserve(counts.counts.size());
    for (const auto& [src, row] : counts.counts) {
        if (auto m = best_match(counts, src)) candidates.push_back(std::move(*m));
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const TranslationPair& a, const TranslationPair& b) {
        return a.count > b.count || (a.count == b.count && a.src < b.src);
    });

    std::set<std::string, std::less<>> used_src, used_tgt;
    std::vector<TranslationPair> accepted;
    for (auto& c : candidates) {
        if (c.count < min_count || c.fraction < min_fraction) continue;
        if (used_src.count(c.src) || used_tgt.count(c.tgt)) continue;
        used_src.insert(c.src);
        used_tgt.insert(c.tgt);
        accepted.push_back(std::move(c));
    }
    return accepted;
}

FrequencySide parse_frequency_side(std::string_view name) {
    if (name == "both") return FrequencySide::Both;
    if (name == "source" || name == "src") return FrequencySide::Source;
    if (name == "target" || name == "tgt") return FrequencySide::Target;
    throw DataError("unknown frequency side '" + std::string(name) + "'");
}

namespace {

std::uint64_t freq_of(const FrequencyTable& t, const std::string& w) {
    auto it = t.find(w);
    return it == t.end() ? 0 : it->second;
}

}  // namespace

std::vector<TranslationPair> filter_by_frequency(const std::vector<TranslationPair>& pairs,
                                                 const FrequencyTable& src_freqs, const FrequencyTable& tgt_freqs,
                                                 std::uint64_t min_freq, FrequencySide side) {
    std::vector<TranslationPair> out;
    for (const auto& p : pairs) {
        const bool src_ok = side == FrequencySide::Target || freq_of(src_freqs, p.src) >= min_freq;
        const bool tgt_ok = side == FrequencySide::Source || freq_of(tgt_freqs, p.tgt) >= min_freq;
        if (src_ok && tgt_ok) out.push_back(p);
    }
    return out;
}

std::vector<TranslationPair> shared_vocab_pairs(const VocabModel& model_a, const VocabModel& model_b,
                                                const FrequencyTable& freqs, std::uint64_t min_freq) {
    std::vector<TranslationPair> out;
    for (const auto& w : model_a.words()) {
        if (!model_b.contains(w)) continue;
        const auto f = freq_of(freqs, w);
        if (f >= min_freq) out.push_back({w, w, f, 1.0});
    }
    std::sort(out.begin(), out.end(), [](const TranslationPair& a, const TranslationPair& b) {
        return a.count > b.count || (a.count == b.count && a.src < b.src);
    });
    return out;
}

CorpusFrequencies corpus_frequencies(const Corpus& corpus) {
    CorpusFrequencies f;
    for (const auto& p : corpus) {
        for (const auto& w : p.src) ++f.src[w];
        for (const auto& w : p.tgt) ++f.tgt[w];
    }
    return f;
}

FrequencyTable read_frequency_table(std::istream& in) {
    FrequencyTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_ws(line);
        if (fields.empty() || fields[0].front() == '#') continue;
        if (fields.size() != 2) throw FormatError("expected 'token count'", line_no);
        auto c = detail::parse_int<std::uint64_t>(fields[1]);
        if (!c) throw FormatError("non-integer count '" + std::string(fields[1]) + "'", line_no);
        t[std::string(fields[0])] += *c;
    }
    return t;
}

FrequencyTable read_frequency_table_file(const std::string& path) {
    auto in = detail::open_in(path);
    try {
        return read_frequency_table(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_pairs(const std::vector<TranslationPair>& pairs, std::ostream& out) {
    std::string buf;
    for (const auto& p : pairs) {
        buf += p.src;
        buf += '\t';
        buf += p.tgt;
        buf += '\t';
        buf += std::to_string(p.count);
        buf += '\t';
        detail::append_double(buf, p.fraction);
        buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    detail::check_written(out, "pairs file");
}

std::vector<TranslationPair> read_pairs(std::istream& in) {
    std::vector<TranslationPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = detail::strip_cr(line);
        if (detail::trim(view).empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = view.find('\t', start);
            fields.push_back(view.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 4) throw FormatError("pairs line needs 4 tab-separated fields", line_no);
        auto count = detail::parse_int<std::uint64_t>(fields[2]);
        auto fraction = detail::parse_double(fields[3]);
        if (!count || !fraction) throw FormatError("bad count or fraction", line_no);
        if (fields[0].empty() || fields[1].empty()) throw FormatError("empty token", line_no);
        pairs.push_back({std::string(fields[0]), std::string(fields[1]), *count, *fraction});
    }
    return pairs;
}

std::vector<TranslationPair> read_pairs_file(const std::string& path) {
    auto in = detail::open_in(path);
    try {
        return read_pairs(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace xlmap
