#include "xlmap/model_merge.hpp"

#include <ostream>

#include "text_util.hpp"

namespace xlmap {

namespace {

void check_dims(const VocabModel& base, const VocabModel& donor, const LinearMap& map) {
    if (map.source_dim() != donor.dim() || map.target_dim() != base.dim()) {
        throw DimensionError("map is " + std::to_string(map.source_dim()) + "x" + std::to_string(map.target_dim()) +
                             " but donor dim is " + std::to_string(donor.dim()) + " and base dim is " +
                             std::to_string(base.dim()));
    }
}

}  // namespace

MergeResult import_missing(const VocabModel& base, const VocabModel& donor, const LinearMap& donor_to_base) {
    check_dims(base, donor, donor_to_base);
    MergeResult result{VocabModel(base.dim()), {}};
    for (const auto& w : donor.words()) {
        if (!base.contains(w)) result.imported.push_back(w);
    }

    const auto n_base = static_cast<Eigen::Index>(base.size());
    Matrix m(n_base + static_cast<Eigen::Index>(result.imported.size()), base.dim());
    m.topRows(n_base) = base.matrix();
    std::vector<std::string> words = base.words();
    FrequencyTable freqs = base.freqs();
    Eigen::Index r = n_base;
    for (const auto& w : result.imported) {
        // Row-by-row apply keeps results identical to resolve().
        m.row(r++) = apply(donor_to_base, donor.row(*donor.row_of(w)));
        words.push_back(w);
        if (auto f = donor.freqs().find(w); f != donor.freqs().end()) freqs.emplace(w, f->second);
    }
    result.merged = VocabModel(std::move(words), std::move(m), std::move(freqs));
    return result;
}

std::optional<Vector> resolve(const VocabModel& base, const VocabModel& donor, const LinearMap& donor_to_base,
                              std::string_view word) {
    check_dims(base, donor, donor_to_base);
    if (auto r = base.row_of(word)) return Vector(base.row(*r));
    if (auto r = donor.row_of(word)) return apply(donor_to_base, donor.row(*r));
    return std::nullopt;
}

void write_token_list(const std::vector<std::string>& tokens, std::ostream& out) {
    for (const auto& t : tokens) out << t << '\n';
    detail::check_written(out, "token list");
}

}  // namespace xlmap
