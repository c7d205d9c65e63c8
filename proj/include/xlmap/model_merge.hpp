#ifndef XLMAP_MODEL_MERGE_HPP
#define XLMAP_MODEL_MERGE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlmap/embed_io.hpp"
#include "xlmap/linmap.hpp"

namespace xlmap {

struct MergeResult {
    VocabModel merged;
    std::vector<std::string> imported;  // donor-only words, in donor order
};

// Base vectors are kept verbatim; donor-only words are mapped into the base
// space with donor_to_base and appended after the base vocabulary.
MergeResult import_missing(const VocabModel& base, const VocabModel& donor, const LinearMap& donor_to_base);

// Lazy form of import_missing: same vectors, bit for bit.
std::optional<Vector> resolve(const VocabModel& base, const VocabModel& donor, const LinearMap& donor_to_base,
                              std::string_view word);

void write_token_list(const std::vector<std::string>& tokens, std::ostream& out);

}  // namespace xlmap

#endif  // XLMAP_MODEL_MERGE_HPP
