#ifndef XLMAP_EMBED_IO_HPP
#define XLMAP_EMBED_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "xlmap/error.hpp"

namespace xlmap {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = RowMatrix<double>;
using Vector = RowVector<double>;

using FrequencyTable = std::unordered_map<std::string, std::uint64_t>;

inline constexpr int kDefaultDim = 300;

// A vocabulary with one embedding row per word. Immutable once built;
// construct through the constructor or VocabModel::Builder.
class VocabModel {
   public:
    explicit VocabModel(int dim = kDefaultDim);

    // words must be unique, matrix.rows() == words.size(), entries finite.
    VocabModel(std::vector<std::string> words, Matrix matrix, FrequencyTable freqs = {});

    class Builder;

    int dim() const { return dim_; }
    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }

    const std::vector<std::string>& words() const { return words_; }
    const Matrix& matrix() const { return matrix_; }
    const FrequencyTable& freqs() const { return freqs_; }
    bool has_freqs() const { return !freqs_.empty(); }

    bool contains(std::string_view word) const;
    std::optional<std::size_t> row_of(std::string_view word) const;
    auto row(std::size_t i) const { return matrix_.row(static_cast<Eigen::Index>(i)); }

    // Copy with the same vocabulary and a replacement matrix (row count must match).
    VocabModel with_matrix(Matrix matrix) const;

   private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };

    int dim_;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
    Matrix matrix_;
    FrequencyTable freqs_;
};

// Incremental construction; add() keeps the first occurrence of a token.
class VocabModel::Builder {
   public:
    explicit Builder(int dim);

    // Returns false (and stores nothing) when the word is already present.
    template <typename Derived>
    bool add(std::string word, const Eigen::MatrixBase<Derived>& vec) {
        if (vec.size() != dim_) {
            throw DimensionError("vector for '" + word + "' has " + std::to_string(vec.size()) +
                                 " components, expected " + std::to_string(dim_));
        }
        if (!seen_.insert(word).second) return false;
        for (Eigen::Index i = 0; i < vec.size(); ++i) values_.push_back(static_cast<double>(vec(i)));
        words_.push_back(std::move(word));
        return true;
    }
    bool add(std::string word, const std::vector<double>& vec);

    void set_freq(const std::string& word, std::uint64_t count) { freqs_[word] = count; }
    bool contains(const std::string& word) const { return seen_.count(word) != 0; }
    std::size_t size() const { return words_.size(); }

    VocabModel build() &&;

   private:
    int dim_;
    std::vector<std::string> words_;
    std::unordered_set<std::string> seen_;
    std::vector<double> values_;
    FrequencyTable freqs_;
};

struct LoadedModel {
    VocabModel model;
    std::vector<std::string> duplicates;  // tokens seen again after their first line
};

// Text vector format: "<vocab_size> <dim>" header, then "<token> v1 ... vdim" lines.
LoadedModel load_text_model(std::istream& in);
LoadedModel load_text_model_file(const std::string& path);

// Numbers use the shortest representation that parses back to the same double.
void save_text_model(const VocabModel& model, std::ostream& out);
void save_text_model_file(const VocabModel& model, const std::string& path);

std::optional<Vector> lookup(const VocabModel& model, std::string_view word);

template <typename DerivedU, typename DerivedV>
double cosine(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
    if (u.size() != v.size()) {
        throw DimensionError("cosine of vectors with lengths " + std::to_string(u.size()) + " and " +
                             std::to_string(v.size()));
    }
    const double nu = u.template cast<double>().norm();
    const double nv = v.template cast<double>().norm();
    if (nu == 0.0 || nv == 0.0) throw DataError("cosine similarity undefined for a zero vector");
    double c = u.template cast<double>().dot(v.template cast<double>()) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

struct NormalizedModel {
    VocabModel model;
    std::vector<std::string> zero_rows;
};

NormalizedModel unit_normalize(const VocabModel& model);

struct Neighbor {
    std::string word;
    double similarity;
};

// Exhaustive scan; zero rows are never returned. Ties keep vocabulary order.
std::vector<Neighbor> nearest_neighbors(const VocabModel& model, const Eigen::Ref<const Vector>& query,
                                        std::size_t k, const std::unordered_set<std::string>& exclude = {});

}  // namespace xlmap

#endif  // XLMAP_EMBED_IO_HPP
