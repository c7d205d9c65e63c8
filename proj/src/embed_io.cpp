#include "xlmap/embed_io.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include "text_util.hpp"

namespace xlmap {

namespace {

void check_dim(int dim) {
    if (dim < 1) throw DimensionError("embedding dimension must be positive, got " + std::to_string(dim));
}

}  // namespace

VocabModel::VocabModel(int dim) : dim_(dim), matrix_(0, dim) { check_dim(dim); }

VocabModel::VocabModel(std::vector<std::string> words, Matrix matrix, FrequencyTable freqs)
    : dim_(static_cast<int>(matrix.cols())), words_(std::move(words)), matrix_(std::move(matrix)),
      freqs_(std::move(freqs)) {
    check_dim(dim_);
    if (static_cast<std::size_t>(matrix_.rows()) != words_.size()) {
        throw DimensionError("matrix has " + std::to_string(matrix_.rows()) + " rows for " +
                             std::to_string(words_.size()) + " words");
    }
    if (!matrix_.allFinite()) throw DataError("embedding matrix contains non-finite entries");
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) throw DataError("duplicate word '" + words_[i] + "'");
    }
}

bool VocabModel::contains(std::string_view word) const { return index_.find(word) != index_.end(); }

std::optional<std::size_t> VocabModel::row_of(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

VocabModel VocabModel::with_matrix(Matrix matrix) const {
    if (matrix.rows() != matrix_.rows()) {
        throw DimensionError("replacement matrix has " + std::to_string(matrix.rows()) + " rows, expected " +
                             std::to_string(matrix_.rows()));
    }
    return VocabModel(words_, std::move(matrix), freqs_);
}

VocabModel::Builder::Builder(int dim) : dim_(dim) { check_dim(dim); }

bool VocabModel::Builder::add(std::string word, const std::vector<double>& vec) {
    return add(std::move(word), Eigen::Map<const Vector>(vec.data(), static_cast<Eigen::Index>(vec.size())));
}

VocabModel VocabModel::Builder::build() && {
    const auto n = static_cast<Eigen::Index>(words_.size());
    Matrix m = n == 0 ? Matrix(0, dim_) : Matrix(Eigen::Map<const Matrix>(values_.data(), n, dim_));
    FrequencyTable freqs;
    for (auto& [w, c] : freqs_) {
        if (seen_.count(w)) freqs.emplace(w, c);
    }
    return VocabModel(std::move(words_), std::move(m), std::move(freqs));
}

LoadedModel load_text_model(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw FormatError("missing header line", 1);
    ++line_no;
    auto header = detail::split_ws(line);
    if (header.size() != 2) throw FormatError("header must be '<vocab_size> <dim>'", line_no);
    auto vocab_size = detail::parse_int<std::size_t>(header[0]);
    auto dim = detail::parse_int<int>(header[1]);
    if (!vocab_size || !dim) throw FormatError("non-numeric header field", line_no);
    if (*dim < 1) throw FormatError("dimension must be positive", line_no);

    VocabModel::Builder builder(*dim);
    std::vector<std::string> duplicates;
    std::vector<double> vec(static_cast<std::size_t>(*dim));
    std::size_t rows = 0;

    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != static_cast<std::size_t>(*dim) + 1) {
            throw FormatError("expected token plus " + std::to_string(*dim) + " components, found " +
                                  std::to_string(fields.size() - 1),
                              line_no);
        }
        for (int d = 0; d < *dim; ++d) {
            auto v = detail::parse_double(fields[static_cast<std::size_t>(d) + 1]);
            if (!v) throw FormatError("non-numeric component '" + std::string(fields[d + 1]) + "'", line_no);
            if (!std::isfinite(*v)) throw FormatError("non-finite component", line_no);
            vec[static_cast<std::size_t>(d)] = *v;
        }
        ++rows;
        std::string token(fields[0]);
        if (!builder.add(token, vec)) duplicates.push_back(std::move(token));
    }
    if (in.bad()) throw IoError("read failure while loading text model");
    if (rows != *vocab_size) {
        throw FormatError("header declares " + std::to_string(*vocab_size) + " words but " +
                              std::to_string(rows) + " vector lines follow",
                          line_no);
    }
    return {std::move(builder).build(), std::move(duplicates)};
}

LoadedModel load_text_model_file(const std::string& path) {
    auto in = detail::open_in(path);
    try {
        return load_text_model(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void save_text_model(const VocabModel& model, std::ostream& out) {
    std::string buf;
    buf += std::to_string(model.size());
    buf += ' ';
    buf += std::to_string(model.dim());
    buf += '\n';
    const Matrix& m = model.matrix();
    for (std::size_t i = 0; i < model.size(); ++i) {
        buf += model.words()[i];
        for (Eigen::Index d = 0; d < m.cols(); ++d) {
            buf += ' ';
            detail::append_double(buf, m(static_cast<Eigen::Index>(i), d));
        }
        buf += '\n';
        if (buf.size() > (1u << 16)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    detail::check_written(out, "text model");
}

void save_text_model_file(const VocabModel& model, const std::string& path) {
    auto out = detail::open_out(path);
    save_text_model(model, out);
}

std::optional<Vector> lookup(const VocabModel& model, std::string_view word) {
    auto r = model.row_of(word);
    if (!r) return std::nullopt;
    return Vector(model.row(*r));
}

NormalizedModel unit_normalize(const VocabModel& model) {
    Matrix m = model.matrix();
    std::vector<std::string> zero_rows;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double n = m.row(i).norm();
        if (n == 0.0) {
            zero_rows.push_back(model.words()[static_cast<std::size_t>(i)]);
        } else {
            m.row(i) /= n;
        }
    }
    return {model.with_matrix(std::move(m)), std::move(zero_rows)};
}

std::vector<Neighbor> nearest_neighbors(const VocabModel& model, const Eigen::Ref<const Vector>& query,
                                        std::size_t k, const std::unordered_set<std::string>& exclude) {
    if (query.size() != model.dim()) {
        throw DimensionError("query has " + std::to_string(query.size()) + " components, model dim is " +
                             std::to_string(model.dim()));
    }
    const double qn = query.norm();
    if (qn == 0.0) throw DataError("nearest_neighbors query is the zero vector");
    if (k == 0) return {};

    struct Scored {
        std::size_t row;
        double sim;
    };
    std::vector<Scored> scored;
    scored.reserve(model.size());
    const Matrix& m = model.matrix();
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!exclude.empty() && exclude.count(model.words()[i])) continue;
        const auto r = m.row(static_cast<Eigen::Index>(i));
        const double rn = r.norm();
        if (rn == 0.0) continue;
        scored.push_back({i, std::clamp(r.dot(query) / (rn * qn), -1.0, 1.0)});
    }
    const std::size_t keep = std::min(k, scored.size());
    auto by_sim = [](const Scored& a, const Scored& b) { return a.sim > b.sim || (a.sim == b.sim && a.row < b.row); };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), by_sim);

    std::vector<Neighbor> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back({model.words()[scored[i].row], scored[i].sim});
    return out;
}

}  // namespace xlmap
