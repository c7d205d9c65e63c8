#include "xlmap/linmap.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "text_util.hpp"

namespace xlmap {

Solver parse_solver(std::string_view name) {
    if (name == "pseudoinverse" || name == "pinv") return Solver::Pseudoinverse;
    if (name == "normal_equations") return Solver::NormalEquations;
    throw DataError("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(Solver solver) {
    return solver == Solver::Pseudoinverse ? "pseudoinverse" : "normal_equations";
}

PairMatrices build_matrices(const std::vector<TranslationPair>& pairs, const VocabModel& src_model,
                            const VocabModel& tgt_model, const BuildOptions& options) {
    PairMatrices pm;
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    for (const auto& p : pairs) {
        auto s = src_model.row_of(p.src);
        auto t = tgt_model.row_of(p.tgt);
        if (!s || !t || (options.max_pairs && rows.size() >= *options.max_pairs)) {
            if (!s || !t) pm.skipped.push_back(p);
            continue;
        }
        rows.emplace_back(*s, *t);
        pm.used.push_back(p);
    }
    if (rows.empty()) throw DataError("no usable translation pairs: every pair has an out-of-vocabulary word");

    const auto n = static_cast<Eigen::Index>(rows.size());
    pm.A.resize(n, src_model.dim());
    pm.B.resize(n, tgt_model.dim());
    for (Eigen::Index k = 0; k < n; ++k) {
        pm.A.row(k) = src_model.row(rows[static_cast<std::size_t>(k)].first);
        pm.B.row(k) = tgt_model.row(rows[static_cast<std::size_t>(k)].second);
    }
    if (options.unit_normalize) {
        for (Matrix* m : {&pm.A, &pm.B}) {
            for (Eigen::Index k = 0; k < n; ++k) {
                const double norm = m->row(k).norm();
                if (norm > 0.0) m->row(k) /= norm;
            }
        }
    }
    return pm;
}

LinearMap fit(const PairMatrices& pm, Solver solver) {
    if (pm.A.rows() != pm.B.rows()) throw DimensionError("A and B row counts differ");
    auto sol = solve_least_squares(pm.A, pm.B, solver);
    LinearMap map;
    map.X = sol.X;
    map.solver = solver;
    map.rank = sol.rank;
    map.fit_residual = residual_norm(pm.A, map.X, pm.B);
    return map;
}

Vector apply(const LinearMap& map, const Eigen::Ref<const Vector>& v) {
    if (v.size() != map.source_dim()) {
        throw DimensionError("vector has " + std::to_string(v.size()) + " components, map expects " +
                             std::to_string(map.source_dim()));
    }
    return v * map.X;
}

VocabModel transform_model(const LinearMap& map, const VocabModel& model) {
    if (model.dim() != map.source_dim()) {
        throw DimensionError("model dim " + std::to_string(model.dim()) + " does not match map source dim " +
                             std::to_string(map.source_dim()));
    }
    Matrix out = model.matrix() * map.X;
    return VocabModel(model.words(), std::move(out), model.freqs());
}

void save_map(const LinearMap& map, std::ostream& out) {
    std::string buf;
    buf += std::to_string(map.X.rows());
    buf += ' ';
    buf += std::to_string(map.X.cols());
    buf += ' ';
    buf += to_string(map.solver);
    buf += ' ';
    detail::append_double(buf, map.fit_residual);
    buf += '\n';
    for (Eigen::Index i = 0; i < map.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < map.X.cols(); ++j) {
            if (j) buf += ' ';
            detail::append_double(buf, map.X(i, j));
        }
        buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    detail::check_written(out, "map file");
}

void save_map_file(const LinearMap& map, const std::string& path) {
    auto out = detail::open_out(path);
    save_map(map, out);
}

LinearMap load_map(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw FormatError("missing map header", line_no);
    auto header = detail::split_ws(line);
    if (header.size() != 4) throw FormatError("map header must be 'D_src D_tgt solver_tag fit_residual'", line_no);
    auto rows = detail::parse_int<Eigen::Index>(header[0]);
    auto cols = detail::parse_int<Eigen::Index>(header[1]);
    auto residual = detail::parse_double(header[3]);
    if (!rows || !cols || !residual || *rows < 1 || *cols < 1) throw FormatError("bad map header", line_no);

    LinearMap map;
    try {
        map.solver = parse_solver(header[2]);
    } catch (const DataError& e) {
        throw FormatError(e.what(), line_no);
    }
    map.fit_residual = *residual;
    map.X.resize(*rows, *cols);
    for (Eigen::Index i = 0; i < *rows; ++i) {
        ++line_no;
        if (!std::getline(in, line)) throw FormatError("map file truncated", line_no);
        auto fields = detail::split_ws(line);
        if (static_cast<Eigen::Index>(fields.size()) != *cols) {
            throw FormatError("expected " + std::to_string(*cols) + " numbers", line_no);
        }
        for (Eigen::Index j = 0; j < *cols; ++j) {
            auto v = detail::parse_double(fields[static_cast<std::size_t>(j)]);
            if (!v || !std::isfinite(*v)) throw FormatError("bad matrix entry", line_no);
            map.X(i, j) = *v;
        }
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) throw FormatError("trailing data after map rows", line_no);
    }
    return map;
}

LinearMap load_map_file(const std::string& path) {
    auto in = detail::open_in(path);
    try {
        return load_map(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace xlmap
