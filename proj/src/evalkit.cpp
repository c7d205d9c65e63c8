#include "xlmap/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "text_util.hpp"

namespace xlmap {

std::optional<std::string_view> TranslationTable::translate(std::string_view word) const {
    auto it = entries.find(std::string(word));
    if (it == entries.end()) return std::nullopt;
    return std::string_view(it->second);
}

namespace {

template <typename Parse>
auto read_file(const std::string& path, Parse parse) {
    auto in = detail::open_in(path);
    try {
        return parse(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace

SimilarityDataset read_similarity_dataset(std::istream& in) {
    SimilarityDataset ds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_ws(line);
        if (fields.empty() || fields[0].front() == '#') continue;
        if (fields.size() != 3) throw FormatError("expected 'w1 w2 score'", line_no);
        auto score = detail::parse_double(fields[2]);
        if (!score || !std::isfinite(*score)) throw FormatError("bad similarity score", line_no);
        ds.items.push_back({std::string(fields[0]), std::string(fields[1]), *score});
    }
    return ds;
}

SimilarityDataset read_similarity_dataset_file(const std::string& path) {
    return read_file(path, [](std::istream& in) { return read_similarity_dataset(in); });
}

AnalogyDataset read_analogy_dataset(std::istream& in) {
    AnalogyDataset ds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_ws(line);
        if (fields.empty() || fields[0].front() == '#' || fields[0].front() == ':') continue;
        if (fields.size() != 4) throw FormatError("expected 4 tokens", line_no);
        ds.items.push_back(
            {std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), std::string(fields[3])});
    }
    return ds;
}

AnalogyDataset read_analogy_dataset_file(const std::string& path) {
    return read_file(path, [](std::istream& in) { return read_analogy_dataset(in); });
}

TranslationTable read_translation_table(std::istream& in) {
    TranslationTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_ws(line);
        if (fields.empty() || fields[0].front() == '#') continue;
        if (fields.size() != 2) throw FormatError("expected 'target_word<TAB>source_word'", line_no);
        table.entries.emplace(std::string(fields[0]), std::string(fields[1]));
    }
    return table;
}

TranslationTable read_translation_table_file(const std::string& path) {
    return read_file(path, [](std::istream& in) { return read_translation_table(in); });
}

// ---------------------------------------------------------------------------
// Rank correlation

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j share the mean of ranks i+1..j+1
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("spearman inputs differ in length");
    if (x.size() < 2) throw DataError("spearman needs at least two observations");
    for (auto s : {x, y}) {
        for (double v : s) {
            if (!std::isfinite(v)) throw DataError("spearman input contains non-finite values");
        }
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const Eigen::Map<const Eigen::ArrayXd> ax(rx.data(), static_cast<Eigen::Index>(rx.size()));
    const Eigen::Map<const Eigen::ArrayXd> ay(ry.data(), static_cast<Eigen::Index>(ry.size()));
    const Eigen::ArrayXd dx = ax - ax.mean();
    const Eigen::ArrayXd dy = ay - ay.mean();
    const double sxx = dx.square().sum();
    const double syy = dy.square().sum();
    if (sxx == 0.0 || syy == 0.0) throw DataError("spearman undefined for constant input");
    return std::clamp((dx * dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Similarity

EvalReport eval_similarity(const VectorResolver& resolve, const SimilarityDataset& ds) {
    EvalReport report;
    std::unordered_set<std::string> unseen;
    std::vector<double> human, predicted;
    for (const auto& item : ds.items) {
        auto u = resolve(item.w1);
        auto v = resolve(item.w2);
        auto note_oov = [&](const std::string& w, const std::optional<Vector>& vec) {
            if (vec) return;
            ++report.oov_slots;
            unseen.insert(w);
        };
        note_oov(item.w1, u);
        note_oov(item.w2, v);
        if (!u || !v || u->norm() == 0.0 || v->norm() == 0.0) {
            ++report.skipped_items;
            continue;
        }
        human.push_back(item.human);
        predicted.push_back(cosine(*u, *v));
        ++report.evaluated;
    }
    report.unseen_words = unseen.size();
    if (report.evaluated < 2) {
        throw DataError("only " + std::to_string(report.evaluated) + " similarity items could be evaluated");
    }
    report.score = spearman(human, predicted) * 100.0;
    return report;
}

EvalReport eval_similarity(const VocabModel& model, const SimilarityDataset& ds) {
    return eval_similarity([&](std::string_view w) { return lookup(model, w); }, ds);
}

EvalReport eval_similarity_translated(const VocabModel& src_model, const LinearMap& src_to_target,
                                      const TranslationTable& table, const SimilarityDataset& ds) {
    if (src_to_target.source_dim() != src_model.dim()) {
        throw DimensionError("map source dim does not match the source model");
    }
    return eval_similarity(
        [&](std::string_view w) -> std::optional<Vector> {
            auto src_word = table.translate(w);
            if (!src_word) return std::nullopt;
            auto r = src_model.row_of(*src_word);
            if (!r) return std::nullopt;
            return apply(src_to_target, src_model.row(*r));
        },
        ds);
}

// ---------------------------------------------------------------------------
// Analogy

std::string_view to_string(AnalogyMethod method) { return method == AnalogyMethod::CosSum ? "cossum" : "cosmul"; }

AnalogySolver::AnalogySolver(const VocabModel& model, double epsilon)
    : normalized_(unit_normalize(model).model), zero_row_(model.size(), false), epsilon_(epsilon) {
    if (!(epsilon > 0.0)) throw DataError("CosMul epsilon must be positive");
    for (std::size_t i = 0; i < model.size(); ++i) {
        zero_row_[i] = normalized_.row(i).squaredNorm() == 0.0;
    }
}

std::optional<AnalogyAnswer> AnalogySolver::solve(std::string_view a, std::string_view a_star, std::string_view b,
                                                  AnalogyMethod method) const {
    const auto ra = normalized_.row_of(a);
    const auto ras = normalized_.row_of(a_star);
    const auto rb = normalized_.row_of(b);
    if (!ra || !ras || !rb) return std::nullopt;
    if (zero_row_[*ra] || zero_row_[*ras] || zero_row_[*rb]) return std::nullopt;

    const Matrix& m = normalized_.matrix();
    Eigen::VectorXd scores;
    std::optional<double> min_den;
    if (method == AnalogyMethod::CosSum) {
        const Vector target = normalized_.row(*rb) - normalized_.row(*ra) + normalized_.row(*ras);
        const double tn = target.norm();
        if (tn == 0.0) return std::nullopt;
        scores = (m * target.transpose()) / tn;
    } else {
        const Eigen::ArrayXd cb = (m * normalized_.row(*rb).transpose()).array().max(-1.0).min(1.0);
        const Eigen::ArrayXd cas = (m * normalized_.row(*ras).transpose()).array().max(-1.0).min(1.0);
        const Eigen::ArrayXd ca = (m * normalized_.row(*ra).transpose()).array().max(-1.0).min(1.0);
        const Eigen::ArrayXd den = ca.unaryExpr([this](double c) { return cosmul_denominator(c, epsilon_); });
        scores = ((cb + 1.0) / 2.0 * (cas + 1.0) / 2.0 / den).matrix();
        min_den = den.size() ? den.minCoeff() : epsilon_;
    }

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < normalized_.size(); ++i) {
        if (i == *ra || i == *ras || i == *rb || zero_row_[i]) continue;
        if (!best || scores(static_cast<Eigen::Index>(i)) > scores(static_cast<Eigen::Index>(*best))) best = i;
    }
    if (!best) return std::nullopt;
    return AnalogyAnswer{normalized_.words()[*best], scores(static_cast<Eigen::Index>(*best)), min_den};
}

std::optional<std::string> solve_analogy(const VocabModel& model, std::string_view a, std::string_view a_star,
                                         std::string_view b, AnalogyMethod method, double epsilon) {
    auto ans = AnalogySolver(model, epsilon).solve(a, a_star, b, method);
    if (!ans) return std::nullopt;
    return std::move(ans->word);
}

AnalogyReport eval_analogy(const VocabModel& model, const AnalogyDataset& ds, double epsilon) {
    if (ds.items.empty()) throw DataError("analogy dataset is empty");
    const AnalogySolver solver(model, epsilon);
    AnalogyReport report;
    std::unordered_set<std::string> unseen;
    std::size_t oov_slots = 0;
    std::size_t correct_sum = 0, correct_mul = 0, evaluated = 0;
    for (const auto& item : ds.items) {
        bool query_oov = false;
        for (const auto* w : {&item.a, &item.a_star, &item.b, &item.b_star}) {
            if (!model.contains(*w)) {
                ++oov_slots;
                unseen.insert(*w);
                if (w != &item.b_star) query_oov = true;
            }
        }
        if (query_oov) continue;
        ++evaluated;
        auto s = solver.solve(item.a, item.a_star, item.b, AnalogyMethod::CosSum);
        auto p = solver.solve(item.a, item.a_star, item.b, AnalogyMethod::CosMul);
        if (s && s->word == item.b_star) ++correct_sum;
        if (p && p->word == item.b_star) ++correct_mul;
    }
    const double n = static_cast<double>(ds.items.size());
    for (auto* r : {&report.cossum, &report.cosmul}) {
        r->evaluated = evaluated;
        r->skipped_items = ds.items.size() - evaluated;
        r->unseen_words = unseen.size();
        r->oov_slots = oov_slots;
    }
    report.cossum.score = static_cast<double>(correct_sum) / n;
    report.cosmul.score = static_cast<double>(correct_mul) / n;
    return report;
}

}  // namespace xlmap
