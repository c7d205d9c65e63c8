#ifndef XLMAP_LINMAP_HPP
#define XLMAP_LINMAP_HPP

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "xlmap/embed_io.hpp"
#include "xlmap/error.hpp"
#include "xlmap/pair_extract.hpp"

namespace xlmap {

enum class Solver { Pseudoinverse, NormalEquations };

Solver parse_solver(std::string_view name);
std::string_view to_string(Solver solver);

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kPinvRelativeCutoff = 1e-10;
// Ridge added to A^T A (scaled by its mean diagonal) when it is numerically singular.
inline constexpr double kRidgeScale = 1e-8;

template <typename Scalar>
struct LeastSquaresSolution {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> X;
    Eigen::Index rank = 0;
    bool ridged = false;
};

// argmin_X ||A X - B||_F (minimum-norm for the pseudoinverse route).
template <typename DerivedA, typename DerivedB>
LeastSquaresSolution<typename DerivedA::Scalar> solve_least_squares(const Eigen::MatrixBase<DerivedA>& A,
                                                                    const Eigen::MatrixBase<DerivedB>& B,
                                                                    Solver solver) {
    using Scalar = typename DerivedA::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (A.rows() != B.rows()) {
        throw DimensionError("A has " + std::to_string(A.rows()) + " rows, B has " + std::to_string(B.rows()));
    }
    if (A.rows() == 0) throw DataError("least squares needs at least one row");
    if (!A.allFinite() || !B.allFinite()) throw DataError("least squares input contains non-finite entries");

    LeastSquaresSolution<Scalar> out;
    const Mat a = A;
    const Mat b = B.template cast<Scalar>();

    if (solver == Solver::Pseudoinverse) {
        Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sigma = svd.singularValues();
        const Scalar cutoff = sigma.size() ? Scalar(kPinvRelativeCutoff) * sigma(0) : Scalar(0);
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv(sigma.size());
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
            if (sigma(i) > cutoff && sigma(i) > Scalar(0)) {
                inv(i) = Scalar(1) / sigma(i);
                ++out.rank;
            } else {
                inv(i) = Scalar(0);
            }
        }
        out.X = svd.matrixV() * (inv.asDiagonal() * (svd.matrixU().transpose() * b));
        return out;
    }

    Mat gram = a.transpose() * a;
    const Mat rhs = a.transpose() * b;
    Eigen::LLT<Mat> llt(gram);
    const Scalar singular_below = std::numeric_limits<Scalar>::epsilon() * Scalar(a.cols());
    if (llt.info() != Eigen::Success || llt.rcond() < singular_below) {
        const Scalar trace = gram.trace();
        if (trace <= Scalar(0)) {
            out.X = Mat::Zero(a.cols(), b.cols());
            return out;
        }
        gram.diagonal().array() += Scalar(kRidgeScale) * trace / Scalar(a.cols());
        llt.compute(gram);
        out.ridged = true;
    }
    out.X = llt.solve(rhs);
    out.rank = Eigen::FullPivLU<Mat>(a).rank();
    return out;
}

// Row-stacked training embeddings: row k of A (source) and B (target) belong to used[k].
struct PairMatrices {
    Matrix A;
    Matrix B;
    std::vector<TranslationPair> used;
    std::vector<TranslationPair> skipped;  // either side out of vocabulary
};

struct BuildOptions {
    std::optional<std::size_t> max_pairs;  // cap on used pairs, taken in list order
    bool unit_normalize = false;
};

// Throws DataError when no pair has both words in vocabulary.
PairMatrices build_matrices(const std::vector<TranslationPair>& pairs, const VocabModel& src_model,
                            const VocabModel& tgt_model, const BuildOptions& options = {});

// Maps source-space row vectors v to v * X in the target space.
struct LinearMap {
    Matrix X;
    Solver solver = Solver::Pseudoinverse;
    double fit_residual = 0.0;
    std::optional<Eigen::Index> rank;  // numerical rank of A; unknown for loaded maps

    Eigen::Index source_dim() const { return X.rows(); }
    Eigen::Index target_dim() const { return X.cols(); }
    bool rank_deficient() const { return rank && *rank < X.rows(); }
};

LinearMap fit(const PairMatrices& pm, Solver solver = Solver::Pseudoinverse);

// ||A X - B||_F
template <typename DA, typename DX, typename DB>
double residual_norm(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DB>& B) {
    return (A * X - B).norm();
}

Vector apply(const LinearMap& map, const Eigen::Ref<const Vector>& v);

VocabModel transform_model(const LinearMap& map, const VocabModel& model);

// Header "D_src D_tgt solver_tag fit_residual", then D_src rows of D_tgt numbers.
void save_map(const LinearMap& map, std::ostream& out);
void save_map_file(const LinearMap& map, const std::string& path);
LinearMap load_map(std::istream& in);
LinearMap load_map_file(const std::string& path);

}  // namespace xlmap

#endif  // XLMAP_LINMAP_HPP
