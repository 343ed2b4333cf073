#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fedlab {

/// Flat list of model parameters; the universal currency between learner,
/// attacks, and defenses.
struct ParameterVector {
    std::vector<double> values;

    ParameterVector() = default;
    explicit ParameterVector(std::size_t dim, double fill = 0.0) : values(dim, fill) {}
    explicit ParameterVector(std::vector<double> v) : values(std::move(v)) {}

    std::size_t dim() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool finite() const;
};

ParameterVector operator+(const ParameterVector& a, const ParameterVector& b);
ParameterVector operator-(const ParameterVector& a, const ParameterVector& b);
ParameterVector operator*(double c, const ParameterVector& v);

/// Throws StructuralError unless a.dim() == b.dim() and both are nonempty.
void check_same_dim(const ParameterVector& a, const ParameterVector& b);

double l1_norm(const ParameterVector& v);
double l2_norm(const ParameterVector& v);
double dot(const ParameterVector& a, const ParameterVector& b);

/// Cosine similarity; defined as 0 when either vector has zero norm.
double cosine_similarity(const ParameterVector& a, const ParameterVector& b);

namespace vecmath {

/// Per-client triple (Manhattan distance, Euclidean distance, cosine
/// similarity) relating a local model to the global one.
struct GradientFeature {
    double man = 0.0;  // ||w_i - w_0||_1
    double eul = 0.0;  // ||w_i - w_0||_2
    double cos = 0.0;  // <w_0, w_i> / (||w_0|| ||w_i||)
};

/// Pairwise absolute-difference sums of one client's feature against all
/// other clients, per metric.
struct DivergenceRow {
    double man_sum = 0.0;
    double eul_sum = 0.0;
    double cos_sum = 0.0;
};

/// Symmetric 3x3 matrix in row-major order.
struct Mat3 {
    std::array<double, 9> m{};

    double& at(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }
    double at(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }

    double trace() const { return m[0] + m[4] + m[8]; }
    double determinant() const;

    static Mat3 identity();
    static Mat3 scaled_identity(double c);
};

struct CovarianceMatrix {
    Mat3 entries;
    bool regularized = false;
};

enum class ZeroNormPolicy {
    throw_error,  // zero-norm model raises DegenerateInputError
    cosine_zero,  // zero-norm model yields cos = 0 (a warning is logged once per process)
};

/// Monte-Carlo relative-contrast measurements per dimension d: how fast the
/// gap between the farthest and nearest point (to the origin) shrinks
/// relative to the nearest distance, under L1 and L2; plus the ratio
/// M_d / (U_d * sqrt(d)) whose stability across d separates the two metrics.
struct RelativeContrastReport {
    std::vector<int> dims;
    std::vector<double> l1_contrast;
    std::vector<double> l2_contrast;
    std::vector<double> m_over_u_rootd;
    int num_points = 0;
    int num_trials = 0;
};

/// Feature of gradient: L1/L2 distance between the models plus cosine
/// similarity between the models themselves (not the difference vectors).
GradientFeature gradient_feature(const ParameterVector& global, const ParameterVector& local,
                                 ZeroNormPolicy policy = ZeroNormPolicy::throw_error);

/// Row i component = sum over j != i of |feature_i - feature_j| per metric.
/// Requires at least two features.
std::vector<DivergenceRow> divergence_rows(const std::vector<GradientFeature>& features);

/// Sample covariance (divisor K-1) over K > 3 rows. When the smallest
/// eigenvalue is not above 1e-10 * trace, ridge * I is added and the
/// regularized flag set.
CovarianceMatrix covariance_of_rows(const std::vector<DivergenceRow>& rows, double ridge);

/// Ridge used when covariance_of_rows must regularize: 1e-8 * trace / 3,
/// or an absolute 1e-12 when the trace is zero (all rows identical).
double default_ridge(const std::vector<DivergenceRow>& rows);

/// covariance_of_rows with the default ridge.
CovarianceMatrix covariance_of_rows(const std::vector<DivergenceRow>& rows);

/// sqrt(x'^T Sigma^{-1} x'), the whitened divergence score. The 3x3 inverse
/// is the closed-form adjugate. Throws NumericalError when the covariance is
/// singular despite regularization.
double mahalanobis_score(const DivergenceRow& row, const CovarianceMatrix& cov);

/// Inverse via adjugate / determinant. Throws NumericalError when singular.
Mat3 invert_spd3(const Mat3& a);

/// Eigenvalues of a symmetric 3x3, ascending. Closed-form trigonometric
/// method; exact diagonal shortcut when off-diagonals vanish.
std::array<double, 3> symmetric_eigenvalues(const Mat3& a);

/// Symmetric inverse square root Sigma^{-1/2}, via Jacobi eigendecomposition.
/// Requires a positive definite input.
Mat3 inverse_sqrt_spd3(const Mat3& a);

/// For each d: num_points uniform samples in [0,1]^d per trial; distances to
/// the origin under L1 and L2; averaged relative contrast and M/(U*sqrt(d)).
RelativeContrastReport relative_contrast(const std::vector<int>& dims, int num_points,
                                         int num_trials, std::uint64_t seed);

}  // namespace vecmath
}  // namespace fedlab
