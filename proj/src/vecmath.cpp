#include "fedlab/vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"

namespace fedlab {

bool ParameterVector::finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void check_same_dim(const ParameterVector& a, const ParameterVector& b) {
    if (a.dim() == 0 || b.dim() == 0) {
        throw StructuralError("parameter vector must have dim >= 1");
    }
    if (a.dim() != b.dim()) {
        throw StructuralError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
}

ParameterVector operator+(const ParameterVector& a, const ParameterVector& b) {
    check_same_dim(a, b);
    ParameterVector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
    return out;
}

ParameterVector operator-(const ParameterVector& a, const ParameterVector& b) {
    check_same_dim(a, b);
    ParameterVector out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
    return out;
}

ParameterVector operator*(double c, const ParameterVector& v) {
    ParameterVector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) out[i] = c * v[i];
    return out;
}

double l1_norm(const ParameterVector& v) {
    double s = 0.0;
    for (double x : v.values) s += std::abs(x);
    return s;
}

double l2_norm(const ParameterVector& v) {
    double s = 0.0;
    for (double x : v.values) s += x * x;
    return std::sqrt(s);
}

double dot(const ParameterVector& a, const ParameterVector& b) {
    check_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

double cosine_similarity(const ParameterVector& a, const ParameterVector& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

namespace vecmath {

double Mat3::determinant() const {
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

Mat3 Mat3::identity() { return scaled_identity(1.0); }

Mat3 Mat3::scaled_identity(double c) {
    Mat3 out;
    out.at(0, 0) = c;
    out.at(1, 1) = c;
    out.at(2, 2) = c;
    return out;
}

GradientFeature gradient_feature(const ParameterVector& global, const ParameterVector& local,
                                 ZeroNormPolicy policy) {
    check_same_dim(global, local);
    GradientFeature f;
    double man = 0.0, eul = 0.0;
    for (std::size_t i = 0; i < global.dim(); ++i) {
        const double d = local[i] - global[i];
        man += std::abs(d);
        eul += d * d;
    }
    f.man = man;
    f.eul = std::sqrt(eul);

    const double ng = l2_norm(global);
    const double nl = l2_norm(local);
    if (ng == 0.0 || nl == 0.0) {
        if (policy == ZeroNormPolicy::throw_error) {
            throw DegenerateInputError("zero-norm model: cosine feature undefined");
        }
        static bool warned = false;
        if (!warned) {
            std::cerr << "[fedlab] warning: zero-norm model, cosine feature set to 0\n";
            warned = true;
        }
        f.cos = 0.0;
    } else {
        f.cos = dot(global, local) / (ng * nl);
    }
    return f;
}

std::vector<DivergenceRow> divergence_rows(const std::vector<GradientFeature>& features) {
    const std::size_t k = features.size();
    if (k < 2) {
        throw InsufficientPopulationError("divergence_rows requires at least 2 features, got " +
                                          std::to_string(k));
    }
    std::vector<DivergenceRow> rows(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            rows[i].man_sum += std::abs(features[i].man - features[j].man);
            rows[i].eul_sum += std::abs(features[i].eul - features[j].eul);
            rows[i].cos_sum += std::abs(features[i].cos - features[j].cos);
        }
    }
    return rows;
}

namespace {

Mat3 sample_covariance(const std::vector<DivergenceRow>& rows) {
    const double k = static_cast<double>(rows.size());
    std::array<double, 3> mean{};
    for (const auto& r : rows) {
        mean[0] += r.man_sum;
        mean[1] += r.eul_sum;
        mean[2] += r.cos_sum;
    }
    for (double& m : mean) m /= k;

    Mat3 cov;
    for (const auto& r : rows) {
        const std::array<double, 3> d{r.man_sum - mean[0], r.eul_sum - mean[1],
                                      r.cos_sum - mean[2]};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                cov.at(a, b) += d[static_cast<std::size_t>(a)] * d[static_cast<std::size_t>(b)];
            }
        }
    }
    for (double& v : cov.m) v /= (k - 1.0);
    return cov;
}

}  // namespace

std::array<double, 3> symmetric_eigenvalues(const Mat3& a) {
    // Closed-form eigenvalues of a symmetric 3x3 (trigonometric method).
    const double p1 = a.at(0, 1) * a.at(0, 1) + a.at(0, 2) * a.at(0, 2) + a.at(1, 2) * a.at(1, 2);
    if (p1 == 0.0) {
        std::array<double, 3> eig{a.at(0, 0), a.at(1, 1), a.at(2, 2)};
        std::sort(eig.begin(), eig.end());
        return eig;
    }
    const double q = a.trace() / 3.0;
    const double p2 = (a.at(0, 0) - q) * (a.at(0, 0) - q) + (a.at(1, 1) - q) * (a.at(1, 1) - q) +
                      (a.at(2, 2) - q) * (a.at(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Mat3 b;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            b.at(r, c) = (a.at(r, c) - (r == c ? q : 0.0)) / p;
        }
    }
    const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double two_pi_third = 2.0 * std::numbers::pi / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + two_pi_third);
    const double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> eig{e3, e2, e1};
    std::sort(eig.begin(), eig.end());
    return eig;
}

double default_ridge(const std::vector<DivergenceRow>& rows) {
    const Mat3 cov = sample_covariance(rows);
    const double tr = cov.trace();
    if (tr <= 0.0) return 1e-12;
    return 1e-8 * tr / 3.0;
}

CovarianceMatrix covariance_of_rows(const std::vector<DivergenceRow>& rows, double ridge) {
    if (rows.size() <= 3) {
        throw InsufficientPopulationError(
            "covariance requires more rows than features (K > 3), got K = " +
            std::to_string(rows.size()));
    }
    if (ridge < 0.0) throw StructuralError("ridge must be nonnegative");

    CovarianceMatrix out;
    out.entries = sample_covariance(rows);
    const double min_eig = symmetric_eigenvalues(out.entries)[0];
    if (!(min_eig > 1e-10 * out.entries.trace())) {
        for (int i = 0; i < 3; ++i) out.entries.at(i, i) += ridge;
        out.regularized = true;
    }
    return out;
}

CovarianceMatrix covariance_of_rows(const std::vector<DivergenceRow>& rows) {
    if (rows.size() <= 3) {
        throw InsufficientPopulationError(
            "covariance requires more rows than features (K > 3), got K = " +
            std::to_string(rows.size()));
    }
    return covariance_of_rows(rows, default_ridge(rows));
}

Mat3 invert_spd3(const Mat3& a) {
    const double det = a.determinant();
    const double scale = std::max({std::abs(a.at(0, 0)), std::abs(a.at(1, 1)),
                                   std::abs(a.at(2, 2)), 1e-300});
    if (!std::isfinite(det) || std::abs(det) < 1e-300 * scale) {
        throw NumericalError("covariance matrix is singular (det = " + std::to_string(det) + ")");
    }
    Mat3 inv;
    inv.at(0, 0) = (a.at(1, 1) * a.at(2, 2) - a.at(1, 2) * a.at(2, 1)) / det;
    inv.at(0, 1) = (a.at(0, 2) * a.at(2, 1) - a.at(0, 1) * a.at(2, 2)) / det;
    inv.at(0, 2) = (a.at(0, 1) * a.at(1, 2) - a.at(0, 2) * a.at(1, 1)) / det;
    inv.at(1, 0) = (a.at(1, 2) * a.at(2, 0) - a.at(1, 0) * a.at(2, 2)) / det;
    inv.at(1, 1) = (a.at(0, 0) * a.at(2, 2) - a.at(0, 2) * a.at(2, 0)) / det;
    inv.at(1, 2) = (a.at(0, 2) * a.at(1, 0) - a.at(0, 0) * a.at(1, 2)) / det;
    inv.at(2, 0) = (a.at(1, 0) * a.at(2, 1) - a.at(1, 1) * a.at(2, 0)) / det;
    inv.at(2, 1) = (a.at(0, 1) * a.at(2, 0) - a.at(0, 0) * a.at(2, 1)) / det;
    inv.at(2, 2) = (a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0)) / det;
    return inv;
}

double mahalanobis_score(const DivergenceRow& row, const CovarianceMatrix& cov) {
    const Mat3 inv = invert_spd3(cov.entries);
    const std::array<double, 3> x{row.man_sum, row.eul_sum, row.cos_sum};
    double q = 0.0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            q += x[static_cast<std::size_t>(r)] * inv.at(r, c) * x[static_cast<std::size_t>(c)];
        }
    }
    if (!std::isfinite(q)) {
        throw NumericalError("mahalanobis quadratic form is not finite");
    }
    return std::sqrt(std::max(q, 0.0));
}

Mat3 inverse_sqrt_spd3(const Mat3& a) {
    // Jacobi eigendecomposition: A = Q diag(lambda) Q^T, then Q diag(lambda^{-1/2}) Q^T.
    Mat3 d = a;
    Mat3 q = Mat3::identity();
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = std::abs(d.at(0, 1)) + std::abs(d.at(0, 2)) + std::abs(d.at(1, 2));
        if (off < 1e-15 * (std::abs(d.trace()) + 1e-300)) break;
        for (int p = 0; p < 2; ++p) {
            for (int r = p + 1; r < 3; ++r) {
                if (d.at(p, r) == 0.0) continue;
                const double theta = (d.at(r, r) - d.at(p, p)) / (2.0 * d.at(p, r));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double dkp = d.at(k, p);
                    const double dkr = d.at(k, r);
                    d.at(k, p) = c * dkp - s * dkr;
                    d.at(k, r) = s * dkp + c * dkr;
                }
                for (int k = 0; k < 3; ++k) {
                    const double dpk = d.at(p, k);
                    const double drk = d.at(r, k);
                    d.at(p, k) = c * dpk - s * drk;
                    d.at(r, k) = s * dpk + c * drk;
                    const double qkp = q.at(k, p);
                    const double qkr = q.at(k, r);
                    q.at(k, p) = c * qkp - s * qkr;
                    q.at(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }
    std::array<double, 3> lam{d.at(0, 0), d.at(1, 1), d.at(2, 2)};
    for (double l : lam) {
        if (!(l > 0.0)) {
            throw NumericalError("inverse_sqrt_spd3 requires a positive definite matrix");
        }
    }
    Mat3 out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                s += q.at(r, k) * q.at(c, k) / std::sqrt(lam[static_cast<std::size_t>(k)]);
            }
            out.at(r, c) = s;
        }
    }
    return out;
}

RelativeContrastReport relative_contrast(const std::vector<int>& dims, int num_points,
                                         int num_trials, std::uint64_t seed) {
    if (num_points < 2) throw StructuralError("relative_contrast requires num_points >= 2");
    if (num_trials < 1) throw StructuralError("relative_contrast requires num_trials >= 1");
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 1) throw StructuralError("relative_contrast requires all dims >= 1");
        if (i > 0 && dims[i] <= dims[i - 1]) {
            throw StructuralError("relative_contrast dims must be strictly increasing");
        }
    }

    RelativeContrastReport report;
    report.dims = dims;
    report.num_points = num_points;
    report.num_trials = num_trials;

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int d = dims[di];
        auto gen = rng::engine(rng::mix(seed, 0x5ced, static_cast<std::uint64_t>(di)));
        double l1_acc = 0.0, l2_acc = 0.0, ratio_acc = 0.0;
        for (int t = 0; t < num_trials; ++t) {
            double min1 = std::numeric_limits<double>::infinity(), max1 = 0.0;
            double min2 = std::numeric_limits<double>::infinity(), max2 = 0.0;
            for (int p = 0; p < num_points; ++p) {
                double s1 = 0.0, s2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double x = unit(gen);
                    s1 += x;
                    s2 += x * x;
                }
                const double n2 = std::sqrt(s2);
                min1 = std::min(min1, s1);
                max1 = std::max(max1, s1);
                min2 = std::min(min2, n2);
                max2 = std::max(max2, n2);
            }
            l1_acc += (max1 - min1) / min1;
            l2_acc += (max2 - min2) / min2;
            ratio_acc += (max1 - min1) / ((max2 - min2) * std::sqrt(static_cast<double>(d)));
        }
        report.l1_contrast.push_back(l1_acc / num_trials);
        report.l2_contrast.push_back(l2_acc / num_trials);
        report.m_over_u_rootd.push_back(ratio_acc / num_trials);
    }
    return report;
}

}  // namespace vecmath
}  // namespace fedlab
