#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"
#include "fedlab/vecmath.hpp"
#include "oracles.hpp"

using namespace fedlab;
using namespace fedlab::vecmath;

namespace {

ParameterVector pv(std::initializer_list<double> vals) {
    return ParameterVector(std::vector<double>(vals));
}

ParameterVector random_pv(std::size_t dim, std::mt19937_64& gen, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    ParameterVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = n(gen);
    return v;
}

Mat3 random_spd(std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat3 b;
    for (double& x : b.m) x = n(gen);
    Mat3 spd;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += b.at(r, k) * b.at(c, k);
            spd.at(r, c) = s;
        }
    }
    for (int i = 0; i < 3; ++i) spd.at(i, i) += 0.05;
    return spd;
}

}  // namespace

TEST_CASE("gradient_feature: 3-4-5 difference") {
    const auto f = gradient_feature(pv({1, 0, 0}), pv({1, 3, 4}));
    CHECK(f.man == doctest::Approx(7.0));
    CHECK(f.eul == doctest::Approx(5.0));
    CHECK(f.cos == doctest::Approx(1.0 / std::sqrt(26.0)));
}

TEST_CASE("gradient_feature: identical and orthogonal models") {
    const auto same = gradient_feature(pv({2, 2}), pv({2, 2}));
    CHECK(same.man == 0.0);
    CHECK(same.eul == 0.0);
    CHECK(same.cos == doctest::Approx(1.0));

    const auto orth = gradient_feature(pv({1, 0}), pv({0, 1}));
    CHECK(orth.man == doctest::Approx(2.0));
    CHECK(orth.eul == doctest::Approx(std::sqrt(2.0)));
    CHECK(orth.cos == doctest::Approx(0.0));
}

TEST_CASE("gradient_feature: errors and zero-norm policy") {
    CHECK_THROWS_AS(gradient_feature(pv({1, 2}), pv({1, 2, 3})), StructuralError);
    CHECK_THROWS_AS(gradient_feature(pv({0, 0}), pv({1, 2})), DegenerateInputError);
    const auto f = gradient_feature(pv({0, 0}), pv({1, 2}), ZeroNormPolicy::cosine_zero);
    CHECK(f.cos == 0.0);
    CHECK(f.man == doctest::Approx(3.0));
}

TEST_CASE("L1 dominates L2, equality iff at most one nonzero coordinate") {
    auto gen = rng::engine(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = random_pv(8, gen);
        const auto l = random_pv(8, gen);
        const auto f = gradient_feature(g, l);
        CHECK(f.man >= f.eul);
        CHECK(f.eul >= 0.0);
    }
    // Single nonzero coordinate: equality.
    const auto f = gradient_feature(pv({1, 1, 1}), pv({1, 1, 4}));
    CHECK(f.man == doctest::Approx(f.eul));
    // Two nonzero coordinates: strict.
    const auto f2 = gradient_feature(pv({0.5, 0.5}), pv({1.5, 1.5}));
    CHECK(f2.man > f2.eul + 0.1);
}

TEST_CASE("divergence_rows: hand-checked sums and edge cases") {
    std::vector<GradientFeature> feats(4);
    const double man[] = {1, 2, 3, 10};
    for (int i = 0; i < 4; ++i) feats[static_cast<std::size_t>(i)].man = man[i];
    const auto rows = divergence_rows(feats);
    CHECK(rows[0].man_sum == doctest::Approx(12.0));
    CHECK(rows[1].man_sum == doctest::Approx(10.0));
    CHECK(rows[2].man_sum == doctest::Approx(10.0));
    CHECK(rows[3].man_sum == doctest::Approx(24.0));

    // All identical -> zero rows.
    std::vector<GradientFeature> same(5, GradientFeature{3.0, 2.0, 0.5});
    for (const auto& r : divergence_rows(same)) {
        CHECK(r.man_sum == 0.0);
        CHECK(r.eul_sum == 0.0);
        CHECK(r.cos_sum == 0.0);
    }

    // K = 2: both rows are the coordinate-wise absolute difference.
    std::vector<GradientFeature> two{{1.0, 0.5, 0.9}, {4.0, 2.5, 0.1}};
    const auto pair_rows = divergence_rows(two);
    CHECK(pair_rows[0].man_sum == doctest::Approx(3.0));
    CHECK(pair_rows[1].man_sum == doctest::Approx(3.0));
    CHECK(pair_rows[0].eul_sum == doctest::Approx(2.0));
    CHECK(pair_rows[0].cos_sum == doctest::Approx(0.8));

    CHECK_THROWS_AS(divergence_rows({GradientFeature{}}), InsufficientPopulationError);
}

TEST_CASE("divergence_rows matches the brute-force oracle exactly on 100 random sets") {
    auto gen = rng::engine(17);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::uniform_int_distribution<int> ksize(2, 15);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<GradientFeature> feats(static_cast<std::size_t>(ksize(gen)));
        for (auto& f : feats) {
            f.man = u(gen);
            f.eul = u(gen);
            f.cos = u(gen) / 10.0;
        }
        const auto got = divergence_rows(feats);
        const auto want = oracles::divergence_rows_brute(feats);
        for (std::size_t i = 0; i < feats.size(); ++i) {
            CHECK(got[i].man_sum == want[i].man_sum);
            CHECK(got[i].eul_sum == want[i].eul_sum);
            CHECK(got[i].cos_sum == want[i].cos_sum);
        }
    }
}

TEST_CASE("divergence_rows: permutation equivariance and shift invariance") {
    auto gen = rng::engine(23);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<GradientFeature> feats(6);
    for (auto& f : feats) f = {u(gen), u(gen), u(gen)};

    const auto rows = divergence_rows(feats);
    std::vector<GradientFeature> perm{feats[3], feats[0], feats[5], feats[1], feats[4], feats[2]};
    const auto prows = divergence_rows(perm);
    const std::size_t map[] = {3, 0, 5, 1, 4, 2};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(prows[i].man_sum == doctest::Approx(rows[map[i]].man_sum));
    }

    // Adding a constant to every man feature leaves man sums unchanged.
    std::vector<GradientFeature> shifted = feats;
    for (auto& f : shifted) f.man += 7.25;
    const auto srows = divergence_rows(shifted);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(srows[i].man_sum == doctest::Approx(rows[i].man_sum).epsilon(1e-12));
        CHECK(srows[i].eul_sum == rows[i].eul_sum);
    }
}

TEST_CASE("covariance_of_rows: identical rows regularize to ridge * I") {
    std::vector<DivergenceRow> rows(5, DivergenceRow{2.0, 1.0, 0.5});
    const auto cov = covariance_of_rows(rows);
    CHECK(cov.regularized);
    CHECK(cov.entries.at(0, 0) == doctest::Approx(1e-12));
    CHECK(cov.entries.at(1, 1) == doctest::Approx(1e-12));
    CHECK(cov.entries.at(0, 1) == 0.0);
}

TEST_CASE("covariance_of_rows: basis rows against the two-pass oracle") {
    std::vector<DivergenceRow> rows{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
    const auto cov = covariance_of_rows(rows, 0.0);
    CHECK(cov.entries.at(0, 0) == doctest::Approx(0.25));
    CHECK(cov.entries.at(1, 1) == doctest::Approx(0.25));
    CHECK(cov.entries.at(2, 2) == doctest::Approx(0.25));
    CHECK(cov.entries.at(0, 1) == doctest::Approx(-1.0 / 12.0));

    const auto want = oracles::two_pass_covariance(rows);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            CHECK(cov.entries.at(r, c) == doctest::Approx(want.at(r, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("covariance_of_rows: constant coordinate gives a zero row/column") {
    auto gen = rng::engine(5);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<DivergenceRow> rows(6);
    for (auto& r : rows) r = {3.5, u(gen), u(gen)};  // man constant
    const auto cov = covariance_of_rows(rows, 0.0);
    CHECK(cov.regularized);  // zero eigenvalue along man
    CHECK(cov.entries.at(0, 0) == doctest::Approx(0.0));
    CHECK(cov.entries.at(0, 1) == doctest::Approx(0.0));
    CHECK(cov.entries.at(0, 2) == doctest::Approx(0.0));

    CHECK_THROWS_AS(covariance_of_rows(std::vector<DivergenceRow>(3)), InsufficientPopulationError);
}

TEST_CASE("mahalanobis_score: identity and diagonal whitening") {
    CovarianceMatrix eye;
    eye.entries = Mat3::identity();
    CHECK(mahalanobis_score({3, 4, 0}, eye) == doctest::Approx(5.0));

    CovarianceMatrix diag;
    diag.entries = Mat3::identity();
    diag.entries.at(0, 0) = 4.0;
    CHECK(mahalanobis_score({2, 0, 0}, diag) == doctest::Approx(1.0));
}

TEST_CASE("mahalanobis_score agrees with the linear-solve oracle on 1000 SPD cases") {
    auto gen = rng::engine(29);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 1000; ++trial) {
        CovarianceMatrix cov;
        cov.entries = random_spd(gen);
        const DivergenceRow row{u(gen), u(gen), u(gen)};
        const double got = mahalanobis_score(row, cov);
        const double want = oracles::mahalanobis_by_linear_solve(row, cov.entries);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("mahalanobis_score: scale relation and singular covariance") {
    auto gen = rng::engine(31);
    CovarianceMatrix cov;
    cov.entries = random_spd(gen);
    const DivergenceRow row{1.5, 0.25, 2.0};
    const double base = mahalanobis_score(row, cov);
    for (double t : {0.0, 0.5, 2.0, 10.0}) {
        const DivergenceRow scaled{t * row.man_sum, t * row.eul_sum, t * row.cos_sum};
        CHECK(mahalanobis_score(scaled, cov) == doctest::Approx(t * base));
    }

    CovarianceMatrix singular;  // all zeros
    CHECK_THROWS_AS(mahalanobis_score(row, singular), NumericalError);
}

TEST_CASE("whitening invariance: common linear map leaves scores unchanged") {
    auto gen = rng::engine(37);
    std::uniform_real_distribution<double> u(0.5, 4.0);
    std::vector<DivergenceRow> rows(8);
    for (auto& r : rows) r = {u(gen), u(gen), u(gen)};
    const auto cov = covariance_of_rows(rows);
    REQUIRE(!cov.regularized);

    // A fixed well-conditioned linear map.
    const double a[3][3] = {{2.0, 0.3, -0.1}, {0.2, 1.5, 0.4}, {-0.3, 0.1, 0.8}};
    std::vector<DivergenceRow> mapped(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double x[3] = {rows[i].man_sum, rows[i].eul_sum, rows[i].cos_sum};
        mapped[i].man_sum = a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2];
        mapped[i].eul_sum = a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2];
        mapped[i].cos_sum = a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2];
    }
    const auto mcov = covariance_of_rows(mapped);
    REQUIRE(!mcov.regularized);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double before = mahalanobis_score(rows[i], cov);
        const double after = mahalanobis_score(mapped[i], mcov);
        CHECK(after == doctest::Approx(before).epsilon(1e-8));
    }
}

TEST_CASE("inverse_sqrt_spd3: W * Sigma * W == I") {
    auto gen = rng::engine(41);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat3 sigma = random_spd(gen);
        const Mat3 w = inverse_sqrt_spd3(sigma);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        s += w.at(r, i) * sigma.at(i, j) * w.at(j, c);
                    }
                }
                CHECK(std::abs(s - (r == c ? 1.0 : 0.0)) < 1e-9);
            }
        }
    }
}

TEST_CASE("symmetric_eigenvalues: diagonal and known matrices") {
    Mat3 d;
    d.at(0, 0) = 3.0;
    d.at(1, 1) = -1.0;
    d.at(2, 2) = 2.0;
    const auto eig = symmetric_eigenvalues(d);
    CHECK(eig[0] == doctest::Approx(-1.0));
    CHECK(eig[1] == doctest::Approx(2.0));
    CHECK(eig[2] == doctest::Approx(3.0));

    // [[2,1,0],[1,2,0],[0,0,5]] has eigenvalues 1, 3, 5.
    Mat3 m;
    m.at(0, 0) = 2.0;
    m.at(1, 1) = 2.0;
    m.at(2, 2) = 5.0;
    m.at(0, 1) = m.at(1, 0) = 1.0;
    const auto eig2 = symmetric_eigenvalues(m);
    CHECK(eig2[0] == doctest::Approx(1.0));
    CHECK(eig2[1] == doctest::Approx(3.0));
    CHECK(eig2[2] == doctest::Approx(5.0));
}

TEST_CASE("relative_contrast: one dimension makes L1 and L2 agree") {
    const auto report = relative_contrast({1}, 2, 5, 99);
    CHECK(report.l1_contrast[0] == doctest::Approx(report.l2_contrast[0]).epsilon(1e-12));
    CHECK(report.m_over_u_rootd[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relative_contrast: L2 contrast decays with dimension, ratio stays flat") {
    const auto report = relative_contrast({10, 100, 1000}, 50, 10, 7);
    CHECK(report.l2_contrast[0] > report.l2_contrast[1]);
    CHECK(report.l2_contrast[1] > report.l2_contrast[2]);
    const double lo = std::min(report.m_over_u_rootd[1], report.m_over_u_rootd[2]);
    const double hi = std::max(report.m_over_u_rootd[1], report.m_over_u_rootd[2]);
    CHECK(hi / lo < 2.0);
}

TEST_CASE("relative_contrast: determinism and preconditions") {
    const auto a = relative_contrast({5, 20}, 10, 3, 1234);
    const auto b = relative_contrast({5, 20}, 10, 3, 1234);
    CHECK(a.l1_contrast == b.l1_contrast);
    CHECK(a.l2_contrast == b.l2_contrast);
    CHECK(a.m_over_u_rootd == b.m_over_u_rootd);

    CHECK_THROWS_AS(relative_contrast({5}, 1, 3, 0), StructuralError);
    CHECK_THROWS_AS(relative_contrast({5, 5}, 10, 3, 0), StructuralError);
    CHECK_THROWS_AS(relative_contrast({0}, 10, 3, 0), StructuralError);
}
