#include "fedlab/defenses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"

namespace fedlab::defenses {

namespace {

using vecmath::CovarianceMatrix;
using vecmath::DivergenceRow;
using vecmath::GradientFeature;
using vecmath::Mat3;

void validate_updates(const std::vector<ClientUpdate>& updates) {
    if (updates.empty()) throw InfeasibilityError("aggregation requires at least one update");
    const std::size_t dim = updates[0].model.dim();
    for (const auto& u : updates) {
        if (u.model.dim() != dim || dim == 0) {
            throw StructuralError("client updates must share a positive dimension");
        }
        if (!u.model.finite()) {
            throw StructuralError("client " + std::to_string(u.client_id) +
                                  " submitted a non-finite model");
        }
        if (u.num_samples < 1) {
            throw StructuralError("client " + std::to_string(u.client_id) +
                                  " reported num_samples < 1");
        }
    }
}

/// Indices of `updates` sorted by ascending client id; the fixed reduction
/// order that makes w* independent of submission order.
std::vector<std::size_t> order_by_id(const std::vector<ClientUpdate>& updates) {
    std::vector<std::size_t> idx(updates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return updates[a].client_id < updates[b].client_id;
    });
    return idx;
}

/// FedAvg over the given subset (indices into `updates`), summed in ascending
/// client-id order.
ParameterVector weighted_average(const ParameterVector& global,
                                 const std::vector<ClientUpdate>& updates,
                                 std::vector<std::size_t> subset, double eta) {
    if (subset.empty()) throw InfeasibilityError("aggregation subset is empty");
    std::sort(subset.begin(), subset.end(), [&](std::size_t a, std::size_t b) {
        return updates[a].client_id < updates[b].client_id;
    });
    ParameterVector acc(global.dim(), 0.0);
    double total = 0.0;
    for (std::size_t i : subset) {
        const auto& u = updates[i];
        const double w = static_cast<double>(u.num_samples);
        for (std::size_t j = 0; j < global.dim(); ++j) {
            acc[j] += w * (u.model[j] - global[j]);
        }
        total += w;
    }
    ParameterVector out(global.dim());
    for (std::size_t j = 0; j < global.dim(); ++j) out[j] = global[j] + eta * acc[j] / total;
    return out;
}

std::vector<int> ids_of(const std::vector<ClientUpdate>& updates,
                        const std::vector<std::size_t>& subset) {
    std::vector<int> ids;
    ids.reserve(subset.size());
    for (std::size_t i : subset) ids.push_back(updates[i].client_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<int> all_ids(const std::vector<ClientUpdate>& updates) {
    std::vector<std::size_t> subset(updates.size());
    std::iota(subset.begin(), subset.end(), 0);
    return ids_of(updates, subset);
}

enum class RowMode { pairwise_sum, mean_deviation };
enum class ScoreMode { whiten, maxnorm };

std::vector<DivergenceRow> build_rows(const std::vector<GradientFeature>& features, RowMode mode) {
    if (mode == RowMode::pairwise_sum) return vecmath::divergence_rows(features);
    // Mean-deviation ablation: |feature_i - mean(features)| per coordinate.
    const double k = static_cast<double>(features.size());
    GradientFeature mean;
    for (const auto& f : features) {
        mean.man += f.man;
        mean.eul += f.eul;
        mean.cos += f.cos;
    }
    mean.man /= k;
    mean.eul /= k;
    mean.cos /= k;
    std::vector<DivergenceRow> rows(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        rows[i].man_sum = std::abs(features[i].man - mean.man);
        rows[i].eul_sum = std::abs(features[i].eul - mean.eul);
        rows[i].cos_sum = std::abs(features[i].cos - mean.cos);
    }
    return rows;
}

/// Covariance of the standardized rows (so effectively a correlation matrix),
/// optionally non-centered (a sensitivity-check variant). Directions whose
/// eigenvalue falls under 1e-6 * trace / 3 are lifted by that much: in
/// standardized units such directions are measurement noise, and whitening
/// by them would amplify arbitrary benign jitter ahead of a genuine outlier.
CovarianceMatrix row_covariance(const std::vector<DivergenceRow>& rows, bool centered) {
    const double k = static_cast<double>(rows.size());
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    if (centered) {
        for (const auto& r : rows) {
            mean[0] += r.man_sum;
            mean[1] += r.eul_sum;
            mean[2] += r.cos_sum;
        }
        for (double& m : mean) m /= k;
    }

    Mat3 m;
    for (const auto& r : rows) {
        const std::array<double, 3> x{r.man_sum - mean[0], r.eul_sum - mean[1],
                                      r.cos_sum - mean[2]};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                m.at(a, b) += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(b)];
            }
        }
    }
    for (double& v : m.m) v /= (k - 1.0);

    CovarianceMatrix cov;
    cov.entries = m;
    const double tr = m.trace();
    const double threshold = tr > 0.0 ? 1e-6 * tr / 3.0 : 0.0;
    const double min_eig = vecmath::symmetric_eigenvalues(m)[0];
    if (!(min_eig > threshold)) {
        const double ridge = tr > 0.0 ? threshold : 1e-12;
        for (int i = 0; i < 3; ++i) cov.entries.at(i, i) += ridge;
        cov.regularized = true;
    }
    return cov;
}

std::string dominant_from_contributions(const std::array<double, 3>& contrib) {
    const char* names[3] = {"man", "eul", "cos"};
    int best = 0;
    for (int i = 1; i < 3; ++i) {
        if (contrib[static_cast<std::size_t>(i)] > contrib[static_cast<std::size_t>(best)]) best = i;
    }
    return names[best];
}

/// Per-coordinate sample standard deviation of the rows (K-1 divisor).
std::array<double, 3> row_stddev(const std::vector<DivergenceRow>& rows) {
    const double k = static_cast<double>(rows.size());
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    for (const auto& r : rows) {
        mean[0] += r.man_sum;
        mean[1] += r.eul_sum;
        mean[2] += r.cos_sum;
    }
    for (double& m : mean) m /= k;
    std::array<double, 3> var{0.0, 0.0, 0.0};
    for (const auto& r : rows) {
        const std::array<double, 3> x{r.man_sum, r.eul_sum, r.cos_sum};
        for (int c = 0; c < 3; ++c) {
            const double d = x[static_cast<std::size_t>(c)] - mean[static_cast<std::size_t>(c)];
            var[static_cast<std::size_t>(c)] += d * d;
        }
    }
    std::array<double, 3> sd{};
    for (int c = 0; c < 3; ++c) {
        sd[static_cast<std::size_t>(c)] = std::sqrt(var[static_cast<std::size_t>(c)] / (k - 1.0));
    }
    return sd;
}

AggregationResult multi_metrics_impl(const ParameterVector& global,
                                     const std::vector<ClientUpdate>& updates,
                                     const DefenseSpec& spec, RowMode row_mode,
                                     ScoreMode score_mode) {
    validate_updates(updates);
    const std::size_t k = updates.size();
    if (k <= 3) {
        throw InsufficientPopulationError(
            "multi-metrics requires more clients than features (K > 3), got K = " +
            std::to_string(k));
    }
    if (!(spec.p > 0.0) || spec.p > 1.0) throw StructuralError("selection fraction p must be in (0, 1]");
    if (spec.p * static_cast<double>(k) < 1.0) {
        throw StructuralError("selection fraction p too small: p * K must be >= 1");
    }

    // All computation runs in ascending client-id order so scores and the
    // aggregate are independent of submission order.
    const std::vector<std::size_t> ord = order_by_id(updates);

    std::vector<GradientFeature> features;
    features.reserve(k);
    for (std::size_t i : ord) {
        features.push_back(vecmath::gradient_feature(global, updates[i].model,
                                                     vecmath::ZeroNormPolicy::cosine_zero));
    }
    const std::vector<DivergenceRow> rows = build_rows(features, row_mode);

    std::vector<double> sorted_scores(k, 0.0);
    CovarianceMatrix cov;
    std::vector<DivergenceRow> zrows;
    std::array<double, 3> col_max{0.0, 0.0, 0.0};
    if (score_mode == ScoreMode::whiten) {
        // The quadratic form of Eq. 4 is invariant under any per-coordinate
        // rescaling of the rows (x -> Dx shifts Sigma to D Sigma D), so the
        // score is computed on std-standardized rows where the covariance is
        // the correlation matrix. That keeps the ridge trigger and the ridge
        // itself scale-free: the three metrics live on wildly different
        // scales and a raw trace-proportional ridge would drown the smallest
        // coordinate or flip with uniform update scaling.
        const std::array<double, 3> sd = row_stddev(rows);
        zrows.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            zrows[i].man_sum = sd[0] > 0.0 ? rows[i].man_sum / sd[0] : 0.0;
            zrows[i].eul_sum = sd[1] > 0.0 ? rows[i].eul_sum / sd[1] : 0.0;
            zrows[i].cos_sum = sd[2] > 0.0 ? rows[i].cos_sum / sd[2] : 0.0;
        }
        cov = row_covariance(zrows, spec.center_covariance);
        for (std::size_t i = 0; i < k; ++i) {
            sorted_scores[i] = vecmath::mahalanobis_score(zrows[i], cov);
        }
    } else {
        for (const auto& r : rows) {
            col_max[0] = std::max(col_max[0], r.man_sum);
            col_max[1] = std::max(col_max[1], r.eul_sum);
            col_max[2] = std::max(col_max[2], r.cos_sum);
        }
        for (std::size_t i = 0; i < k; ++i) {
            double q = 0.0;
            const std::array<double, 3> x{rows[i].man_sum, rows[i].eul_sum, rows[i].cos_sum};
            for (int c = 0; c < 3; ++c) {
                // A coordinate whose max is 0 is constant zero and contributes nothing.
                if (col_max[static_cast<std::size_t>(c)] > 0.0) {
                    const double v = x[static_cast<std::size_t>(c)] / col_max[static_cast<std::size_t>(c)];
                    q += v * v;
                }
            }
            sorted_scores[i] = std::sqrt(q);
        }
    }

    // Remove the ceil(K(1-p)) highest scores; at equal score the lower client
    // id is retained.
    const auto removed_count = static_cast<std::size_t>(
        std::ceil(static_cast<double>(k) * (1.0 - spec.p) - 1e-12));
    std::vector<std::size_t> by_score(k);  // positions into ord
    std::iota(by_score.begin(), by_score.end(), 0);
    std::sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) {
        if (sorted_scores[a] != sorted_scores[b]) return sorted_scores[a] > sorted_scores[b];
        return updates[ord[a]].client_id > updates[ord[b]].client_id;
    });
    std::vector<std::size_t> removed(by_score.begin(),
                                     by_score.begin() + static_cast<std::ptrdiff_t>(removed_count));
    std::vector<std::size_t> kept_updates;
    for (auto it = by_score.begin() + static_cast<std::ptrdiff_t>(removed_count);
         it != by_score.end(); ++it) {
        kept_updates.push_back(ord[*it]);
    }

    AggregationResult result;
    result.model = weighted_average(global, updates, kept_updates, spec.eta);
    result.selected_ids = ids_of(updates, kept_updates);
    result.scores.resize(k);
    for (std::size_t i = 0; i < k; ++i) result.scores[ord[i]] = sorted_scores[i];

    if (removed.empty()) {
        result.dominant_metric = "n/a";
        return result;
    }
    // Attribution: average per-coordinate magnitude of the whitened (or
    // max-normalized) row over the removed clients.
    std::array<double, 3> contrib{0.0, 0.0, 0.0};
    if (score_mode == ScoreMode::whiten) {
        const Mat3 w = vecmath::inverse_sqrt_spd3(cov.entries);
        for (std::size_t i : removed) {
            const std::array<double, 3> x{zrows[i].man_sum, zrows[i].eul_sum, zrows[i].cos_sum};
            for (int r = 0; r < 3; ++r) {
                double s = 0.0;
                for (int c = 0; c < 3; ++c) s += w.at(r, c) * x[static_cast<std::size_t>(c)];
                contrib[static_cast<std::size_t>(r)] += std::abs(s);
            }
        }
    } else {
        for (std::size_t i : removed) {
            const std::array<double, 3> x{rows[i].man_sum, rows[i].eul_sum, rows[i].cos_sum};
            for (int c = 0; c < 3; ++c) {
                if (col_max[static_cast<std::size_t>(c)] > 0.0) {
                    contrib[static_cast<std::size_t>(c)] +=
                        std::abs(x[static_cast<std::size_t>(c)]) / col_max[static_cast<std::size_t>(c)];
                }
            }
        }
    }
    result.dominant_metric = dominant_from_contributions(contrib);
    return result;
}

/// Krum scores: sum of squared distances to the K-f-2 nearest other updates.
/// Distances accumulate in client-id order for permutation-stable floats.
std::vector<double> krum_scores(const std::vector<ClientUpdate>& updates, int f) {
    const std::size_t k = updates.size();
    const std::vector<std::size_t> ord = order_by_id(updates);
    std::vector<std::vector<double>> dist2(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const auto& ua = updates[ord[a]];
            const auto& ub = updates[ord[b]];
            double d2 = 0.0;
            for (std::size_t c = 0; c < ua.model.dim(); ++c) {
                const double d = ua.model[c] - ub.model[c];
                d2 += d * d;
            }
            dist2[a][b] = d2;
            dist2[b][a] = d2;
        }
    }
    const std::size_t neighbors = k - static_cast<std::size_t>(f) - 2;
    std::vector<double> scores(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        std::vector<double> row;
        row.reserve(k - 1);
        for (std::size_t b = 0; b < k; ++b) {
            if (b != a) row.push_back(dist2[a][b]);
        }
        std::sort(row.begin(), row.end());
        double s = 0.0;
        for (std::size_t n = 0; n < neighbors; ++n) s += row[n];
        scores[ord[a]] = s;
    }
    return scores;
}

void check_krum_population(std::size_t k, int f) {
    if (f < 0) throw StructuralError("krum f must be nonnegative");
    if (k < static_cast<std::size_t>(f) + 3) {
        throw InfeasibilityError("krum requires K >= f + 3, got K = " + std::to_string(k) +
                                 ", f = " + std::to_string(f));
    }
}

}  // namespace

AggregationResult fedavg(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                         double eta) {
    validate_updates(updates);
    std::vector<std::size_t> subset(updates.size());
    std::iota(subset.begin(), subset.end(), 0);
    AggregationResult result;
    result.model = weighted_average(global, updates, subset, eta);
    result.selected_ids = all_ids(updates);
    result.dominant_metric = "n/a";
    return result;
}

AggregationResult multi_metrics(const ParameterVector& global,
                                const std::vector<ClientUpdate>& updates,
                                const DefenseSpec& spec) {
    return multi_metrics_impl(global, updates, spec, RowMode::pairwise_sum, ScoreMode::whiten);
}

AggregationResult multi_metrics_maxnorm(const ParameterVector& global,
                                        const std::vector<ClientUpdate>& updates,
                                        const DefenseSpec& spec) {
    return multi_metrics_impl(global, updates, spec, RowMode::pairwise_sum, ScoreMode::maxnorm);
}

AggregationResult multi_metrics_mean(const ParameterVector& global,
                                     const std::vector<ClientUpdate>& updates,
                                     const DefenseSpec& spec) {
    return multi_metrics_impl(global, updates, spec, RowMode::mean_deviation, ScoreMode::whiten);
}

AggregationResult krum(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                       const DefenseSpec& spec) {
    validate_updates(updates);
    check_krum_population(updates.size(), spec.f);
    const std::vector<double> scores = krum_scores(updates, spec.f);

    std::size_t best = 0;
    for (std::size_t i = 1; i < updates.size(); ++i) {
        if (scores[i] < scores[best] ||
            (scores[i] == scores[best] && updates[i].client_id < updates[best].client_id)) {
            best = i;
        }
    }
    AggregationResult result;
    result.model = weighted_average(global, updates, {best}, spec.eta);
    result.selected_ids = {updates[best].client_id};
    result.scores = scores;
    result.dominant_metric = "n/a";
    return result;
}

AggregationResult multi_krum(const ParameterVector& global,
                             const std::vector<ClientUpdate>& updates, const DefenseSpec& spec) {
    validate_updates(updates);
    check_krum_population(updates.size(), spec.f);
    const std::vector<double> scores = krum_scores(updates, spec.f);

    // m = K - f lowest scores, ties to the lower client id.
    const std::size_t m = updates.size() - static_cast<std::size_t>(spec.f);
    std::vector<std::size_t> order(updates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return updates[a].client_id < updates[b].client_id;
    });
    std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));

    AggregationResult result;
    result.model = weighted_average(global, updates, kept, spec.eta);
    result.selected_ids = ids_of(updates, kept);
    result.scores = scores;
    result.dominant_metric = "n/a";
    return result;
}

AggregationResult rfa(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                      const DefenseSpec& spec) {
    validate_updates(updates);
    if (spec.rfa_smoothing <= 0.0 || spec.rfa_tolerance <= 0.0 || spec.rfa_max_iters < 1) {
        throw StructuralError("rfa requires positive smoothing, tolerance and max_iters");
    }
    const std::size_t dim = global.dim();
    const std::vector<std::size_t> order = order_by_id(updates);

    // Weighted mean as the starting iterate.
    ParameterVector median(dim, 0.0);
    double total = 0.0;
    for (std::size_t i : order) {
        const double w = static_cast<double>(updates[i].num_samples);
        for (std::size_t j = 0; j < dim; ++j) median[j] += w * updates[i].model[j];
        total += w;
    }
    for (std::size_t j = 0; j < dim; ++j) median[j] /= total;

    for (int it = 0; it < spec.rfa_max_iters; ++it) {
        ParameterVector next(dim, 0.0);
        double beta_total = 0.0;
        for (std::size_t i : order) {
            const double d = l2_norm(updates[i].model - median);
            const double beta =
                static_cast<double>(updates[i].num_samples) / std::max(spec.rfa_smoothing, d);
            for (std::size_t j = 0; j < dim; ++j) next[j] += beta * updates[i].model[j];
            beta_total += beta;
        }
        for (std::size_t j = 0; j < dim; ++j) next[j] /= beta_total;
        const double moved = l2_norm(next - median);
        median = std::move(next);
        if (moved < spec.rfa_tolerance) break;
    }

    AggregationResult result;
    result.model = global + spec.eta * (median - global);
    result.selected_ids = all_ids(updates);
    result.scores.reserve(updates.size());
    for (const auto& u : updates) result.scores.push_back(l2_norm(u.model - median));
    result.dominant_metric = "n/a";
    return result;
}

AggregationResult foolsgold(DefenseContext& ctx, const ParameterVector& global,
                            const std::vector<ClientUpdate>& updates, const DefenseSpec& spec) {
    validate_updates(updates);
    const std::size_t k = updates.size();

    // Accumulate this round's update into each client's history.
    for (const auto& u : updates) {
        auto [it, inserted] = ctx.foolsgold_history.try_emplace(
            u.client_id, ParameterVector(global.dim(), 0.0));
        if (it->second.dim() != global.dim()) {
            throw StructuralError("foolsgold history dimension mismatch");
        }
        for (std::size_t j = 0; j < global.dim(); ++j) {
            it->second[j] += u.model[j] - global[j];
        }
    }

    std::vector<double> alpha(k, 1.0);
    if (k > 1) {
        std::vector<const ParameterVector*> hist;
        hist.reserve(k);
        for (const auto& u : updates) hist.push_back(&ctx.foolsgold_history.at(u.client_id));

        std::vector<std::vector<double>> cs(k, std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                const double c = cosine_similarity(*hist[i], *hist[j]);
                cs[i][j] = c;
                cs[j][i] = c;
            }
        }
        std::vector<double> vmax(k, -1.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                if (j != i) vmax[i] = std::max(vmax[i], cs[i][j]);
            }
        }
        // Pardoning: scale row i against more-suspicious peers.
        for (std::size_t i = 0; i < k; ++i) {
            double row_max = -1.0;
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                double v = cs[i][j];
                if (vmax[j] > vmax[i] && vmax[j] > 0.0) v *= vmax[i] / vmax[j];
                row_max = std::max(row_max, v);
            }
            alpha[i] = std::clamp(1.0 - row_max, 0.0, 1.0);
            // Similarities of effectively identical histories land a hair
            // below 1 in floats; snap the residual weight to zero.
            if (alpha[i] < 1e-9) alpha[i] = 0.0;
        }
        const double amax = *std::max_element(alpha.begin(), alpha.end());
        if (amax <= 0.0) {
            // Every weight collapsed; fall back to plain FedAvg.
            AggregationResult result = fedavg(global, updates, spec.eta);
            result.scores.assign(k, 0.0);
            return result;
        }
        for (double& a : alpha) {
            a /= amax;
            if (a >= 1.0) a = 0.99;
            a = std::clamp(std::log(a / (1.0 - a)) + 0.5, 0.0, 1.0);
        }
    }

    const double alpha_total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    AggregationResult result;
    if (alpha_total <= 0.0) {
        result = fedavg(global, updates, spec.eta);
        result.scores = alpha;
        return result;
    }

    // Alpha-weighted mean of the updates, in client-id order.
    const std::vector<std::size_t> order = order_by_id(updates);
    ParameterVector acc(global.dim(), 0.0);
    for (std::size_t i : order) {
        for (std::size_t j = 0; j < global.dim(); ++j) {
            acc[j] += alpha[i] * (updates[i].model[j] - global[j]);
        }
    }
    result.model = ParameterVector(global.dim());
    for (std::size_t j = 0; j < global.dim(); ++j) {
        result.model[j] = global[j] + spec.eta * acc[j] / alpha_total;
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (alpha[i] > 0.01) result.selected_ids.push_back(updates[i].client_id);
    }
    std::sort(result.selected_ids.begin(), result.selected_ids.end());
    result.scores = alpha;
    result.dominant_metric = "n/a";
    return result;
}

AggregationResult weak_dp(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                          const DefenseSpec& spec, std::uint64_t noise_seed) {
    validate_updates(updates);
    if (spec.clip_threshold <= 0.0) throw StructuralError("weak_dp requires clip_threshold > 0");
    if (spec.noise_sigma < 0.0) throw StructuralError("weak_dp requires noise_sigma >= 0");

    std::vector<ClientUpdate> clipped = updates;
    for (auto& u : clipped) {
        const double norm = l2_norm(u.model - global);
        if (norm > spec.clip_threshold) {
            const double s = spec.clip_threshold / norm;
            for (std::size_t j = 0; j < global.dim(); ++j) {
                u.model[j] = global[j] + s * (u.model[j] - global[j]);
            }
        }
    }
    AggregationResult result = fedavg(global, clipped, spec.eta);
    if (spec.noise_sigma > 0.0) {
        auto gen = rng::engine(noise_seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (std::size_t j = 0; j < global.dim(); ++j) result.model[j] += noise(gen);
    }
    return result;
}

AggregationResult aggregate(const ParameterVector& global,
                            const std::vector<ClientUpdate>& updates, const DefenseSpec& spec,
                            DefenseContext& ctx) {
    switch (spec.kind) {
        case DefenseKind::fedavg: return fedavg(global, updates, spec.eta);
        case DefenseKind::multi_metrics: return multi_metrics(global, updates, spec);
        case DefenseKind::multi_metrics_maxnorm: return multi_metrics_maxnorm(global, updates, spec);
        case DefenseKind::multi_metrics_mean: return multi_metrics_mean(global, updates, spec);
        case DefenseKind::krum: return krum(global, updates, spec);
        case DefenseKind::multi_krum: return multi_krum(global, updates, spec);
        case DefenseKind::rfa: return rfa(global, updates, spec);
        case DefenseKind::foolsgold: return foolsgold(ctx, global, updates, spec);
        case DefenseKind::weak_dp: return weak_dp(global, updates, spec, ctx.round_seed);
    }
    throw StructuralError("unknown defense kind");
}

const char* to_string(DefenseKind kind) {
    switch (kind) {
        case DefenseKind::fedavg: return "fedavg";
        case DefenseKind::multi_metrics: return "multi_metrics";
        case DefenseKind::multi_metrics_maxnorm: return "multi_metrics_maxnorm";
        case DefenseKind::multi_metrics_mean: return "multi_metrics_mean";
        case DefenseKind::krum: return "krum";
        case DefenseKind::multi_krum: return "multi_krum";
        case DefenseKind::rfa: return "rfa";
        case DefenseKind::foolsgold: return "foolsgold";
        case DefenseKind::weak_dp: return "weak_dp";
    }
    return "unknown";
}

}  // namespace fedlab::defenses
