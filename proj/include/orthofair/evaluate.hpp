#pragma once

// ROC analysis and group-conditional auditing under bootstrap resampling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "orthofair/classify.hpp"
#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/matrix.hpp"
#include "orthofair/orthodisc.hpp"
#include "orthofair/rng.hpp"

namespace orthofair {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Staircase from (0,0) to (1,1); thresholds[k] is the cut (score ≥ threshold
/// is positive) that produces points[k]. The first threshold is +inf.
struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<double> thresholds;
  double auc = 0.0;
  // integer sweep counts behind each point
  std::vector<std::size_t> true_positives;
  std::vector<std::size_t> false_positives;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// ROC over all distinct score values; tied scores enter the positive side
/// together. The trapezoid area is accumulated in integer counts, so it equals
/// the Mann–Whitney statistic with half-weight ties exactly.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(Errc::DimensionMismatch, "scores and labels differ in length");
  RocCurve roc;
  for (int l : labels) ++(l == 1 ? roc.positives : roc.negatives);
  if (roc.positives == 0 || roc.negatives == 0) throw Error(Errc::SingleClass, "ROC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return scores[i] > scores[j]; });

  const double p = static_cast<double>(roc.positives);
  const double q = static_cast<double>(roc.negatives);
  std::size_t tp = 0, fp = 0;
  std::uint64_t twice_area = 0;  // Σ Δfp·(tp_prev + tp)
  roc.points.push_back({0.0, 0.0});
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  roc.true_positives.push_back(0);
  roc.false_positives.push_back(0);
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    const std::size_t tp_prev = tp, fp_prev = fp;
    for (; k < order.size() && scores[order[k]] == s; ++k) ++(labels[order[k]] == 1 ? tp : fp);
    twice_area += static_cast<std::uint64_t>(fp - fp_prev) * (tp_prev + tp);
    roc.points.push_back({static_cast<double>(fp) / q, static_cast<double>(tp) / p});
    roc.thresholds.push_back(s);
    roc.true_positives.push_back(tp);
    roc.false_positives.push_back(fp);
  }
  roc.auc = static_cast<double>(twice_area) / (2.0 * p * q);
  return roc;
}

inline RocCurve roc_curve(const ScoreSet& s) { return roc_curve(s.scores, s.y); }

/// Threshold maximizing Youden's J = TPR − FPR, compared exactly in counts;
/// ties go to the lower threshold.
inline double youden_threshold(const RocCurve& roc) {
  std::size_t best = 0;
  long double best_j = -1.0L;
  for (std::size_t k = 0; k < roc.points.size(); ++k) {
    // J·P·Q as an exact integer-valued quantity
    const long double j = static_cast<long double>(roc.true_positives[k]) * roc.negatives -
                          static_cast<long double>(roc.false_positives[k]) * roc.positives;
    if (j >= best_j) {
      best_j = j;
      best = k;
    }
  }
  return roc.thresholds[best];
}

struct AuditRecord {
  std::uint64_t seed = 0;
  RocCurve overall;
  std::array<RocCurve, 2> groups;
  double threshold = 0.0;
  std::array<double, 2> tpr{};
  std::array<double, 2> fpr{};
  double tpr_gap = 0.0;
  /// |corr(d1ᵀx, a)|, |corr(d2ᵀx, a)|
  std::array<double, 2> leakage{};
};

inline double abs_pearson(std::span<const double> x, std::span<const int> a) {
  const std::size_t n = x.size();
  double mx = 0.0, ma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    ma += a[i];
  }
  mx /= static_cast<double>(n);
  ma /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, da = a[i] - ma;
    sxy += dx * da;
    sxx += dx * dx;
    syy += da * da;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::min(1.0, std::abs(sxy) / std::sqrt(sxx * syy));
}

/// Audit of precomputed scores. `coords` holds the (d1, d2) projections used
/// for the leakage scores.
inline AuditRecord audit_scores(std::span<const double> scores, std::span<const int> y, std::span<const int> a,
                                const Matrix& coords, std::uint64_t seed = 0) {
  const std::size_t n = scores.size();
  if (y.size() != n || a.size() != n || coords.rows() != n || coords.cols() != 2)
    throw Error(Errc::DimensionMismatch, "audit inputs differ in length");

  std::array<std::array<std::size_t, 2>, 2> cells{};
  for (std::size_t i = 0; i < n; ++i) ++cells[y[i]][a[i]];
  if (cells[0][0] + cells[0][1] == 0 || cells[1][0] + cells[1][1] == 0)
    throw Error(Errc::DegenerateClass, "audit needs both label classes");
  for (int g = 0; g < 2; ++g)
    if (cells[0][g] == 0 || cells[1][g] == 0)
      throw Error(Errc::DegenerateGroup,
                  "attribute group " + std::to_string(g) + " lacks positives or negatives",
                  static_cast<std::size_t>(g));

  AuditRecord rec;
  rec.seed = seed;
  rec.overall = roc_curve(scores, y);
  rec.threshold = youden_threshold(rec.overall);

  for (int g = 0; g < 2; ++g) {
    std::vector<double> gs;
    std::vector<int> gy;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] != g) continue;
      gs.push_back(scores[i]);
      gy.push_back(y[i]);
      if (scores[i] >= rec.threshold) ++(y[i] == 1 ? tp : fp);
    }
    rec.groups[g] = roc_curve(gs, gy);
    rec.tpr[g] = static_cast<double>(tp) / static_cast<double>(cells[1][g]);
    rec.fpr[g] = static_cast<double>(fp) / static_cast<double>(cells[0][g]);
  }
  rec.tpr_gap = std::abs(rec.tpr[0] - rec.tpr[1]);
  rec.leakage = {abs_pearson(coords.column(0), a), abs_pearson(coords.column(1), a)};
  return rec;
}

inline AuditRecord grouped_audit(const FittedModel& model, const FeatureDataset& test) {
  const ScoreSet s = decision_scores(model, test);
  return audit_scores(s.scores, s.y, s.a, project_rows(test.X, model.basis));
}

inline std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(Errc::InvalidArgument, "bootstrap needs at least one sample");
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(n);
  return idx;
}

struct AuditConfig {
  std::size_t replicates = 5;
  std::uint64_t seed = 0;
  /// Skip resampling and audit the test set as given (testing aid).
  bool identity_resample = false;
  std::size_t max_attempts = 100;
};

struct AuditAggregate {
  double auc_mean = 0.0;
  double auc_sd = 0.0;
  double tpr_gap_mean = 0.0;
  double tpr_gap_sd = 0.0;
};

struct AuditReport {
  AuditConfig config;
  std::vector<AuditRecord> records;
  AuditAggregate aggregate;
};

namespace detail {
inline std::pair<double, double> mean_sd(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}
}  // namespace detail

inline AuditAggregate aggregate_records(std::span<const AuditRecord> records) {
  std::vector<double> aucs, gaps;
  for (const auto& r : records) {
    aucs.push_back(r.overall.auc);
    gaps.push_back(r.tpr_gap);
  }
  AuditAggregate agg;
  std::tie(agg.auc_mean, agg.auc_sd) = detail::mean_sd(aucs);
  std::tie(agg.tpr_gap_mean, agg.tpr_gap_sd) = detail::mean_sd(gaps);
  return agg;
}

/// Replicate r resamples with seed `seed + r`; a degenerate draw is retried
/// with sub-seeds derived from it, at most max_attempts draws per replicate.
inline AuditReport run_audit_scores(std::span<const double> scores, std::span<const int> y, std::span<const int> a,
                                    const Matrix& coords, const AuditConfig& config) {
  if (config.replicates < 1) throw Error(Errc::InvalidArgument, "at least one replicate is required");
  const std::size_t n = scores.size();
  AuditReport report;
  report.config = config;

  for (std::size_t r = 0; r < config.replicates; ++r) {
    const std::uint64_t base = config.seed + r;
    if (config.identity_resample) {
      report.records.push_back(audit_scores(scores, y, a, coords, base));
      continue;
    }
    bool done = false;
    for (std::size_t attempt = 0; attempt < config.max_attempts && !done; ++attempt) {
      const std::uint64_t sub = attempt == 0 ? base : derive_seed(base, attempt);
      const auto idx = bootstrap_indices(n, sub);
      std::vector<double> rs(n);
      std::vector<int> ry(n), ra(n);
      Matrix rc(n, 2);
      for (std::size_t k = 0; k < n; ++k) {
        rs[k] = scores[idx[k]];
        ry[k] = y[idx[k]];
        ra[k] = a[idx[k]];
        rc(k, 0) = coords(idx[k], 0);
        rc(k, 1) = coords(idx[k], 1);
      }
      try {
        report.records.push_back(audit_scores(rs, ry, ra, rc, sub));
        done = true;
      } catch (const Error& e) {
        if (e.code() != Errc::DegenerateClass && e.code() != Errc::DegenerateGroup) throw;
      }
    }
    if (!done)
      throw Error(Errc::ResampleDegenerate,
                  "replicate " + std::to_string(r) + " stayed degenerate after " +
                      std::to_string(config.max_attempts) + " draws",
                  r);
  }
  report.aggregate = aggregate_records(report.records);
  return report;
}

inline AuditReport run_audit(const FittedModel& model, const FeatureDataset& test, const AuditConfig& config) {
  const ScoreSet s = decision_scores(model, test);
  return run_audit_scores(s.scores, s.y, s.a, project_rows(test.X, model.basis), config);
}

}  // namespace orthofair
