#include "doa/evaluation.hpp"

#include <exception>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "doa/signal_sim.hpp"
#include "doa/subspace.hpp"

namespace doa {

std::vector<double> AeEstimator::estimate(const CMatrix& covariance, int num_sources) const {
  DoaEstimate est = core_->estimate_doa(covariance);
  auto& d = est.detections;
  if (keep_strongest_ && num_sources > 0 && static_cast<int>(d.size()) > num_sources) {
    std::stable_sort(d.begin(), d.end(),
                     [](const Detection& a, const Detection& b) { return a.gain > b.gain; });
    d.resize(static_cast<std::size_t>(num_sources));
  }
  std::vector<double> angles = est.angles();
  std::sort(angles.begin(), angles.end());
  return angles;
}

std::vector<double> MusicEstimator::estimate(const CMatrix& covariance, int num_sources) const {
  return music(covariance, num_sources, grid_, spacing_).peaks.angles;
}

std::vector<double> SsMusicEstimator::estimate(const CMatrix& covariance, int num_sources) const {
  return ss_music(covariance, num_sources, subarray_len_, grid_, spacing_).peaks.angles;
}

AngleMatching match_angles(std::vector<double> estimated, std::vector<double> truth) {
  std::sort(estimated.begin(), estimated.end());
  std::sort(truth.begin(), truth.end());
  AngleMatching m;
  const std::size_t common = std::min(estimated.size(), truth.size());
  for (std::size_t i = 0; i < common; ++i) m.pairs.emplace_back(truth[i], estimated[i]);
  m.missed.assign(truth.begin() + static_cast<std::ptrdiff_t>(common), truth.end());
  m.surplus.assign(estimated.begin() + static_cast<std::ptrdiff_t>(common), estimated.end());
  return m;
}

TrialResult TrialResult::from(std::vector<double> truth, std::vector<double> estimated) {
  TrialResult t;
  const AngleMatching m = match_angles(estimated, truth);
  for (const auto& [tr, es] : m.pairs) t.squared_errors.push_back((tr - es) * (tr - es));
  t.misses = static_cast<int>(m.missed.size());
  t.surplus = static_cast<int>(m.surplus.size());
  t.truth = std::move(truth);
  t.estimated = std::move(estimated);
  return t;
}

double rmse(const std::vector<TrialResult>& trials) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : trials) {
    for (double e : t.squared_errors) sum += e;
    n += t.squared_errors.size();
  }
  if (n == 0) throw DomainError("RMSE undefined: no matched pairs");
  return std::sqrt(sum / static_cast<double>(n));
}

double rmse_standard_error(const std::vector<TrialResult>& trials) {
  std::vector<double> e;
  for (const auto& t : trials) e.insert(e.end(), t.squared_errors.begin(), t.squared_errors.end());
  if (e.size() < 2) return 0.0;
  const double n = static_cast<double>(e.size());
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / n;
  double var = 0.0;
  for (double x : e) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  const double r = std::sqrt(mean);
  if (r == 0.0) return 0.0;
  return std::sqrt(var / n) / (2.0 * r);
}

int count_hits(const std::vector<double>& truth, const std::vector<double>& estimated,
               double tolerance_deg) {
  if (!(tolerance_deg > 0.0)) throw DomainError("detection tolerance must be positive");
  struct Cand {
    double dist;
    std::size_t t, e;
  };
  std::vector<Cand> cands;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t e = 0; e < estimated.size(); ++e) {
      const double d = std::abs(truth[t] - estimated[e]);
      if (d <= tolerance_deg) cands.push_back({d, t, e});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
  std::vector<bool> t_used(truth.size(), false), e_used(estimated.size(), false);
  int hits = 0;
  for (const auto& c : cands) {
    if (t_used[c.t] || e_used[c.e]) continue;
    t_used[c.t] = e_used[c.e] = true;
    ++hits;
  }
  return hits;
}

double detection_probability(const std::vector<TrialResult>& trials, double tolerance_deg) {
  long hits = 0, total = 0;
  for (const auto& t : trials) {
    hits += count_hits(t.truth, t.estimated, tolerance_deg);
    total += static_cast<long>(t.truth.size());
  }
  if (total == 0) return 0.0;
  return static_cast<double>(hits) / static_cast<double>(total);
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("experiment.trials must be at least 1");
  if (num_snapshots < 1) throw ConfigError("experiment.num_snapshots must be positive");
  if (!(tolerance_deg > 0.0)) throw ConfigError("experiment.tolerance_deg must be positive");
  if (snr_db.empty()) throw ConfigError("experiment.snr_db must not be empty");
  if (rmse_scene.angles_deg.empty() || detection_scene.angles_deg.empty()) {
    throw ConfigError("experiment scenes need at least one source");
  }
}

std::vector<std::vector<TrialResult>> run_trials(const SceneLayout& layout, double snr_db,
                                                 int trials, int num_snapshots,
                                                 const ArraySetup& array,
                                                 const std::vector<const DoaEstimator*>& estimators,
                                                 std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trial count must be at least 1");
  const SteeringFn steering = array.true_steering();
  const int k = static_cast<int>(layout.angles_deg.size());
  std::vector<std::vector<TrialResult>> results(estimators.size(),
                                                std::vector<TrialResult>(trials));
  // Each trial owns its RNG stream and its output slots; aggregation happens
  // later in trial order, so results do not depend on the schedule.
  // Exceptions may not cross the parallel region; keep the one from the
  // lowest trial so the reported error does not depend on the schedule.
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    try {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
      SourceScene scene;
      scene.angles_deg = layout.angles_deg;
      scene.snr_db = snr_db;
      scene.num_snapshots = num_snapshots;
      if (layout.coherent) scene.coherence = random_coherence(k, rng);
      const CMatrix r = simulate_covariance(scene, steering, rng);
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        results[e][t] = TrialResult::from(layout.angles_deg, estimators[e]->estimate(r, k));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return results;
}

std::vector<RmseRow> run_rmse_vs_snr(const ExperimentConfig& cfg, const ArraySetup& array,
                                     const std::vector<const DoaEstimator*>& estimators) {
  cfg.validate();
  std::vector<RmseRow> rows;
  const std::uint64_t base = derive_seed(cfg.seed, 0x524d5345);  // "RMSE"
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const auto per_est = run_trials(cfg.rmse_scene, cfg.snr_db[s], cfg.trials, cfg.num_snapshots,
                                    array, estimators, derive_seed(base, s));
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      RmseRow row;
      row.snr_db = cfg.snr_db[s];
      row.estimator = estimators[e]->name();
      row.trials = cfg.trials;
      try {
        row.rmse_deg = rmse(per_est[e]);
        row.se = rmse_standard_error(per_est[e]);
      } catch (const DomainError&) {
        row.rmse_deg = std::numeric_limits<double>::quiet_NaN();
        row.se = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<DetectionRow> run_detection_experiment(
    const ExperimentConfig& cfg, const ArraySetup& array,
    const std::vector<const DoaEstimator*>& estimators) {
  cfg.validate();
  const std::uint64_t seed = derive_seed(cfg.seed, 0x44455443);  // "DETC"
  const auto per_est = run_trials(cfg.detection_scene, cfg.detection_snr_db, cfg.trials,
                                  cfg.num_snapshots, array, estimators, seed);
  std::vector<DetectionRow> rows;
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    rows.push_back({estimators[e]->name(), cfg.tolerance_deg,
                    detection_probability(per_est[e], cfg.tolerance_deg), cfg.trials});
  }
  return rows;
}

void write_rmse_csv(const std::vector<RmseRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "snr_db,estimator,rmse_deg,trials,se\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%g,%s,%.9g,%d,%.9g\n", r.snr_db, r.estimator.c_str(),
                  r.rmse_deg, r.trials, r.se);
    out << buf;
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_detection_csv(const std::vector<DetectionRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "estimator,tolerance_deg,p_detect,trials\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%g,%.9g,%d\n", r.estimator.c_str(), r.tolerance_deg,
                  r.p_detect, r.trials);
    out << buf;
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace doa
