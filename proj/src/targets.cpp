#include "dante/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dante/errors.hpp"
#include "dante/forecast.hpp"

namespace dante {

bool is_percent_valued(TargetKind kind) {
  return kind != TargetKind::Onset && kind != TargetKind::PeakTiming;
}

bool is_seasonal(TargetKind kind) {
  return kind == TargetKind::Onset || kind == TargetKind::PeakTiming ||
         kind == TargetKind::PeakIntensity;
}

int weeks_ahead(TargetKind kind) {
  switch (kind) {
    case TargetKind::Week1: return 1;
    case TargetKind::Week2: return 2;
    case TargetKind::Week3: return 3;
    case TargetKind::Week4: return 4;
    default: return 0;
  }
}

std::string target_name(TargetKind kind) {
  switch (kind) {
    case TargetKind::Onset: return "Season onset";
    case TargetKind::PeakTiming: return "Season peak week";
    case TargetKind::PeakIntensity: return "Season peak percentage";
    default: return std::to_string(weeks_ahead(kind)) + " wk ahead";
  }
}

std::optional<TargetKind> target_from_name(const std::string& name) {
  for (TargetKind k : kAllTargets)
    if (target_name(k) == name || target_short_name(k) == name) return k;
  return std::nullopt;
}

std::string target_short_name(TargetKind kind) {
  switch (kind) {
    case TargetKind::Onset: return "onset";
    case TargetKind::PeakTiming: return "pt";
    case TargetKind::PeakIntensity: return "pi";
    default: return "wk" + std::to_string(weeks_ahead(kind));
  }
}

long tenths(double percent) {
  // The nudge keeps decimal halves such as 5.35 (stored as 5.3499999...) rounding up.
  const double scaled = percent * 10.0;
  return static_cast<long>(std::round(scaled >= 0 ? scaled + 1e-9 : scaled - 1e-9));
}

double round_tenth(double percent) { return static_cast<double>(tenths(percent)) / 10.0; }

int percent_bin(double percent) {
  const long b = tenths(percent);
  if (b < 0) return 0;
  return b >= kPercentBins - 1 ? kPercentBins - 1 : static_cast<int>(b);
}

double percent_bin_start(int bin) { return bin / 10.0; }

double percent_bin_end(int bin) { return bin == kPercentBins - 1 ? 100.0 : (bin + 1) / 10.0; }

double TargetDistribution::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

int bin_count(TargetKind kind, int weeks_per_season) {
  if (is_percent_valued(kind)) return kPercentBins;
  return kind == TargetKind::Onset ? weeks_per_season + 1 : weeks_per_season;
}

TargetDistribution pad_distribution(const TargetDistribution& dist, double pad) {
  TargetDistribution out = dist;
  double total = 0.0;
  for (double& p : out.probs) {
    p = std::max(p, pad);
    total += p;
  }
  for (double& p : out.probs) p /= total;
  return out;
}

TargetDistribution pad_distribution(const TargetDistribution& dist) {
  return pad_distribution(dist, is_percent_valued(dist.kind) ? kPercentPad : kWeekPad);
}

std::optional<int> compute_onset(std::span<const double> percent, double baseline) {
  const long base = tenths(baseline);
  int run = 0;
  for (std::size_t t = 0; t < percent.size(); ++t) {
    if (!std::isnan(percent[t]) && tenths(percent[t]) >= base) {
      if (++run == 3) return static_cast<int>(t) - 1;  // 1-based start of the run
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

Peak compute_peak(std::span<const double> percent) {
  Peak peak;
  long best = std::numeric_limits<long>::min();
  for (std::size_t t = 0; t < percent.size(); ++t) {
    if (std::isnan(percent[t])) continue;
    const long v = tenths(percent[t]);
    if (v > best) {
      best = v;
      peak.weeks.assign(1, static_cast<int>(t) + 1);
    } else if (v == best) {
      peak.weeks.push_back(static_cast<int>(t) + 1);
    }
  }
  peak.intensity = peak.weeks.empty() ? std::numeric_limits<double>::quiet_NaN() : best / 10.0;
  return peak;
}

SeasonTruth make_truth(std::span<const double> percent, std::optional<double> baseline,
                       bool seasonal_scorable) {
  SeasonTruth truth;
  truth.percent.resize(percent.size());
  for (std::size_t t = 0; t < percent.size(); ++t)
    truth.percent[t] = std::isnan(percent[t]) ? percent[t] : round_tenth(percent[t]);
  truth.baseline = baseline;
  if (baseline) truth.onset = compute_onset(percent, *baseline);
  truth.peak = compute_peak(percent);
  truth.seasonal_scorable = seasonal_scorable;
  return truth;
}

std::vector<TargetDistribution> target_distributions(const TrajectoryDraws& draws, int location,
                                                     int nobs, std::optional<double> baseline,
                                                     bool pad) {
  if (draws.M < 1) throw UsageError("target distributions need at least one draw");
  const int T = draws.T, M = draws.M;
  const double unit = 1.0 / M;
  std::vector<TargetDistribution> out;

  auto make = [&](TargetKind kind) {
    TargetDistribution d;
    d.kind = kind;
    d.probs.assign(bin_count(kind, T), 0.0);
    return d;
  };

  TargetDistribution onset = make(TargetKind::Onset);
  TargetDistribution timing = make(TargetKind::PeakTiming);
  TargetDistribution intensity = make(TargetKind::PeakIntensity);
  std::vector<double> traj(T);
  for (int m = 0; m < M; ++m) {
    for (int t = 0; t < T; ++t) traj[t] = 100.0 * draws.at(location, t, m);
    const Peak peak = compute_peak(traj);
    intensity.probs[percent_bin(peak.intensity)] += unit;
    // Tied peak weeks share the draw's mass equally.
    for (int w : peak.weeks) timing.probs[w - 1] += unit / static_cast<double>(peak.weeks.size());
    if (baseline) {
      const auto on = compute_onset(traj, *baseline);
      onset.probs[on ? *on - 1 : onset.none_bin()] += unit;
    }
  }
  if (baseline) out.push_back(std::move(onset));
  out.push_back(std::move(timing));
  out.push_back(std::move(intensity));

  for (TargetKind kind : kShortTermTargets) {
    const int t = nobs + weeks_ahead(kind);  // 1-based
    if (t > T) continue;
    TargetDistribution d = make(kind);
    for (int m = 0; m < M; ++m) d.probs[percent_bin(100.0 * draws.at(location, t - 1, m))] += unit;
    out.push_back(std::move(d));
  }
  if (pad)
    for (auto& d : out) d = pad_distribution(d);
  return out;
}

}  // namespace dante
