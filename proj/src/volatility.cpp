#include "dante/volatility.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dante/csv.hpp"
#include "dante/epidata.hpp"
#include "dante/errors.hpp"

namespace dante {
namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return std::isnan(v) ? "NA" : csv::format_double(v); }
}  // namespace

std::optional<double> rms_first_difference(std::span<const double> x) {
  double ss = 0.0;
  int pairs = 0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    if (std::isnan(x[t]) || std::isnan(x[t - 1])) continue;
    const double d = x[t] - x[t - 1];
    ss += d * d;
    ++pairs;
  }
  if (pairs == 0) return std::nullopt;
  return std::sqrt(ss / pairs);
}

std::optional<double> season_volatility(std::span<const double> x) {
  double sum = 0.0;
  int n = 0;
  for (double v : x)
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  if (n < 2) return std::nullopt;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : x)
    if (!std::isnan(v)) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  if (!(sd > 0.0)) return std::nullopt;
  std::vector<double> z(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) z[t] = (x[t] - mean) / sd;
  return rms_first_difference(z);
}

VolatilityReport standardized_volatility(const IliPanel& panel, std::vector<double> patient_means) {
  VolatilityReport rep;
  rep.regions = panel.region_names();
  rep.seasons = panel.season_labels();
  rep.v_rs.assign(static_cast<std::size_t>(panel.R()) * panel.S(), kNaN);
  rep.v_r.assign(panel.R(), kNaN);
  if (patient_means.empty()) patient_means.assign(panel.R(), kNaN);
  if (static_cast<int>(patient_means.size()) != panel.R())
    throw UsageError("patient means must have one entry per region");
  rep.patient_means = std::move(patient_means);
  std::vector<double> series(panel.T());
  for (int r = 0; r < panel.R(); ++r) {
    double sum = 0.0;
    int n = 0;
    for (int s = 0; s < panel.S(); ++s) {
      for (int t = 0; t < panel.T(); ++t) series[t] = panel.value(r, s, t);
      if (const auto v = season_volatility(series)) {
        rep.v_rs[static_cast<std::size_t>(r) * panel.S() + s] = *v;
        sum += *v;
        ++n;
      }
    }
    if (n > 0) rep.v_r[r] = sum / n;
  }
  return rep;
}

std::string volatility_csv_text(const VolatilityReport& rep) {
  std::ostringstream out;
  out << "region,season,v_rs,v_r,patient_mean\n";
  for (std::size_t r = 0; r < rep.regions.size(); ++r)
    for (std::size_t s = 0; s < rep.seasons.size(); ++s)
      out << rep.regions[r] << ',' << rep.seasons[s] << ',' << num(rep.season(int(r), int(s))) << ','
          << num(rep.v_r[r]) << ',' << num(rep.patient_means[r]) << '\n';
  return out.str();
}

void write_volatility_csv(const std::filesystem::path& path, const VolatilityReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << volatility_csv_text(rep);
}

}  // namespace dante
