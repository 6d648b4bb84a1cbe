#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dante {

class IliPanel;

// Standardised volatility of each region's seasons.
struct VolatilityReport {
  std::vector<std::string> regions;
  std::vector<int> seasons;
  std::vector<double> v_rs;  // [r * S + s], NaN for excluded seasons
  std::vector<double> v_r;   // mean over included seasons, NaN if none
  std::vector<double> patient_means;  // NaN when unknown

  double season(int r, int s) const { return v_rs[static_cast<std::size_t>(r) * seasons.size() + s]; }
};

/// Root mean square of first differences over adjacent present weeks.
std::optional<double> rms_first_difference(std::span<const double> series);

/// Volatility of one season: standardise by the mean and sample standard
/// deviation of the present weeks, then take the RMS first difference.
/// nullopt with fewer than two present weeks or zero spread.
std::optional<double> season_volatility(std::span<const double> series);

VolatilityReport standardized_volatility(const IliPanel& panel, std::vector<double> patient_means = {});

void write_volatility_csv(const std::filesystem::path& path, const VolatilityReport& report);
std::string volatility_csv_text(const VolatilityReport& report);

}  // namespace dante
