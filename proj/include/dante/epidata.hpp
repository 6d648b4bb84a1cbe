#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dante/calendar.hpp"

namespace dante {

inline constexpr double kIliFloor = 0.0005;

// One row of an ILINet-style extract. Counts may be absent when the source
// field was blank, NA, or otherwise unparseable. Aggregate (regional/national)
// rows carry weighted ILI, so `ili_percent` need not equal the count ratio.
struct RawIliRow {
  std::string region_id;
  int year = 0;
  int epiweek = 0;
  std::optional<double> ili_percent;
  std::optional<long> ilitotal;
  std::optional<long> total_patients;

  // ili_percent ~= 100 * ilitotal / total_patients within 0.01 when all known.
  bool counts_consistent() const;
};

/// Reads a CSV with columns region,year,week,ili,ilitotal,total_patients
/// (any order, extra columns ignored). Literal `NA` and unparseable numbers
/// become missing. Throws DataError naming the line for a malformed header,
/// a bad year/week, or a negative count.
std::vector<RawIliRow> parse_ilinet(const std::filesystem::path& csv_path);
std::vector<RawIliRow> parse_ilinet_text(const std::string& text);

/// ILI proportion in [0.0005, 1) or missing. A missing `ili` with zero ILI
/// visits out of a positive patient total is read as 0 before flooring.
std::optional<double> clean_row(const RawIliRow& row);

// Dense (region, season, week) array of ILI proportions; NaN marks missing.
class IliPanel {
 public:
  IliPanel() = default;
  IliPanel(std::vector<std::string> region_names, std::vector<int> season_labels, int weeks);

  int R() const { return static_cast<int>(region_names_.size()); }
  int S() const { return static_cast<int>(season_labels_.size()); }
  int T() const { return weeks_; }

  const std::vector<std::string>& region_names() const { return region_names_; }
  const std::vector<int>& season_labels() const { return season_labels_; }

  std::size_t index(int r, int s, int t) const {
    return (static_cast<std::size_t>(r) * S() + s) * T() + t;
  }

  // 0-based indices throughout.
  bool present(int r, int s, int t) const { return !std::isnan(values_[index(r, s, t)]); }
  double value(int r, int s, int t) const { return values_[index(r, s, t)]; }
  std::optional<double> at(int r, int s, int t) const;
  void set(int r, int s, int t, double y) { values_[index(r, s, t)] = y; }
  void set_missing(int r, int s, int t);

  std::optional<int> region_index(const std::string& name) const;
  std::optional<int> season_index(int season_start_year) const;

  const std::vector<double>& values() const { return values_; }
  std::size_t count_present() const;

  // Copy with every week after `nobs` of season `s` marked missing.
  IliPanel truncated(int s, int nobs) const;

 private:
  std::vector<std::string> region_names_;
  std::vector<int> season_labels_;
  int weeks_ = 0;
  std::vector<double> values_;
};

struct PanelOptions {
  // Regions to include, in canonical order. Empty: every region in the rows, sorted.
  std::vector<std::string> regions;
  // Season start years. Empty: contiguous range spanned by the rows.
  std::vector<int> seasons;
};

/// Places cleaned rows on the (region, season, week) grid. Rows outside the
/// calendar window or for unlisted regions are dropped; duplicate
/// (region, year, epiweek) keys throw DataError.
IliPanel build_panel(const std::vector<RawIliRow>& rows, const SeasonCalendar& calendar,
                     const PanelOptions& options = {});

// Population weights of each state within each aggregate location
// (HHS regions in ascending order, then the nation).
struct WeightMatrix {
  std::vector<std::string> states;
  std::vector<std::string> locations;
  std::vector<int> state_region;  // HHS region number per state
  std::vector<double> population;
  std::vector<double> w;  // [r * locations.size() + rho]

  int R() const { return static_cast<int>(states.size()); }
  int P() const { return static_cast<int>(locations.size()); }
  double weight(int r, int rho) const { return w[static_cast<std::size_t>(r) * P() + rho]; }
  bool member(int r, int rho) const { return weight(r, rho) > 0.0; }
  std::optional<int> location_index(const std::string& name) const;
  int national_index() const { return P() - 1; }
};

std::string hhs_region_name(int region);
inline const std::string kNationalName = "US National";

/// Reads state,hhs_region,population and normalises populations within each
/// region and nationally. Zero or negative population throws DataError.
WeightMatrix load_weights(const std::filesystem::path& csv_path);
WeightMatrix weights_from_populations(const std::vector<std::string>& states,
                                      const std::vector<int>& regions,
                                      const std::vector<double>& populations);

/// Throws DataError unless every column is non-negative and sums to 1 within tol.
void validate_weights(const WeightMatrix& weights, double tol = 1e-9);

// Builds regional/national wILI from state ILI. Missing states are dropped
// from a week's weighted average and the remaining weights renormalised.
IliPanel aggregate_panel(const IliPanel& states, const WeightMatrix& weights);

struct PeakHistory {
  std::vector<int> min_peak_week;  // 1-based, 0 when the region has no data
  std::vector<int> max_peak_week;
};

// Earliest and latest rounded-peak week seen in each region over all seasons.
PeakHistory peak_history(const IliPanel& panel);

/// Per (r, s): true when no missing week lies inside the region's historic
/// peak window widened by `buffer` weeks on each side. All-missing seasons
/// and regions without history are unscorable.
std::vector<std::vector<bool>> scorable_seasonal_targets(const IliPanel& panel,
                                                         const PeakHistory& history,
                                                         int buffer = 3);

// Average weekly total_patients per region over rows with a known total.
std::vector<double> patient_means(const std::vector<RawIliRow>& rows,
                                  const std::vector<std::string>& regions);

}  // namespace dante
