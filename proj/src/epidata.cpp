#include "dante/epidata.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "dante/csv.hpp"
#include "dante/errors.hpp"
#include "dante/targets.hpp"

namespace dante {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kIliCeiling = 1.0 - kIliFloor;

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

bool RawIliRow::counts_consistent() const {
  if (!ili_percent || !ilitotal || !total_patients || *total_patients <= 0) return true;
  const double ratio = 100.0 * static_cast<double>(*ilitotal) / static_cast<double>(*total_patients);
  return std::fabs(ratio - *ili_percent) <= 0.01 + 1e-12;
}

std::vector<RawIliRow> parse_ilinet_text(const std::string& text) {
  const csv::Table table = csv::parse(text);
  if (table.header.empty()) throw DataError("ILINet CSV: line 1: missing header");
  const char* what = "ILINet CSV";
  const auto c_region = table.require("region", what);
  const auto c_year = table.require("year", what);
  const auto c_week = table.require("week", what);
  const auto c_ili = table.require("ili", what);
  const auto c_ilitotal = table.require("ilitotal", what);
  const auto c_total = table.require("total_patients", what);

  std::vector<RawIliRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const auto line = table.line_numbers[i];
    if (f.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "ILINet CSV: " << at_line(line) << "expected " << table.header.size()
          << " fields, found " << f.size();
      throw DataError(msg.str());
    }
    RawIliRow row;
    row.region_id = f[c_region];
    if (row.region_id.empty()) throw DataError("ILINet CSV: " + at_line(line) + "empty region");
    const auto year = csv::to_long(f[c_year]);
    const auto week = csv::to_long(f[c_week]);
    if (!year || *year < 1900 || *year > 9999)
      throw DataError("ILINet CSV: " + at_line(line) + "bad year '" + f[c_year] + "'");
    if (!week || *week < 1 || *week > 53)
      throw DataError("ILINet CSV: " + at_line(line) + "bad week '" + f[c_week] + "'");
    row.year = static_cast<int>(*year);
    row.epiweek = static_cast<int>(*week);
    row.ili_percent = csv::to_double(f[c_ili]);
    row.ilitotal = csv::to_long(f[c_ilitotal]);
    row.total_patients = csv::to_long(f[c_total]);
    if ((row.ilitotal && *row.ilitotal < 0) || (row.total_patients && *row.total_patients < 0))
      throw DataError("ILINet CSV: " + at_line(line) + "negative count");
    if (row.ili_percent && (*row.ili_percent < 0.0 || *row.ili_percent > 100.0))
      throw DataError("ILINet CSV: " + at_line(line) + "ili outside 0..100");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RawIliRow> parse_ilinet(const std::filesystem::path& csv_path) {
  return parse_ilinet_text(csv::read_file(csv_path));
}

std::optional<double> clean_row(const RawIliRow& row) {
  if (row.ilitotal && row.total_patients && *row.ilitotal > *row.total_patients) {
    std::ostringstream msg;
    msg << "ilitotal " << *row.ilitotal << " exceeds total_patients " << *row.total_patients
        << " for " << row.region_id << " " << row.year << " week " << row.epiweek;
    throw DataError(msg.str());
  }
  if (row.total_patients && *row.total_patients == 0) return std::nullopt;
  double y;
  if (row.ili_percent) {
    y = *row.ili_percent / 100.0;
  } else if (row.ilitotal && *row.ilitotal == 0 && row.total_patients && *row.total_patients > 0) {
    y = 0.0;
  } else {
    return std::nullopt;
  }
  return std::clamp(y, kIliFloor, kIliCeiling);
}

IliPanel::IliPanel(std::vector<std::string> region_names, std::vector<int> season_labels, int weeks)
    : region_names_(std::move(region_names)),
      season_labels_(std::move(season_labels)),
      weeks_(weeks),
      values_(region_names_.size() * season_labels_.size() * static_cast<std::size_t>(weeks), kNaN) {}

std::optional<double> IliPanel::at(int r, int s, int t) const {
  if (!present(r, s, t)) return std::nullopt;
  return value(r, s, t);
}

void IliPanel::set_missing(int r, int s, int t) { values_[index(r, s, t)] = kNaN; }

std::optional<int> IliPanel::region_index(const std::string& name) const {
  auto it = std::find(region_names_.begin(), region_names_.end(), name);
  if (it == region_names_.end()) return std::nullopt;
  return static_cast<int>(it - region_names_.begin());
}

std::optional<int> IliPanel::season_index(int season_start_year) const {
  auto it = std::find(season_labels_.begin(), season_labels_.end(), season_start_year);
  if (it == season_labels_.end()) return std::nullopt;
  return static_cast<int>(it - season_labels_.begin());
}

std::size_t IliPanel::count_present() const {
  std::size_t n = 0;
  for (double v : values_) n += !std::isnan(v);
  return n;
}

IliPanel IliPanel::truncated(int s, int nobs) const {
  IliPanel out = *this;
  for (int r = 0; r < R(); ++r)
    for (int t = std::max(nobs, 0); t < T(); ++t) out.set_missing(r, s, t);
  return out;
}

IliPanel build_panel(const std::vector<RawIliRow>& rows, const SeasonCalendar& calendar,
                     const PanelOptions& options) {
  std::vector<std::string> regions = options.regions;
  if (regions.empty()) {
    std::set<std::string> names;
    for (const auto& row : rows) names.insert(row.region_id);
    regions.assign(names.begin(), names.end());
  }
  std::vector<int> seasons = options.seasons;
  if (seasons.empty()) {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& row : rows)
      if (auto sw = calendar.to_season(row.year, row.epiweek)) {
        lo = std::min(lo, sw->season_start_year);
        hi = std::max(hi, sw->season_start_year);
      }
    for (int y = lo; y <= hi && lo <= hi; ++y) seasons.push_back(y);
  }

  IliPanel panel(regions, seasons, calendar.weeks_per_season());
  std::map<std::string, int> region_of;
  for (int r = 0; r < panel.R(); ++r) region_of[regions[r]] = r;
  std::map<int, int> season_of;
  for (int s = 0; s < panel.S(); ++s) season_of[seasons[s]] = s;

  std::set<std::tuple<std::string, int, int>> seen;
  for (const auto& row : rows) {
    if (!seen.emplace(row.region_id, row.year, row.epiweek).second) {
      std::ostringstream msg;
      msg << "duplicate row for " << row.region_id << " " << row.year << " week " << row.epiweek;
      throw DataError(msg.str());
    }
    const auto sw = calendar.to_season(row.year, row.epiweek);
    if (!sw) continue;
    const auto r = region_of.find(row.region_id);
    const auto s = season_of.find(sw->season_start_year);
    if (r == region_of.end() || s == season_of.end()) continue;
    if (const auto y = clean_row(row)) panel.set(r->second, s->second, sw->t - 1, *y);
  }
  return panel;
}

std::optional<int> WeightMatrix::location_index(const std::string& name) const {
  auto it = std::find(locations.begin(), locations.end(), name);
  if (it == locations.end()) return std::nullopt;
  return static_cast<int>(it - locations.begin());
}

std::string hhs_region_name(int region) { return "HHS Region " + std::to_string(region); }

WeightMatrix weights_from_populations(const std::vector<std::string>& states,
                                      const std::vector<int>& regions,
                                      const std::vector<double>& populations) {
  if (states.size() != regions.size() || states.size() != populations.size())
    throw DataError("weights: states, regions and populations differ in length");
  if (states.empty()) throw DataError("weights: no states");
  WeightMatrix wm;
  wm.states = states;
  wm.state_region = regions;
  wm.population = populations;
  std::set<int> present;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(populations[i] > 0.0) || !std::isfinite(populations[i]))
      throw DataError("weights: state " + states[i] + " has non-positive population");
    if (regions[i] < 1) throw DataError("weights: state " + states[i] + " has a bad HHS region");
    present.insert(regions[i]);
  }
  std::vector<int> region_numbers(present.begin(), present.end());
  for (int k : region_numbers) wm.locations.push_back(hhs_region_name(k));
  wm.locations.push_back(kNationalName);

  const int R = wm.R(), P = wm.P();
  wm.w.assign(static_cast<std::size_t>(R) * P, 0.0);
  std::vector<double> totals(P, 0.0);
  for (int r = 0; r < R; ++r) {
    const int rho = static_cast<int>(std::find(region_numbers.begin(), region_numbers.end(),
                                               regions[r]) - region_numbers.begin());
    totals[rho] += populations[r];
    totals[P - 1] += populations[r];
  }
  for (int r = 0; r < R; ++r) {
    const int rho = static_cast<int>(std::find(region_numbers.begin(), region_numbers.end(),
                                               regions[r]) - region_numbers.begin());
    wm.w[static_cast<std::size_t>(r) * P + rho] = populations[r] / totals[rho];
    wm.w[static_cast<std::size_t>(r) * P + P - 1] = populations[r] / totals[P - 1];
  }
  return wm;
}

WeightMatrix load_weights(const std::filesystem::path& csv_path) {
  const csv::Table table = csv::read(csv_path);
  const char* what = "weights CSV";
  const auto c_state = table.require("state", what);
  const auto c_region = table.require("hhs_region", what);
  const auto c_pop = table.require("population", what);
  std::vector<std::string> states;
  std::vector<int> regions;
  std::vector<double> pops;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const auto line = table.line_numbers[i];
    if (f.size() != table.header.size())
      throw DataError(std::string(what) + ": " + at_line(line) + "wrong number of fields");
    const auto region = csv::to_long(f[c_region]);
    const auto pop = csv::to_double(f[c_pop]);
    if (!region) throw DataError(std::string(what) + ": " + at_line(line) + "bad hhs_region");
    if (!pop || !(*pop > 0.0))
      throw DataError(std::string(what) + ": " + at_line(line) + "state " + f[c_state] +
                      " has zero or invalid population");
    if (!seen.insert(f[c_state]).second)
      throw DataError(std::string(what) + ": " + at_line(line) + "duplicate state " + f[c_state]);
    states.push_back(f[c_state]);
    regions.push_back(static_cast<int>(*region));
    pops.push_back(*pop);
  }
  WeightMatrix wm = weights_from_populations(states, regions, pops);
  validate_weights(wm);
  return wm;
}

void validate_weights(const WeightMatrix& wm, double tol) {
  if (wm.w.size() != static_cast<std::size_t>(wm.R()) * wm.P())
    throw DataError("weight matrix has the wrong shape");
  for (int rho = 0; rho < wm.P(); ++rho) {
    double sum = 0.0;
    for (int r = 0; r < wm.R(); ++r) {
      const double w = wm.weight(r, rho);
      if (!(w >= 0.0)) throw DataError("negative weight in column " + wm.locations[rho]);
      sum += w;
    }
    if (std::fabs(sum - 1.0) > tol)
      throw DataError("weights for " + wm.locations[rho] + " sum to " + csv::format_double(sum));
  }
}

IliPanel aggregate_panel(const IliPanel& states, const WeightMatrix& wm) {
  std::vector<int> row_of(wm.R());
  for (int r = 0; r < wm.R(); ++r) {
    auto idx = states.region_index(wm.states[r]);
    row_of[r] = idx ? *idx : -1;
  }
  IliPanel out(wm.locations, states.season_labels(), states.T());
  for (int rho = 0; rho < wm.P(); ++rho)
    for (int s = 0; s < states.S(); ++s)
      for (int t = 0; t < states.T(); ++t) {
        double num = 0.0, den = 0.0;
        for (int r = 0; r < wm.R(); ++r) {
          const double w = wm.weight(r, rho);
          if (w <= 0.0 || row_of[r] < 0 || !states.present(row_of[r], s, t)) continue;
          num += w * states.value(row_of[r], s, t);
          den += w;
        }
        if (den > 0.0) out.set(rho, s, t, num / den);
      }
  return out;
}

PeakHistory peak_history(const IliPanel& panel) {
  PeakHistory h;
  h.min_peak_week.assign(panel.R(), 0);
  h.max_peak_week.assign(panel.R(), 0);
  std::vector<double> pct(panel.T());
  for (int r = 0; r < panel.R(); ++r)
    for (int s = 0; s < panel.S(); ++s) {
      for (int t = 0; t < panel.T(); ++t)
        pct[t] = panel.present(r, s, t) ? 100.0 * panel.value(r, s, t) : kNaN;
      const Peak peak = compute_peak(pct);
      for (int w : peak.weeks) {
        if (h.min_peak_week[r] == 0 || w < h.min_peak_week[r]) h.min_peak_week[r] = w;
        h.max_peak_week[r] = std::max(h.max_peak_week[r], w);
      }
    }
  return h;
}

std::vector<std::vector<bool>> scorable_seasonal_targets(const IliPanel& panel,
                                                         const PeakHistory& history, int buffer) {
  std::vector<std::vector<bool>> out(panel.R(), std::vector<bool>(panel.S(), false));
  for (int r = 0; r < panel.R(); ++r) {
    if (history.min_peak_week[r] == 0) continue;
    const int lo = std::max(1, history.min_peak_week[r] - buffer);
    const int hi = std::min(panel.T(), history.max_peak_week[r] + buffer);
    for (int s = 0; s < panel.S(); ++s) {
      bool any = false, gap = false;
      for (int t = 0; t < panel.T(); ++t) {
        const bool p = panel.present(r, s, t);
        any = any || p;
        if (!p && t + 1 >= lo && t + 1 <= hi) gap = true;
      }
      out[r][s] = any && !gap;
    }
  }
  return out;
}

std::vector<double> patient_means(const std::vector<RawIliRow>& rows,
                                  const std::vector<std::string>& regions) {
  std::map<std::string, std::pair<double, long>> acc;
  for (const auto& row : rows)
    if (row.total_patients) {
      auto& a = acc[row.region_id];
      a.first += static_cast<double>(*row.total_patients);
      a.second += 1;
    }
  std::vector<double> out;
  out.reserve(regions.size());
  for (const auto& name : regions) {
    auto it = acc.find(name);
    out.push_back(it == acc.end() || it->second.second == 0 ? kNaN
                                                            : it->second.first / it->second.second);
  }
  return out;
}

}  // namespace dante
