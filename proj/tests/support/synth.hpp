#pragma once

// Synthetic ILINet extracts: smooth seasonal curves per state with binomial
// sampling noise from known weekly patient volumes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dante/calendar.hpp"

namespace synth {

struct State {
  std::string name;
  int hhs_region;
  double population;
  long patients;  // mean weekly patient visits
  double level;   // multiplier on the seasonal curve
};

struct Extract {
  std::vector<State> states;
  std::vector<int> seasons;
  int weeks = 35;
  std::string ilinet_csv;     // state rows only
  std::string weights_csv;
  std::string baselines_csv;  // one baseline per aggregate location and season
  // Noise-free ILI percent per [state][season][t].
  std::vector<std::vector<std::vector<double>>> curve;
};

inline std::vector<State> default_states(int n, std::uint64_t seed) {
  static const char* names[] = {"Alabama", "Arizona", "California", "Delaware", "Florida", "Georgia",
                                "Hawaii",  "Idaho",   "Kansas",     "Maine",    "Nevada",  "Ohio"};
  static const int regions[] = {4, 9, 9, 3, 4, 4, 9, 10, 7, 1, 9, 5};
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<State> out;
  for (int i = 0; i < n; ++i) {
    const long patients = static_cast<long>(std::lround(200.0 * std::pow(100.0, static_cast<double>(i) / std::max(1, n - 1))));
    out.push_back({names[i], regions[i], 1e6 * (1.0 + 9.0 * u(g)), patients, 0.7 + 0.6 * u(g)});
  }
  // Shuffle volumes so they are not aligned with name order.
  std::vector<long> vol;
  for (const auto& s : out) vol.push_back(s.patients);
  std::shuffle(vol.begin(), vol.end(), g);
  for (int i = 0; i < n; ++i) out[i].patients = vol[i];
  return out;
}

inline Extract make_extract(std::vector<State> states, std::vector<int> seasons, int weeks, std::uint64_t seed,
                            const dante::SeasonCalendar& cal = dante::SeasonCalendar(40, 35)) {
  Extract e;
  e.states = std::move(states);
  e.seasons = std::move(seasons);
  e.weeks = weeks;
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream csv;
  csv << "region,year,week,ili,ilitotal,total_patients\n";
  const int S = static_cast<int>(e.seasons.size());
  std::vector<double> peak(S), height(S), width(S);
  for (int s = 0; s < S; ++s) {
    peak[s] = 0.4 * weeks + 0.3 * weeks * u(g);
    height[s] = 3.0 + 4.0 * u(g);
    width[s] = 3.0 + 2.5 * u(g);
  }
  e.curve.assign(e.states.size(), std::vector<std::vector<double>>(S, std::vector<double>(weeks)));
  for (std::size_t r = 0; r < e.states.size(); ++r) {
    const State& st = e.states[r];
    const double shift = 2.0 * u(g) - 1.0;
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < weeks; ++t) {
        const double z = (t + 1 - peak[s] - shift) / width[s];
        const double pct = st.level * (1.0 + height[s] * std::exp(-0.5 * z * z));
        e.curve[r][s][t] = pct;
        std::poisson_distribution<long> pois(static_cast<double>(st.patients));
        const long n = std::max(1L, pois(g));
        std::binomial_distribution<long> bin(n, pct / 100.0);
        const long k = bin(g);
        const auto cw = cal.to_calendar(e.seasons[s], t + 1);
        csv << st.name << ',' << cw.year << ',' << cw.epiweek << ',' << 100.0 * static_cast<double>(k) / n << ','
            << k << ',' << n << '\n';
      }
  }
  e.ilinet_csv = csv.str();

  std::ostringstream w;
  w << "state,hhs_region,population\n";
  for (const auto& st : e.states) w << st.name << ',' << st.hhs_region << ',' << st.population << '\n';
  e.weights_csv = w.str();

  std::vector<int> regions;
  for (const auto& st : e.states) regions.push_back(st.hhs_region);
  std::sort(regions.begin(), regions.end());
  regions.erase(std::unique(regions.begin(), regions.end()), regions.end());
  std::ostringstream b;
  b << "location,season,baseline_percent\n";
  for (int season : e.seasons) {
    for (int k : regions) b << "HHS Region " << k << ',' << season << ",2.0\n";
    b << "US National," << season << ",2.0\n";
  }
  e.baselines_csv = b.str();
  return e;
}

}  // namespace synth
