#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "dante/cli.hpp"
#include "dante/epidata.hpp"
#include "dante/errors.hpp"
#include "dante/model.hpp"
#include "dante/sampler.hpp"
#include "dante/scoring.hpp"
#include "dante/targets.hpp"
#include "dante/volatility.hpp"

namespace py = pybind11;
using namespace dante;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

IliPanel panel_from_array(const Array& values) {
  if (values.ndim() != 3) throw std::invalid_argument("values must have shape (R, S, T)");
  const int R = static_cast<int>(values.shape(0)), S = static_cast<int>(values.shape(1)),
            T = static_cast<int>(values.shape(2));
  std::vector<std::string> names;
  for (int r = 0; r < R; ++r) names.push_back("r" + std::to_string(r + 1));
  std::vector<int> seasons(S);
  for (int s = 0; s < S; ++s) seasons[s] = s;
  IliPanel p(names, seasons, T);
  const auto v = values.unchecked<3>();
  for (int r = 0; r < R; ++r)
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < T; ++t)
        if (!std::isnan(v(r, s, t))) p.set(r, s, t, v(r, s, t));
  return p;
}

Array panel_array(const IliPanel& p) {
  Array out({p.R(), p.S(), p.T()});
  std::copy(p.values().begin(), p.values().end(), out.mutable_data());
  return out;
}

py::dict panel_dict(const IliPanel& p) {
  py::dict d;
  d["regions"] = p.region_names();
  d["seasons"] = p.season_labels();
  d["values"] = panel_array(p);
  return d;
}

std::optional<TargetKind> kind_of(const std::string& name) { return target_from_name(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dante hierarchical influenza forecasting";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "load_panel",
      [](const std::string& path, int start_epiweek, int weeks) {
        return panel_dict(build_panel(parse_ilinet(path), SeasonCalendar(start_epiweek, weeks)));
      },
      py::arg("path"), py::arg("start_epiweek") = 40, py::arg("weeks") = 35,
      "Clean an ILINet CSV into {'regions', 'seasons', 'values'[R, S, T]} with NaN for missing weeks.");

  m.def(
      "aggregate",
      [](const Array& values, const std::vector<std::string>& states, const std::vector<int>& regions,
         const std::vector<double>& populations) {
        const auto w = weights_from_populations(states, regions, populations);
        auto p = panel_from_array(values);
        IliPanel named(states, p.season_labels(), p.T());
        for (int r = 0; r < p.R(); ++r)
          for (int s = 0; s < p.S(); ++s)
            for (int t = 0; t < p.T(); ++t)
              if (p.present(r, s, t)) named.set(r, s, t, p.value(r, s, t));
        return panel_dict(aggregate_panel(named, w));
      },
      py::arg("values"), py::arg("states"), py::arg("hhs_regions"), py::arg("populations"),
      "Population-weighted regional and national series from state values[R, S, T].");

  m.def("compute_onset", [](const std::vector<double>& pct, double baseline) { return compute_onset(pct, baseline); },
        py::arg("percent"), py::arg("baseline"));
  m.def(
      "compute_peak",
      [](const std::vector<double>& pct) {
        const auto p = compute_peak(pct);
        return py::make_tuple(p.intensity, p.weeks);
      },
      py::arg("percent"), "Rounded peak intensity and the 1-based weeks attaining it.");

  m.def(
      "multibin_score",
      [](const std::string& target, const std::vector<double>& probs, const std::vector<double>& pct,
         std::optional<double> baseline, int nobs) {
        const auto kind = kind_of(target);
        if (!kind) throw UsageError("unknown target '" + target + "'");
        return multibin_score(TargetDistribution{*kind, probs}, make_truth(pct, baseline), nobs);
      },
      py::arg("target"), py::arg("probs"), py::arg("percent"), py::arg("baseline") = py::none(),
      py::arg("nobs") = 5, "Probability summed over the multibin scoring window; None when unscorable.");

  m.def("season_volatility", [](const std::vector<double>& x) { return season_volatility(x); }, py::arg("series"));

  m.def(
      "sample_prior",
      [](int R, int S, int T, std::uint64_t seed) {
        const Dims d{R, S, T};
        const auto x = sample_prior(Hyperconfig{}, d, seed);
        const auto v = flatten(x);
        py::dict out;
        out["names"] = parameter_names(d);
        out["values"] = Array(static_cast<py::ssize_t>(v.size()), v.data());
        return out;
      },
      py::arg("R"), py::arg("S"), py::arg("T"), py::arg("seed") = 1);

  m.def(
      "fit",
      [](const Array& values, int chains, int iterations, int thin, int burnin, std::uint64_t seed, int jobs) {
        const auto panel = panel_from_array(values);
        McmcConfig mc;
        mc.n_chains = chains;
        mc.n_iterations = iterations;
        mc.thin = thin;
        mc.burnin_thinned = burnin;
        mc.seed = seed;
        PosteriorDraws draws;
        {
          py::gil_scoped_release release;
          draws = run_chains(Observations::from_panel(panel), Hyperconfig{}, mc, {}, jobs);
        }
        py::dict out;
        out["names"] = draws.names;
        Array v({static_cast<py::ssize_t>(draws.M()), static_cast<py::ssize_t>(draws.width())});
        std::copy(draws.values.begin(), draws.values.end(), v.mutable_data());
        out["draws"] = v;
        out["chain"] = draws.chain_id;
        out["warnings"] = draws.diagnostics.warnings;
        return out;
      },
      py::arg("values"), py::arg("chains") = 3, py::arg("iterations") = 30000, py::arg("thin") = 10,
      py::arg("burnin") = 1500, py::arg("seed") = 1, py::arg("jobs") = 1,
      "Fit the model to ILI proportions values[R, S, T] (NaN = missing); returns retained draws.");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "dante");
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a dante subcommand; returns (exit code, stdout, stderr).");
}
