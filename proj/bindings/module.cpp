#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commutekit/access.hpp"
#include "commutekit/anchors.hpp"
#include "commutekit/config.hpp"
#include "commutekit/lisa.hpp"
#include "commutekit/pipeline.hpp"
#include "commutekit/stats.hpp"
#include "commutekit/synth.hpp"

namespace py = pybind11;
using namespace commutekit;

namespace {

py::dict lisa_to_dict(const LisaResult& r) {
  py::dict d;
  d["hex_id"] = r.hex_id;
  d["moran_i"] = r.moran_i;
  d["pseudo_p"] = r.pseudo_p;
  d["class"] = std::string(lisa_class_name(r.cls));
  d["island"] = r.island;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "commuting and accessibility analytics core";
  m.attr("__version__") = "0.1.0";

  m.def("home_weight", &home_weight, py::arg("hour"),
        "night-hour weight used for home detection");
  m.def("work_weight", &work_weight, py::arg("hour"),
        "weekday-hour weight used for work detection");

  m.def(
      "kruskal_wallis",
      [](const std::vector<std::vector<double>>& groups) {
        const KWResult r = kruskal_wallis(groups);
        return py::make_tuple(r.H, r.p);
      },
      py::arg("groups"), "tie-corrected H and chi-squared p across groups");

  m.def(
      "dunn_posthoc",
      [](const std::vector<std::vector<double>>& groups) {
        py::list out;
        for (const auto& e : dunn_posthoc(groups)) {
          py::dict d;
          d["a"] = e.a;
          d["b"] = e.b;
          d["z"] = e.z;
          d["p_raw"] = e.p_raw;
          d["p_adj"] = e.p_adj;
          out.append(d);
        }
        return out;
      },
      py::arg("groups"), "pairwise z tests with Holm-Sidak adjusted p-values");

  m.def("holm_sidak", &holm_sidak, py::arg("p_values"));
  m.def("gini", &gini, py::arg("values"), py::arg("weights"));
  m.def(
      "quartiles",
      [](const std::vector<double>& values) {
        std::vector<double> w(values.size(), 1.0);
        const QuartileResult r = quartiles(values, w);
        py::dict d;
        d["quartile"] = r.quartile;
        d["breaks"] = py::make_tuple(r.breaks[0], r.breaks[1], r.breaks[2]);
        d["degenerate"] = r.degenerate;
        return d;
      },
      py::arg("values"));

  m.def(
      "palma_ratio",
      [](const std::vector<double>& smi, const std::vector<double>& weights,
         const std::vector<double>& values) {
        if (smi.size() != weights.size() || smi.size() != values.size())
          throw py::value_error("smi, weights and values must have equal length");
        std::vector<PalmaItem> items(smi.size());
        std::vector<std::string> keys(smi.size());
        for (std::size_t i = 0; i < smi.size(); ++i) {
          items[i] = {smi[i], weights[i], values[i]};
          keys[i] = std::to_string(i);
        }
        return palma_ratio(items, keys);
      },
      py::arg("smi"), py::arg("weights"), py::arg("values"),
      "top-decile over bottom-40% weighted mean ratio, ranked by smi");

  m.def(
      "bivariate_lisa",
      [](const std::vector<double>& x, const std::vector<double>& y,
         const std::vector<std::vector<int>>& neighbors, int permutations, double alpha,
         std::uint64_t seed) {
        SpatialWeights w;
        w.neighbors = neighbors;
        for (std::size_t i = 0; i < neighbors.size(); ++i) w.ids.push_back(std::to_string(i));
        py::list out;
        for (const auto& r : bivariate_lisa(x, y, w, permutations, alpha, seed)) {
          out.append(lisa_to_dict(r));
        }
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("neighbors"), py::arg("permutations") = 999,
      py::arg("alpha") = 0.05, py::arg("seed") = 0,
      "bivariate local Moran with conditional-permutation inference");

  m.def(
      "fit_multinomial",
      [](const std::vector<std::vector<double>>& rows, const std::vector<std::string>& labels,
         const std::vector<std::string>& features, const std::string& reference, double l2,
         double tol, int max_iter) {
        const MnlFit fit = fit_multinomial(rows, labels, features, reference, l2, tol, max_iter);
        py::dict d;
        d["classes"] = fit.classes;
        d["features"] = fit.features;
        d["coefficients"] = fit.coefficients;
        d["odds_ratios"] = fit.odds_ratios;
        d["mcfadden_r2"] = fit.mcfadden_r2;
        d["accuracy"] = fit.accuracy;
        d["log_likelihood"] = fit.log_likelihood;
        d["iterations"] = fit.iterations;
        return d;
      },
      py::arg("rows"), py::arg("labels"), py::arg("features"), py::arg("reference") = "NS",
      py::arg("l2") = 1e-4, py::arg("tol") = 1e-8, py::arg("max_iter") = 200);

  m.def(
      "generate_city",
      [](const std::string& out_dir, std::uint64_t seed, int users, int bts, int routes,
         double noise, double extent_km, const std::string& month) {
        CitySpec spec;
        spec.seed = seed;
        spec.n_users = users;
        spec.n_bts = bts;
        spec.n_routes = routes;
        spec.noise = noise;
        spec.extent_km = extent_km;
        spec.month = month;
        generate_city(spec, out_dir);
      },
      py::arg("out_dir"), py::arg("seed") = 42, py::arg("users") = 1000, py::arg("bts") = 60,
      py::arg("routes") = 4, py::arg("noise") = 0.0, py::arg("extent_km") = 6.0,
      py::arg("month") = "2023-03", "write a synthetic city bundle with ground truth");

  m.def(
      "run_pipeline",
      [](const std::string& config_path, const std::vector<std::string>& overrides) {
        const RunConfig cfg = RunConfig::load(config_path, overrides);
        const auto manifest = run_pipeline(cfg, all_stages());
        py::dict d;
        d["out_dir"] = cfg.out_dir;
        d["config_hash"] = manifest.at("config_hash").get<std::string>();
        py::list stages;
        for (const auto& st : manifest.at("stages")) {
          py::dict s;
          s["name"] = st.at("name").get<std::string>();
          s["cache_hit"] = st.at("cache_hit").get<bool>();
          s["wall_ms"] = st.at("wall_ms").get<double>();
          stages.append(s);
        }
        d["stages"] = stages;
        return d;
      },
      py::arg("config_path"), py::arg("overrides") = std::vector<std::string>{},
      "run the full pipeline for a config file; returns the manifest summary");
}
