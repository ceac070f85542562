// Copyright 2026 The tallcrop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tallcrop/error.hpp"
#include "tallcrop/experiments.hpp"
#include "tallcrop/features.hpp"
#include "tallcrop/forest.hpp"
#include "tallcrop/synth.hpp"

namespace py = pybind11;
using namespace tallcrop;

namespace {

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw ValidationError("expected a 1-d array");
  return {a.data(), a.data() + a.shape(0)};
}

FeatureMatrix as_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ValidationError("expected a 2-d array");
  FeatureMatrix X(static_cast<std::size_t>(a.shape(1)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    X.push_row({a.data(i, 0), static_cast<std::size_t>(a.shape(1))});
  }
  return X;
}

py::array_t<double> to_array(std::span<const double> values) {
  py::array_t<double> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

HarmonicConfig make_harmonic_config(int n, double omega, int min_obs) {
  HarmonicConfig cfg;
  cfg.n = n;
  cfg.omega = omega;
  cfg.min_obs = min_obs;
  cfg.validate();
  return cfg;
}

HarmonicCoeffs coeffs_from_array(const std::vector<double>& flat) {
  if (flat.size() < 3 || flat.size() % 2 == 0) {
    throw ValidationError("coefficient array must have odd length 2n+1");
  }
  HarmonicCoeffs coeffs;
  coeffs.c = flat[0];
  const std::size_t n = (flat.size() - 1) / 2;
  for (std::size_t k = 0; k < n; ++k) {
    coeffs.a.push_back(flat[1 + 2 * k]);
    coeffs.b.push_back(flat[2 + 2 * k]);
  }
  return coeffs;
}

}  // namespace

PYBIND11_MODULE(_tallcrop, m) {
  m.doc() = "Tall-vs-short crop classification core: RH features, harmonic "
            "regression, random forests, spatial splits, synthetic benchmarks";
#ifdef TALLCROP_VERSION
  m.attr("__version__") = TALLCROP_VERSION;
#else
  m.attr("__version__") = "dev";
#endif

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InsufficientObservationsError>(m, "InsufficientObservationsError",
                                                        PyExc_ValueError);
  py::register_exception<DegenerateDesignError>(m, "DegenerateDesignError", PyExc_ValueError);

  m.def(
      "subsample_rh",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& rh) {
        GediShot shot;
        shot.shot_id = "py";
        shot.rh = as_vector(rh);
        const RhFeatures features = subsample_rh(shot);
        return to_array(features.values);
      },
      py::arg("rh"), "Samples a 101-value RH curve every 10th percentile (11 values).");

  m.def("gcvi", &gcvi, py::arg("nir"), py::arg("green"),
        "Green chlorophyll vegetation index: nir/green - 1.");

  m.def(
      "fit_harmonics",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& t,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& y, int n,
         double omega, int min_obs) {
        const auto tv = as_vector(t);
        const auto yv = as_vector(y);
        if (tv.size() != yv.size()) throw ValidationError("t and y must have equal length");
        std::vector<std::pair<double, double>> points;
        points.reserve(tv.size());
        for (std::size_t i = 0; i < tv.size(); ++i) points.emplace_back(tv[i], yv[i]);
        const HarmonicCoeffs coeffs = fit_harmonics(points, make_harmonic_config(n, omega, min_obs));
        std::vector<double> flat{coeffs.c};
        for (std::size_t k = 0; k < coeffs.a.size(); ++k) {
          flat.push_back(coeffs.a[k]);
          flat.push_back(coeffs.b[k]);
        }
        return to_array(flat);
      },
      py::arg("t"), py::arg("y"), py::arg("n") = 2, py::arg("omega") = 1.5, py::arg("min_obs") = 5,
      "Least-squares harmonic fit; returns (c, a1, b1, ..., an, bn).");

  m.def(
      "evaluate_harmonic",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& coeffs, double omega,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& t) {
        const HarmonicCoeffs c = coeffs_from_array(as_vector(coeffs));
        const auto tv = as_vector(t);
        std::vector<double> out;
        out.reserve(tv.size());
        for (const double ti : tv) out.push_back(evaluate_harmonic(c, omega, ti));
        return to_array(out);
      },
      py::arg("coeffs"), py::arg("omega"), py::arg("t"));

  m.def(
      "grid_split",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& lon,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& lat,
         double cell_size, double train_frac, std::uint64_t seed) {
        const auto lons = as_vector(lon);
        const auto lats = as_vector(lat);
        if (lons.size() != lats.size()) throw ValidationError("lon and lat must have equal length");
        std::vector<std::pair<double, double>> points;
        points.reserve(lons.size());
        for (std::size_t i = 0; i < lons.size(); ++i) points.emplace_back(lons[i], lats[i]);
        const GridSplit split = grid_split(points, cell_size, train_frac, seed);
        py::array_t<bool> mask(static_cast<py::ssize_t>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i) {
          mask.mutable_data()[i] = split.is_train(points[i].first, points[i].second);
        }
        return mask;
      },
      py::arg("lon"), py::arg("lat"), py::arg("cell_size") = 0.5, py::arg("train_frac") = 0.8,
      py::arg("seed") = 0,
      "Spatially-blocked split; returns a boolean train mask per point.");

  m.def(
      "compute_metrics",
      [](const std::vector<int>& pred, const std::vector<int>& truth) {
        const std::vector<std::string> crops(pred.size(), "all");
        const RunMetrics metrics = compute_metrics(pred, truth, crops);
        py::dict out;
        out["accuracy"] = metrics.accuracy;
        out["n_test"] = metrics.n_test;
        out["confusion"] = std::vector<std::vector<std::uint64_t>>{
            {metrics.confusion[0][0], metrics.confusion[0][1]},
            {metrics.confusion[1][0], metrics.confusion[1][1]}};
        return out;
      },
      py::arg("pred"), py::arg("truth"),
      "Accuracy and a [predicted][actual] confusion matrix for 0/1 labels.");

  py::class_<Forest>(m, "Forest")
      .def_property_readonly("n_trees",
                             [](const Forest& f) { return f.trees.size(); })
      .def_property_readonly("feature_kind",
                             [](const Forest& f) { return std::string(to_string(f.feature_kind)); })
      .def_property_readonly("seed", [](const Forest& f) { return f.config.seed; })
      .def_static(
          "train",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& X,
             const std::vector<int>& y, int n_trees, const std::string& max_features,
             int min_samples_split, int max_depth, std::uint64_t seed,
             const std::string& feature_kind, int workers) {
            ForestConfig cfg;
            cfg.n_trees = n_trees;
            cfg.max_features = MaxFeatures::parse(max_features);
            cfg.min_samples_split = min_samples_split;
            cfg.max_depth = max_depth;
            cfg.seed = seed;
            return train_forest(as_matrix(X), y, cfg, feature_kind_from_string(feature_kind),
                                workers);
          },
          py::arg("X"), py::arg("y"), py::arg("n_trees") = 100, py::arg("max_features") = "sqrt",
          py::arg("min_samples_split") = 2, py::arg("max_depth") = 0, py::arg("seed") = 0,
          py::arg("feature_kind") = "HARM20", py::arg("workers") = 1)
      .def("predict",
           [](const Forest& f,
              const py::array_t<double, py::array::c_style | py::array::forcecast>& X) {
             const auto labels = predict(f, as_matrix(X));
             py::array_t<int> out(static_cast<py::ssize_t>(labels.size()));
             std::copy(labels.begin(), labels.end(), out.mutable_data());
             return out;
           })
      .def("predict_proba",
           [](const Forest& f,
              const py::array_t<double, py::array::c_style | py::array::forcecast>& X) {
             const auto proba = predict_proba(f, as_matrix(X));
             return to_array(proba);
           })
      .def("to_bytes",
           [](const Forest& f) {
             const auto bytes = serialize_forest(f);
             return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
           })
      .def_static("from_bytes",
                  [](const py::bytes& data) {
                    const std::string_view view = data;
                    return deserialize_forest(
                        {reinterpret_cast<const std::uint8_t*>(view.data()), view.size()});
                  })
      .def("save", [](const Forest& f, const std::string& path) { save_forest(path, f); })
      .def_static("load", [](const std::string& path) { return load_forest(path); });

  m.def(
      "synth_region",
      [](const std::string& name, int n_shots, std::uint64_t seed, double shift,
         const std::tuple<double, double, double, double>& bbox, int workers) {
        RegionSpec spec;
        spec.name = name;
        spec.bbox = {std::get<0>(bbox), std::get<1>(bbox), std::get<2>(bbox), std::get<3>(bbox)};
        spec.crop_mix = {{crop_profile_by_name("maize"), 0.5},
                         {crop_profile_by_name("soybean"), 0.5}};
        spec.phenology_shift = shift;
        spec.n_shots = n_shots;
        spec.seed = seed;
        const SynthRegion region = gen_region(spec);
        const RegionData data = to_region_data(region, HarmonicConfig{}, workers);

        const auto n = static_cast<py::ssize_t>(data.samples.size());
        py::array_t<double> lon(n), lat(n);
        py::array_t<int> label(n), month(n);
        py::array_t<double> rh11({n, static_cast<py::ssize_t>(11)});
        py::array_t<double> harm20({n, static_cast<py::ssize_t>(20)});
        for (py::ssize_t i = 0; i < n; ++i) {
          const Sample& s = data.samples[static_cast<std::size_t>(i)];
          lon.mutable_data()[i] = s.lon;
          lat.mutable_data()[i] = s.lat;
          label.mutable_data()[i] = s.is_maize ? 1 : 0;
          month.mutable_data()[i] = s.month;
          std::copy(s.rh.begin(), s.rh.end(), rh11.mutable_data(i, 0));
          std::copy(s.harm.begin(), s.harm.end(), harm20.mutable_data(i, 0));
        }
        py::dict out;
        out["lon"] = lon;
        out["lat"] = lat;
        out["label"] = label;
        out["month"] = month;
        out["rh11"] = rh11;
        out["harm20"] = harm20;
        return out;
      },
      py::arg("name") = "region", py::arg("n_shots") = 1000, py::arg("seed") = 0,
      py::arg("shift") = 0.0, py::arg("bbox") = std::make_tuple(0.0, 40.0, 2.0, 41.5),
      py::arg("workers") = 1,
      "Synthetic maize/soybean region; returns lon, lat, label, month, rh11, harm20 arrays.");
}
