#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cspnn/baseline_pnn.hpp"
#include "cspnn/data_io.hpp"
#include "cspnn/error.hpp"
#include "cspnn/learning.hpp"
#include "cspnn/model_file.hpp"
#include "cspnn/protocols.hpp"

namespace py = pybind11;
using namespace cspnn;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

LabeledDataset to_dataset(const Matrix& x, const std::vector<Label>& y) {
  if (x.ndim() != 2) throw ContractError("features must be a 2-D array");
  const auto n = static_cast<std::size_t>(x.shape(0));
  const auto d = static_cast<std::size_t>(x.shape(1));
  if (y.size() != n) throw ContractError("got " + std::to_string(n) + " rows but " + std::to_string(y.size()) + " labels");
  LabeledDataset data(d);
  const double* p = x.data();
  for (std::size_t i = 0; i < n; ++i) data.add(FeatureVector(p + i * d, p + (i + 1) * d), y[i]);
  return data;
}

py::tuple from_dataset(const LabeledDataset& data) {
  Matrix x({data.size(), data.dimension()});
  auto m = x.mutable_unchecked<2>();
  std::vector<Label> y;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dimension(); ++j) m(i, j) = data[i].features[j];
    y.push_back(data[i].label);
  }
  return py::make_tuple(x, y);
}

FeatureVector to_vector(const Matrix& x) {
  if (x.ndim() != 1) throw ContractError("input must be a 1-D array");
  return FeatureVector(x.data(), x.data() + x.shape(0));
}

Matrix centroids(const CsPnnModel& m) {
  Matrix out({m.hidden_count(), m.dimension()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.hidden_count(); ++i) {
    for (std::size_t j = 0; j < m.dimension(); ++j) v(i, j) = m.hidden()[i].centroid[j];
  }
  return out;
}

py::dict report_dict(const EvalReport& r) {
  py::dict per_class;
  for (const auto& [label, t] : r.per_class) per_class[py::str(label)] = py::make_tuple(t.count, t.correct);
  std::vector<Label> predicted;
  for (const auto& p : r.predictions) predicted.push_back(p.predicted);
  py::dict d;
  d["total"] = r.total;
  d["correct"] = r.correct;
  d["accuracy"] = r.accuracy();
  d["hidden_count"] = r.hidden_count;
  d["per_class"] = per_class;
  d["predictions"] = predicted;
  d["seconds"] = r.seconds;
  return d;
}

py::dict record_dict(const StageRecord& r) {
  py::dict d;
  d["scenario"] = to_string(r.scenario);
  d["dataset"] = r.dataset;
  d["param"] = r.param;
  d["stage"] = r.stage;
  d["classes"] = r.classes;
  d["accuracy"] = r.accuracy;
  d["hidden_count"] = r.hidden_count;
  d["seed"] = r.seed ? py::cast(*r.seed) : py::none();
  return d;
}

RadiusRule make_rule(std::optional<double> scale, std::optional<double> sigma) {
  if (scale && sigma) throw ContractError("give at most one of scale and sigma");
  if (scale) return ScaledRadius{*scale};
  if (sigma) return FixedRadius{*sigma};
  return AdaptiveRadius{};
}

}  // namespace

PYBIND11_MODULE(_cspnn, m) {
  m.doc() = "Compact-sized probabilistic neural network";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractError>(m, "ContractError", base);
  py::register_exception<ModelEmptyError>(m, "ModelEmptyError", base);
  py::register_exception<NotFoundError>(m, "NotFoundError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);

  py::class_<CsPnnModel>(m, "Model")
      .def(py::init<>())
      .def(py::init<std::size_t>(), py::arg("dimension"))
      .def_property_readonly("dimension", &CsPnnModel::dimension)
      .def_property_readonly("hidden_count", &CsPnnModel::hidden_count)
      .def_property_readonly("class_count", &CsPnnModel::class_count)
      .def_property_readonly("labels", &CsPnnModel::labels)
      .def_property_readonly("centroids", &centroids)
      .def_property_readonly("unit_ids",
                             [](const CsPnnModel& self) {
                               std::vector<std::uint64_t> ids;
                               for (const auto& u : self.hidden()) ids.push_back(u.id.value);
                               return ids;
                             })
      .def_property_readonly("unit_labels",
                             [](const CsPnnModel& self) {
                               std::vector<Label> out;
                               for (const auto& u : self.hidden()) out.push_back(self.outputs()[u.subnet].label);
                               return out;
                             })
      .def("__eq__", [](const CsPnnModel& a, const CsPnnModel& b) { return a == b; })
      .def("__copy__", [](const CsPnnModel& self) { return CsPnnModel(self); })
      .def("__deepcopy__", [](const CsPnnModel& self, py::dict) { return CsPnnModel(self); })
      .def("__repr__", [](const CsPnnModel& self) {
        return "<cspnn.Model d=" + std::to_string(self.dimension()) + " N_h=" + std::to_string(self.hidden_count()) +
               " classes=" + std::to_string(self.class_count()) + ">";
      });

  m.def(
      "construct",
      [](CsPnnModel& model, const Matrix& x, const std::vector<Label>& y) {
        const auto data = to_dataset(x, y);
        ConstructStats s;
        {
          py::gil_scoped_release release;
          s = construct(model, data);
        }
        py::dict d;
        d["presented"] = s.presented;
        d["units_added"] = s.units_added;
        d["classes_added"] = s.classes_added;
        d["centroid_updates"] = s.centroid_updates;
        return d;
      },
      py::arg("model"), py::arg("x"), py::arg("y"), "One-pass construction; extends `model` in place.");

  m.def(
      "evaluate",
      [](const CsPnnModel& model, const Matrix& x, const std::vector<Label>& y, std::optional<double> scale,
         std::optional<double> sigma) {
        const auto data = to_dataset(x, y);
        const auto rule = make_rule(scale, sigma);
        EvalReport r;
        {
          py::gil_scoped_release release;
          r = evaluate(model, data, rule);
        }
        return report_dict(r);
      },
      py::arg("model"), py::arg("x"), py::arg("y"), py::kw_only(), py::arg("scale") = py::none(),
      py::arg("sigma") = py::none());

  m.def(
      "forward",
      [](const CsPnnModel& model, const Matrix& x, std::optional<double> scale, std::optional<double> sigma) {
        const auto r = forward(model, to_vector(x), make_rule(scale, sigma));
        py::dict d;
        d["scores"] = r.scores;
        d["winner"] = r.winner;
        d["label"] = model.outputs()[r.winner].label;
        d["d_max"] = r.d_max;
        d["sigma"] = r.sigma ? py::cast(*r.sigma) : py::none();
        return d;
      },
      py::arg("model"), py::arg("x"), py::kw_only(), py::arg("scale") = py::none(), py::arg("sigma") = py::none());

  m.def(
      "predict",
      [](const CsPnnModel& model, const Matrix& x) {
        if (x.ndim() != 2) throw ContractError("features must be a 2-D array");
        const auto d = static_cast<std::size_t>(x.shape(1));
        std::vector<Label> out;
        for (py::ssize_t i = 0; i < x.shape(0); ++i) {
          const FeatureView row(x.data() + static_cast<std::size_t>(i) * d, d);
          out.push_back(model.outputs()[forward(model, row).winner].label);
        }
        return out;
      },
      py::arg("model"), py::arg("x"));

  m.def(
      "unlearn_units",
      [](CsPnnModel& model, const std::vector<std::uint64_t>& ids) {
        std::vector<UnitId> v;
        for (auto id : ids) v.push_back(UnitId{id});
        unlearn_units(model, v);
      },
      py::arg("model"), py::arg("ids"));
  m.def(
      "unlearn_classes", [](CsPnnModel& model, const std::vector<Label>& labels) { unlearn_classes(model, labels); },
      py::arg("model"), py::arg("labels"));

  py::class_<StaticPnnModel>(m, "StaticModel")
      .def_property_readonly("network", &StaticPnnModel::network)
      .def_property_readonly("max_pair_distance", &StaticPnnModel::max_pair_distance)
      .def_property_readonly("sigma", &StaticPnnModel::sigma)
      .def_property_readonly("hidden_count", &StaticPnnModel::hidden_count);
  m.def(
      "build_static", [](const Matrix& x, const std::vector<Label>& y) { return build_static(to_dataset(x, y)); },
      py::arg("x"), py::arg("y"));
  m.def(
      "evaluate_static",
      [](const StaticPnnModel& model, const Matrix& x, const std::vector<Label>& y, std::optional<double> sigma) {
        const auto data = to_dataset(x, y);
        EvalReport r;
        {
          py::gil_scoped_release release;
          r = evaluate_static(model, data, sigma);
        }
        return report_dict(r);
      },
      py::arg("model"), py::arg("x"), py::arg("y"), py::kw_only(), py::arg("sigma") = py::none());

  m.def(
      "load_csv",
      [](const std::filesystem::path& path, int label_column, const std::string& delimiter, std::size_t skip_lines) {
        CsvOptions o;
        o.label_column = label_column;
        if (delimiter == "whitespace") {
          o.delimiter = Delimiter::kWhitespace;
        } else if (delimiter != "comma") {
          throw ConfigError("delimiter must be 'comma' or 'whitespace'");
        }
        o.skip_lines = skip_lines;
        return from_dataset(load_csv(path, o));
      },
      py::arg("path"), py::arg("label_column") = -1, py::arg("delimiter") = "comma", py::arg("skip_lines") = 0,
      "Returns (features, labels).");

  m.def(
      "load_idx",
      [](const std::filesystem::path& images, const std::filesystem::path& labels) {
        return from_dataset(load_idx(images, labels));
      },
      py::arg("images"), py::arg("labels"));

  py::class_<NormalizationParams>(m, "Normalization")
      .def(py::init<>())
      .def(py::init([](std::vector<double> lo, std::vector<double> hi) {
             if (lo.size() != hi.size()) throw ContractError("min and max differ in length");
             return NormalizationParams{std::move(lo), std::move(hi)};
           }),
           py::arg("min"), py::arg("max"))
      .def_readonly("min", &NormalizationParams::min)
      .def_readonly("max", &NormalizationParams::max)
      .def("__eq__", [](const NormalizationParams& a, const NormalizationParams& b) { return a == b; })
      .def("apply", [](const NormalizationParams& p, const Matrix& x) {
        if (x.ndim() != 2) throw ContractError("features must be a 2-D array");
        Matrix out({x.shape(0), x.shape(1)});
        const auto d = static_cast<std::size_t>(x.shape(1));
        for (py::ssize_t i = 0; i < x.shape(0); ++i) {
          const auto row = normalize(p, FeatureView(x.data() + static_cast<std::size_t>(i) * d, d));
          std::copy(row.begin(), row.end(), out.mutable_data() + static_cast<std::size_t>(i) * d);
        }
        return out;
      });
  m.def(
      "fit_normalizer",
      [](const Matrix& x) {
        return fit_normalizer(to_dataset(x, std::vector<Label>(static_cast<std::size_t>(x.shape(0)), "")));
      },
      py::arg("x"));

  m.def(
      "cil_group_sizes", [](std::size_t n, int task) { return cil_group_sizes(n, task); }, py::arg("class_count"),
      py::arg("task"));

  m.def(
      "run_protocol",
      [](const std::string& scenario, const Matrix& x_train, const std::vector<Label>& y_train, const Matrix& x_test,
         const std::vector<Label>& y_test, const std::string& name, int task, int divisor, int iterations, int runs,
         std::uint64_t seed, bool with_baseline) {
        ProtocolConfig c;
        c.scenario = parse_scenario(scenario);
        c.task = task;
        c.divisor = divisor;
        c.iterations = iterations;
        c.runs = runs;
        c.seed = seed;
        c.with_baseline = with_baseline;
        const auto data = prepare(name, DatasetSplits{to_dataset(x_train, y_train), to_dataset(x_test, y_test)});
        std::vector<StageRecord> records;
        {
          py::gil_scoped_release release;
          records = run_protocol(data, c);
        }
        py::list out;
        for (const auto& r : records) out.append(record_dict(r));
        return out;
      },
      py::arg("scenario"), py::arg("x_train"), py::arg("y_train"), py::arg("x_test"), py::arg("y_test"),
      py::kw_only(), py::arg("name") = "data", py::arg("task") = 1, py::arg("divisor") = 2, py::arg("iterations") = 4,
      py::arg("runs") = 10, py::arg("seed") = 1, py::arg("with_baseline") = true,
      "Normalizes with the training range, then runs a scenario. Returns stage records as dicts.");

  m.def(
      "save_model",
      [](const std::filesystem::path& path, const CsPnnModel& model, std::optional<NormalizationParams> norm,
         const std::string& dataset) { save_model(path, ModelFile{model, std::move(norm), dataset}); },
      py::arg("path"), py::arg("model"), py::arg("normalization") = py::none(), py::arg("dataset") = "");
  m.def(
      "load_model",
      [](const std::filesystem::path& path) {
        auto f = load_model(path);
        return py::make_tuple(std::move(f.model), f.normalization ? py::cast(*f.normalization) : py::none(),
                              f.dataset);
      },
      py::arg("path"), "Returns (model, normalization or None, dataset name).");
  m.def(
      "model_to_json", [](const CsPnnModel& model) { return model_to_json(ModelFile{model, std::nullopt, ""}); },
      py::arg("model"));
}
