#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "hybridsort/assignment.hpp"
#include "hybridsort/config.hpp"
#include "hybridsort/errors.hpp"
#include "hybridsort/geometry.hpp"
#include "hybridsort/io_mot.hpp"
#include "hybridsort/kalman.hpp"
#include "hybridsort/metrics.hpp"
#include "hybridsort/pipeline.hpp"
#include "hybridsort/simulator.hpp"
#include "hybridsort/tracker.hpp"

namespace py = pybind11;
using namespace hybridsort;

namespace {

AssignmentResult solve_lists(const std::vector<std::vector<double>>& costs,
                             const std::optional<std::vector<std::vector<bool>>>& gated) {
  const std::size_t rows = costs.size();
  const std::size_t cols = rows == 0 ? 0 : costs.front().size();
  CostMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (costs[r].size() != cols) throw InputError("cost rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = costs[r][c];
      if (gated && (*gated)[r].at(c)) m.gate(r, c);
    }
  }
  return solve(m);
}

std::vector<Observation> observations_from(const std::vector<std::pair<int, Box>>& obs) {
  std::vector<Observation> out;
  for (const auto& [frame, box] : obs) out.push_back({frame, box});
  return out;
}

}  // namespace

PYBIND11_MODULE(_hybridsort, m) {
  m.doc() = "Multi-object tracking core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Box>(m, "Box")
      .def(py::init<>())
      .def(py::init([](double x1, double y1, double x2, double y2) { return Box{x1, y1, x2, y2}; }),
           py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_static("from_tlwh", &Box::from_tlwh)
      .def_readwrite("x1", &Box::x1)
      .def_readwrite("y1", &Box::y1)
      .def_readwrite("x2", &Box::x2)
      .def_readwrite("y2", &Box::y2)
      .def_property_readonly("width", &Box::width)
      .def_property_readonly("height", &Box::height)
      .def_property_readonly("area", &Box::area)
      .def("__eq__", [](const Box& a, const Box& b) { return a == b; })
      .def("__repr__", [](const Box& b) {
        std::ostringstream s;
        s << "Box(" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << ")";
        return s.str();
      });

  m.def("iou", &iou);
  m.def("hiou", &hiou);
  m.def("hmiou", &hmiou);
  m.def("wmiou", &wmiou);
  m.def("confidence_cost", &confidence_cost);
  m.def("linear_confidence_prediction", &linear_confidence_prediction, py::arg("c_prev"),
        py::arg("c_prev2") = std::nullopt);
  m.def("angle_difference", &angle_difference);
  m.def(
      "rocm_cost",
      [](const std::vector<std::pair<int, Box>>& obs, const Box& det) {
        const auto o = observations_from(obs);
        return rocm_cost(o, det);
      },
      py::arg("observations"), py::arg("detection"),
      "observations: list of (frame, Box), oldest first");
  m.def(
      "cosine_appearance_cost",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine_appearance_cost(a, b);
      });

  py::class_<Match>(m, "Match")
      .def_readonly("row", &Match::row)
      .def_readonly("col", &Match::col)
      .def("__iter__", [](const Match& mt) {
        return py::iter(py::make_tuple(mt.row, mt.col));
      });
  py::class_<AssignmentResult>(m, "AssignmentResult")
      .def_readonly("matches", &AssignmentResult::matches)
      .def_readonly("unmatched_rows", &AssignmentResult::unmatched_rows)
      .def_readonly("unmatched_cols", &AssignmentResult::unmatched_cols);
  m.def("solve", &solve_lists, py::arg("costs"), py::arg("gated") = std::nullopt,
        "Minimum-cost assignment of a row-major cost matrix; gated pairs are never matched.");

  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("measurement_std", &NoiseConfig::measurement_std)
      .def_readwrite("process_std", &NoiseConfig::process_std)
      .def_readwrite("velocity_variance_inflation", &NoiseConfig::velocity_variance_inflation);
  py::class_<KalmanState>(m, "KalmanState")
      .def_readwrite("mean", &KalmanState::mean)
      .def_readwrite("covariance", &KalmanState::covariance);
  m.def("kalman_init", &init_from_detection, py::arg("box"), py::arg("confidence"),
        py::arg("noise") = NoiseConfig{});
  m.def("kalman_predict", &predict, py::arg("state"), py::arg("noise") = NoiseConfig{});
  m.def(
      "kalman_update",
      [](const KalmanState& s, const Box& box, double confidence, const NoiseConfig& noise) {
        return update(s, Measurement::from_box(box, confidence), noise);
      },
      py::arg("state"), py::arg("box"), py::arg("confidence"), py::arg("noise") = NoiseConfig{});
  m.def("kalman_box", [](const KalmanState& s) {
    const BoxEstimate e = state_to_box(s);
    return py::make_tuple(e.box, e.confidence);
  });

  py::class_<TrackerConfig>(m, "TrackerConfig")
      .def(py::init<>())
      .def_static("baseline", [](const std::string& v) { return make_baseline_config(parse_variant(v)); })
      .def_readwrite("lambda1", &TrackerConfig::lambda_velocity)
      .def_readwrite("lambda2_first", &TrackerConfig::lambda_confidence_first)
      .def_readwrite("lambda2_byte", &TrackerConfig::lambda_confidence_byte)
      .def_readwrite("lambda3", &TrackerConfig::lambda_appearance)
      .def_readwrite("high_threshold", &TrackerConfig::high_threshold)
      .def_readwrite("low_threshold", &TrackerConfig::low_threshold)
      .def_readwrite("gate", &TrackerConfig::gate)
      .def_readwrite("min_hits", &TrackerConfig::min_hits)
      .def_readwrite("max_age", &TrackerConfig::max_age)
      .def_readwrite("ema_momentum", &TrackerConfig::ema_momentum)
      .def_readwrite("noise", &TrackerConfig::noise)
      .def("set", [](TrackerConfig& c, const std::string& key, const std::string& value) {
        apply_axis(c, key, value);
      }, "Sets a toggle (tcm=on) or any tracker key by name, e.g. set('gate', '0.2').")
      .def("validate", &TrackerConfig::validate)
      .def("__repr__", [](const TrackerConfig& c) {
        ConfigDocument d;
        d.tracker = c;
        return format_config(d);
      });

  py::class_<Detection>(m, "Detection")
      .def(py::init([](const Box& box, double confidence, std::optional<Embedding> emb) {
             Detection d;
             d.box = box;
             d.confidence = confidence;
             d.embedding = std::move(emb);
             return d;
           }),
           py::arg("box"), py::arg("confidence"), py::arg("embedding") = std::nullopt)
      .def_readwrite("box", &Detection::box)
      .def_readwrite("confidence", &Detection::confidence)
      .def_readwrite("embedding", &Detection::embedding);

  py::class_<TrackedObject>(m, "TrackedObject")
      .def_readonly("id", &TrackedObject::id)
      .def_readonly("box", &TrackedObject::box)
      .def_readonly("confidence", &TrackedObject::confidence);

  py::class_<Tracker>(m, "Tracker")
      .def(py::init<TrackerConfig>(), py::arg("config") = TrackerConfig{})
      .def("step", [](Tracker& t, int frame, std::vector<Detection> dets) {
        for (std::size_t k = 0; k < dets.size(); ++k) dets[k].source_index = k;
        return t.step(frame, dets);
      })
      .def_property_readonly("track_count", [](const Tracker& t) { return t.tracks().size(); });

  py::class_<ResultRow>(m, "ResultRow")
      .def(py::init<>())
      .def_readwrite("frame", &ResultRow::frame)
      .def_readwrite("id", &ResultRow::id)
      .def_readwrite("box", &ResultRow::box)
      .def_readwrite("confidence", &ResultRow::confidence)
      .def("__eq__", [](const ResultRow& a, const ResultRow& b) { return a == b; });
  m.def("read_results", &read_results);
  m.def(
      "write_results",
      [](const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
        write_results(path, rows);
      },
      py::arg("path"), py::arg("rows"));
  m.def("format_result_row", &format_result_row);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init<>())
      .def_readwrite("object_count", &ScenarioSpec::object_count)
      .def_readwrite("frame_count", &ScenarioSpec::frame_count)
      .def_readwrite("seed", &ScenarioSpec::seed)
      .def_readwrite("jitter_std", &ScenarioSpec::jitter_std)
      .def_readwrite("dropout_probability", &ScenarioSpec::dropout_probability)
      .def_readwrite("width_variation", &ScenarioSpec::width_variation)
      .def_readwrite("width_period", &ScenarioSpec::width_period)
      .def_readwrite("aspect_spread", &ScenarioSpec::aspect_spread)
      .def_readwrite("limb_extent", &ScenarioSpec::limb_extent)
      .def_property(
          "motion", [](const ScenarioSpec& s) { return std::string(to_string(s.motion)); },
          [](ScenarioSpec& s, const std::string& v) { s.motion = parse_motion_model(v); });
  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("frame_count",
                             [](const Scenario& s) { return s.detections.size(); })
      .def("export", [](const Scenario& s, const ScenarioSpec& spec,
                        const std::filesystem::path& dir) { export_scenario(s, spec, dir); });
  m.def("generate", &generate);

  py::class_<EvalReport>(m, "EvalReport")
      .def_property_readonly("mota", &EvalReport::mota)
      .def_property_readonly("idf1", &EvalReport::idf1)
      .def_property_readonly("idsw", [](const EvalReport& r) { return r.counts.idsw; })
      .def_property_readonly("fp", [](const EvalReport& r) { return r.counts.fp; })
      .def_property_readonly("fn", [](const EvalReport& r) { return r.counts.fn; })
      .def_property_readonly("gt", [](const EvalReport& r) { return r.counts.gt; });

  m.def(
      "track_scenario",
      [](const Scenario& s, const TrackerConfig& cfg) {
        return run_sequence(cfg, s.detections, s.ground_truth.last_frame()).rows;
      },
      py::arg("scenario"), py::arg("config") = TrackerConfig{});
  m.def(
      "evaluate_scenario",
      [](const Scenario& s, const std::vector<ResultRow>& rows, double thr) {
        return evaluate(s.ground_truth, rows, thr);
      },
      py::arg("scenario"), py::arg("rows"), py::arg("iou_threshold") = kDefaultMatchIou);
}
