#include "cedtest/bootstrap.hpp"
#include "cedtest/errors.hpp"
#include "cedtest/iced.hpp"
#include "cedtest/measures.hpp"
#include "cedtest/report.hpp"
#include "cedtest/simharness.hpp"
#include "cedtest/smoothing.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace cedtest;

namespace {

Dissimilarity make_dissimilarity(const std::string& measure, std::optional<double> gamma,
                                 const Matrix& y1, const Matrix& y2) {
  if (measure == "ced") return Dissimilarity::euclidean();
  if (measure != "rkhs") throw ConfigError("measure must be 'ced' or 'rkhs'");
  return Dissimilarity::neg_gaussian_rkhs(gamma ? *gamma : median_heuristic(stack_rows(y1, y2)));
}

SmoothingSpec make_spec(const std::string& kernel, std::vector<double> h) {
  return {kernel_family_from_string(kernel), BandwidthVector(std::move(h))};
}

py::dict result_dict(const TestResult& r, const TestConfig& cfg) {
  const report::ResultDocument d = report::make_document(r, cfg);
  py::dict out;
  out["statistic"] = r.statistic;
  out["p_value"] = r.p_value;
  out["replicates"] = r.replicates;
  out["B"] = d.B;
  out["seed"] = d.seed;
  out["measure"] = d.measure;
  out["gamma"] = d.gamma;
  out["kernel"] = d.kernel;
  out["bandwidth_rule"] = d.bandwidth_rule;
  out["bandwidths1"] = d.bandwidths1;
  out["bandwidths2"] = d.bandwidths2;
  out["pooled_bandwidths"] = d.pooled_bandwidths;
  out["n1"] = d.n1;
  out["n2"] = d.n2;
  return out;
}

}  // namespace

PYBIND11_MODULE(_cedtest, m) {
  m.doc() = "Conditional energy distance two-sample tests";
  m.attr("__version__") = report::tool_version();

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DataError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def("rot_bandwidths", [](const Matrix& x) { return rot_bandwidths(x).values(); }, py::arg("x"));
  m.def(
      "lscv_bandwidths",
      [](const Matrix& x, std::vector<double> grid, const std::string& kernel) {
        return lscv_bandwidths(x, grid, kernel_family_from_string(kernel)).values();
      },
      py::arg("x"), py::arg("grid"), py::arg("kernel") = "gaussian");
  m.def("median_heuristic", &median_heuristic, py::arg("y"));

  m.def(
      "ced_at",
      [](std::vector<double> x, const Matrix& y1, const Matrix& x1, const Matrix& y2, const Matrix& x2,
         std::vector<double> h1, std::vector<double> h2, const std::string& kernel,
         const std::string& measure, std::optional<double> gamma, bool unbiased) {
        const Sample s1(y1, x1);
        const Sample s2(y2, x2);
        const auto d = make_dissimilarity(measure, gamma, y1, y2);
        const auto a = make_spec(kernel, std::move(h1));
        const auto b = make_spec(kernel, std::move(h2));
        return unbiased ? ced_u_at(x, s1, s2, a, b, d) : ced_v_at(x, s1, s2, a, b, d);
      },
      py::arg("x"), py::arg("y1"), py::arg("x1"), py::arg("y2"), py::arg("x2"), py::arg("h1"),
      py::arg("h2"), py::arg("kernel") = "gaussian", py::arg("measure") = "ced",
      py::arg("gamma") = py::none(), py::arg("unbiased") = false);

  m.def(
      "iced",
      [](const Matrix& y1, const Matrix& x1, const Matrix& y2, const Matrix& x2, std::vector<double> h1,
         std::vector<double> h2, const std::string& kernel, const std::string& measure,
         std::optional<double> gamma, bool naive) {
        const Sample s1(y1, x1);
        const Sample s2(y2, x2);
        const auto d = make_dissimilarity(measure, gamma, y1, y2);
        const auto a = make_spec(kernel, std::move(h1));
        const auto b = make_spec(kernel, std::move(h2));
        return naive ? iced_naive(s1, s2, a, b, d).value : iced_fast(s1, s2, a, b, d).value;
      },
      py::arg("y1"), py::arg("x1"), py::arg("y2"), py::arg("x2"), py::arg("h1"), py::arg("h2"),
      py::arg("kernel") = "gaussian", py::arg("measure") = "ced", py::arg("gamma") = py::none(),
      py::arg("naive") = false);

  m.def(
      "run_test",
      [](const Matrix& y1, const Matrix& x1, const Matrix& y2, const Matrix& x2, std::size_t B,
         std::uint64_t seed, const std::string& measure, std::optional<double> gamma,
         const std::string& bandwidth, std::vector<double> lscv_grid, const std::string& kernel,
         unsigned threads) {
        TestConfig cfg;
        cfg.replicates = B;
        cfg.seed = seed;
        if (measure == "rkhs") {
          cfg.measure = gamma ? MeasureChoice::rkhs_fixed(*gamma) : MeasureChoice::rkhs_median();
        } else if (measure != "ced") {
          throw ConfigError("measure must be 'ced' or 'rkhs'");
        }
        if (bandwidth == "lscv") {
          cfg.bandwidth_rule = BandwidthRule::lscv(std::move(lscv_grid));
        } else if (bandwidth != "rot") {
          throw ConfigError("bandwidth must be 'rot' or 'lscv'");
        }
        cfg.family = kernel_family_from_string(kernel);
        cfg.threads = threads;
        TestResult r;
        {
          py::gil_scoped_release release;
          r = run_test(Sample(y1, x1), Sample(y2, x2), cfg);
        }
        return result_dict(r, cfg);
      },
      py::arg("y1"), py::arg("x1"), py::arg("y2"), py::arg("x2"), py::arg("B") = 299, py::arg("seed") = 0,
      py::arg("measure") = "ced", py::arg("gamma") = py::none(), py::arg("bandwidth") = "rot",
      py::arg("lscv_grid") = std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5, 2.0},
      py::arg("kernel") = "gaussian", py::arg("threads") = 1);

  m.def(
      "generate_setting",
      [](const std::string& setting, const std::string& hypothesis, std::size_t n1, std::size_t n2,
         std::uint64_t seed) {
        const sim::SimSetting s{sim::setting_from_string(setting), sim::hypothesis_from_string(hypothesis),
                                n1, n2, seed};
        const auto [a, b] = sim::generate_setting(s);
        return py::make_tuple(a.y, a.x, b.y, b.x);
      },
      py::arg("setting"), py::arg("hypothesis"), py::arg("n1"), py::arg("n2"), py::arg("seed") = 0);
}
