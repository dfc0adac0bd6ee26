#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thermoform/constructions.hpp"
#include "thermoform/ergopt.hpp"
#include "thermoform/error.hpp"
#include "thermoform/potential.hpp"
#include "thermoform/pressure.hpp"
#include "thermoform/report.hpp"
#include "thermoform/splice.hpp"

namespace py = pybind11;
using namespace thermoform;

namespace {

AsymptoteMode parse_mode(const std::string& mode) {
  if (mode == "table") return AsymptoteMode::Table;
  if (mode == "intended") return AsymptoteMode::Intended;
  throw Error(ErrorCode::InvalidArgument, "mode must be \"table\" or \"intended\"");
}

py::dict gap_dict(const GapPoint& p) {
  py::dict d;
  d["t"] = p.t;
  d["gap"] = p.gap;
  d["log_gap"] = p.log_gap;
  d["enclosure"] = p.enclosure;
  return d;
}

}  // namespace

PYBIND11_MODULE(_thermoform, m) {
  m.doc() = "Pressure curves, gaps and constructions for subshifts of finite type";
  m.attr("__version__") = kVersion;

  static py::handle error = py::exception<Error>(m, "Error").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, ((std::string(error_code_name(e.code())) + ": ") + e.what()).c_str());
    }
  });

  py::class_<Sft>(m, "Sft")
      .def_static("full_shift", &Sft::full_shift, py::arg("alphabet_size"))
      .def_static("golden_mean", &Sft::golden_mean)
      .def_static("from_matrix", &Sft::from_matrix, py::arg("rows"))
      .def_static("parse", [](const std::string& text) { return parse_sft(text); }, py::arg("text"))
      .def_static("load", &load_sft, py::arg("path"))
      .def_property_readonly("alphabet_size", &Sft::alphabet_size)
      .def_property_readonly("mixing_length", &Sft::mixing_length)
      .def("admissible", [](const Sft& s, const std::string& w) { return s.admissible(word_from_string(w)); })
      .def("matrix", &Sft::matrix)
      .def("to_json", [](const Sft& s) { return sft_to_json(s); });

  m.def("topological_entropy", &topological_entropy, py::arg("sft"));
  m.def("word_count", &word_count, py::arg("sft"), py::arg("n"));

  py::class_<LocallyConstantPotential>(m, "Potential")
      .def_property_readonly("depth", &LocallyConstantPotential::depth)
      .def_property_readonly("truncation_error", &LocallyConstantPotential::truncation_error)
      .def_property_readonly("holder_c", &LocallyConstantPotential::holder_c)
      .def_property_readonly("min_value", &LocallyConstantPotential::min_value)
      .def_property_readonly("max_value", &LocallyConstantPotential::max_value)
      .def("value", [](const LocallyConstantPotential& p, const std::string& w) { return p.value(word_from_string(w)); })
      .def("birkhoff_sum", [](const LocallyConstantPotential& p, const std::string& w) { return birkhoff_sum(p, word_from_string(w)); });

  m.def(
      "potential_from_json",
      [](const Sft& sft, const std::string& text, int depth) {
        auto [spec, d] = parse_potential_spec(text);
        if (depth <= 0) depth = d;
        if (depth <= 0) depth = default_depth(spec);
        return build_potential(sft, spec, depth);
      },
      py::arg("sft"), py::arg("text"), py::arg("depth") = 0);

  m.def(
      "pressure",
      [](const LocallyConstantPotential& pot, double t) {
        const auto r = pressure(pot, t);
        return py::make_tuple(r.value, r.enclosure_halfwidth);
      },
      py::arg("potential"), py::arg("t"), "(pressure, enclosure half-width)");

  m.def(
      "pressure_curve",
      [](const LocallyConstantPotential& pot, const std::vector<double>& ts, int threads) {
        py::list out;
        std::vector<CurveRow> rows;
        {
          py::gil_scoped_release release;
          rows = pressure_curve(pot, ts, threads);
        }
        for (const auto& r : rows) {
          py::dict d;
          d["t"] = r.t;
          d["pressure"] = r.pressure;
          d["enclosure_halfwidth"] = r.enclosure_halfwidth;
          d["entropy"] = r.entropy;
          d["integral"] = r.integral;
          out.append(d);
        }
        return out;
      },
      py::arg("potential"), py::arg("ts"), py::arg("threads") = 1);

  m.def(
      "block_entropy",
      [](const LocallyConstantPotential& pot, double t, int n) { return block_entropy(equilibrium_state(pot, t), n); },
      py::arg("potential"), py::arg("t"), py::arg("n"), "H(P_n) of the equilibrium state at t");

  m.def(
      "cylinder",
      [](const LocallyConstantPotential& pot, double t, const std::string& w) {
        return equilibrium_state(pot, t).cylinder(word_from_string(w));
      },
      py::arg("potential"), py::arg("t"), py::arg("word"), "equilibrium measure of a cylinder");

  m.def(
      "max_cycle_mean",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges) {
        WeightedDigraph g;
        g.n = n;
        for (const auto& [a, b, w] : edges) {
          if (a < 0 || b < 0 || a >= n || b >= n) throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
          g.edges.push_back({a, b, w});
        }
        return max_cycle_mean(g);
      },
      py::arg("n"), py::arg("edges"));

  m.def(
      "asymptote",
      [](const LocallyConstantPotential& pot, const std::string& mode) {
        const GapSolver s(pot, parse_mode(mode));
        const auto& a = s.asymptote();
        py::dict d;
        d["beta"] = a.beta;
        d["a_min"] = a.a_min;
        d["gamma"] = a.gamma;
        d["b"] = a.b;
        d["component_entropy"] = a.component_entropy;
        d["source"] = a.source;
        return d;
      },
      py::arg("potential"), py::arg("mode") = "table");

  m.def(
      "gap_curve",
      [](const LocallyConstantPotential& pot, const std::vector<double>& ts, const std::string& mode) {
        std::vector<GapPoint> pts;
        DecayFit f;
        {
          py::gil_scoped_release release;
          const GapSolver s(pot, parse_mode(mode));
          for (double t : ts) pts.push_back(s.gap(t));
          f = fit_decay(pts);
        }
        py::list rows;
        for (const auto& p : pts) rows.append(gap_dict(p));
        py::dict fit;
        fit["rate"] = f.rate;
        fit["prefactor"] = f.prefactor;
        fit["residual"] = f.residual;
        fit["usable"] = f.usable;
        fit["verdict"] = f.verdict;
        return py::make_tuple(rows, fit);
      },
      py::arg("potential"), py::arg("ts"), py::arg("mode") = "table", "(rows, decay fit)");

  m.def(
      "convexity_gap",
      [](const LocallyConstantPotential& pot, double t, double h) {
        const auto c = convexity_gap(pot, t, h);
        return py::make_tuple(c.gap, c.enclosure, c.method);
      },
      py::arg("potential"), py::arg("t"), py::arg("h"), "(gap, enclosure, method)");

  m.def(
      "tangent_gap",
      [](const LocallyConstantPotential& pot, double t, double s) {
        const auto g = tangent_gap(pot, t, s);
        return py::make_tuple(g.gap, g.enclosure);
      },
      py::arg("potential"), py::arg("t"), py::arg("s"));

  m.def(
      "nu_closed_form",
      [](double eta, int M) {
        const auto p = nu_closed_form(eta, M);
        return py::make_tuple(p.delta, p.nu_entropy);
      },
      py::arg("eta"), py::arg("M"), "(delta, entropy)");

  m.def(
      "sample_nu",
      [](double eta, int M, std::size_t length, std::uint64_t seed) {
        const auto y = sample_nu(nu_closed_form(eta, M), length, seed);
        return py::bytes(reinterpret_cast<const char*>(y.data()), y.size());
      },
      py::arg("eta"), py::arg("M"), py::arg("length"), py::arg("seed") = 0, "0/1 bytes");

  m.def(
      "rothstein_level",
      [](const std::vector<int>& n_seq, int j) {
        const auto lv = rothstein_level(n_seq, j);
        py::dict d;
        // Arbitrary precision counts travel as Python ints.
        d["word_length"] = py::int_(py::str(lv.word_length.str()));
        d["word_count"] = py::int_(py::str(lv.word_count.str()));
        d["entropy"] = lv.entropy();
        d["explicit"] = lv.explicit_words;
        py::list words;
        for (const Word& w : lv.words) words.append(word_to_string(w));
        d["words"] = words;
        return d;
      },
      py::arg("n_seq"), py::arg("j"));

  m.def(
      "beta_shift",
      [](const std::vector<int>& digits, int max_n) {
        const auto b = beta_shift_from_digits(digits);
        py::dict d;
        d["beta"] = b.beta;
        d["entropy"] = b.entropy();
        d["parry_admissible"] = parry_admissible(digits);
        std::vector<double> counts;
        for (int n = 1; n <= max_n; ++n) counts.push_back(beta_word_count(b, n));
        d["word_counts"] = counts;
        return d;
      },
      py::arg("digits"), py::arg("max_n") = 20);

  m.def("sunny_lower_bound", [](double t, int n_max) { return sunny_lower_bound(t, n_max).value; }, py::arg("t"),
        py::arg("n_max") = 40);
  m.def("generic_upper_curve", &generic_upper_curve, py::arg("alphabet_size"), py::arg("a"), py::arg("k"), py::arg("t"));
}
