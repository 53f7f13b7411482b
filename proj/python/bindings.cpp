#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dpptest/cli.hpp"
#include "dpptest/error.hpp"
#include "dpptest/estimator.hpp"
#include "dpptest/hardness.hpp"
#include "dpptest/kernel.hpp"
#include "dpptest/oracle.hpp"
#include "dpptest/sampler.hpp"
#include "dpptest/tester.hpp"

namespace py = pybind11;
using namespace dpptest;

namespace {

// Tables cross the boundary as flat float arrays indexed by subset mask and
// sample batches as uint32 mask arrays.
using Masks = py::array_t<std::uint32_t>;

int ground_size(std::size_t table_size) {
  int n = 0;
  while ((std::size_t{1} << n) < table_size) ++n;
  if ((std::size_t{1} << n) != table_size || n == 0) {
    throw Error(ErrorCode::InvalidArgument, "table length must be a power of two, at least 2");
  }
  return n;
}

DiscreteDistribution to_table(const std::vector<double>& probs) {
  return DiscreteDistribution(ground_size(probs.size()), probs);
}

py::array_t<double> from_table(const DiscreteDistribution& p) {
  return py::array_t<double>(static_cast<py::ssize_t>(p.size()), p.probs().data());
}

std::vector<Subset> to_subsets(const Masks& masks) {
  auto view = masks.unchecked<1>();
  std::vector<Subset> out;
  out.reserve(static_cast<std::size_t>(view.shape(0)));
  for (py::ssize_t i = 0; i < view.shape(0); ++i) out.emplace_back(view(i));
  return out;
}

Masks from_subsets(const std::vector<Subset>& samples) {
  Masks out(static_cast<py::ssize_t>(samples.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < samples.size(); ++i) view(static_cast<py::ssize_t>(i)) = samples[i].mask();
  return out;
}

std::uint32_t mask_of(const std::vector<int>& elements) {
  return Subset::of(std::span<const int>(elements)).mask();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DPP sampling, learning and testing";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def(
      "validate_kernel", [](const Eigen::MatrixXd& k) { return validate(k).matrix(); }, py::arg("kernel"),
      "Checks symmetry and spectrum, returns the kernel with dust eigenvalues clamped.");
  m.def(
      "project_box", [](const Eigen::MatrixXd& k, double z) { return project_box(k, z).matrix(); },
      py::arg("matrix"), py::arg("z") = 0.0);
  m.def(
      "exact_distribution",
      [](const Eigen::MatrixXd& k) { return from_table(exact_distribution(validate(k))); }, py::arg("kernel"));
  m.def(
      "atom_probability",
      [](const Eigen::MatrixXd& k, const std::vector<int>& subset) {
        return atom_probability(validate(k), Subset(mask_of(subset)));
      },
      py::arg("kernel"), py::arg("subset"));
  m.def(
      "marginal",
      [](const Eigen::MatrixXd& k, const std::vector<int>& subset) {
        return marginal(validate(k), Subset(mask_of(subset)));
      },
      py::arg("kernel"), py::arg("subset"));

  m.def(
      "sample_dpp",
      [](const Eigen::MatrixXd& k, std::size_t count, std::uint64_t seed, int threads) {
        const auto kernel = validate(k);
        SampleBatch batch;
        {
          py::gil_scoped_release release;
          batch = sample_dpp(kernel, count, seed, threads);
        }
        return from_subsets(batch.samples);
      },
      py::arg("kernel"), py::arg("m"), py::arg("seed"), py::arg("threads") = 1);
  m.def(
      "sample_table",
      [](const std::vector<double>& p, std::size_t count, std::uint64_t seed) {
        return from_subsets(sample_table(to_table(p), count, seed).samples);
      },
      py::arg("table"), py::arg("m"), py::arg("seed"));

  m.def(
      "distances",
      [](const std::vector<double>& q, const std::vector<double>& p) {
        const auto r = oracle::distances(to_table(q), to_table(p));
        return py::dict(py::arg("l1") = r.l1, py::arg("chi2") = r.chi2);
      },
      py::arg("q"), py::arg("p"));
  m.def(
      "chi2_l1_statistic",
      [](const Masks& samples, const std::vector<double>& p, double eps) {
        const auto table = to_table(p);
        return chi2_l1_statistic(SubsetCounts::from(table.n(), to_subsets(samples)), table, eps);
      },
      py::arg("samples"), py::arg("table"), py::arg("eps"));
  m.def(
      "required_samples",
      [](int n, double eps, double delta, const std::string& candidates, double c_test) {
        return required_samples(n, eps, delta, BigCount(candidates), c_test);
      },
      py::arg("n"), py::arg("eps"), py::arg("delta"), py::arg("candidates") = "1", py::arg("c_test") = 1.0);
  m.def(
      "bracketing_params",
      [](int n, double eps, double delta, double alpha, double zeta) {
        const auto bp = bracketing_params(n, eps, delta, alpha, zeta);
        return py::dict(py::arg("m") = bp.m, py::arg("xi") = bp.xi, py::arg("granularity") = bp.granularity,
                        py::arg("varsigma") = bp.varsigma, py::arg("half_width") = bp.half_width,
                        py::arg("diagonal_count") = bp.diagonal_count);
      },
      py::arg("n"), py::arg("eps"), py::arg("delta"), py::arg("alpha"), py::arg("zeta"));

  py::class_<TesterReport>(m, "TesterReport")
      .def_property_readonly("accept", [](const TesterReport& r) { return r.verdict.accept; })
      .def_property_readonly("z", [](const TesterReport& r) { return r.verdict.z; })
      .def_property_readonly("threshold", [](const TesterReport& r) { return r.verdict.threshold; })
      .def_property_readonly("candidate_index", [](const TesterReport& r) { return r.verdict.candidate_index; })
      .def_property_readonly("candidates", [](const TesterReport& r) { return r.candidate_count.str(); })
      .def_readonly("evaluated", &TesterReport::evaluated)
      .def_readonly("m_learn", &TesterReport::m_learn)
      .def_readonly("m_test", &TesterReport::m_test)
      .def_readonly("m_required", &TesterReport::m_required)
      .def_readonly("audit_min_l1", &TesterReport::audit_min_l1)
      .def("__repr__", [](const TesterReport& r) {
        std::ostringstream s;
        s << "TesterReport(accept=" << (r.verdict.accept ? "True" : "False") << ", z=" << r.verdict.z
          << ", threshold=" << r.verdict.threshold << ")";
        return s.str();
      });

  m.def(
      "dpp_tester",
      [](int n, const Masks& samples, double eps, double delta, double alpha, double zeta, const std::string& mode,
         double c_test, std::optional<std::uint64_t> varsigma, std::optional<std::uint64_t> diagonal_count,
         std::uint64_t candidate_cap, bool allow_over_cap, bool enforce_sample_size, int threads) {
        TesterConfig tc;
        tc.eps = eps;
        tc.delta = delta;
        tc.alpha = alpha;
        tc.zeta = zeta;
        if (mode != "normal" && mode != "general") throw Error(ErrorCode::InvalidArgument, "mode: normal or general");
        tc.mode = mode == "general" ? TesterMode::General : TesterMode::Normal;
        tc.c_test = c_test;
        tc.grid.varsigma = varsigma;
        tc.grid.diagonal_count = diagonal_count;
        tc.grid.candidate_cap = candidate_cap;
        tc.grid.allow_over_cap = allow_over_cap;
        tc.enforce_sample_size = enforce_sample_size;
        tc.threads = threads;
        const auto subsets = to_subsets(samples);
        py::gil_scoped_release release;
        return dpp_tester(n, subsets, tc);
      },
      py::arg("n"), py::arg("samples"), py::kw_only(), py::arg("eps") = 0.1, py::arg("delta") = 0.1,
      py::arg("alpha") = 0.0, py::arg("zeta") = 0.5, py::arg("mode") = "normal", py::arg("c_test") = 1.0,
      py::arg("varsigma") = py::none(), py::arg("diagonal_count") = py::none(),
      py::arg("candidate_cap") = kDefaultCandidateCap, py::arg("allow_over_cap") = false,
      py::arg("enforce_sample_size") = true, py::arg("threads") = 1);

  m.def(
      "hard_instance",
      [](int n, double eps_prime, std::uint64_t seed) {
        const auto inst = hard_instance(n, eps_prime, seed);
        return py::dict(py::arg("n") = inst.n, py::arg("eps_prime") = inst.eps_prime,
                        py::arg("seed") = inst.seed, py::arg("r") = inst.r,
                        py::arg("normalizer") = inst.normalizer, py::arg("h") = from_table(inst.h));
      },
      py::arg("n"), py::arg("eps_prime"), py::arg("seed"));
  m.def(
      "witness_set",
      [](int n, double eps_prime, std::uint64_t seed) {
        return from_subsets(witness_set(hard_instance(n, eps_prime, seed)));
      },
      py::arg("n"), py::arg("eps_prime"), py::arg("seed"));
  m.def(
      "is_log_submodular", [](const std::vector<double>& f) { return is_log_submodular(to_table(f)); },
      py::arg("table"));
  m.def(
      "helper_inequality",
      [](double a, double b, double eps_prime) {
        const auto r = helper_inequality(a, b, eps_prime);
        return py::make_tuple(r.lhs, r.holds);
      },
      py::arg("a"), py::arg("b"), py::arg("eps_prime"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a dpptest subcommand; returns (exit code, stdout, stderr).");
}
