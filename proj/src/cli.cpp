#include "dpptest/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/math/distributions/binomial.hpp>

#include "dpptest/error.hpp"
#include "dpptest/generators.hpp"
#include "dpptest/hardness.hpp"
#include "dpptest/io.hpp"
#include "dpptest/oracle.hpp"
#include "dpptest/parallel.hpp"
#include "dpptest/rng.hpp"
#include "dpptest/sampler.hpp"
#include "dpptest/tester.hpp"

namespace dpptest::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

// Raised for bad flags or config values; maps to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json default_config() {
  return Json{{"n", 4},
              {"eps", 0.25},
              {"delta", 0.1},
              {"alpha", 0.0},
              {"zeta", 0.25},
              {"eps_prime", 0.6},
              {"m", 1000},
              {"seed", 1},
              {"trials", 100},
              {"candidate_cap", kDefaultCandidateCap},
              {"allow_over_cap", false},
              {"c_test", 1.0},
              {"c1", 1.0},
              {"c2", 23.0},
              {"mode", "normal"},
              {"varsigma", nullptr},
              {"diagonal_count", nullptr},
              {"kernel", ""},
              {"samples", ""},
              {"family", 20},
              {"bench_n", {3, 4, 5}},
              {"bench_eps", {0.25, 0.5}},
              {"bench_c", {2, 5, 10, 20, 40}}};
}

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = 1;
  std::optional<int> n;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<double> alpha;
  std::optional<double> zeta;
  std::optional<double> eps_prime;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> candidate_cap;
  std::optional<std::uint64_t> m;
  std::optional<std::string> kernel;
  std::optional<std::string> samples;
  std::optional<std::string> mode;
  std::optional<double> c_test;
  std::optional<std::uint64_t> varsigma;
  std::optional<std::uint64_t> diagonal_count;
  bool allow_over_cap = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file");
  app->add_option("--seed", f.seed, "Base seed");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--threads", f.threads, "Worker threads (never changes results)")
      ->check(CLI::PositiveNumber);
  app->add_option("--n", f.n, "Ground-set size");
  app->add_option("--eps", f.eps, "Distance parameter");
  app->add_option("--delta", f.delta, "Failure probability");
  app->add_option("--alpha", f.alpha, "Normality: smallest nonzero entry");
  app->add_option("--zeta", f.zeta, "Normality: spectral margin");
  app->add_option("--eps-prime", f.eps_prime, "Hard-instance perturbation");
  app->add_option("--trials", f.trials, "Trial count");
  app->add_option("--candidate-cap", f.candidate_cap, "Largest candidate set allowed");
  app->add_option("--m", f.m, "Sample count");
  app->add_option("--kernel", f.kernel, "Kernel JSON file");
  app->add_option("--samples", f.samples, "Sample file");
  app->add_option("--mode", f.mode, "normal or general");
  app->add_option("--c-test", f.c_test, "Testing sample-size constant");
  app->add_option("--varsigma", f.varsigma, "Force the number of off-diagonal subintervals");
  app->add_option("--diagonal-count", f.diagonal_count, "Force the number of diagonal candidates");
  app->add_flag("--allow-over-cap", f.allow_over_cap, "Enumerate candidate sets above the cap");
}

Json resolve(const Flags& f) {
  Json cfg = default_config();
  if (f.config) {
    Json file;
    try {
      file = io::read_json_file(*f.config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      throw ConfigError(e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (!cfg.contains(key)) throw ConfigError("unknown config key \"" + key + "\"");
      cfg[key] = value;
    }
  }
  auto set = [&](const char* key, const auto& opt) {
    if (opt) cfg[key] = *opt;
  };
  set("seed", f.seed);
  set("n", f.n);
  set("eps", f.eps);
  set("delta", f.delta);
  set("alpha", f.alpha);
  set("zeta", f.zeta);
  set("eps_prime", f.eps_prime);
  set("trials", f.trials);
  set("candidate_cap", f.candidate_cap);
  set("m", f.m);
  set("kernel", f.kernel);
  set("samples", f.samples);
  set("mode", f.mode);
  set("c_test", f.c_test);
  set("varsigma", f.varsigma);
  set("diagonal_count", f.diagonal_count);
  if (f.allow_over_cap) cfg["allow_over_cap"] = true;
  return cfg;
}

template <typename T>
T get(const Json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config value \"") + key + "\" has the wrong type");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV with the resolved config as a leading comment line.
class Csv {
 public:
  Csv(const Json& cfg, std::initializer_list<const char*> header) {
    text_ << "# config=" << cfg.dump() << '\n';
    bool first = true;
    for (const char* h : header) {
      text_ << (first ? "" : ",") << h;
      first = false;
    }
    text_ << '\n';
  }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((text_ << (first ? "" : ",") << cell(cells), first = false), ...);
    text_ << '\n';
  }
  std::string str() const { return text_.str(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  template <typename I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }
  std::ostringstream text_;
};

fs::path output_dir(const Flags& f) {
  fs::path dir(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  return dir;
}

GridOptions grid_options(const Json& cfg) {
  GridOptions g;
  g.candidate_cap = get<std::uint64_t>(cfg, "candidate_cap");
  g.allow_over_cap = get<bool>(cfg, "allow_over_cap");
  if (!cfg.at("varsigma").is_null()) g.varsigma = get<std::uint64_t>(cfg, "varsigma");
  if (!cfg.at("diagonal_count").is_null()) g.diagonal_count = get<std::uint64_t>(cfg, "diagonal_count");
  return g;
}

TesterConfig tester_config(const Json& cfg, int threads) {
  TesterConfig t;
  t.eps = get<double>(cfg, "eps");
  t.delta = get<double>(cfg, "delta");
  t.alpha = get<double>(cfg, "alpha");
  t.zeta = get<double>(cfg, "zeta");
  t.c_test = get<double>(cfg, "c_test");
  t.c1 = get<double>(cfg, "c1");
  t.c2 = get<double>(cfg, "c2");
  const auto mode = get<std::string>(cfg, "mode");
  require(mode == "normal" || mode == "general", "mode must be normal or general");
  t.mode = mode == "general" ? TesterMode::General : TesterMode::Normal;
  t.grid = grid_options(cfg);
  t.threads = threads;
  require(t.eps > 0.0 && t.eps < 1.0, "eps must lie in (0, 1)");
  require(t.delta > 0.0 && t.delta < 1.0, "delta must lie in (0, 1)");
  return t;
}

int cmd_sample(const Flags& f, Json cfg, std::ostream& out) {
  const auto kernel_path = get<std::string>(cfg, "kernel");
  require(!kernel_path.empty(), "sample needs --kernel");
  const auto m = get<std::uint64_t>(cfg, "m");
  require(m >= 1, "m must be positive");
  const MarginalKernel kernel = io::kernel_from_json(io::read_json_file(kernel_path));
  cfg["n"] = kernel.n();
  const SampleBatch batch = sample_dpp(kernel, m, get<std::uint64_t>(cfg, "seed"), f.threads);
  const fs::path path = output_dir(f) / "samples.txt";
  io::write_samples_file(path, batch, "config=" + cfg.dump());
  out << "wrote " << path.string() << '\n';
  return kSuccess;
}

int cmd_test(const Flags& f, Json cfg, std::ostream& out) {
  const auto samples_path = get<std::string>(cfg, "samples");
  require(!samples_path.empty(), "test needs --samples");
  const SampleBatch batch = io::read_samples_file(samples_path);
  cfg["n"] = batch.n;
  const TesterConfig tc = tester_config(cfg, f.threads);
  const TesterReport report = dpp_tester(batch.n, batch.samples, tc);
  Json j = io::report_to_json(report, tc, batch.seed);
  j["config"] = cfg;
  const fs::path path = output_dir(f) / "verdict.json";
  io::write_json_file(path, j);
  out << j.at("decision").get<std::string>() << '\n';
  return kSuccess;
}

int cmd_learn(const Flags& f, Json cfg, std::ostream& out) {
  const auto samples_path = get<std::string>(cfg, "samples");
  require(!samples_path.empty(), "learn needs --samples");
  const SampleBatch batch = io::read_samples_file(samples_path);
  cfg["n"] = batch.n;
  const TesterConfig tc = tester_config(cfg, f.threads);
  const double zeta = tc.mode == TesterMode::General ? general_mode_params(batch.n, tc.eps, tc.c2).z_bar
                                                     : tc.zeta;
  const double alpha = tc.mode == TesterMode::General ? 0.0 : tc.alpha;
  const BracketingParams bp = bracketing_params(batch.n, tc.eps, tc.delta, alpha, zeta);
  const EmpiricalMarginals em = empirical_marginals(batch.n, batch.samples);
  const CandidateGrid grid = candidate_grid(em, bp, tc.grid);
  const SubsetCounts counts = SubsetCounts::from(batch.n, batch.samples);
  const CandidateScore best = best_candidate(grid, counts, tc.eps, f.threads);

  const fs::path dir = output_dir(f);
  Json g = io::grid_to_json(grid);
  g["config"] = cfg;
  g["params"] = Json{{"m", bp.m}, {"xi", bp.xi}, {"granularity", bp.granularity},
                     {"varsigma", bp.varsigma}, {"half_width", bp.half_width},
                     {"diagonal_count", bp.diagonal_count}};
  io::write_json_file(dir / "grid.json", g);
  Json k = io::kernel_to_json(grid.candidate(best.index));
  k["candidate_index"] = best.index;
  k["Z"] = best.z;
  k["config"] = cfg;
  io::write_json_file(dir / "best_kernel.json", k);
  out << "candidates " << grid.size().str() << ", best index " << best.index << '\n';
  return kSuccess;
}

struct SuiteResult {
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  double worst = 0.0;  // suite-specific margin summary
  bool pass = true;
};

int cmd_verify(const Flags& f, const Json& cfg, std::ostream& out) {
  const auto seed = get<std::uint64_t>(cfg, "seed");
  const auto trials = get<std::uint64_t>(cfg, "trials");
  require(trials >= 1, "trials must be positive");
  const int threads = f.threads;
  Csv csv(cfg, {"suite", "case", "n", "value", "bound", "holds"});
  Json suites = Json::object();
  auto record = [&](const char* name, const SuiteResult& r, Json extra = Json::object()) {
    extra["cases"] = r.cases;
    extra["violations"] = r.violations;
    extra["worst_margin"] = r.worst;
    extra["pass"] = r.pass;
    suites[name] = extra;
  };

  // Singular values of K - I_{J̄} for zeta-normal kernels.
  {
    struct Row { int n; double sigma, bound; bool holds; };
    std::vector<Row> rows(trials);
    parallel_for(trials, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        Rng rng = Rng::child(child_seed(seed, 4), t);
        const int n = 2 + static_cast<int>(t % 5);
        const double zeta = rng.uniform(0.01, 0.5);
        const MarginalKernel k = random_kernel(n, rng, zeta, 1.0 - zeta);
        const SingularValueReport rep = min_singular_check(k, zeta);
        rows[t] = {n, rep.worst_sigma, rep.bound, rep.holds};
      }
    });
    SuiteResult r;
    r.worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < rows.size(); ++t) {
      csv.row("singular_value", t, rows[t].n, rows[t].sigma, rows[t].bound, rows[t].holds);
      ++r.cases;
      r.violations += rows[t].holds ? 0 : 1;
      r.worst = std::min(r.worst, rows[t].sigma - rows[t].bound);
    }
    r.pass = r.violations == 0;
    record("singular_value", r);
  }

  // Determinant perturbation bound.
  {
    const std::uint64_t count = 100 * trials;
    struct Row { int n; double lhs, rhs; bool holds; };
    std::vector<Row> rows(count);
    parallel_for(count, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        Rng rng = Rng::child(child_seed(seed, 6), t);
        const int n = 1 + static_cast<int>(t % 6);
        const Eigen::MatrixXd b = random_symmetric(n, rng);
        const double scale = std::pow(10.0, rng.uniform(-4.0, 0.0));
        const Eigen::MatrixXd e = t == 0 ? Eigen::MatrixXd::Zero(n, n)
                                         : Eigen::MatrixXd(random_symmetric(n, rng, scale));
        const PerturbationReport rep = det_perturbation_bound(b, e);
        rows[t] = {n, rep.lhs, rep.rhs, rep.holds};
      }
    });
    SuiteResult r;
    r.worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < rows.size(); ++t) {
      csv.row("perturbation", t, rows[t].n, rows[t].lhs, rows[t].rhs, rows[t].holds);
      ++r.cases;
      r.violations += rows[t].holds ? 0 : 1;
      r.worst = std::min(r.worst, rows[t].rhs - rows[t].lhs);
    }
    // E = 0 is the equality case.
    r.pass = r.violations == 0 && rows[0].lhs == 0.0 && rows[0].rhs == 0.0;
    record("perturbation", r);
  }

  // Helper inequality on random triples inside the precondition.
  {
    const std::uint64_t count = 100 * trials;
    SuiteResult r;
    r.worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 0; t < count; ++t) {
      Rng rng = Rng::child(child_seed(seed, 8), t);
      const double ep = rng.uniform(1e-6, 2.0 / 3.0);
      double a = 0.0;
      double b = 0.0;
      if (t == 0) {
        a = 1.0 + ep;
        b = 1.0 - 0.75 * ep;
      } else {
        b = rng.uniform(0.0, 2.0);
        a = rng.uniform(0.0, helper_rho(ep) * b);
      }
      const HelperReport rep = helper_inequality(a, b, ep);
      csv.row("helper", t, 0, rep.lhs, ep / 4.0, rep.holds);
      ++r.cases;
      r.violations += rep.holds ? 0 : 1;
      r.worst = std::min(r.worst, rep.lhs - ep / 4.0);
    }
    r.pass = r.violations == 0;
    record("helper", r);
  }

  // Coupled batches agree entirely with probability >= 1 - delta.
  {
    const int n = 6;
    const double delta = 0.1;
    const std::size_t m = 100;
    const double z = delta / (2.0 * static_cast<double>(m) * n);
    Rng krng = Rng::child(seed, 5);
    const std::vector<double> spectrum{0.0, 1e-4, 0.3, 0.7, 0.9999, 1.0};
    const MarginalKernel k = kernel_with_spectrum(spectrum, krng);
    std::vector<std::uint8_t> equal(trials);
    parallel_for(trials, 1, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        equal[t] = sample_coupled(k, z, m, child_seed(child_seed(seed, 55), t), threads).all_equal();
      }
    });
    SuiteResult r;
    std::uint64_t hits = 0;
    for (std::size_t t = 0; t < equal.size(); ++t) {
      csv.row("coupling", t, n, static_cast<double>(equal[t]), 1.0 - delta, static_cast<bool>(equal[t]));
      hits += equal[t];
      ++r.cases;
    }
    r.violations = r.cases - hits;
    // One-sided binomial test of H0: rate >= 1 - delta at level 0.01.
    const boost::math::binomial_distribution<double> h0(static_cast<double>(trials), 1.0 - delta);
    const double p_value = boost::math::cdf(h0, static_cast<double>(hits));
    r.worst = static_cast<double>(hits) / static_cast<double>(trials);
    r.pass = p_value >= 0.01;
    record("coupling", r, Json{{"p_value", p_value}, {"z", z}});
  }

  // Cross-path agreement of atom probabilities.
  {
    struct Row { int n; double diff; };
    std::vector<Row> rows(trials);
    parallel_for(trials, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        Rng rng = Rng::child(child_seed(seed, 1), t);
        const int n = 2 + static_cast<int>(t % 5);
        const MarginalKernel k = random_kernel(n, rng);
        const std::vector<double> ie = oracle::distribution_ie(k);
        double diff = 0.0;
        for (std::size_t s = 0; s < ie.size(); ++s) {
          const Subset j(static_cast<std::uint32_t>(s));
          const double eig = atom_probability(k, j, DetMethod::Eigen);
          const double lu = atom_probability(k, j, DetMethod::LU);
          diff = std::max({diff, std::abs(eig - lu), std::abs(eig - ie[s])});
        }
        rows[t] = {n, diff};
      }
    });
    SuiteResult r;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const bool holds = rows[t].diff <= 1e-8;
      csv.row("oracle", t, rows[t].n, rows[t].diff, 1e-8, holds);
      ++r.cases;
      r.violations += holds ? 0 : 1;
      r.worst = std::max(r.worst, rows[t].diff);
    }
    r.pass = r.violations == 0;
    record("oracle", r);
  }

  bool all = true;
  for (const auto& [name, s] : suites.items()) all = all && s.at("pass").get<bool>();
  const fs::path dir = output_dir(f);
  io::write_json_file(dir / "report.json", Json{{"config", cfg}, {"suites", suites}, {"pass", all}});
  io::write_text_file(dir / "cases.csv", csv.str());
  for (const auto& [name, s] : suites.items()) {
    out << name << ": " << (s.at("pass").get<bool>() ? "pass" : "FAIL") << '\n';
  }
  return all ? kSuccess : kSuiteFailure;
}

int cmd_hardness(const Flags& f, const Json& cfg, std::ostream& out) {
  const int n = get<int>(cfg, "n");
  const double ep = get<double>(cfg, "eps_prime");
  const auto seed = get<std::uint64_t>(cfg, "seed");
  const auto trials = get<std::uint64_t>(cfg, "trials");
  const int family_size = get<int>(cfg, "family");
  require(n >= 2 && n <= kDefaultGroundSetCap, "hardness needs 2 <= n <= 16");
  require(family_size >= 0, "family must be >= 0");

  // One shared log-submodular family: the uniform measure, random DPPs and
  // random product measures.
  std::vector<DiscreteDistribution> family{DiscreteDistribution::uniform(n)};
  for (int k = 0; k < family_size; ++k) {
    Rng rng = Rng::child(child_seed(seed, 77), static_cast<std::uint64_t>(k));
    family.push_back(exact_distribution(random_projected_kernel(n, rng)));
    family.push_back(random_product_measure(n, rng));
  }

  struct Row {
    std::uint64_t seed;
    std::size_t witnesses;
    double normalizer, min_l1;
    bool q1, q2;
    std::uint64_t vs_violations;
  };
  std::vector<Row> rows(trials);
  parallel_for(trials, f.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      const std::uint64_t s = child_seed(seed, t);
      const HardInstance inst = hard_instance(n, ep, s);
      const HardnessEvents ev = hardness_events(inst);
      std::uint64_t bad = 0;
      for (Subset w : witness_set(inst)) {
        for (const auto& member : family) bad += vs_contribution(member, inst, w).bound_holds ? 0 : 1;
      }
      rows[t] = {s, ev.witnesses, inst.normalizer, l1_to_log_submodular_lb(inst, family), ev.q1, ev.q2, bad};
    }
  });
  Csv csv(cfg, {"seed", "witnesses", "L_r", "min_l1", "q1", "q2", "vs_violations"});
  std::uint64_t violations = 0;
  for (const Row& r : rows) {
    csv.row(r.seed, r.witnesses, r.normalizer, r.min_l1, r.q1, r.q2, r.vs_violations);
    violations += r.vs_violations;
  }
  const fs::path path = output_dir(f) / "hardness.csv";
  io::write_text_file(path, csv.str());
  out << "wrote " << path.string() << ", V_S violations " << violations << '\n';
  return violations == 0 ? kSuccess : kSuiteFailure;
}

int cmd_bench(const Flags& f, const Json& cfg, std::ostream& out) {
  const auto seed = get<std::uint64_t>(cfg, "seed");
  const auto trials = get<std::uint64_t>(cfg, "trials");
  const auto ns = get<std::vector<int>>(cfg, "bench_n");
  const auto epss = get<std::vector<double>>(cfg, "bench_eps");
  const auto cs = get<std::vector<double>>(cfg, "bench_c");
  require(trials >= 1, "trials must be positive");
  for (int n : ns) require(n >= 1 && n <= 12, "bench_n entries must lie in 1..12");
  for (double e : epss) require(e > 0.0 && e < 1.0, "bench_eps entries must lie in (0, 1)");
  for (double c : cs) require(c > 0.0, "bench_c entries must be positive");

  Csv csv(cfg, {"n", "eps", "c", "m", "accept_rate_identical", "reject_rate_far"});
  std::uint64_t cell = 0;
  for (int n : ns) {
    for (double eps : epss) {
      for (double c : cs) {
        const auto m = static_cast<std::size_t>(std::ceil(c * std::sqrt(std::ldexp(1.0, n)) / (eps * eps)));
        std::vector<std::uint8_t> same(trials);
        std::vector<std::uint8_t> far(trials);
        const std::uint64_t cell_seed = child_seed(seed, cell++);
        parallel_for(trials, f.threads, [&](std::size_t lo, std::size_t hi) {
          for (std::size_t t = lo; t < hi; ++t) {
            Rng rng = Rng::child(cell_seed, t);
            const DiscreteDistribution p = exact_distribution(random_kernel(n, rng));
            // Far input: mix in a point mass at the lightest atom until the
            // l1 distance reaches eps.
            const auto light = static_cast<std::size_t>(
                std::min_element(p.probs().begin(), p.probs().end()) - p.probs().begin());
            const double w = std::min(1.0, eps / (1.0 - p[light]));
            std::vector<double> q(p.probs().begin(), p.probs().end());
            for (double& v : q) v *= 1.0 - w;
            q[light] += w;
            const DiscreteDistribution qd = DiscreteDistribution::normalized(n, std::move(q));
            const std::uint64_t s = rng();
            same[t] = chi2_l1_test(SubsetCounts::from(n, sample_table(p, m, s).samples), p, eps).accept;
            far[t] = !chi2_l1_test(SubsetCounts::from(n, sample_table(qd, m, s + 1).samples), p, eps).accept;
          }
        });
        const auto rate = [&](const std::vector<std::uint8_t>& v) {
          return static_cast<double>(std::count(v.begin(), v.end(), 1)) / static_cast<double>(trials);
        };
        csv.row(n, eps, c, m, rate(same), rate(far));
      }
    }
  }
  const fs::path path = output_dir(f) / "bench.csv";
  io::write_text_file(path, csv.str());
  out << "wrote " << path.string() << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Testing determinantal point processes"};
  app.require_subcommand(1);
  Flags flags;
  struct Entry {
    const char* name;
    const char* help;
    int (*handler)(const Flags&, Json, std::ostream&);
  };
  const Entry entries[] = {
      {"sample", "Draw samples from a kernel file", [](const Flags& f, Json c, std::ostream& o) { return cmd_sample(f, std::move(c), o); }},
      {"test", "Run the DPP tester on a sample file", [](const Flags& f, Json c, std::ostream& o) { return cmd_test(f, std::move(c), o); }},
      {"learn", "Build the candidate grid and pick the best-fitting kernel", [](const Flags& f, Json c, std::ostream& o) { return cmd_learn(f, std::move(c), o); }},
      {"verify-lemmas", "Numerical checks of the matrix and coupling lemmas", [](const Flags& f, Json c, std::ostream& o) { return cmd_verify(f, c, o); }},
      {"hardness", "Hard-instance statistics sweep", [](const Flags& f, Json c, std::ostream& o) { return cmd_hardness(f, c, o); }},
      {"bench", "Acceptance and rejection rates of the identity test", [](const Flags& f, Json c, std::ostream& o) { return cmd_bench(f, c, o); }},
  };
  std::vector<CLI::App*> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_flags(sub, flags);
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  try {
    const Json cfg = resolve(flags);
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (subs[k]->parsed()) return entries[k].handler(flags, cfg, out);
    }
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::IoError || e.code() == ErrorCode::ParseError ? kIoError
                                                                              : kConfigError;
  }
}

}  // namespace dpptest::cli
