#include "dpptest/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "dpptest/error.hpp"

namespace dpptest::io {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace

Json kernel_to_json(const MarginalKernel& kernel) {
  const int n = kernel.n();
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) entries.push_back(kernel(i, j));
  }
  return Json{{"n", n}, {"entries", entries}};
}

MarginalKernel kernel_from_json(const Json& j) {
  const int n = field<int>(j, "n");
  const auto entries = field<std::vector<double>>(j, "entries");
  if (n < 1 || entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::ParseError, "kernel needs n >= 1 and n*n entries");
  }
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = entries[static_cast<std::size_t>(r * n + c)];
  }
  return validate(m);
}

Json distribution_to_json(const DiscreteDistribution& p) {
  return Json{{"n", p.n()}, {"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
}

DiscreteDistribution distribution_from_json(const Json& j) {
  return DiscreteDistribution(field<int>(j, "n"), field<std::vector<double>>(j, "probs"));
}

std::string format_subset(Subset s) {
  if (s.empty()) return "-";
  std::string out;
  for (int e : s.elements()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(e + 1);
  }
  return out;
}

void write_samples(std::ostream& out, const SampleBatch& batch, const std::string& comment) {
  out << "# n=" << batch.n << " m=" << batch.size() << " seed=" << batch.seed << '\n';
  if (!comment.empty()) out << "# " << comment << '\n';
  for (Subset s : batch.samples) out << format_subset(s) << '\n';
}

SampleBatch read_samples(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) parse_error(1, "missing header");
  SampleBatch batch;
  std::uint64_t expected = 0;
  {
    const auto tokens = split(line);
    if (tokens.size() != 4 || tokens[0] != "#") {
      parse_error(1, "header must read '# n=<n> m=<m> seed=<seed>'");
    }
    auto value = [&](std::string_view tok, std::string_view key, auto& out) {
      if (tok.substr(0, key.size()) != key || !parse_number(tok.substr(key.size()), out)) {
        parse_error(1, "bad header field '" + std::string(tok) + "'");
      }
    };
    value(tokens[1], "n=", batch.n);
    value(tokens[2], "m=", expected);
    value(tokens[3], "seed=", batch.seed);
  }
  if (batch.n < 1 || batch.n > kMaxGroundSet) parse_error(1, "n out of range");

  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    const auto tokens = split(line);
    if (tokens.empty()) parse_error(number, "empty line");
    if (tokens.size() == 1 && tokens[0] == "-") {
      batch.samples.emplace_back();
      continue;
    }
    std::uint32_t mask = 0;
    int previous = 0;
    for (std::string_view tok : tokens) {
      int element = 0;
      if (!parse_number(tok, element)) parse_error(number, "not an index: '" + std::string(tok) + "'");
      if (element < 1 || element > batch.n) {
        parse_error(number, "index " + std::to_string(element) + " outside 1.." + std::to_string(batch.n));
      }
      if (element <= previous) parse_error(number, "indices must be strictly ascending");
      previous = element;
      mask |= 1U << (element - 1);
    }
    batch.samples.emplace_back(mask);
  }
  if (batch.samples.size() != expected) {
    parse_error(number, "header announces " + std::to_string(expected) + " samples, found " +
                            std::to_string(batch.samples.size()));
  }
  return batch;
}

Json grid_to_json(const CandidateGrid& grid) {
  Json entries = Json::array();
  for (std::size_t e = 0; e < grid.entry_count(); ++e) {
    const auto [i, j] = grid.entry(e);
    entries.push_back(Json{{"i", i + 1}, {"j", j + 1}, {"candidates", grid.list(e)}});
  }
  return Json{{"n", grid.n()},
              {"varsigma", grid.varsigma()},
              {"size", grid.size().str()},
              {"entries", entries}};
}

Json hard_instance_to_json(const HardInstance& inst) {
  std::string bits(inst.r.size(), '0');
  for (std::size_t s = 0; s < inst.r.size(); ++s) {
    if (inst.r[s] == 1) bits[s] = '1';
  }
  return Json{{"n", inst.n},
              {"eps_prime", inst.eps_prime},
              {"seed", inst.seed},
              {"L_r", inst.normalizer},
              {"r", bits}};
}

HardInstance hard_instance_from_json(const Json& j) {
  const int n = field<int>(j, "n");
  const auto bits = field<std::string>(j, "r");
  std::vector<std::int8_t> r(bits.size());
  for (std::size_t s = 0; s < bits.size(); ++s) {
    if (bits[s] != '0' && bits[s] != '1') throw Error(ErrorCode::ParseError, "r must be a bitstring");
    r[s] = bits[s] == '1' ? 1 : -1;
  }
  HardInstance inst =
      hard_instance_from_signs(n, field<double>(j, "eps_prime"), std::move(r), field<std::uint64_t>(j, "seed"));
  if (inst.normalizer != field<double>(j, "L_r")) {
    throw Error(ErrorCode::ParseError, "stored L_r does not match the signs");
  }
  return inst;
}

Json report_to_json(const TesterReport& report, const TesterConfig& config, std::uint64_t seed) {
  const TestVerdict& v = report.verdict;
  Json params{{"eps", config.eps}, {"delta", config.delta}, {"alpha", report.alpha}};
  if (report.general) {
    params["z_bar"] = report.general->z_bar;
    params["m_star"] = report.general->m_star;
    params["c2"] = config.c2;
  } else {
    params["zeta"] = report.zeta;
  }
  params["c_test"] = config.c_test;
  return Json{{"decision", v.accept ? "accept" : "reject"},
              {"Z_best", v.z},
              {"C", v.threshold},
              {"m", report.m_total},
              {"m_learn", report.m_learn},
              {"m_test", report.m_test},
              {"candidate_index", v.candidate_index ? Json(*v.candidate_index) : Json(nullptr)},
              {"candidates", report.candidate_count.str()},
              {"evaluated", report.evaluated},
              {"mode", report.mode == TesterMode::General ? "general" : "normal"},
              {"params", params},
              {"seed", seed}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

SampleBatch read_samples_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_samples(in);
}

void write_samples_file(const std::filesystem::path& path, const SampleBatch& batch,
                        const std::string& comment) {
  std::ostringstream out;
  write_samples(out, batch, comment);
  write_text_file(path, out.str());
}

}  // namespace dpptest::io
