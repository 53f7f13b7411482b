#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dpptest/estimator.hpp"
#include "dpptest/hardness.hpp"
#include "dpptest/kernel.hpp"
#include "dpptest/sampler.hpp"
#include "dpptest/tester.hpp"

namespace dpptest::io {

using Json = nlohmann::json;

// Kernel: {"n": n, "entries": [row-major n*n]}
Json kernel_to_json(const MarginalKernel& kernel);
MarginalKernel kernel_from_json(const Json& j);

// Table: {"n": n, "probs": [2^n values by mask]}
Json distribution_to_json(const DiscreteDistribution& p);
DiscreteDistribution distribution_from_json(const Json& j);

// Samples: "# n=<n> m=<m> seed=<seed>" then one subset per line, 1-based
// ascending indices, "-" for the empty set. Further lines starting with '#'
// are comments.
void write_samples(std::ostream& out, const SampleBatch& batch, const std::string& comment = {});
SampleBatch read_samples(std::istream& in);
std::string format_subset(Subset s);

Json grid_to_json(const CandidateGrid& grid);

// {"n", "eps_prime", "seed", "L_r", "r"} with r a string of '1' (+1) and
// '0' (-1) in mask order.
Json hard_instance_to_json(const HardInstance& inst);
HardInstance hard_instance_from_json(const Json& j);

Json report_to_json(const TesterReport& report, const TesterConfig& config, std::uint64_t seed);

// File helpers. Failures to open or write raise IoError, malformed content
// raises ParseError.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);
SampleBatch read_samples_file(const std::filesystem::path& path);
void write_samples_file(const std::filesystem::path& path, const SampleBatch& batch,
                        const std::string& comment = {});

}  // namespace dpptest::io
