#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace graphsos::cli {

/// Shared settings for every subcommand. A config file (`key=value` lines,
/// `#` comments) sets these by field name; command-line flags win.
struct RunConfig {
  std::string input;
  std::string output;
  std::string params;
  std::string backend = "mock:order-insensitive";
  std::string oracle = "builtin";
  std::string endpoint = "mock:cot";
  std::string kind = "feature-edge";
  std::string optimizer = "adam";
  std::string encoder;  // empty: per-subcommand default
  int n_max = 20;
  int k = 2;
  int heads = 4;
  int dim = 64;
  std::size_t m = 10;
  double tau = 0.5;
  double T = 5.0;
  double beta = 0.1;
  double lr = 0.05;
  std::size_t steps = 500;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  int concurrency = 1;
  double baseline_decay = 0.9;
  double temperature = 0.9;
  int max_tokens = 512;
};

/// Applies `key=value` lines to `config`; throws graphsos::FormatError on
/// unknown keys or malformed values.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

/// Exit status: 0 success, 1 usage error, 2 runtime error.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace graphsos::cli
