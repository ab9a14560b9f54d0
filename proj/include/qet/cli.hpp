#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qet::cli {

enum class Format { Json, Csv };

// Effective parameters of one run. Everything is validated before any
// computation starts and echoed back into the report.
struct RunConfig {
  std::size_t sites = 10;
  double coupling = 1.0;
  std::string boundary = "periodic";
  std::size_t site_a = 0;
  std::size_t site_b = 1;
  std::string axis_a = "x";
  std::string axis_b = "x";
  bool best_axes = false;
  bool axes_explicit = false;  // sweep picks the best axes unless these were given
  std::size_t axis_resolution = 0;
  std::optional<double> theta;
  std::string sizes;          // sweep: comma list of N, empty = --sites
  std::string distances;      // sweep: "lo:hi", empty = 1..N/2
  std::string fit_range = "20:200";
  std::int64_t n_min = 1;
  std::int64_t n_max = 30;
  std::string c_fit_range = "200:2000";
  double c_constant = 1.28;
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  Format format = Format::Json;
  std::string out;
  bool large = false;
};

inline constexpr std::size_t kDefaultMaxSites = 16;
inline constexpr std::size_t kLargeMaxSites = 20;

struct Report {
  nlohmann::ordered_json json;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  bool ok = true;
};

// Throws std::invalid_argument naming the offending parameter.
void validate(const RunConfig& config, std::string_view command);

Report cmd_ground(const RunConfig& config);
Report cmd_teleport(const RunConfig& config);
Report cmd_sweep(const RunConfig& config);
Report cmd_analytic(const RunConfig& config);
Report cmd_cool(const RunConfig& config);

std::string render(const Report& report, Format format);

// Shortest round-trip decimal, '.' separator, independent of locale.
std::string format_number(double value);
std::string csv_escape(std::string_view field);

// "lo:hi" inclusive.
std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text);
std::vector<std::size_t> parse_size_list(std::string_view text);

// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace qet::cli
