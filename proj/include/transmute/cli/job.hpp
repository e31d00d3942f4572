#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "transmute/errors.hpp"
#include "transmute/numerics.hpp"
#include "transmute/spectral.hpp"

namespace transmute::cli {

/// Invalid job configuration: unknown key, wrong type, non-finite number...
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class Representation { legendre, laguerre, hermite };
enum class Task { solve, kernel, eigen, pde, compare, bench };

const char* to_string(Representation r);
const char* to_string(Task t);
Representation representation_from(std::string_view name);
Task task_from(std::string_view name);

struct PotentialSpec {
  std::string expression = "0";
  std::string samples;  // CSV path with columns x, q (and optionally q_im); wins over expression
  bool principal_value_ok = false;
};

struct EigenSpec {
  std::size_t count = 10;
  BoundaryCondition left, right;
  double shift = 0.0;
  std::optional<std::pair<double, double>> range;  // omega range instead of a count
  bool eigenfunctions = false;
  double scan_density = 0.0;
};

struct PdeSpec {
  enum class Method { family, mfs } method = Method::family;
  enum class Shape { rectangle, disk } shape = Shape::rectangle;
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;  // rectangle
  double cx = 0, cy = 0, radius = 1;        // disk
  std::string data = "0";                   // boundary data in x, y
  std::string exact;                        // optional reference for interior errors
  std::size_t basis = 30;                   // family members M
  std::size_t points = 0;                   // boundary points; 0 picks 4 columns each
  std::size_t sources = 40;
  double source_factor = 1.5;
  std::vector<cplx> source_list;  // explicit sources override the circle
  bool pivoted_fallback = false;
  bool constant_term = true;
  std::size_t field_grid = 41;
};

struct BenchSpec {
  std::vector<std::size_t> orders{8, 16, 24, 32, 40};
  std::vector<double> omega{1, 10, 100};
  std::vector<std::size_t> grid_sizes{2000, 4000};
  std::size_t eigen_count = 50;
  std::size_t shooting_steps = 0;  // fixed RK4 steps on [0, b]; 0 means M
  std::size_t repeats = 5;
  std::size_t x_points = 21;
};

struct JobConfig {
  Task task = Task::solve;
  PotentialSpec potential;
  double b = 1.0;
  Representation rep = Representation::legendre;
  std::size_t N = 32;
  std::size_t K_max = 64;
  std::size_t M = 2000;
  std::vector<cplx> omega{1.0};
  std::vector<double> x;  // evaluation points; empty means x_count points on [0, b]
  std::size_t x_count = 101;
  EigenSpec eigen;
  PdeSpec pde;
  BenchSpec bench;
  std::string out = "out";
  bool strict = false;
};

/// Parses and validates a JSON job document.  Every numeric field must be
/// finite, b > 0, M even and >= 8, unknown keys are rejected.
JobConfig parse_job_config(std::string_view json);
/// The effective configuration as JSON (echoed into the manifest).
std::string job_config_json(const JobConfig& config);
/// Top-level keys accepted by parse_job_config.
std::vector<std::string> job_config_keys();

/// Common command-line flags; unset ones leave the document alone.
struct FlagOverrides {
  std::optional<std::string> q, rep, out;
  std::optional<double> b;
  std::optional<std::size_t> N, M;
  bool strict = false;
};

/// Precedence: built-in defaults < config document < task < flags.  `doc` is
/// the config file text (empty for none); returns the merged JSON document
/// ready for parse_job_config.  --q replaces a sample file as well.
std::string apply_flags(std::string_view doc, std::string_view task, const FlagOverrides& flags);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;
inline constexpr int kExitWarnings = 3;  // --strict and at least one numerical warning

/// seed -> formal powers -> kernel -> task.  CSV outputs and manifest.json go
/// to config.out; progress and a summary go to `log`.  Errors are reported
/// with the failing stage and give kExitError.
int run_job(const JobConfig& config, std::ostream& log);

}  // namespace transmute::cli
