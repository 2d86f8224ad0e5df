#pragma once

#include "ogc/brake.hpp"
#include "ogc/domain.hpp"
#include "ogc/metric.hpp"
#include "ogc/obstacle_flow.hpp"
#include "ogc/oracle.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ogc::app {

using json = nlohmann::ordered_json;

inline constexpr const char* kConfigSchema = "ogcflow-config/1";
inline constexpr const char* kResultsSchema = "ogcflow-results/1";

/// Schema violation at a JSON pointer into the config document.
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& msg)
      : Error(ErrorCode::Config, msg), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct WellSpec {
  std::vector<double> lambda;  // oscillator when non-empty
  int dim = 0;                 // polynomial
  std::vector<Monomial> terms;
  double energy = 1.0;
};

struct DomainSpec {
  std::string kind;  // disk | ellipse | implicit | jacobi
  std::vector<double> center;
  double radius = 1.0;
  std::vector<double> semi_axes;
  int dim = 2;
  std::vector<Monomial> terms;
  double delta_star = 0.0;
  double delta = 0.0;  // jacobi
};

struct SweepSpec {
  int grid = 24;
  int segments = 200;
  double dedup_tol = 0.0;
  bool keep_traces = true;
};

struct RunConfig {
  std::optional<WellSpec> well;
  std::optional<DomainSpec> domain;
  std::string metric;  // euclidean | jacobi
  DomainSettings settings;
  int certify_samples = 1024;
  double omega_width = 0.0;
  bool omega_force = false;
  FlowConfig flow;
  SweepSpec sweep;
  BrakeOptions brake;
  int orbit_samples = 200;
  int oracle_grid = 48;
  ShootOptions shoot;
  double compare_tolerance = 1e-2;
  int verify_samples = 256;
};

/// Validates against the versioned schema; unknown keys are errors.
RunConfig parse_config(const json& doc);
RunConfig parse_config_text(const std::string& text);

/// Every field with defaults filled in, in the input schema.
json to_json(const RunConfig& cfg);

/// Instantiated problem: the well, the domain with prepared constants and the metric.
struct Problem {
  std::shared_ptr<const PotentialWell> well;
  Domain domain;
  MetricField metric;
  std::optional<OmegaDelta> omega;  // jacobi domains
};

/// force_omega keeps an uncertified Omega_delta (check-domain reports the margin).
Problem build_problem(const RunConfig& cfg, bool force_omega = false);

}  // namespace ogc::app
