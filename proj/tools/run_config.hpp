#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdirac/assembly.hpp"
#include "pdirac/coefficient_set.hpp"

namespace pdirac::cli {

using json = nlohmann::json;

/// Where a field came from; file sources are hashed into the manifest.
struct FieldSource {
  std::string kind = "zero";  // zero, constant, coefficients, file, canonical_psi
  std::string path;           // resolved path for kind == file
};

struct BandsSection {
  int n1 = 8, n2 = 8;
  std::vector<Eigen::Vector2d> kpoints;  // overrides the uniform grid when nonempty
  int count = 0;
  std::string mode = "automatic";
  bool dump_operator = false;
};

struct SweepSection {
  Eigen::Vector2d e{1.0, 0.0};
  Eigen::Vector2d k_shift = Eigen::Vector2d::Zero();
  Eigen::Vector2d kappa_shift = Eigen::Vector2d::Zero();
  double k1 = kPi;
  std::vector<double> k2{0.0};
  std::vector<double> mu_tilde;
  std::string method = "automatic";
};

struct GaugeSection {
  bool general = false;  // C1/C2 given
  double mu = 1.0;
  std::vector<double> lambdas{0.0};
  double delta = 1e-3;
};

struct VerifySection {
  int mu_over_pi = 16;
  double a = 4.0 * kPi;
  double a0 = 4.0 * kPi;
  double k2 = 0.0;
  int window = 0;  // 0: chosen so that T^pm(mu/2) fits
  int trials = 100;
  double theta = 0.0;
  bool check_admissibility = true;
  double c1 = 0.0;
  double c8 = 0.0;
  std::vector<double> eps_grid;
  double a_prime = 0.0;  // cross-term outer radius, 0: min(a + 2 pi, mu / 2)
};

struct WienerSection {
  int N_max = 1024;
  double theta = 0.5;
  int taylor_terms = 12;
  double samples_per_oscillation = 8.0;
};

struct ProfileSection {
  std::vector<double> b_grid, eps_grid, t_grid;
  std::vector<int> counts;
};

/// Parsed configuration. `effective` is the document with every default
/// filled in; it is what the manifest records.
struct RunConfig {
  std::string source_path;
  std::string base_dir;
  json effective;

  int M = 8;
  int S = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "out";

  GammaBounds bounds;
  json coeff_specs = json::object();     // F, G, H
  json potential_specs = json::object(); // V0..V3
  json reduced_specs = json::object();   // Vt0, Vt3, Psi
  json gauge_specs = json::object();     // C1, C2
  json wiener_W = nullptr;
  json profile_W = nullptr;

  BandsSection bands;
  SweepSection sweep;
  GaugeSection gauge;
  VerifySection verify;
  WienerSection wiener;
  ProfileSection profile;

  FourierGrid grid() const { return FourierGrid(M); }
};

/// Scalar overrides from the command line; unset members leave the config alone.
struct Overrides {
  int M = -1;
  int S = -1;
  long long seed = -1;
  int workers = -1;
  std::string out_dir;
};

/// Reads a JSON document. Throws FormatError on syntax or schema violations.
json read_document(const std::string& path);

/// Throws FormatError for unknown keys, wrong types or out-of-range values.
RunConfig parse_config(const json& doc, const std::string& source_path, const Overrides& ov = {});
RunConfig load_config(const std::string& path, const Overrides& ov = {});

/// Field spec: number, {"constant": x} / {"constant": [re, im]},
/// {"coefficients": [[n1, n2, re, im?], ...]} or {"file": "path"}.
/// `real` certifies Hermitian symmetry (FormatError if it fails).
PeriodicScalarField build_field(const json& spec, const FourierGrid& grid, const std::string& base_dir,
                                bool real, const std::string& name, FieldSource* source = nullptr);

CoefficientSet build_coefficients(const RunConfig& cfg, std::vector<FieldSource>* sources = nullptr);
MatrixPotential build_potential(const RunConfig& cfg, std::vector<FieldSource>* sources = nullptr);

/// Input files referenced by the config (resolved paths), config first.
std::vector<std::string> input_files(const RunConfig& cfg);

struct Diagnostic {
  std::string kind;  // membership, grid, phase_resolution, potential, schema
  std::string message;
};

/// Membership sampling of the coefficients, S >= 2(2M + 1) when S is fixed,
/// and phase resolution for the requested Wiener N_max.
std::vector<Diagnostic> validate_config(const RunConfig& cfg);

}  // namespace pdirac::cli
