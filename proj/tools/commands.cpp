#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "pdirac/bands.hpp"
#include "pdirac/coercivity.hpp"
#include "pdirac/coker_gauge.hpp"
#include "pdirac/errors.hpp"
#include "pdirac/field_io.hpp"
#include "pdirac/functionals.hpp"
#include "pdirac/mode_weights.hpp"
#include "pdirac/wiener.hpp"

namespace pdirac::cli {
namespace {

constexpr double kOracleTol = 1e-10;
constexpr double kConstantGaugeTol = 1e-10;

struct Context {
  const RunConfig& cfg;
  RunRecord& rec;
  std::ostream& log;
  // set when a check failed because the parameters are inadmissible
  bool inadmissible = false;
};

json vec2(const Eigen::Vector2d& v) { return json::array({v[0], v[1]}); }

std::string field_text(const PeriodicScalarField& f) {
  std::ostringstream s;
  write_field(s, f);
  return s.str();
}

bool coefficients_are_free(const CoefficientSet& c) {
  const int z = c.grid().zero_index();
  return c.is_constant() && c.G().coeffs()[z] == cplx(1.0) && c.H().coeffs()[z] == cplx(1.0) &&
         c.F().coeffs()[z] == cplx(0.0);
}

template <class V>
bool nonincreasing(const V& v, double slack = 0.0) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] + slack) return false;
  return true;
}

PeriodicScalarField reduced_psi(const RunConfig& cfg, const CoefficientSet& coeffs, RunRecord& rec) {
  const json& spec = cfg.reduced_specs["Psi"];
  if (spec.is_string()) {
    auto can = solve_canonical_gauge(coeffs);
    rec.set("psi_source", "canonical");
    return can.Psi;
  }
  rec.set("psi_source", spec.is_null() ? "zero" : "config");
  return build_field(spec, cfg.grid(), cfg.base_dir, true, "reduced_potential.Psi");
}

std::pair<PeriodicScalarField, PeriodicScalarField> reduced_pair(const RunConfig& cfg) {
  const FourierGrid g = cfg.grid();
  auto get = [&](const char* k) {
    return build_field(cfg.reduced_specs.contains(k) ? cfg.reduced_specs[k] : json(), g, cfg.base_dir,
                       false, std::string("reduced_potential.") + k);
  };
  return {get("Vt0"), get("Vt3")};
}

// ---------------------------------------------------------------- bands

void cmd_bands(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const auto coeffs = build_coefficients(cfg);
  const auto V = build_potential(cfg);
  const FourierGrid g = cfg.grid();
  std::vector<Eigen::Vector2d> ks =
      cfg.bands.kpoints.empty() ? brillouin_grid(cfg.bands.n1, cfg.bands.n2) : cfg.bands.kpoints;

  BandOptions o;
  o.count = cfg.bands.count;
  o.workers = cfg.workers;
  o.mode = cfg.bands.mode == "self_adjoint"      ? BandMode::self_adjoint
           : cfg.bands.mode == "singular_values" ? BandMode::singular_values
                                                 : BandMode::automatic;
  const BandTable t = band_structure(coeffs, V, ks, g, o);

  CsvWriter csv({"k1", "k2", "index", "value"});
  csv.set_integer_columns({2});
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (Eigen::Index j = 0; j < t.values[i].size(); ++j)
      csv.row({ks[i][0], ks[i][1], double(j), t.values[i][j]});
  ctx.rec.write_output("bands.csv", csv.str());
  ctx.rec.set("kpoints", ks.size());
  ctx.rec.set("values_per_k", t.values.empty() ? 0 : t.values[0].size());
  ctx.rec.set("value_kind", t.self_adjoint ? "eigenvalues" : "singular_values");
  ctx.rec.set("max_asymmetry", t.max_asymmetry);
  ctx.rec.add_line("k-points: " + std::to_string(ks.size()) + ", values: " +
                   (t.self_adjoint ? "eigenvalues" : "singular values"));

  bool finite = true;
  for (const auto& v : t.values) finite = finite && v.allFinite();
  ctx.rec.add_check({"finite_values", finite, finite ? 0.0 : 1.0, 0.0, ""});

  if (coefficients_are_free(coeffs) && V.is_zero() && t.self_adjoint) {
    // +-|k + 2 pi N| over the window
    double err = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      std::vector<double> ref;
      for (const Mode& n : g.modes()) {
        const double r = std::hypot(ks[i][0] + kTwoPi * n.n1, ks[i][1] + kTwoPi * n.n2);
        ref.push_back(r);
        ref.push_back(-r);
      }
      std::sort(ref.begin(), ref.end());
      if (cfg.bands.count == 0) {
        for (std::size_t j = 0; j < ref.size(); ++j) err = std::max(err, std::abs(ref[j] - t.values[i][Eigen::Index(j)]));
      } else {
        for (Eigen::Index j = 0; j < t.values[i].size(); ++j) {
          double best = 1e300;
          for (double r : ref) best = std::min(best, std::abs(r - t.values[i][j]));
          err = std::max(err, best);
        }
      }
    }
    ctx.rec.add_check({"free_band_oracle", err <= kOracleTol, err, kOracleTol, "+-|k + 2 pi N|"});
  }

  if (cfg.bands.dump_operator) {
    const Eigen::MatrixXcd a =
        assemble_dirac(coeffs, V, ComplexQuasimomentum::real(ks[0][0], ks[0][1]), g).dense();
    CsvWriter op({"row", "col", "re", "im"});
    op.set_integer_columns({0, 1});
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      for (Eigen::Index c = 0; c < a.cols(); ++c)
        if (a(r, c) != cplx(0.0)) op.row({double(r), double(c), a(r, c).real(), a(r, c).imag()});
    ctx.rec.write_output("operator.csv", op.str());
  }
}

// ---------------------------------------------------------------- sweep

void cmd_sweep(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const auto coeffs = build_coefficients(cfg);
  const auto V = build_potential(cfg);
  SweepSpec s;
  s.e = cfg.sweep.e;
  s.k_shift = cfg.sweep.k_shift;
  s.kappa_shift = cfg.sweep.kappa_shift;
  s.k1 = cfg.sweep.k1;
  s.k2 = cfg.sweep.k2;
  s.mu_tilde = cfg.sweep.mu_tilde;
  s.method = cfg.sweep.method == "dense"       ? SvdMethod::dense
             : cfg.sweep.method == "iterative" ? SvdMethod::iterative
                                               : SvdMethod::automatic;
  s.workers = cfg.workers;
  const SweepReport r = sigma_min_sweep(coeffs, V, s, cfg.grid());

  CsvWriter csv({"k1", "k2", "index", "mu_tilde", "value"});
  csv.set_integer_columns({2});
  for (std::size_t i = 0; i < s.k2.size(); ++i)
    for (std::size_t j = 0; j < s.mu_tilde.size(); ++j)
      csv.row({s.k1, s.k2[i], double(j), s.mu_tilde[j], r.sigma(Eigen::Index(i), Eigen::Index(j))});
  ctx.rec.write_output("sweep.csv", csv.str());
  CsvWriter fl({"index", "mu_tilde", "floor"});
  fl.set_integer_columns({0});
  for (std::size_t j = 0; j < s.mu_tilde.size(); ++j) fl.row({double(j), s.mu_tilde[j], r.floor[Eigen::Index(j)]});
  ctx.rec.write_output("floor.csv", fl.str());

  const double smin = r.sigma.minCoeff();
  ctx.rec.set("sigma_min", smin);
  ctx.rec.set("floor_fit", {{"rate", r.fit.rate}, {"intercept", r.fit.intercept}, {"points", r.fit.points}});
  json flagged = json::array();
  for (auto [i, j] : r.flagged) flagged.push_back({s.k2[std::size_t(i)], s.mu_tilde[std::size_t(j)]});
  ctx.rec.set("flagged", flagged);
  ctx.rec.add_line("points: " + std::to_string(r.sigma.size()) + ", min sigma = " + format_double(smin));
  ctx.rec.add_line("floor fit: log sigma ~ " + format_double(r.fit.intercept) + " - " +
                   format_double(r.fit.rate) + " mu_tilde");

  ctx.rec.add_check({"no_kernel_points", r.flagged.empty(), smin, SweepReport::kFlagLevel,
                     std::to_string(r.flagged.size()) + " flagged"});
  const bool free_line = coefficients_are_free(coeffs) && V.is_zero() && std::abs(s.k1 - kPi) < 1e-14 &&
                         s.e == Eigen::Vector2d(1.0, 0.0) && s.k_shift.isZero(0.0) &&
                         s.kappa_shift.isZero(0.0);
  if (free_line)
    ctx.rec.add_check({"free_sigma_floor", smin >= kPi - kOracleTol, smin, kPi - kOracleTol,
                       "sigma_min >= pi on k1 = pi"});
}

// ---------------------------------------------------------------- gauge

void cmd_gauge(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const auto coeffs = build_coefficients(cfg);
  coeffs.require_membership();
  const CanonicalGauge can = solve_canonical_gauge(coeffs);
  const double imag_phi = can.Phi.hermitian_defect(), imag_psi = can.Psi.hermitian_defect();
  json cj;
  cj["kappa_tilde"] = vec2(can.kappa_tilde);
  cj["c0_lower"] = can.pair.c0_lower;
  cj["c0_variational"] = can.pair.c0_variational;
  cj["c3_star"] = can.c3_star;
  cj["c3_variational"] = can.c3_variational;
  cj["residual"] = can.residual;
  cj["real_part_k"] = can.real_part_k;
  cj["sup_Phi"] = can.Phi.sup_norm();
  cj["sup_Psi"] = can.Psi.sup_norm();
  cj["hermitian_defect_Phi"] = imag_phi;
  cj["hermitian_defect_Psi"] = imag_psi;
  cj["sigma_min"] = can.pair.sigma_min;
  cj["sigma_gap"] = can.pair.sigma_gap;

  const LevelSetReport lv = level_set_diagnostics(can.Psi, cfg.gauge.lambdas, cfg.gauge.delta);
  const ZMapDiagnostics zm = z_map_diagnostics(can);
  cj["min_gradient_quantity"] = lv.min_gradient_quantity;
  cj["z_map_min_ratio"] = zm.min_ratio;
  cj["z_map_periodicity_residual"] = zm.periodicity_residual;
  ctx.rec.set("canonical", cj);
  ctx.rec.write_output("canonical.json", cj.dump(2) + "\n");
  ctx.rec.write_output("Phi.field", field_text(can.Phi));
  ctx.rec.write_output("Psi.field", field_text(can.Psi));
  CsvWriter ls({"lambda", "delta", "measure"});
  for (std::size_t i = 0; i < lv.lambdas.size(); ++i) ls.row({lv.lambdas[i], lv.delta, lv.measure[i]});
  ctx.rec.write_output("level_sets.csv", ls.str());

  ctx.rec.add_line("kappa_tilde = (" + format_double(can.kappa_tilde[0]) + ", " +
                   format_double(can.kappa_tilde[1]) + "), c3* = " + format_double(can.c3_star));
  ctx.rec.add_line("sup |Phi| = " + format_double(can.Phi.sup_norm()) +
                   ", sup |Psi| = " + format_double(can.Psi.sup_norm()) +
                   ", residual = " + format_double(can.residual));

  ctx.rec.add_check({"c0_lower_positive", can.pair.c0_lower > 0.0, can.pair.c0_lower, 0.0, ""});
  ctx.rec.add_check({"kappa_tilde_1_above_c3_star", can.kappa_tilde[0] >= can.c3_star,
                     can.kappa_tilde[0], can.c3_star, ""});
  ctx.rec.add_check({"level_set_gradient_positive", lv.min_gradient_quantity > 0.0,
                     lv.min_gradient_quantity, 0.0, "(d1 Psi)^2 + (d2 Psi - 1)^2"});
  if (coeffs.is_constant()) {
    const double dk = (can.kappa_tilde - Eigen::Vector2d(1.0, 0.0)).norm();
    const double phases = std::max(can.Phi.sup_norm(), can.Psi.sup_norm());
    ctx.rec.add_check({"constant_kappa_tilde", dk <= kConstantGaugeTol, dk, kConstantGaugeTol, "(1, 0)"});
    ctx.rec.add_check({"constant_phases_vanish", phases <= kConstantGaugeTol, phases, kConstantGaugeTol,
                       "Phi = Psi = 0"});
  }

  if (cfg.gauge.general) {
    const FourierGrid g = cfg.grid();
    auto get = [&](const char* k) {
      return build_field(cfg.gauge_specs.contains(k) ? cfg.gauge_specs[k] : json(), g, cfg.base_dir,
                         false, std::string("gauge_data.") + k);
    };
    const auto C1 = get("C1"), C2 = get("C2");
    const GaugeSolution sol = solve_gauge(coeffs, C1, C2);
    const GaugeIdentityResidual id = gauge_identity_residual(coeffs, C1, C2, sol, cfg.gauge.mu);
    std::ostringstream s;
    write_gauge_solution(s, sol);
    ctx.rec.write_output("gauge.json", s.str());
    ctx.rec.set("general", {{"k", vec2(sol.k)},
                            {"kappa", vec2(sol.kappa)},
                            {"defect_plus", sol.defect_plus},
                            {"defect_minus", sol.defect_minus},
                            {"condition", sol.condition},
                            {"real_valued", sol.real_valued},
                            {"identity_residual", id.residual},
                            {"identity_truncation_residual", id.truncation_residual}});
    ctx.rec.add_line("general gauge: k = (" + format_double(sol.k[0]) + ", " + format_double(sol.k[1]) +
                     "), kappa = (" + format_double(sol.kappa[0]) + ", " + format_double(sol.kappa[1]) +
                     "), identity residual " + format_double(id.residual));
    ctx.rec.add_check({"general_gauge_finite", std::isfinite(id.residual) && sol.Phi.coeffs().allFinite() &&
                                                   sol.Psi.coeffs().allFinite(),
                       id.residual, 0.0, ""});
  }
}

// ---------------------------------------------------------------- verify

void cmd_verify(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const VerifySection& v = cfg.verify;
  const auto coeffs = build_coefficients(cfg);
  coeffs.require_membership();
  auto [Vt0, Vt3] = reduced_pair(cfg);
  const PeriodicScalarField Psi = reduced_psi(cfg, coeffs, ctx.rec);
  const double mu = kPi * v.mu_over_pi;
  const Eigen::Vector2d k(kPi, v.k2);
  // window wide enough for T^pm(mu / 2)
  const int radius = v.window > 0 ? v.window : std::max(cfg.M, (3 * v.mu_over_pi + 3) / 4 + 1);
  const FourierGrid window(radius);
  std::mt19937_64 rng(cfg.seed);
  ctx.rec.set("mu", mu);
  ctx.rec.set("window_radius", radius);

  // counting bound
  const ModeWeights w(window, k, mu);
  for (Sign s : {Sign::plus, Sign::minus}) {
    const IndexSet t = index_set_T(w, v.a, s);
    const double n = double(t.analytic_count), lim = 6.0 * kPi * v.a * v.a;
    ctx.rec.add_check({std::string("counting_bound_") + (s == Sign::plus ? "plus" : "minus"),
                       n >= 1.0 && n < lim, n, lim, "1 <= #T < 6 pi a^2"});
  }

  // coercivity
  CoercivityOptions co;
  co.c1 = v.c1;
  co.c8 = v.c8;
  co.a0 = v.a0;
  co.check_admissibility = v.check_admissibility;
  co.theta = v.theta;
  const auto trials = random_spinor_trials(window, v.trials, rng);
  const CoercivityReport cr = verify_coercivity(coeffs, Vt0, Vt3, Psi, mu, v.a, k, window, trials, co);
  CsvWriter csv({"trial", "lhs", "rhs", "margin"});
  csv.set_integer_columns({0});
  for (std::size_t i = 0; i < cr.lhs.size(); ++i) csv.row({double(i), cr.lhs[i], cr.rhs[i], cr.margins[i]});
  ctx.rec.write_output("coercivity.csv", csv.str());
  ctx.rec.set("coercivity", {{"c1", cr.c1}, {"c8", cr.c8}, {"c7_prime", cr.c7_prime},
                             {"min_margin", cr.min_margin}, {"warnings", cr.warnings}});
  ctx.rec.add_check({"coercivity_margins", cr.passed(), cr.min_margin, 0.0,
                     std::to_string(cr.margins.size()) + " trials"});
  for (const auto& wmsg : cr.warnings) ctx.rec.add_line("warning: " + wmsg);
  if (cr.admissibility_checked) {
    const auto& ad = cr.admissibility;
    ctx.rec.set("admissibility", {{"nu", ad.nu}, {"theta", ad.theta}, {"max_plus", ad.max_plus},
                                  {"max_minus", ad.max_minus}, {"tracked", ad.tracked}});
    ctx.rec.add_check({"scaling_admissible", ad.admissible(), std::max(ad.max_plus, ad.max_minus), ad.theta,
                       "mu / pi = " + std::to_string(ad.nu)});
    if (!ad.admissible()) ctx.inadmissible = true;
  }

  // consequences of the relative bounds and the cross-term bound, per component
  const PeriodicScalarField Vp = Vt0 + Vt3, Vm = Vt0 - Vt3;
  const bool rel_ok = mu >= 4.0 * kPi && v.a >= kTwoPi && v.a <= mu / 2.0;
  const double a_prime = v.a_prime > 0.0 ? v.a_prime : std::min(v.a + kTwoPi, mu / 2.0);
  const bool cross_ok = v.a >= kTwoPi && v.a < a_prime && a_prime <= mu / 2.0;
  if (!rel_ok) ctx.rec.add_line("relative-bound checks skipped: need mu >= 4 pi and 2 pi <= a <= mu / 2");
  if (!cross_ok) ctx.rec.add_line("cross-term checks skipped: need 2 pi <= a < a' <= mu / 2");
  json comp = json::object();
  for (int c = 0; c < 2; ++c) {
    const PeriodicScalarField& W = c == 0 ? Vp : Vm;
    const std::string tag = c == 0 ? "V_plus" : "V_minus";
    if (rel_ok) {
      const RelativeBoundReport rb = relative_bound_checks(W, k, mu, v.a, window, v.eps_grid, v.trials, rng);
      comp[tag]["relative"] = {{"c7", rb.c7}, {"h_a", rb.h_a}, {"h_mu", rb.h_mu},
                               {"max_ratio_inner", rb.max_ratio_inner},
                               {"max_ratio_shell", rb.max_ratio_shell},
                               {"max_ratio_outer", rb.max_ratio_outer}};
      const double worst = std::max({rb.max_ratio_inner, rb.max_ratio_shell, rb.max_ratio_outer});
      ctx.rec.add_check({"relative_bounds_" + tag, rb.passed(), worst, 1.0, "max lhs / rhs"});
    }
    if (cross_ok) {
      int viol = 0;
      double worst = 0.0;
      for (Sign s : {Sign::plus, Sign::minus}) {
        const IndexSet in = index_set_T(w, v.a, s), outer = index_set_T(w, a_prime, s);
        const auto in_mask = mode_mask(window, in.modes);
        auto off_mask = mode_mask(window, outer.modes);
        off_mask.flip();
        std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> pairs;
        for (int t = 0; t < v.trials; ++t)
          pairs.emplace_back(random_supported_vector(off_mask, rng), random_supported_vector(in_mask, rng));
        const CrossTermReport ct = cross_term_check(W, w, v.a, a_prime, s, pairs);
        viol += ct.violations;
        worst = std::max(worst, ct.max_ratio);
      }
      comp[tag]["cross_term"] = {{"a_prime", a_prime}, {"max_ratio", worst}, {"violations", viol}};
      ctx.rec.add_check({"cross_term_" + tag, viol == 0, worst, 1.0, std::to_string(viol) + " violations"});
    }
  }
  ctx.rec.set("components", comp);
  ctx.rec.add_line("mu = " + format_double(mu) + ", a = " + format_double(v.a) + ", window radius " +
                   std::to_string(radius) + ", min margin " + format_double(cr.min_margin));
}

// ---------------------------------------------------------------- wiener

void cmd_wiener(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const auto coeffs = build_coefficients(cfg);
  PeriodicScalarField W(cfg.grid());
  if (!cfg.wiener_W.is_null()) {
    W = build_field(cfg.wiener_W, cfg.grid(), cfg.base_dir, false, "wiener.W");
  } else {
    auto [Vt0, Vt3] = reduced_pair(cfg);
    W = Vt0 + Vt3;
  }
  const PeriodicScalarField Psi = reduced_psi(cfg, coeffs, ctx.rec);
  WienerOptions o;
  o.theta = cfg.wiener.theta;
  o.resolution = cfg.S;
  o.samples_per_oscillation = cfg.wiener.samples_per_oscillation;
  o.taylor_terms = cfg.wiener.taylor_terms;
  const WienerReport r = wiener_average(W, Psi, cfg.wiener.N_max, o);

  CsvWriter csv({"N", "A", "density_plus", "density_minus", "re_I_plus", "im_I_plus", "re_I_minus",
                 "im_I_minus"});
  csv.set_integer_columns({0});
  for (int n = 1; n <= r.N_max; ++n) {
    const std::size_t i = std::size_t(n - 1);
    csv.row({double(n), r.A[i], r.density_plus[i], r.density_minus[i], r.I_plus[i].real(),
             r.I_plus[i].imag(), r.I_minus[i].real(), r.I_minus[i].imag()});
  }
  ctx.rec.write_output("wiener.csv", csv.str());
  const double a_last = r.A.back();
  ctx.rec.set("wiener", {{"resolution", r.resolution}, {"bins", r.bins}, {"phase_gradient", r.phase_gradient},
                         {"samples_per_oscillation", r.samples_per_oscillation},
                         {"A_N_max", a_last},
                         {"A_64", r.N_max >= 64 ? json(r.A[63]) : json(nullptr)}});
  ctx.rec.add_line("N_max = " + std::to_string(r.N_max) + ", S = " + std::to_string(r.resolution) +
                   ", A(N_max) = " + format_double(a_last));

  const double w2 = std::pow(W.sup_norm(), 2);
  const double amax = *std::max_element(r.A.begin(), r.A.end());
  ctx.rec.add_check({"averages_bounded", amax <= w2 * (1 + 1e-9) + 1e-15, amax, w2, "A(N) <= sup |W|^2"});
  ctx.rec.add_check({"phase_resolved", r.samples_per_oscillation >= o.samples_per_oscillation,
                     r.samples_per_oscillation, o.samples_per_oscillation, "samples per oscillation"});
}

// ---------------------------------------------------------------- profile

void cmd_profile(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  PeriodicScalarField W(cfg.grid());
  if (!cfg.profile_W.is_null()) {
    W = build_field(cfg.profile_W, cfg.grid(), cfg.base_dir, false, "profile.W");
  } else {
    auto [Vt0, Vt3] = reduced_pair(cfg);
    W = Vt0 + Vt3;
  }
  ProfileOptions o = default_profile_options(W);
  if (!cfg.profile.b_grid.empty()) o.b_grid = cfg.profile.b_grid;
  if (!cfg.profile.eps_grid.empty()) o.eps_grid = cfg.profile.eps_grid;
  if (!cfg.profile.t_grid.empty()) o.t_grid = cfg.profile.t_grid;
  if (!cfg.profile.counts.empty()) o.counts = cfg.profile.counts;
  o.sample_resolution = cfg.S;
  const PotentialProfile p = potential_profile(W, o);

  CsvWriter b({"b", "Wb_norm", "h_tilde"});
  for (std::size_t i = 0; i < p.b_grid.size(); ++i) b.row({p.b_grid[i], p.Wb_norm[i], p.h_tilde[i]});
  ctx.rec.write_output("profile_b.csv", b.str());
  CsvWriter f({"count", "f_W", "f_ratio"});
  f.set_integer_columns({0});
  for (std::size_t i = 0; i < p.counts.size(); ++i) f.row({double(p.counts[i]), p.f_W[i], p.f_ratio[i]});
  ctx.rec.write_output("profile_f.csv", f.str());
  CsvWriter e({"eps", "C_eps"});
  for (std::size_t i = 0; i < p.eps_grid.size(); ++i) e.row({p.eps_grid[i], p.C_eps[i]});
  ctx.rec.write_output("profile_eps.csv", e.str());
  CsvWriter t({"t", "h_W"});
  for (std::size_t i = 0; i < p.t_grid.size(); ++i) t.row({p.t_grid[i], p.h_W[i]});
  ctx.rec.write_output("profile_t.csv", t.str());

  ctx.rec.set("profile", {{"resolution", p.resolution}, {"C_1", p.C_1}, {"c7", p.c7}});
  ctx.rec.add_line("C_1 = " + format_double(p.C_1) + ", c7 = " + format_double(p.c7));
  ctx.rec.add_check({"Wb_nonincreasing", nonincreasing(p.Wb_norm), 0.0, 0.0, ""});
  ctx.rec.add_check({"h_tilde_nonincreasing", nonincreasing(p.h_tilde), 0.0, 0.0, ""});
  ctx.rec.add_check({"h_W_nonincreasing", nonincreasing(p.h_W), 0.0, 0.0, ""});
  ctx.rec.add_check({"C_eps_nonincreasing", nonincreasing(p.C_eps), 0.0, 0.0, ""});
  std::vector<double> tail(p.f_ratio.begin(), p.f_ratio.end());
  // count 0 has no ratio
  if (!p.counts.empty() && p.counts.front() == 0) tail.erase(tail.begin());
  ctx.rec.add_check({"f_ratio_nonincreasing", nonincreasing(tail, 1e-15), 0.0, 0.0, "f_W(N) / sqrt(N)"});
}

using Handler = std::function<void(Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{{"bands", cmd_bands},   {"sweep", cmd_sweep},
                                                {"gauge", cmd_gauge},   {"verify", cmd_verify},
                                                {"wiener", cmd_wiener}, {"profile", cmd_profile}};
  return h;
}

json grid_json(const RunConfig& cfg) {
  const FourierGrid g = cfg.grid();
  return {{"M", g.radius()}, {"modes", g.mode_count()}, {"field_resolution", g.resolution()},
          {"S", cfg.S}};
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"bands", "sweep", "gauge", "verify", "wiener", "profile", "validate"};
  return s;
}

json tolerances_json() {
  return {
      {"free_band_oracle", kOracleTol},
      {"free_sigma_floor", kOracleTol},
      {"constant_gauge", kConstantGaugeTol},
      {"band_symmetry_rel", BandOptions{}.symmetry_tol},
      {"sweep_flag_level", SweepReport::kFlagLevel},
      {"dense_svd_limit", kDenseLimit},
      {"iterative_svd_tol", IterativeOptions{}.tolerance},
      {"cokernel_gap", 1e-8},
      {"gauge_condition_max", 1e12},
      {"gauge_real_tol", 1e-8},
      {"field_hermitian_tol", 1e-12},
      {"membership_tol", 1e-12},
      {"level_set_delta_default", 1e-3},
      {"cross_term_slack", 1e-12},
      {"wiener_samples_per_oscillation_default", WienerOptions{}.samples_per_oscillation},
      {"wiener_taylor_terms_default", WienerOptions{}.taylor_terms},
      {"coercivity_a0_default", CoercivityOptions{}.a0},
  };
}

int run(const RunConfig& cfg, const std::string& subcommand, std::ostream& log) {
  if (subcommand == "validate") return run_validate(cfg, log);
  auto it = handlers().find(subcommand);
  if (it == handlers().end()) {
    log << "unknown subcommand '" << subcommand << "'\n";
    return kExitSchema;
  }
  RunRecord rec(cfg.out_dir, subcommand);
  Context ctx{cfg, rec, log, false};
  int code = kExitOk;
  try {
    for (const auto& p : input_files(cfg)) rec.add_input(p);
    it->second(ctx);
    if (ctx.inadmissible)
      code = kExitInadmissible;
    else if (!rec.all_passed())
      code = kExitNumerical;
  } catch (const FormatError& e) {
    rec.set("error", e.what());
    code = kExitSchema;
  } catch (const GridMismatch& e) {
    rec.set("error", e.what());
    code = kExitSchema;
  } catch (const InadmissibleParameters& e) {
    rec.set("error", e.what());
    code = kExitInadmissible;
  } catch (const std::invalid_argument& e) {
    rec.set("error", e.what());
    code = kExitInadmissible;
  } catch (const std::exception& e) {
    rec.set("error", e.what());
    code = kExitNumerical;
  }
  if (code != kExitOk && rec.checks().empty() && code != kExitNumerical)
    rec.add_line("error: " + std::string(code == kExitSchema ? "schema" : "inadmissible parameters"));
  rec.finish(cfg.effective, grid_json(cfg), tolerances_json(), code);
  for (const auto& c : rec.checks())
    log << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value)
        << " limit=" << format_double(c.limit) << "\n";
  log << subcommand << ": exit " << code << " (outputs in " << cfg.out_dir << ")\n";
  return code;
}

int run_validate(const RunConfig& cfg, std::ostream& log) {
  const auto diags = validate_config(cfg);
  RunRecord rec(cfg.out_dir, "validate");
  json d = json::array();
  for (const auto& x : diags) {
    d.push_back({{"kind", x.kind}, {"message", x.message}});
    log << x.kind << ": " << x.message << "\n";
    rec.add_line(x.kind + ": " + x.message);
  }
  rec.write_output("diagnostics.json", d.dump(2) + "\n");
  rec.set("diagnostics", d);
  const int code = diags.empty() ? kExitOk : kExitInadmissible;
  if (diags.empty()) {
    rec.add_line("no diagnostics");
    log << "config is valid\n";
  }
  rec.finish(cfg.effective, grid_json(cfg), tolerances_json(), code);
  return code;
}

}  // namespace pdirac::cli
