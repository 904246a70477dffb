#pragma once

// Command implementations behind tools/planenorm_cli.cpp. Each command writes
// to the given streams and returns the process exit code, so tests can call
// them directly.

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "planenorm/certificate.hpp"
#include "planenorm/construct.hpp"
#include "planenorm/convexity.hpp"
#include "planenorm/ellipsoid.hpp"
#include "planenorm/io.hpp"
#include "planenorm/norm2d.hpp"
#include "planenorm/quotient.hpp"

namespace planenorm {

enum ExitCode : int { kExitPass = 0, kExitVerifyFail = 1, kExitValidation = 2, kExitStage = 3 };

struct RunConfig {
  std::size_t grid = kDefaultGrid;
  double tol = 1e-9;
  std::vector<double> lambdas = default_lambdas();
  std::string out;  ///< empty: stdout
  int verbosity = 0;

  void validate() const {
    if (grid < 256 || (grid & (grid - 1)) != 0) throw ValidationError("grid must be a power of two >= 256");
    if (!(tol > 0.0 && tol <= 1e-4)) throw ValidationError("tol must lie in (0, 1e-4]");
    if (lambdas.empty()) throw ValidationError("lambda schedule is empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!(lambdas[i] >= 0.0 && lambdas[i] < 1.0)) throw ValidationError("lambdas must lie in [0, 1)");
      if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw ValidationError("lambdas must be strictly ascending");
    }
  }
};

/// Runs `body` and maps the library's exceptions onto exit codes, with the
/// stage name on `err`.
inline int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const StageError& e) {
    err << "error: stage " << e.stage() << " failed: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    err << "error: stage unknown failed: " << e.what() << '\n';
    return kExitStage;
  }
}

/// 17 significant digits.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

inline void print_report(const VerificationReport& rep, std::ostream& os) {
  for (const VerificationClause& c : rep.clauses)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  os << (rep.pass ? "certificate verified" : "certificate REJECTED") << '\n';
}

}  // namespace detail

struct ConstructArgs {
  std::string norm_x, norm_y;  ///< file paths or inline JSON
  bool ambient = false;
  std::string x0_basis, y0_basis;
};

/// Builds, certifies and verifies; writes the certificate JSON.
inline int cmd_construct(const ConstructArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    cfg.validate();
    Norm2 x, y;
    std::optional<QuotientPresentation> qx;
    std::optional<RestrictedCodomain> ry;
    std::optional<NormN> ay;
    if (args.ambient) {
      if (args.x0_basis.empty() || args.y0_basis.empty())
        throw ValidationError("--ambient needs --x0-basis and --y0-basis");
      const NormN ax = normn_from_json(load_json(args.norm_x));
      ay = normn_from_json(load_json(args.norm_y));
      qx = quotient_norm(ax, basis_from_json(load_json(args.x0_basis)));
      ry = restrict_codomain(*ay, basis_from_json(load_json(args.y0_basis)));
      x = qx->induced;
      y = ry->norm;
    } else {
      x = norm2_from_json(load_json(args.norm_x));
      y = norm2_from_json(load_json(args.norm_y));
    }
    const CounterexampleSeed seed = build_counterexample(x, y, {cfg.grid});
    const Certificate cert = detail::run_stage("certificate", [&] {
      return p2_failure_family(seed, cfg.lambdas, cfg.tol, cfg.grid);
    });
    const VerificationReport rep = verify_certificate(cert);
    json j = to_json(cert, rep.pass);
    bool ok = rep.pass;
    if (args.ambient) {
      const LiftReport lift = lift_certificate(*qx, *ay, *ry, cert);
      json lj = to_json(lift);
      lj["ambient_x"] = to_json(qx->ambient);
      lj["ambient_y"] = to_json(*ay);
      lj["quotient_gap"] = qx->approx_gap;
      lj["restriction_gap"] = ry->approx_gap;
      j["lift"] = lj;
      ok = ok && lift.pass;
      err << (lift.pass ? "PASS " : "FAIL ") << "lift: " << lift.detail << " (delta' " << lift.delta_prime << ")\n";
    }
    detail::print_report(rep, err);
    if (cfg.verbosity > 0)
      err << "case " << to_string(seed.trace.kind) << ", subcase " << to_string(seed.trace.subcase) << ", delta "
          << seed.delta << '\n';
    detail::write_output(j.dump(2) + "\n", cfg.out, out);
    return ok ? kExitPass : kExitVerifyFail;
  });
}

/// Re-verifies a certificate file by fresh brute-force scans.
inline int cmd_certify(const std::string& path, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const Certificate cert = certificate_from_json(load_json(path));
    const VerificationReport rep = verify_certificate(cert);
    detail::print_report(rep, out);
    return rep.pass ? kExitPass : kExitVerifyFail;
  });
}

/// CSV of eps, delta_X(eps), delta_H(eps) and their difference.
inline int cmd_modulus(const std::string& norm, const std::vector<double>& eps, const RunConfig& cfg, std::ostream& out,
                       std::ostream& err) {
  return run_guarded(err, [&] {
    cfg.validate();
    const Norm2 x = norm2_from_json(load_json(norm));
    std::string text = "# eps,delta_X,delta_H,gap\n";
    for (double e : eps) {
      if (!(e > 0.0 && e < 2.0)) {
        err << "warning: skipping eps = " << e << " outside (0, 2)\n";
        continue;
      }
      const double dx = modulus_of_convexity(x, e, {cfg.grid, 4, kRefineWidth});
      const double dh = hilbert_modulus(e);
      text += csv_number(e) + "," + csv_number(dx) + "," + csv_number(dh) + "," + csv_number(dh - dx) + "\n";
    }
    detail::write_output(text, cfg.out, out);
    return kExitPass;
  });
}

struct FigureArgs {
  std::string kind;  ///< half-arc, gamma-eps, construction
  std::string norm_x, norm_y;
  std::string norm;  ///< gamma-eps
  double eps = 1.0;
  std::size_t samples = 1024;
};

namespace detail {

inline std::string figure_half_arc(const CounterexampleSeed& seed, std::size_t n) {
  const Operator2& t = seed.t;
  // gamma(start) = x_y1, so the profile touches 1 at t = 0 and t = pi
  const double start = sphere_parameter(seed.x_y1);
  const std::optional<Operator2> s =
      seed.trace.s_op ? std::optional<Operator2>(Operator2{*seed.trace.s_op, t.domain, t.codomain}) : std::nullopt;
  std::string text = "# t,x,y,norm_T,norm_S  (gamma(start + t) on the half arc; norm_S empty without an initial operator)\n";
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = kPi * static_cast<double>(i) / static_cast<double>(n);
    const Vec2 p = sphere_point(t.domain, start + u);
    text += csv_number(u) + "," + csv_number(p.x) + "," + csv_number(p.y) + "," + csv_number(t.profile(start + u)) +
            "," + (s ? csv_number(s->profile(start + u)) : std::string()) + "\n";
  }
  return text;
}

inline std::string figure_gamma_eps(const Norm2& x, double eps, std::size_t n) {
  std::string text = "# theta,sphere_x,sphere_y,mid_x,mid_y,delta\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    const Vec2 p = sphere_point(x, th);
    const ChordMidpoint c = chord_midpoint(x, eps, th);
    text += csv_number(th) + "," + csv_number(p.x) + "," + csv_number(p.y) + "," + csv_number(c.z.x) + "," +
            csv_number(c.z.y) + "," + csv_number(c.delta) + "\n";
  }
  return text;
}

inline std::string figure_construction(const CounterexampleSeed& seed, std::size_t n) {
  const Operator2& t = seed.t;
  std::string text = "# curve,index,x,y\n";
  auto row = [&](const char* curve, std::size_t i, Vec2 p) {
    text += std::string(curve) + "," + std::to_string(i) + "," + csv_number(p.x) + "," + csv_number(p.y) + "\n";
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    row("domain_sphere", i, sphere_point(t.domain, th));
    row("codomain_sphere", i, sphere_point(t.codomain, th));
    row("image", i, t.matrix * sphere_point(t.domain, th));
  }
  if (seed.trace.kind == CaseKind::Hilbert) {
    const JohnEllipse je = john_ellipse(t.codomain);
    for (std::size_t i = 0; i < n; ++i)
      row("john_ellipse", i, je.a * unit_direction(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
  }
  const FacePair fp = face_pair(t.codomain, seed.y1_star);
  const std::size_t m = 64;
  for (std::size_t i = 0; i <= m; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(m);
    row("face_plus", i, sphere_point(t.codomain, fp.plus_face.lo + u * fp.plus_face.width()));
    row("face_minus", i, sphere_point(t.codomain, fp.minus_face.lo + u * fp.minus_face.width()));
  }
  row("x0", 0, seed.x0);
  row("y1", 0, seed.y1);
  row("y2", 0, seed.y2);
  return text;
}

}  // namespace detail

/// Curve data for plots; the header comment line names the columns.
inline int cmd_figure_data(const FigureArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    cfg.validate();
    if (args.samples < 8) throw ValidationError("figure needs at least 8 samples");
    std::string text;
    if (args.kind == "half-arc" || args.kind == "construction") {
      const Norm2 x = norm2_from_json(load_json(args.norm_x));
      const Norm2 y = norm2_from_json(load_json(args.norm_y));
      const CounterexampleSeed seed = build_counterexample(x, y, {cfg.grid});
      text = args.kind == "half-arc" ? detail::figure_half_arc(seed, args.samples)
                                     : detail::figure_construction(seed, args.samples);
    } else if (args.kind == "gamma-eps") {
      detail::require_epsilon(args.eps);
      text = detail::figure_gamma_eps(norm2_from_json(load_json(args.norm)), args.eps, args.samples);
    } else {
      throw ValidationError("unknown figure kind \"" + args.kind + "\" (half-arc, gamma-eps, construction)");
    }
    detail::write_output(text, cfg.out, out);
    return kExitPass;
  });
}

/// The John ellipse of a unit ball as JSON.
inline int cmd_john(const std::string& norm, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const Norm2 x = norm2_from_json(load_json(norm));
    const JohnEllipse je = detail::run_stage("john_ellipse", [&] { return john_ellipse(x); });
    detail::write_output(to_json(je).dump(2) + "\n", cfg.out, out);
    return kExitPass;
  });
}

}  // namespace planenorm
