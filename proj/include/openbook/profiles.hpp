#pragma once

#include <functional>
#include <string>
#include <vector>

namespace openbook {

// kappa is the constant slope f'/g' near the binding.  Irrationality is not
// numerically decidable, so kappa must come from a fixed catalogue of
// irrational constants: -sqrt2*10^-k, -sqrt3*10^-k, -pi*10^-(k+1), k = 1..3.
struct KappaSpec {
  enum class Family { sqrt2, sqrt3, pi };
  Family family = Family::sqrt2;
  int k = 2;  // catalogue exponent index, 1..3

  double value() const;
  std::string token() const;
  static KappaSpec parse(const std::string& token);
  static const std::vector<KappaSpec>& catalogue();
};

struct ProfileParams {
  double c = 0.1;            // binding period scale, > 0
  KappaSpec kappa;           // irrational slope constant, < 0
  double delta = 0.05;       // collar half-width, in (0, 0.2)
  double delta_prime = 0.1;  // delta' > delta
  double rho1 = 0.25;        // inner blend knots, 0 < rho1 < rho2 < 1-delta'
  double rho2 = 0.5;

  // Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct ProfileSample {
  double rho = 0;
  double f = 0, g = 0;
  double fp = 0, gp = 0;  // first derivatives
  double D = 0;           // f*gp - fp*g, recomputed at the sample
  double beta = 0;
  double h = 0;
};

// The radial profile pack (f, g, beta, h) on [0, 1+delta).  Regions:
//   A: [0, rho1]            f = c + kappa*rho^2, g = rho^2 (closed form)
//   B: (rho1, 1-delta)      f decays monotonically through a weighted ramp
//                           that passes half its local scale at 1-delta';
//                           g climbs to 1 on (rho1, 1-delta')
//   C: [1-delta, 1+delta)   (f, g) = (0, 1)
// beta = 1/(rho*f) on (0, rho1], ramped to 1 on [rho1, rho2].
// h bridges -f' to 1 across [1-delta', 1-delta].
// A perturbed profile additionally carries epsilon > 0 and replaces f by
// f_eps with f_eps = eps*(2-rho) on [1-delta, 1+delta), f_eps' < 0 on
// [1-delta', 1+delta), and f_eps = f on [0, 1-delta'] (same code path).
class Profile {
 public:
  const ProfileParams& params() const { return p_; }
  double kappa() const { return kappa_; }
  double rho_sup() const { return 1.0 + p_.delta; }
  double epsilon() const { return eps_; }
  bool perturbed() const { return eps_ > 0.0; }
  // blend end of the perturbation, where f crosses the line eps*(2-rho)
  double perturb_knot() const { return rho_cross_; }

  double f(double rho) const;
  double fp(double rho) const;
  double fpp(double rho) const;
  double g(double rho) const;
  double gp(double rho) const;
  double gpp(double rho) const;
  double beta(double rho) const;
  double betap(double rho) const;
  double betapp(double rho) const;
  double h(double rho) const;
  double hp(double rho) const;
  double hpp(double rho) const;  // centered difference of hp, step 1e-6

  ProfileSample eval(double rho) const;  // domain error outside [0, 1+delta)

  std::string serialize() const;
  static Profile parse(const std::string& text);

  friend Profile build_profile(const ProfileParams&);
  friend Profile perturb_profile(const Profile&, double);

 private:
  Profile() = default;
  void check_domain(double rho) const;
  double base_f(double rho) const;
  double base_fp(double rho) const;
  double base_fpp(double rho) const;

  ProfileParams p_;
  double kappa_ = 0.0;
  double eps_ = 0.0;
  double rho_cross_ = 0.0;
  double ustar_ = 0.0;  // ramp weighting knot for the f decay
};

Profile build_profile(const ProfileParams& params);

// pre: 0 < eps and eps*(1+delta') < f(1-delta') so a strictly decreasing
// blend onto the line eps*(2-rho) exists; otherwise a feasibility error.
Profile perturb_profile(const Profile& p, double eps);

struct ConditionResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;   // signed; positive means satisfied with room
  double witness = 0.0;  // rho realizing the margin
  std::string note;
};

struct ProfileReport {
  std::vector<ConditionResult> checks;
  bool pass = false;
  double min_D = 0.0;
  double max_fp = 0.0;
};

// Evaluates every profile condition on a grid of grid_n points plus the
// closed-form knots.  grid_n >= 100.  Failures are report entries.
ProfileReport verify_profile(const Profile& p, int grid_n);

// Same checks against an arbitrary sampler; lets tests feed corrupted data.
ProfileReport verify_profile_sampled(
    const ProfileParams& params, bool kappa_in_catalogue, double grid_sup,
    int grid_n, const std::function<ProfileSample(double)>& sample);

}  // namespace openbook
