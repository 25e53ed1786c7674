#pragma once

#include <array>
#include <vector>

namespace openbook {

class Profile;

struct Mat2 {
  double m[2][2] = {{1, 0}, {0, 1}};
  static Mat2 identity() { return Mat2{}; }
  static Mat2 rotation(double angle);
  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

// Path of 2x2 symplectic matrices starting at the identity, sampled on a
// uniform time grid over one (multiply covered) orbit period.
struct SymplecticPath {
  std::vector<double> t;
  std::vector<Mat2> Psi;
  double period = 0.0;

  // |det - 1| <= 1e-9 at every sample, Psi(0) = Id exactly.
  void validate() const;
};

// Transverse linearized return path of the binding orbit traversed k times,
// in the constant Cartesian trivialization of the disk factor.  The flow
// rotates the transverse plane rigidly: total angle 2*pi*(-kappa)*k.
SymplecticPath linearized_return_path(const Profile& p, int k);

// Same path by integrating the variational equation of the Cartesian Reeb
// field along the orbit; used to cross-check the closed form.
SymplecticPath linearized_return_path_variational(const Profile& p, int k);

// Conley-Zehnder index by the crossing-form method for paths from Id.
// Throws std::invalid_argument("degenerate orbit") when the endpoint has an
// eigenvalue 1 (within 1e-11 of det(Psi(T) - I) = 0).
int conley_zehnder(const SymplecticPath& path);

struct CurveTopology {
  int genus = 0;
  std::vector<int> mu;  // Conley-Zehnder index per puncture
  int c1 = 0;           // relative normal Chern number

  int punctures() const { return static_cast<int>(mu.size()); }
  int gamma0() const;  // punctures with even Conley-Zehnder index
};

// ind = (2 - 2g - #punctures) + 2*c1 + sum(mu); exact integer arithmetic.
int fredholm_index(const CurveTopology& top);

// c1 = (ind - 2 + 2g + gamma0) / 2; throws on odd right-hand side.
int normal_chern(int ind, int genus, int gamma0);

}  // namespace openbook
