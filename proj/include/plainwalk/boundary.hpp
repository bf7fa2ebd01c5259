#pragma once

#include <string>
#include <vector>

#include "plainwalk/kernel.hpp"

namespace plainwalk {

// Minimal solution q of x_g = p_g + sum_{hh'=g} p_h x_{h'}
//                          + sum_{h in Next(g)} p_{h^-1} x_h x_g.
struct HittingMatrices {
  std::vector<Matrix> q;  // per letter
  double residual = 0.0;
  long iterations = 0;
  // d_g = diag of the row sums of q_g (probability of ever reaching g)
  Vector d(Gen g) const { return q[g].rowwise().sum(); }
};

HittingMatrices solve_hitting(const ColoredKernel& k, double tol = 1e-12, long max_iter = 1000000);

struct TrafficSolution {
  std::vector<Matrix> mu;
  std::vector<Vector> delta;  // diagonal of Delta_g
  std::vector<Vector> y;      // mu_g 1
  Vector pi;
  double traffic_residual = 0.0;      // residual under the exact traffic map
  double cross_check_distance = 0.0;  // |linear-path mu - iterated mu|_inf
  double mu_qd_residual = 0.0;        // |mu_g - q_g Delta_g|_inf
  bool used_fallback = false;         // linear path singular, returned iterate
};

// Both traffic routes: (ii) the y-linear system derived from the q-form of
// the traffic equation with normalization sum_g y_g = 1, and (i) direct
// fixed-point iteration of the traffic map; returns (ii) with the
// cross-check distance to (i).
TrafficSolution solve_traffic(const ColoredKernel& k, const HittingMatrices& h, double tol = 1e-12);

// Closed form mu_g = q_g (I - q_{g^-1} q_g)^{-1} (I - d_{g^-1}) 1 valid on
// free groups in the extended sense (F_d * Z/2 * ... * Z/2).
TrafficSolution free_group_mu(const ColoredKernel& k, const HittingMatrices& h);

struct BoundarySolution {
  HittingMatrices hitting;
  TrafficSolution traffic;
};
BoundarySolution solve_boundary(const ColoredKernel& k, double tol = 1e-12, long max_iter = 1000000);

struct CylinderQuery {
  int color = 0;
  Word word;
};

// Color-resolved cylinder law: row u of q_{xi_1} ... q_{xi_{n-1}} mu_{xi_n}.
Vector harmonic_cylinder_colors(const CylinderQuery& c, const ColoredKernel& k, const HittingMatrices& h,
                                const TrafficSolution& t);
double harmonic_cylinder(const CylinderQuery& c, const ColoredKernel& k, const HittingMatrices& h,
                         const TrafficSolution& t);

// Max over colors and cylinders of length <= max_len of the stationarity
// defect |p^inf_u(C) - sum_{g,v} p_g(u,v) (g . p^inf_v)(C)|.
double stationarity_residual(const ColoredKernel& k, const HittingMatrices& h, const TrafficSolution& t,
                             int max_len = 3);

struct ZConsistencyReport {
  bool applicable = false;     // extended-free group with invertible p_g
  std::string notice;          // reason when not applicable
  double max_identity_residual = 0.0;  // |(Z_g + Q_g) Q_g - I|_inf over g
  double min_real_part_qp = 0.0;       // eigenvalues of q_g p_g^{-1}
  double min_real_part_z = 0.0;        // eigenvalues of z
  bool ok(double tol = 1e-8) const {
    return applicable && max_identity_residual <= tol && min_real_part_qp > 0 && min_real_part_z > 0;
  }
};
ZConsistencyReport z_consistency_check(const ColoredKernel& k, const HittingMatrices& h);

struct LalleyReport {
  bool holds = false;
  int k = 0;  // pattern depends on the last k letters
  int m = 0;  // from length m on
  int lengths_tested = 0;
  std::string violation;  // first counterexample, empty when holds
};

// Tests the column-support condition for products of the q matrices over all
// reduced words of lengths m .. m+k (supports via boolean matrix products).
LalleyReport lalley_condition_check(const HittingMatrices& h, const PlainGroup& g, int k, int m);
// Smallest (k, m) within the caps for which the condition holds.
LalleyReport find_lalley_params(const HittingMatrices& h, const PlainGroup& g, int k_max = 3, int m_max = 4);

}  // namespace plainwalk
