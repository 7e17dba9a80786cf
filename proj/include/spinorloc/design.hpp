// Least-squares design of Bessel sums in R^3 whose nodal sets follow given
// closed curves, either per component or for the Dirac-coupled pair
// u = (phi + D_0 phi) / 2 that the projected spinor fields converge to.
#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "spinorloc/helmholtz.hpp"
#include "spinorloc/nodal.hpp"
#include "spinorloc/spinor3.hpp"

namespace spinorloc::helmholtz {

struct DesignTarget {
  nodal::Polyline curve;  // closed, first vertex not repeated
  int component = 0;      // 0 or 1
  int winding = 0;        // turns of the prescribed normal frame against the Bishop frame
};

enum class DesignMode {
  scalar,  // component a's own field phi_a vanishes on its curves
  dirac,   // component a of (phi + D_0 phi) / 2 vanishes on its curves
};

enum class GradientRule {
  exact,      // d_{n1} u = 1, d_{n2} u = i at every sample (Bishop frame)
  conformal,  // d_{n2} u = i d_{n1} u at every sample, mean of d_{n1} u fixed
};

struct DesignOptions {
  DesignMode mode = DesignMode::scalar;
  double center_radius = 4.0;    // kernel centers on a Fibonacci sphere of this radius
  int samples_per_curve = 48;    // collocation points per target
  GradientRule gradient = GradientRule::exact;
  // > 0: try every frame winding in [-s, s] per target (at most 3 targets)
  // and keep the design with the smallest displacement estimate
  int winding_search = 0;
  // weight of the gradient rows against the zero-value row; below 1
  // the curve position wins over the exact transversal derivatives
  double gradient_weight = 1.0;
  double regularization = 1e-6;  // Tikhonov weight relative to the mean diagonal
  double max_residual = 0.05;    // relative collocation residual accepted
  bool verify = true;
  double verify_h = 0.04;        // extraction step of the a-posteriori check
  double tolerance = 0.02;       // Hausdorff tolerance of the check
  spinor3::CliffordRep3 cliff = spinor3::CliffordRep3::standard();
};

struct DesignResult {
  std::array<BesselSum, 2> fields;  // phi_1, phi_2 (empty when unused in scalar mode)
  DesignMode mode = DesignMode::dirac;
  double collocation_residual = 0.0;   // ||A c - b|| / ||b||
  std::vector<double> hausdorff;       // per target, from the verification
  std::vector<double> margins;         // per target, min stability margin
  std::vector<nodal::NodalCurve> realized;  // matched extracted curve per target
  std::vector<int> windings;           // frame windings used, per target
  double displacement_estimate = 0.0;  // max |u| / sigma_min along the targets (winding search only)
  double coefficient_l1 = 0.0;         // sum of |c_j| over both components
};

class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N kernel centers per component. Targets must be closed, pairwise
/// disjoint and inside the ball of radius 3. Throws DesignError when the
/// collocation system cannot be satisfied or the verification fails.
DesignResult design_bessel_sum(const std::vector<DesignTarget>& targets, int n, int N,
                               const DesignOptions& opt = {});

/// (phi + sum_mu gamma_mu d_mu phi) / 2 at x.
spinor3::Spinor dirac_limit(const std::array<BesselSum, 2>& phi, const Eigen::Vector3d& x,
                            const spinor3::CliffordRep3& cliff = spinor3::CliffordRep3::standard());

/// The field whose nodal set realizes component a: phi_a in scalar mode,
/// the a-th entry of dirac_limit in Dirac mode.
nodal::Field realized_field(const DesignResult& d, int component,
                            const spinor3::CliffordRep3& cliff = spinor3::CliffordRep3::standard());

/// Closed curve of `curves` nearest to target in Hausdorff distance, its
/// index, or -1 when there is no closed curve.
int match_curve(const std::vector<nodal::NodalCurve>& curves, const nodal::Polyline& target, double* dist = nullptr);

/// Hopf pair: circles of the given radius centered at (-r/2, 0, 0) in the
/// x1x2-plane (component 0) and at (r/2, 0, 0) in the x1x3-plane
/// (component 1), oriented so their linking number is +1.
std::vector<DesignTarget> hopf_targets(double radius = 1.5, int samples = 200);
/// Dirac-coupled settings used for the Hopf pair: conformal gradient rows,
/// winding search, and a regularization that keeps the coefficient sum
/// small enough for the sphere transfer at k ~ 100.
DesignOptions hopf_design_options();

/// Arc-length resampling of a closed polyline.
nodal::Polyline resample_closed(const nodal::Polyline& c, int m);

}  // namespace spinorloc::helmholtz
