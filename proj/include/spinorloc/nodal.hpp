// Nodal curves {Re f = Im f = 0} of complex fields on boxes in R^3:
// extraction on a tetrahedral grid, Newton polish, transversality margins,
// linking numbers and Hausdorff distances.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace spinorloc::nodal {

using Complex = std::complex<double>;
using Field = std::function<Complex(const Eigen::Vector3d&)>;
/// Optional analytic gradient: returns (grad Re f, grad Im f) as rows.
using FieldJacobian = std::function<Eigen::Matrix<double, 2, 3>(const Eigen::Vector3d&)>;
using Polyline = std::vector<Eigen::Vector3d>;

struct Box {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(-1.0);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(1.0);
};

struct NodalCurve {
  Polyline vertices;  // closed curves do not repeat the first vertex
  bool closed = false;
  std::vector<double> margins;  // smallest singular value of the 2x3 Jacobian
  double min_margin() const;
};

struct ExtractOptions {
  double newton_tol = 1e-9;
  int newton_iterations = 10;
  double fd_step = 1e-6;            // for the Jacobian when none is supplied
  double singular_threshold = 1e-6;  // margins below this flag the curve
  FieldJacobian jacobian;            // empty: centered differences
};

struct ExtractResult {
  std::vector<NodalCurve> curves;
  std::size_t flagged_vertices = 0;  // margin below singular_threshold
  std::size_t unpolished_vertices = 0;  // Newton did not reach newton_tol
  std::size_t ambiguous_cells = 0;   // tetrahedra with more than two face crossings
};

/// Six-tetrahedra (Kuhn) decomposition of the grid of step h on the box;
/// each tetrahedron contributes at most one segment between the zero points
/// of the linear interpolants on its faces. Segments are stitched through
/// shared faces, polished by Newton steps with the Jacobian pseudo-inverse
/// and oriented along grad Re f x grad Im f. Curves that reach the box
/// boundary are open.
ExtractResult extract_nodal(const Field& f, const Box& box, double h, const ExtractOptions& opt = {});

/// Real 2x3 Jacobian of (Re f, Im f) by centered differences.
Eigen::Matrix<double, 2, 3> jacobian_fd(const Field& f, const Eigen::Vector3d& x, double step = 1e-6);
/// Smallest singular value of a 2x3 matrix.
double smallest_singular_value(const Eigen::Matrix<double, 2, 3>& J);
/// Minimum over the curve's vertices of the smallest singular value.
double stability_margin(const Field& f, const NodalCurve& c, const FieldJacobian& jac = {});

/// Largest Lipschitz estimate of the Jacobian near the curve's vertices
/// (finite differences of the Jacobian over a step `step`).
double jacobian_lipschitz(const Field& f, const NodalCurve& c, double step);
/// Curve counts as stable when its margin exceeds 10 h L, L the local
/// Lipschitz estimate of the Jacobian at scale h.
bool certify_stable(const Field& f, const NodalCurve& c, double h);

class LinkingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gauss linking integral of two closed polylines, exact per segment pair.
double gauss_linking_integral(const Polyline& a, const Polyline& b);
/// Signed crossings of a projection along `direction` (curve a over b).
int projected_crossings(const Polyline& a, const Polyline& b, const Eigen::Vector3d& direction);
/// Rounded Gauss integral, cross-checked against projected crossings along a
/// seeded random direction. Throws LinkingError on open input, curves closer
/// than min_distance, a non-integral integral (off by more than 0.1), or
/// disagreement with the crossing count.
int linking_number(const NodalCurve& a, const NodalCurve& b, double min_distance = 0.0, std::uint64_t seed = 7);

/// Symmetric Hausdorff distance between polylines, densified to `spacing`
/// (point-to-segment distances, so the result is exact up to the spacing).
double hausdorff_dist(const Polyline& a, bool a_closed, const Polyline& b, bool b_closed, double spacing = 1e-3);
double hausdorff_dist(const NodalCurve& c, const Polyline& target, bool target_closed = true, double spacing = 1e-3);

/// Minimum distance between two polylines' vertices and segments.
double curve_distance(const Polyline& a, bool a_closed, const Polyline& b, bool b_closed);

/// Closed polyline sampling a circle of radius r about `center` in the
/// plane spanned by the orthonormal pair (u, v), counterclockwise in (u, v).
Polyline circle(const Eigen::Vector3d& center, double r, const Eigen::Vector3d& u, const Eigen::Vector3d& v,
                int samples);

}  // namespace spinorloc::nodal
