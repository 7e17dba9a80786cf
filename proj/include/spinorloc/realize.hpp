// Transfer of a Dirac-coupled design to S^3: synthesize both components at
// degree k, project onto the Dirac eigenspace, and extract the nodal curves
// of the spinor components in the rescaled chart.
#pragma once

#include <string>
#include <vector>

#include "spinorloc/design.hpp"
#include "spinorloc/spinor3.hpp"

namespace spinorloc::realize {

struct RealizeOptions {
  double h = 0.1;           // extraction step in chart units
  double box_margin = 0.3;  // around the bounding box of each target
  sphere::Chart chart = sphere::Chart::left_invariant(sphere::SpherePoint(Eigen::Vector4d(1, 0, 0, 0)));
};

struct ComponentReport {
  int component = 0;
  bool found = false;        // a closed curve was extracted
  double hausdorff = -1.0;   // to the target, chart units
  double min_margin = 0.0;
  std::size_t curve_count = 0;
  nodal::NodalCurve curve;
};

struct RealizeReport {
  int k = 0;
  spinor3::SpinorField3 psi;
  double target_error = 0.0;  // max |psi pullback - dirac_limit| on the target vertices
  std::vector<ComponentReport> components;  // one per target
  bool linked = false;        // linking number computed (two closed curves)
  int linking = 0;
  std::string linking_error;
};

/// The degree-k projected spinor of a dirac-mode design.
spinor3::SpinorField3 spinor_from_design(const helmholtz::DesignResult& d, int k, const sphere::Chart& chart);

/// Extracts the nodal set of component a of the pullback around target a.
RealizeReport realize_targets(const helmholtz::DesignResult& d, const std::vector<helmholtz::DesignTarget>& targets,
                              int k, const RealizeOptions& opt = {});

}  // namespace spinorloc::realize
