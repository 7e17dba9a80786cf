#include "spinorloc/realize.hpp"

#include <stdexcept>

namespace spinorloc::realize {

namespace {

harmonics::UltrasphericalSum synthesize_or_zero(const helmholtz::BesselSum& s, int k, const sphere::Chart& chart) {
  if (!s.terms.empty()) return harmonics::synthesize(s, k, chart);
  harmonics::UltrasphericalSum z;
  z.n = 3;
  z.k = k;
  z.norm = harmonics::kernel_normalization(3);
  z.charts = {chart};
  return z;
}

nodal::Box target_box(const nodal::Polyline& c, double margin) {
  Eigen::Vector3d lo = c.front(), hi = c.front();
  for (const auto& v : c) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo.array() - margin, hi.array() + margin};
}

}  // namespace

spinor3::SpinorField3 spinor_from_design(const helmholtz::DesignResult& d, int k, const sphere::Chart& chart) {
  if (d.mode != helmholtz::DesignMode::dirac) throw std::invalid_argument("realize: design is not Dirac-coupled");
  if (chart.dim() != 3) throw std::invalid_argument("realize: chart must live on S^3");
  const auto tilde = spinor3::SpinorField3::from_components(synthesize_or_zero(d.fields[0], k, chart),
                                                            synthesize_or_zero(d.fields[1], k, chart));
  return spinor3::dirac_project(tilde, k);
}

RealizeReport realize_targets(const helmholtz::DesignResult& d, const std::vector<helmholtz::DesignTarget>& targets,
                              int k, const RealizeOptions& opt) {
  RealizeReport rep;
  rep.k = k;
  rep.psi = spinor_from_design(d, k, opt.chart);
  const auto& psi = rep.psi;
  for (const auto& t : targets) {
    for (const auto& x : t.curve) {
      const auto err = spinor3::eval_pullback(psi, opt.chart, x) - helmholtz::dirac_limit(d.fields, x);
      rep.target_error = std::max(rep.target_error, err.norm());
    }
  }
  for (const auto& t : targets) {
    ComponentReport c;
    c.component = t.component;
    const int a = t.component;
    nodal::Field f = [&](const Eigen::Vector3d& x) { return spinor3::eval_pullback(psi, opt.chart, x)(a); };
    const auto ex = nodal::extract_nodal(f, target_box(t.curve, opt.box_margin), opt.h);
    c.curve_count = ex.curves.size();
    double dist = -1.0;
    const int idx = helmholtz::match_curve(ex.curves, t.curve, &dist);
    if (idx >= 0) {
      c.found = true;
      c.hausdorff = dist;
      c.curve = ex.curves[idx];
      c.min_margin = c.curve.min_margin();
    }
    rep.components.push_back(std::move(c));
  }
  if (rep.components.size() == 2 && rep.components[0].found && rep.components[1].found) {
    try {
      rep.linking = nodal::linking_number(rep.components[0].curve, rep.components[1].curve);
      rep.linked = true;
    } catch (const nodal::LinkingError& e) {
      rep.linking_error = e.what();
    }
  }
  return rep;
}

}  // namespace spinorloc::realize
