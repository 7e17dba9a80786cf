#include "spinorloc/nodal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <unordered_map>

namespace spinorloc::nodal {

double NodalCurve::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : margins) m = std::min(m, v);
  return m;
}

Eigen::Matrix<double, 2, 3> jacobian_fd(const Field& f, const Eigen::Vector3d& x, double step) {
  Eigen::Matrix<double, 2, 3> J;
  for (int d = 0; d < 3; ++d) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(d) = step;
    const Complex df = (f(x + e) - f(x - e)) / (2.0 * step);
    J(0, d) = df.real();
    J(1, d) = df.imag();
  }
  return J;
}

double smallest_singular_value(const Eigen::Matrix<double, 2, 3>& J) {
  const Eigen::Matrix2d G = J * J.transpose();
  const double tr = G.trace(), det = G.determinant();
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return std::sqrt(std::max(0.0, 0.5 * tr - disc));
}

namespace {

Eigen::Matrix<double, 2, 3> jac_at(const Field& f, const FieldJacobian& jac, const Eigen::Vector3d& x,
                                   double step) {
  return jac ? jac(x) : jacobian_fd(f, x, step);
}

struct FacePoint {
  bool hit = false;
  Eigen::Vector3d x;
  bool boundary = false;
};

// tiny deterministic offsets so zeros sitting exactly on grid vertices or
// edges (symmetric test fields) do not produce degenerate crossings
Complex vertex_jitter(std::uint64_t id) {
  std::uint64_t z = id + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  const double a = static_cast<double>(z & 0xffffffffULL) / 4294967296.0 - 0.5;
  const double b = static_cast<double>(z >> 32) / 4294967296.0 - 0.5;
  return {a, b};
}

double dist_point_segment(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double L2 = ab.squaredNorm();
  double t = L2 > 0.0 ? (p - a).dot(ab) / L2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

double dist_point_polyline(const Eigen::Vector3d& p, const Polyline& c, bool closed) {
  if (c.size() == 1) return (p - c[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  const std::size_t segs = closed ? c.size() : c.size() - 1;
  for (std::size_t i = 0; i < segs; ++i) best = std::min(best, dist_point_segment(p, c[i], c[(i + 1) % c.size()]));
  return best;
}

Polyline densify(const Polyline& c, bool closed, double spacing) {
  Polyline out;
  if (c.size() < 2) return c;
  const std::size_t segs = closed ? c.size() : c.size() - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    const auto& a = c[i];
    const auto& b = c[(i + 1) % c.size()];
    const int m = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
    for (int j = 0; j < m; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / m));
  }
  if (!closed) out.push_back(c.back());
  return out;
}

}  // namespace

ExtractResult extract_nodal(const Field& f, const Box& box, double h, const ExtractOptions& opt) {
  if (!(h > 0.0)) throw std::invalid_argument("extract_nodal: step must be positive");
  for (int d = 0; d < 3; ++d) {
    if (!(box.hi(d) > box.lo(d))) throw std::invalid_argument("extract_nodal: empty box");
  }
  std::array<int, 3> cells{};
  std::array<double, 3> step{};
  for (int d = 0; d < 3; ++d) {
    cells[d] = std::max(1, static_cast<int>(std::ceil((box.hi(d) - box.lo(d)) / h - 1e-9)));
    step[d] = (box.hi(d) - box.lo(d)) / cells[d];
  }
  const std::int64_t nx = cells[0] + 1, ny = cells[1] + 1, nz = cells[2] + 1;
  // face keys pack three vertex ids into 64 bits
  if (nx * ny * nz > 2'000'000) throw std::invalid_argument("extract_nodal: grid too large");

  auto pos = [&](std::int64_t id) {
    const std::int64_t i = id % nx, j = (id / nx) % ny, k = id / (nx * ny);
    return Eigen::Vector3d(box.lo(0) + step[0] * i, box.lo(1) + step[1] * j, box.lo(2) + step[2] * k);
  };

  std::vector<Complex> val(static_cast<std::size_t>(nx * ny * nz));
  double scale = 0.0;
  for (std::int64_t id = 0; id < nx * ny * nz; ++id) {
    val[id] = f(pos(id));
    scale = std::max(scale, std::abs(val[id]));
  }
  if (scale == 0.0) throw std::invalid_argument("extract_nodal: field vanishes on the whole grid");
  const double jitter = 1e-13 * scale;
  for (std::int64_t id = 0; id < nx * ny * nz; ++id) val[id] += jitter * vertex_jitter(static_cast<std::uint64_t>(id));

  auto on_boundary_face = [&](const std::array<std::int64_t, 3>& v) {
    for (int d = 0; d < 3; ++d) {
      const std::int64_t n = d == 0 ? nx : (d == 1 ? ny : nz);
      auto coord = [&](std::int64_t id) { return d == 0 ? id % nx : (d == 1 ? (id / nx) % ny : id / (nx * ny)); };
      const auto c0 = coord(v[0]);
      if ((c0 == 0 || c0 == n - 1) && coord(v[1]) == c0 && coord(v[2]) == c0) return true;
    }
    return false;
  };

  std::unordered_map<std::uint64_t, FacePoint> faces;
  auto face_point = [&](std::array<std::int64_t, 3> v, std::uint64_t& key) -> const FacePoint& {
    std::sort(v.begin(), v.end());
    const auto nv = static_cast<std::uint64_t>(nx * ny * nz);
    key = static_cast<std::uint64_t>(v[0]) + nv * (static_cast<std::uint64_t>(v[1]) + nv * static_cast<std::uint64_t>(v[2]));
    auto it = faces.find(key);
    if (it != faces.end()) return it->second;
    FacePoint fp;
    Eigen::Matrix3d A;
    for (int c = 0; c < 3; ++c) {
      A(0, c) = 1.0;
      A(1, c) = val[v[c]].real();
      A(2, c) = val[v[c]].imag();
    }
    const double det = A.determinant();
    if (std::fabs(det) > 1e-300) {
      const Eigen::Vector3d lam = A.inverse() * Eigen::Vector3d(1.0, 0.0, 0.0);
      if (lam.minCoeff() >= 0.0) {
        fp.hit = true;
        fp.x = lam(0) * pos(v[0]) + lam(1) * pos(v[1]) + lam(2) * pos(v[2]);
        fp.boundary = on_boundary_face(v);
      }
    }
    return faces.emplace(key, fp).first->second;
  };

  struct Node {
    Eigen::Vector3d x;
    bool boundary = false;
    std::vector<std::size_t> nbr;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::uint64_t, std::size_t> node_of;
  auto node_for = [&](std::uint64_t key, const FacePoint& fp) {
    auto it = node_of.find(key);
    if (it != node_of.end()) return it->second;
    nodes.push_back({fp.x, fp.boundary, {}});
    node_of.emplace(key, nodes.size() - 1);
    return nodes.size() - 1;
  };

  ExtractResult res;
  static const std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  const std::array<std::int64_t, 3> stride{1, nx, nx * ny};
  for (std::int64_t k = 0; k < cells[2]; ++k) {
    for (std::int64_t j = 0; j < cells[1]; ++j) {
      for (std::int64_t i = 0; i < cells[0]; ++i) {
        const std::int64_t base = i + nx * (j + ny * k);
        // quick reject: a zero needs both Re and Im to change sign in the cube
        double rmin = 1e300, rmax = -1e300, imin = 1e300, imax = -1e300;
        for (int c = 0; c < 8; ++c) {
          const std::int64_t id = base + (c & 1) * stride[0] + ((c >> 1) & 1) * stride[1] + ((c >> 2) & 1) * stride[2];
          rmin = std::min(rmin, val[id].real());
          rmax = std::max(rmax, val[id].real());
          imin = std::min(imin, val[id].imag());
          imax = std::max(imax, val[id].imag());
        }
        if (rmin > 0.0 || rmax < 0.0 || imin > 0.0 || imax < 0.0) continue;
        for (const auto& p : perms) {
          std::array<std::int64_t, 4> t{base, base + stride[p[0]], base + stride[p[0]] + stride[p[1]],
                                        base + stride[p[0]] + stride[p[1]] + stride[p[2]]};
          std::vector<std::pair<std::uint64_t, const FacePoint*>> hits;
          for (int skip = 0; skip < 4; ++skip) {
            std::array<std::int64_t, 3> tri{};
            int m = 0;
            for (int c = 0; c < 4; ++c) {
              if (c != skip) tri[m++] = t[c];
            }
            std::uint64_t key = 0;
            const FacePoint& fp = face_point(tri, key);
            if (fp.hit) hits.emplace_back(key, &fp);
          }
          if (hits.empty()) continue;
          if (hits.size() != 2) {
            ++res.ambiguous_cells;
            continue;
          }
          const auto a = node_for(hits[0].first, *hits[0].second);
          const auto b = node_for(hits[1].first, *hits[1].second);
          if (a == b) continue;
          nodes[a].nbr.push_back(b);
          nodes[b].nbr.push_back(a);
        }
      }
    }
  }

  // walk chains: open ones from degree-1 nodes first, then cycles
  std::vector<char> seen(nodes.size(), 0);
  auto walk = [&](std::size_t start) {
    std::vector<std::size_t> chain{start};
    seen[start] = 1;
    std::size_t cur = start;
    while (true) {
      std::size_t next = std::numeric_limits<std::size_t>::max();
      for (auto nb : nodes[cur].nbr) {
        if (!seen[nb]) {
          next = nb;
          break;
        }
      }
      if (next == std::numeric_limits<std::size_t>::max()) break;
      seen[next] = 1;
      chain.push_back(next);
      cur = next;
    }
    return chain;
  };
  std::vector<std::pair<std::vector<std::size_t>, bool>> chains;
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (!seen[s] && nodes[s].nbr.size() != 2) chains.emplace_back(walk(s), false);
  }
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (!seen[s]) {
      auto c = walk(s);
      const bool closes = c.size() > 2 && std::find(nodes[c.back()].nbr.begin(), nodes[c.back()].nbr.end(), c.front()) !=
                                               nodes[c.back()].nbr.end();
      chains.emplace_back(std::move(c), closes);
    }
  }

  const double max_move = 2.0 * std::sqrt(step[0] * step[0] + step[1] * step[1] + step[2] * step[2]);
  for (auto& [ids, closed] : chains) {
    if (ids.size() < 2) continue;
    NodalCurve curve;
    curve.closed = closed;
    std::vector<Eigen::Vector3d> orient_dirs;
    for (auto id : ids) {
      Eigen::Vector3d x = nodes[id].x;
      const Eigen::Vector3d x0 = x;
      bool ok = false;
      Eigen::Matrix<double, 2, 3> J;
      for (int it = 0; it <= opt.newton_iterations; ++it) {
        const Complex v = f(x);
        if (std::abs(v) <= opt.newton_tol) {
          ok = true;
          break;
        }
        if (it == opt.newton_iterations) break;
        J = jac_at(f, opt.jacobian, x, opt.fd_step);
        const Eigen::Matrix2d G = J * J.transpose();
        if (std::fabs(G.determinant()) < 1e-300) break;
        const Eigen::Vector3d dx = J.transpose() * G.inverse() * Eigen::Vector2d(v.real(), v.imag());
        x -= dx;
      }
      if ((x - x0).norm() > max_move) {  // ran off to another branch
        x = x0;
        ok = false;
      }
      if (!ok) ++res.unpolished_vertices;
      J = jac_at(f, opt.jacobian, x, opt.fd_step);
      const double m = smallest_singular_value(J);
      if (m < opt.singular_threshold) ++res.flagged_vertices;
      curve.vertices.push_back(x);
      curve.margins.push_back(m);
      orient_dirs.push_back(Eigen::Vector3d(J.row(0).transpose()).cross(Eigen::Vector3d(J.row(1).transpose())));
    }
    double s = 0.0;
    const std::size_t n = curve.vertices.size();
    const std::size_t segs = closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i) {
      s += (curve.vertices[(i + 1) % n] - curve.vertices[i]).dot(orient_dirs[i] + orient_dirs[(i + 1) % n]);
    }
    if (s < 0.0) {
      std::reverse(curve.vertices.begin(), curve.vertices.end());
      std::reverse(curve.margins.begin(), curve.margins.end());
    }
    res.curves.push_back(std::move(curve));
  }
  return res;
}

double stability_margin(const Field& f, const NodalCurve& c, const FieldJacobian& jac) {
  if (c.vertices.empty()) throw std::invalid_argument("stability_margin: empty curve");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& x : c.vertices) m = std::min(m, smallest_singular_value(jac_at(f, jac, x, 1e-6)));
  return m;
}

double jacobian_lipschitz(const Field& f, const NodalCurve& c, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("jacobian_lipschitz: step must be positive");
  double L = 0.0;
  for (const auto& x : c.vertices) {
    const auto J0 = jacobian_fd(f, x, 1e-6);
    for (int d = 0; d < 3; ++d) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(d) = step;
      L = std::max(L, (jacobian_fd(f, x + e, 1e-6) - J0).norm() / step);
      L = std::max(L, (jacobian_fd(f, x - e, 1e-6) - J0).norm() / step);
    }
  }
  return L;
}

bool certify_stable(const Field& f, const NodalCurve& c, double h) {
  if (c.vertices.empty()) return false;
  return stability_margin(f, c) > 10.0 * h * jacobian_lipschitz(f, c, h);
}

double gauss_linking_integral(const Polyline& a, const Polyline& b) {
  if (a.size() < 3 || b.size() < 3) throw LinkingError("linking: closed curves need at least three vertices");
  double total = 0.0;
  auto unit = [](const Eigen::Vector3d& v) {
    const double n = v.norm();
    return n > 0.0 ? Eigen::Vector3d(v / n) : Eigen::Vector3d::Zero();
  };
  auto asin_clamped = [](double v) { return std::asin(std::clamp(v, -1.0, 1.0)); };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Eigen::Vector3d& p1 = a[i];
    const Eigen::Vector3d& p2 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Eigen::Vector3d& p3 = b[j];
      const Eigen::Vector3d& p4 = b[(j + 1) % b.size()];
      const Eigen::Vector3d r13 = p3 - p1, r14 = p4 - p1, r23 = p3 - p2, r24 = p4 - p2;
      const Eigen::Vector3d n1 = unit(r13.cross(r14)), n2 = unit(r14.cross(r24)), n3 = unit(r24.cross(r23)),
                            n4 = unit(r23.cross(r13));
      const double omega = asin_clamped(n1.dot(n2)) + asin_clamped(n2.dot(n3)) + asin_clamped(n3.dot(n4)) +
                           asin_clamped(n4.dot(n1));
      const double sgn = (p4 - p3).cross(p2 - p1).dot(r13);
      total += sgn > 0.0 ? omega : (sgn < 0.0 ? -omega : 0.0);
    }
  }
  return total / (4.0 * std::numbers::pi);
}

int projected_crossings(const Polyline& a, const Polyline& b, const Eigen::Vector3d& direction) {
  const Eigen::Vector3d d = direction.normalized();
  Eigen::Vector3d e1 = d.unitOrthogonal();
  Eigen::Vector3d e2 = d.cross(e1);
  auto proj = [&](const Eigen::Vector3d& x) { return Eigen::Vector2d(x.dot(e1), x.dot(e2)); };
  int total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& a0 = a[i];
    const auto& a1 = a[(i + 1) % a.size()];
    const Eigen::Vector2d p = proj(a0), r = proj(a1) - p;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto& b0 = b[j];
      const auto& b1 = b[(j + 1) % b.size()];
      const Eigen::Vector2d q = proj(b0), s = proj(b1) - q;
      const double den = r.x() * s.y() - r.y() * s.x();
      if (den == 0.0) continue;
      const Eigen::Vector2d qp = q - p;
      const double t = (qp.x() * s.y() - qp.y() * s.x()) / den;
      const double u = (qp.x() * r.y() - qp.y() * r.x()) / den;
      if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0) continue;
      const double ha = (a0 + t * (a1 - a0)).dot(d);
      const double hb = (b0 + u * (b1 - b0)).dot(d);
      if (ha <= hb) continue;  // a must be over b (nearer the viewer at +d)
      total += (a1 - a0).cross(b1 - b0).dot(d) > 0.0 ? 1 : -1;
    }
  }
  return total;
}

int linking_number(const NodalCurve& a, const NodalCurve& b, double min_distance, std::uint64_t seed) {
  if (!a.closed || !b.closed) throw LinkingError("linking_number: curves must be closed");
  if (min_distance > 0.0 && curve_distance(a.vertices, true, b.vertices, true) < min_distance) {
    throw LinkingError("linking_number: curves are too close");
  }
  const double g = gauss_linking_integral(a.vertices, b.vertices);
  const double r = std::round(g);
  if (std::fabs(g - r) > 0.1) throw LinkingError("linking_number: Gauss integral is not near an integer");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::Vector3d d(gauss(rng), gauss(rng), gauss(rng));
  const int c = projected_crossings(a.vertices, b.vertices, d);
  if (c != static_cast<int>(r)) throw LinkingError("linking_number: crossing count disagrees with Gauss integral");
  return c;
}

double hausdorff_dist(const Polyline& a, bool a_closed, const Polyline& b, bool b_closed, double spacing) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_dist: empty curve");
  if (!(spacing > 0.0)) throw std::invalid_argument("hausdorff_dist: spacing must be positive");
  double h = 0.0;
  for (const auto& p : densify(a, a_closed, spacing)) h = std::max(h, dist_point_polyline(p, b, b_closed));
  for (const auto& p : densify(b, b_closed, spacing)) h = std::max(h, dist_point_polyline(p, a, a_closed));
  return h;
}

double hausdorff_dist(const NodalCurve& c, const Polyline& target, bool target_closed, double spacing) {
  return hausdorff_dist(c.vertices, c.closed, target, target_closed, spacing);
}

double curve_distance(const Polyline& a, bool a_closed, const Polyline& b, bool b_closed) {
  // segment-segment distance through dense sampling of a against exact segments of b
  double best = std::numeric_limits<double>::infinity();
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) len += (a[i + 1] - a[i]).norm();
  const double spacing = std::max(1e-4, len / 20000.0);
  for (const auto& p : densify(a, a_closed, spacing)) best = std::min(best, dist_point_polyline(p, b, b_closed));
  return best;
}

Polyline circle(const Eigen::Vector3d& center, double r, const Eigen::Vector3d& u, const Eigen::Vector3d& v,
                int samples) {
  if (samples < 3) throw std::invalid_argument("circle: need at least three samples");
  Polyline c;
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * std::numbers::pi * i / samples;
    c.push_back(center + r * (std::cos(t) * u + std::sin(t) * v));
  }
  return c;
}

}  // namespace spinorloc::nodal
