// File formats: JSON documents tagged with "type", PLY polylines, CSV with
// 17 significant digits. Complex numbers are [re, im] pairs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinorloc/helmholtz.hpp"
#include "spinorloc/harmonics.hpp"
#include "spinorloc/nodal.hpp"
#include "spinorloc/sphere.hpp"
#include "spinorloc/spinor3.hpp"
#include "spinorloc/torus.hpp"

namespace spinorloc::io {

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const helmholtz::HerglotzDensity& f);
json to_json(const helmholtz::BesselSum& s);
json to_json(const sphere::Chart& c);
json to_json(const harmonics::UltrasphericalSum& y);
json to_json(const spinor3::SpinorField3& psi);
json to_json(const torus::LatticeDirectionSet& s);
json to_json(const torus::TorusSum& u);
json to_json(const std::vector<nodal::NodalCurve>& curves);

// Readers check the "type" tag and throw FormatError on malformed input.
helmholtz::HerglotzDensity herglotz_from_json(const json& j);
helmholtz::BesselSum bessel_sum_from_json(const json& j);
sphere::Chart chart_from_json(const json& j);
harmonics::UltrasphericalSum ultraspherical_from_json(const json& j);
spinor3::SpinorField3 spinor_from_json(const json& j);
torus::LatticeDirectionSet lattice_from_json(const json& j);
std::vector<nodal::NodalCurve> curves_from_json(const json& j);

/// ASCII PLY with one vertex element and one edge element per curve segment.
std::string to_ply(const std::vector<nodal::NodalCurve>& curves);

/// %.17g
std::string fmt(double v);

json read_json(const std::string& path);
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);
/// Indented dump with a trailing newline.
std::string dump(const json& j);

/// SHA-256 as 64 lowercase hex digits.
std::string sha256_hex(const std::string& bytes);

}  // namespace spinorloc::io
