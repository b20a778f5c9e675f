#include "aerochunk/sampler.hpp"

#include "aerochunk/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace aerochunk {

void SamplerParams::validate() const {
  if (normal_count < 1) throw ParseError(fmt::format("sampler normal count must be >= 1, got {}", normal_count));
  if (offsets_per_normal < 1) {
    throw ParseError(fmt::format("sampler offsets per normal must be >= 1, got {}", offsets_per_normal));
  }
  if (!(phi_max >= 0.0 && phi_max <= std::numbers::pi / 2 + 1e-12)) {
    throw ParseError(fmt::format("phi_max must lie in [0, pi/2], got {}", phi_max));
  }
}

double extruder_phi_max(double nozzle_height, double head_length) {
  if (!(head_length > 0.0)) throw ParseError(fmt::format("extruder head length must be > 0, got {}", head_length));
  if (nozzle_height < 0.0) throw ParseError(fmt::format("nozzle height must be >= 0, got {}", nozzle_height));
  return std::atan(nozzle_height / head_length);
}

double combine_phi_max(double phi_conn, double phi_extr, AngleMode mode) {
  return mode == AngleMode::PaperMax ? std::max(phi_conn, phi_extr) : std::min(phi_conn, phi_extr);
}

SamplerParams make_sampler_params(int normal_count, int offsets_per_normal, const ExtruderClearance& extruder,
                                  double phi_conn_max, AngleMode mode) {
  SamplerParams p;
  p.normal_count = normal_count;
  p.offsets_per_normal = offsets_per_normal;
  p.extruder = extruder;
  p.phi_conn_max = phi_conn_max;
  p.mode = mode;
  p.phi_max = combine_phi_max(phi_conn_max, extruder_phi_max(extruder.nozzle_height, extruder.head_length), mode);
  p.validate();
  return p;
}

std::vector<Vec3> sample_normals(const SamplerParams& params) {
  std::vector<Vec3> normals{Vec3::UnitZ()};
  const int ring_budget = params.normal_count - 1;
  if (params.phi_max <= 0.0 || ring_budget < 1) return normals;

  // Azimuth spans 2*pi while the polar angle spans at most pi/2, so azimuth gets about
  // twice as many steps.
  const int theta_steps = std::min(ring_budget, static_cast<int>(std::ceil(std::sqrt(2.0 * ring_budget))));
  const int phi_steps = std::max(1, ring_budget / theta_steps);
  for (int t = 0; t < theta_steps; ++t) {
    const double theta = 2.0 * std::numbers::pi * t / theta_steps;
    for (int k = 1; k <= phi_steps; ++k) {
      const double phi = params.phi_max * k / phi_steps;
      normals.emplace_back(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi));
      normals.back().normalize();
    }
  }
  return normals;
}

std::vector<CutPlane> plane_family(const TriangleMesh& mesh, const Vec3& normal, int count) {
  std::vector<CutPlane> planes;
  const ProjectionInterval range = project_interval(mesh, normal);
  if (count < 1 || range.length() < 2.0 * kPlaneSnapTolerance) return planes;
  for (int k = 1; k <= count; ++k) {
    const double offset = range.min + k * range.length() / (count + 1);
    if (offset - range.min <= kPlaneSnapTolerance || range.max - offset <= kPlaneSnapTolerance) continue;
    planes.push_back(CutPlane{normal, offset * normal});
  }
  return planes;
}

}  // namespace aerochunk
