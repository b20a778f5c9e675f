#pragma once

namespace aerochunk {

/// Head clearance geometry that bounds the cut slope.
struct ExtruderClearance {
  double nozzle_height = 0.05;  ///< h: nozzle tip to head underside (m)
  double head_length = 0.05;    ///< l: nozzle axis to head outer face (m)
};

/// Arm hanging below the UAV: body origin -> joint (l_ex down the body z axis) -> nozzle
/// (joint rotated by theta about its y axis, then l_g down the rotated z axis).
struct ExtruderGeometry {
  double arm_length = 0.0;     ///< l_ex (m)
  double nozzle_length = 0.0;  ///< l_g (m)
  double joint_angle = 0.0;    ///< theta (rad)
};

}  // namespace aerochunk
