#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aerochunk {

/// Process exit codes used by the command line driver.
enum class ExitCode : int {
  Ok = 0,
  Infeasible = 2,
  InvariantViolation = 3,
  IoOrParse = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Mesh failed a structural invariant (watertightness, orientation, volume).
class MeshError : public Error {
 public:
  using Error::Error;
};

class NonWatertightError : public MeshError {
 public:
  NonWatertightError(std::string what, std::vector<std::pair<int, int>> edges)
      : MeshError(std::move(what)), boundary_edges_(std::move(edges)) {}

  /// Directed edges (vertex index pairs) that lack a matching opposite edge.
  const std::vector<std::pair<int, int>>& boundary_edges() const { return boundary_edges_; }

 private:
  std::vector<std::pair<int, int>> boundary_edges_;
};

/// A cut that misses its target or produces a part below the minimum volume.
class CutError : public Error {
 public:
  using Error::Error;
};

/// Fleet cannot carry the mesh or a decomposition cannot be assigned.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace aerochunk
