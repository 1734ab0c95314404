#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinnlab/mms.hpp"

namespace pinnlab {

/// Uniform mesh over [-1, 1]. Endpoints are exact; spacing is uniform to
/// machine precision.
struct Mesh {
  int n_nodes = 0;
  double dx = 0.0;
  std::vector<double> nodes;
};

/// n_nodes >= 5: the outflow closure reaches back three nodes and node 1
/// needs an upstream neighbor distinct from it.
Mesh build_mesh(int n_nodes);

enum class SolveStatus : std::uint8_t {
  converged,           // max-norm residual dropped below tol
  stalled_at_roundoff  // iteration reached a floating-point fixed point above tol
};

struct FdSolution {
  Mesh mesh;
  double nu = 0.0;
  LogBase log_base = LogBase::natural;
  std::vector<double> values;
  std::int64_t iterations = 0;
  double final_residual = 0.0;
  SolveStatus status = SolveStatus::converged;
};

struct LabelError {
  double location;
  double epsilon;  // u_numeric - u_mms at the node
};

struct SolveOptions {
  double cfl = 0.4;
  double tol = 1e-12;          // residual max-norm target
  std::int64_t max_iters = 50'000'000;
  double stall_check_below = 1e-6;  // engage fixed-point detection under this residual
};

struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Steady Burgers residual per node for a given field:
///   interior i>=2:  u_i*(3u_i-4u_{i-1}+u_{i-2})/(2dx) - nu*(u_{i+1}-2u_i+u_{i-1})/dx^2 - S_i
///   i=1:            first-order upwind convection, central diffusion
///   i=n-1:          upwind convection, one-sided second-order diffusion
///                   (2u_i-5u_{i-1}+4u_{i-2}-u_{i-3})/dx^2 (do-nothing outflow)
/// The Dirichlet inflow node reports residual 0.
std::vector<double> spatial_residual(std::span<const double> values, const Mesh& mesh,
                                     Viscosity nu, std::span<const double> source);

/// Same, with the source evaluated from the manufactured solution.
std::vector<double> spatial_residual(std::span<const double> values, const Mesh& mesh,
                                     Viscosity nu, LogBase base = LogBase::natural);

/// Explicit pseudo-time march to the steady state of the discrete operator.
/// Each sweep advances a 4-stage Runge-Kutta step with
/// dt = cfl*min(dx/max|u|, dx^2/(2 nu)); the inflow node is pinned to the
/// manufactured boundary value at every stage. Stops when the residual
/// max-norm falls below tol, or when the iteration reaches an exact
/// floating-point fixed point (reported as stalled_at_roundoff; the 1e-12
/// default tolerance sits below the attainable double-precision floor on the
/// finer meshes). Throws NonConvergenceError / DivergenceError otherwise.
FdSolution solve_steady(const Mesh& mesh, Viscosity nu, const SolveOptions& opts = {},
                        LogBase base = LogBase::natural);

/// Pointwise label inconsistency u_numeric - u_mms at every node.
std::vector<LabelError> label_errors(const FdSolution& solution);

}  // namespace pinnlab
