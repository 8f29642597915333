#pragma once

#include "perinv/types.hpp"

namespace perinv {

/// Flow matrix realising an optimal transport between two weight vectors.
struct TransportPlan {
  Matrix flow;  // rows of A x rows of B
  double total_flow = 0.0;
  double cost = 0.0;
};

struct TransportSolution {
  double value = 0.0;
  TransportPlan plan;
  int pivots = 0;
};

/// Exact balanced transportation problem solved by the network simplex on the
/// bipartite graph. `supply` and `demand` must be positive and each sum to 1.
/// Switches to Bland's rule after a run of degenerate pivots, and certifies the
/// optimum by checking reduced costs. Throws SolverFailure if certification
/// fails.
TransportSolution solve_transport(const Vector& supply, const Vector& demand, const Matrix& cost);

}  // namespace perinv
