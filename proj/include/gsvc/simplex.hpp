#pragma once

#include <Eigen/Core>

namespace gsvc {

struct ChebyshevSolution {
    Eigen::VectorXd u;        // minimizer, exactly inside the box
    double objective = 0.0;   // ||r - W u||_inf at the returned u
    int pivots = 0;           // simplex pivots performed
};

/// Solves  min_u ||r - W u||_inf  s.t.  lo <= u <= up  through the epigraph
/// reformulation (minimize t with -t <= r - W u <= t) using a dense
/// bounded-variable primal simplex. Bland's rule keeps the pivot sequence
/// deterministic and cycle-free. Bounds must be finite with lo <= up.
ChebyshevSolution minimize_chebyshev(const Eigen::VectorXd& r,
                                     const Eigen::MatrixXd& W,
                                     const Eigen::VectorXd& lo,
                                     const Eigen::VectorXd& up);

}  // namespace gsvc
