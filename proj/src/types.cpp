#include "plq/types.hpp"

#include <Eigen/Eigenvalues>

namespace plq {

double max_real_eigenvalue(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& m) {
    const double scale = std::max(1.0, m.norm());
    return max_real_eigenvalue(m) < -1e-12 * scale;
}

double min_symmetric_eigenvalue(const Matrix& m) {
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace plq
