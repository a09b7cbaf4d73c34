#pragma once

// Dense symmetric eigenvalue computation behind a validated contract:
// input must be symmetric to 1e-12 relative tolerance, output is the
// ascending spectrum.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace lsi {

inline std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("symmetric_eigenvalues: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("symmetric_eigenvalues: eigensolver failed");
    const auto& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace lsi
