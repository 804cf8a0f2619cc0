#include "koopuq/koopman/pod.hpp"

#include <string>

#include "koopuq/errors.hpp"
#include "koopuq/numeric/linalg.hpp"

namespace koopuq::koopman {

namespace {

Eigen::MatrixXd stack_snapshots(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                                const Eigen::MatrixXd& upsilon) {
    const Eigen::Index t_count = x.cols();
    if (t_count < 1) throw data_error("pod: empty snapshot set");
    if ((u.size() > 0 && u.cols() != t_count) || (upsilon.size() > 0 && upsilon.cols() != t_count))
        throw data_error("pod: snapshot blocks have mismatched column counts");

    Eigen::MatrixXd b(x.rows() + u.rows() + upsilon.rows(), t_count);
    b.topRows(x.rows()) = x;
    if (u.rows() > 0) b.middleRows(x.rows(), u.rows()) = u;
    if (upsilon.rows() > 0) b.bottomRows(upsilon.rows()) = upsilon;
    return b;
}

PodBasis from_svd(const Eigen::BDCSVD<Eigen::MatrixXd>& svd, Eigen::Index zeta) {
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::Index rank = numeric::svd_rank(sv, 1e-12);
    if (zeta < 1 || zeta > rank)
        throw data_error("pod: requested " + std::to_string(zeta) +
                         " modes, but the snapshot stack has numerical rank " +
                         std::to_string(rank));

    PodBasis basis;
    basis.phi = svd.matrixU().leftCols(zeta);
    basis.eigenvalues = sv.head(zeta).array().square();
    const double total = sv.array().square().sum();
    basis.energy_fraction = total > 0.0 ? basis.eigenvalues.sum() / total : 0.0;
    return basis;
}

}  // namespace

PodBasis compute_pod(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                     const Eigen::MatrixXd& upsilon, Eigen::Index zeta) {
    const Eigen::MatrixXd b = stack_snapshots(x, u, upsilon);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU);
    return from_svd(svd, zeta);
}

PodBasis compute_pod_energy(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                            const Eigen::MatrixXd& upsilon, double energy_target) {
    if (!(energy_target > 0.0 && energy_target <= 1.0))
        throw config_error("pod: energy target must lie in (0, 1], got " +
                           std::to_string(energy_target));

    const Eigen::MatrixXd b = stack_snapshots(x, u, upsilon);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU);
    const Eigen::VectorXd energies = svd.singularValues().array().square();
    const double total = energies.sum();
    if (!(total > 0.0)) throw data_error("pod: snapshot stack is identically zero");

    const Eigen::Index rank = numeric::svd_rank(svd.singularValues(), 1e-12);
    Eigen::Index zeta = 1;
    double running = energies(0);
    while (zeta < rank && running < energy_target * total) {
        running += energies(zeta);
        ++zeta;
    }
    return from_svd(svd, zeta);
}

}  // namespace koopuq::koopman
