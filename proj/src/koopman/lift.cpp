#include "koopuq/koopman/lift.hpp"

#include <random>
#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::koopman {

namespace {

void enumerate_degree(int n_vars, int degree, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
    const auto var = static_cast<int>(current.size());
    if (var == n_vars - 1) {
        current.push_back(degree);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        current.push_back(e);
        enumerate_degree(n_vars, degree - e, current, out);
        current.pop_back();
    }
}

// C(n + k - 1, k), the number of degree-k monomials in n variables, with a
// cap to keep the arithmetic exact.
Eigen::Index monomial_count(Eigen::Index n, int k, Eigen::Index cap) {
    // product over i of (n - 1 + i) / i for i = 1..k
    Eigen::Index value = 1;
    for (int i = 1; i <= k; ++i) {
        value = value * (n - 1 + i) / i;  // exact: numerator holds a binomial multiple
        if (value > cap) return cap + 1;
    }
    return value;
}

}  // namespace

void LiftSpec::validate(Eigen::Index p, Eigen::Index h_dim) const {
    if (max_degree < 1)
        throw config_error("lift: max_degree must be >= 1, got " + std::to_string(max_degree));
    if (p < 1) throw config_error("lift: observable dimension must be >= 1");
    if (h_dim < 0) throw config_error("lift: history dimension must be >= 0");
    if (kind == LiftKind::rbf_then_polynomial) {
        if (rbf_centers.cols() < 1)
            throw config_error("lift: rbf_then_polynomial needs at least one center");
        if (rbf_centers.rows() != p)
            throw config_error("lift: rbf centers have " + std::to_string(rbf_centers.rows()) +
                               " rows, observables have dimension " + std::to_string(p));
    }
    if (dim_cap < 1) throw config_error("lift: dim_cap must be positive");
}

std::vector<std::vector<int>> monomial_exponents(int n_vars, int min_degree, int max_degree) {
    std::vector<std::vector<int>> out;
    if (n_vars < 1) return out;
    std::vector<int> current;
    for (int d = std::max(min_degree, 0); d <= max_degree; ++d)
        enumerate_degree(n_vars, d, current, out);
    return out;
}

Eigen::Index lift_dim(const LiftSpec& spec, Eigen::Index p, Eigen::Index h_dim) {
    spec.validate(p, h_dim);
    const Eigen::Index base =
        spec.kind == LiftKind::polynomial ? p + h_dim : spec.rbf_count();
    if (base == 0) return 0;
    const int lo = spec.include_linear ? 1 : 2;
    Eigen::Index total = 0;
    for (int d = lo; d <= spec.max_degree; ++d) {
        total += monomial_count(base, d, spec.dim_cap);
        if (total > spec.dim_cap)
            throw config_error("lift: dimension exceeds cap of " + std::to_string(spec.dim_cap) +
                               "; lower max_degree or the number of base variables");
    }
    return total;
}

LiftEvaluator::LiftEvaluator(const LiftSpec& spec, Eigen::Index p, Eigen::Index h_dim)
    : spec_(spec), p_(p), h_dim_(h_dim) {
    dim_ = lift_dim(spec, p, h_dim);  // validates
    base_dim_ = spec.kind == LiftKind::polynomial ? p + h_dim : spec.rbf_count();
    exponents_ = monomial_exponents(static_cast<int>(base_dim_),
                                    spec.include_linear ? 1 : 2, spec.max_degree);
}

Eigen::VectorXd LiftEvaluator::operator()(const Eigen::VectorXd& g,
                                          const Eigen::VectorXd& h) const {
    if (g.size() != p_ || h.size() != h_dim_)
        throw data_error("lift: expected dimensions (" + std::to_string(p_) + ", " +
                         std::to_string(h_dim_) + "), got (" + std::to_string(g.size()) + ", " +
                         std::to_string(h.size()) + ")");

    Eigen::VectorXd base(base_dim_);
    if (spec_.kind == LiftKind::polynomial) {
        base.head(p_) = g;
        base.tail(h_dim_) = h;
    } else {
        for (Eigen::Index j = 0; j < base_dim_; ++j)
            base(j) = (g - spec_.rbf_centers.col(j)).norm();
    }

    // Power table base(i)^d for d = 0..max_degree.
    Eigen::MatrixXd powers(base_dim_, spec_.max_degree + 1);
    powers.col(0).setOnes();
    for (int d = 1; d <= spec_.max_degree; ++d)
        powers.col(d) = powers.col(d - 1).cwiseProduct(base);

    Eigen::VectorXd lifted(dim_);
    for (Eigen::Index idx = 0; idx < dim_; ++idx) {
        const auto& expo = exponents_[idx];
        double value = 1.0;
        for (Eigen::Index v = 0; v < base_dim_; ++v)
            if (expo[v] != 0) value *= powers(v, expo[v]);
        lifted(idx) = value;
    }
    return lifted;
}

Eigen::VectorXd evaluate_lift(const LiftSpec& spec, const Eigen::VectorXd& g,
                              const Eigen::VectorXd& h) {
    return LiftEvaluator(spec, g.size(), h.size())(g, h);
}

Eigen::MatrixXd draw_rbf_centers(Eigen::Index count,
                                 const std::vector<std::pair<double, double>>& ranges,
                                 std::uint64_t seed) {
    if (count < 1) throw config_error("rbf centers: count must be >= 1");
    if (ranges.empty()) throw config_error("rbf centers: no coordinate ranges given");
    for (const auto& [lo, hi] : ranges)
        if (!(lo <= hi)) throw config_error("rbf centers: range has lo > hi");

    std::mt19937_64 rng(seed);
    const auto p = static_cast<Eigen::Index>(ranges.size());
    Eigen::MatrixXd centers(p, count);
    for (Eigen::Index j = 0; j < count; ++j)
        for (Eigen::Index i = 0; i < p; ++i) {
            std::uniform_real_distribution<double> dist(ranges[i].first, ranges[i].second);
            centers(i, j) = dist(rng);
        }
    return centers;
}

}  // namespace koopuq::koopman
