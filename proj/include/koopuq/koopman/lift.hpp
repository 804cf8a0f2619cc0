#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace koopuq::koopman {

enum class LiftKind {
    polynomial,             // monomials of the stacked vector [g; h]
    rbf_then_polynomial,    // monomials of radial distances ||g - center_j||
};

struct LiftSpec {
    LiftKind kind = LiftKind::polynomial;
    int max_degree = 4;
    bool include_linear = false;  // monomials start at degree 2 unless set
    Eigen::MatrixXd rbf_centers;  // p x n_centers, one column per center
    Eigen::Index dim_cap = 200000;  // refuse lifts larger than this

    Eigen::Index rbf_count() const { return rbf_centers.cols(); }

    // Checks shape/degree consistency against an observable dimension p and
    // history dimension h_dim; throws config_error.
    void validate(Eigen::Index p, Eigen::Index h_dim) const;
};

// Exponent vectors of all monomials in n_vars variables with total degree in
// [min_degree, max_degree], in graded order: degree ascending, and within a
// degree lexicographically with earlier variables taking higher powers first.
std::vector<std::vector<int>> monomial_exponents(int n_vars, int min_degree, int max_degree);

// Dimension L of the lifted vector. Throws config_error past spec.dim_cap.
Eigen::Index lift_dim(const LiftSpec& spec, Eigen::Index p, Eigen::Index h_dim);

// Precomputed evaluator; builds the exponent table once.
class LiftEvaluator {
public:
    LiftEvaluator(const LiftSpec& spec, Eigen::Index p, Eigen::Index h_dim);

    Eigen::Index dim() const { return dim_; }
    Eigen::VectorXd operator()(const Eigen::VectorXd& g, const Eigen::VectorXd& h) const;

private:
    LiftSpec spec_;
    Eigen::Index p_, h_dim_, base_dim_, dim_;
    std::vector<std::vector<int>> exponents_;
};

// One-shot convenience wrapper around LiftEvaluator.
Eigen::VectorXd evaluate_lift(const LiftSpec& spec, const Eigen::VectorXd& g,
                              const Eigen::VectorXd& h);

// Centers sampled uniformly and independently per coordinate from the given
// [lo, hi] ranges (one per observable coordinate), reproducible via seed.
Eigen::MatrixXd draw_rbf_centers(Eigen::Index count,
                                 const std::vector<std::pair<double, double>>& ranges,
                                 std::uint64_t seed);

}  // namespace koopuq::koopman
