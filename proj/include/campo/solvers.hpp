#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace campo {

// All solvers maximize f over a box. The trace records every true objective
// evaluation in order; values are exactly what f returned at the recorded x.
using ObjectiveFn = std::function<double(std::span<const double>)>;

struct TraceRecord {
    int iteration = 0;  // 0 for initial points
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;       // cumulative true evaluations, strictly increasing
    double millis = 0.0;  // wall time since solver start
};

struct SolverTrace {
    std::vector<TraceRecord> records;

    int eval_count() const { return static_cast<int>(records.size()); }
    const TraceRecord& best() const;
    int best_index() const;
    // First record index whose value reaches v (within tol), or -1.
    int first_reaching(double v, double tol = 0.0) const;
};

void write_trace_csv(const SolverTrace& trace, const std::string& path);

struct BoxBounds {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double span(int i) const { return hi[i] - lo[i]; }
    double diagonal() const;
    std::vector<double> clip(std::span<const double> x) const;
    bool contains(std::span<const double> x) const;
    void validate() const;
};

// Downhill simplex adapted to maximization with reflection 1, expansion 2,
// contraction 0.5, shrink 0.5. Candidates are clipped to the box. If n+1
// initial points are supplied they form the starting simplex; otherwise the
// simplex grows from the first point with steps of 5% of each span. Stops at
// the evaluation budget or when the simplex diameter falls below
// 1e-6 x domain diagonal. A degenerate (affinely dependent) simplex is
// reinitialized around the incumbent at 5% of the domain span.
SolverTrace nelder_mead(const ObjectiveFn& f, const std::vector<std::vector<double>>& initial,
                        const BoxBounds& bounds, int budget);

// Coordinate pattern search: polls +/- steps per axis, accepts the first
// strict improvement, halves all steps after a full stall, stops when steps
// fall below 1e-6 x span or at the budget. Evaluates every initial point and
// starts from the best.
SolverTrace pattern_search(const ObjectiveFn& f, const std::vector<std::vector<double>>& initial,
                           const BoxBounds& bounds, int budget);

// Cubic radial basis interpolant with a linear polynomial tail: the solve is
// a dense symmetric system of size K + n + 1. Appending a sample reuses the
// existing factorization through a bordered update; if the update's residual
// exceeds 1e-6 the system is refactorized from scratch.
class RbfSurrogate {
public:
    // sites: K rows of dimension n, pairwise farther apart than
    // 1e-9 x bounds.diagonal(). Throws std::invalid_argument on duplicates
    // and std::runtime_error if the system stays singular after one jitter
    // retry of the newest site (1e-6 x span per coordinate).
    RbfSurrogate(Eigen::MatrixXd sites, Eigen::VectorXd values, const BoxBounds& bounds);

    void append(std::span<const double> site, double value);

    double value_at(std::span<const double> x) const;

    int sample_count() const { return static_cast<int>(sites_.rows()); }
    int dim() const { return n_; }
    const Eigen::MatrixXd& sites() const { return sites_; }

    // max_k |f~(s_k) - f_k| / (1 + |f_k|); the interpolation exactness.
    double max_interpolation_residual() const;
    double log_abs_determinant() const { return log_abs_det_; }

private:
    struct Border {
        Eigen::VectorXd u, y;  // y = A_prev^{-1} u
        double schur = 0.0;
    };

    void assemble_and_factor();
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::VectorXd system_row(std::span<const double> site) const;
    Eigen::VectorXd system_rhs() const;
    void rebuild_coefficients(const Eigen::VectorXd& solution);

    int n_ = 0;
    double min_site_distance_ = 0.0;
    std::vector<double> spans_;
    Eigen::MatrixXd sites_;   // K x n
    Eigen::VectorXd values_;  // K
    Eigen::VectorXd lambda_;  // K kernel weights
    Eigen::VectorXd tail_;    // n+1 polynomial coefficients (1, x)

    Eigen::MatrixXd system_;  // (K+n+1)^2, unknown order [lambda_base.., tail.., lambda_appended..]
    Eigen::PartialPivLU<Eigen::MatrixXd> base_lu_;
    int base_sites_ = 0;
    std::vector<Border> borders_;
    double log_abs_det_ = 0.0;
};

// Convenience wrapper matching the fit operation.
RbfSurrogate fit_surrogate(const Eigen::MatrixXd& sites, const Eigen::VectorXd& values,
                           const BoxBounds& bounds);

struct CorsOptions {
    int budget = 200;       // true objective evaluations, initial sites included
    uint64_t seed = 1;
    int delta_random_starts = 64;
    int search_multistarts = 24;
};

struct CorsIterationInfo {
    double delta = 0.0;
    double beta = 0.0;
};

// CORS-RBF surrogate optimization: fit/update the interpolant on all samples,
// estimate Delta = max over the domain of the distance to the nearest sample
// (local ascent from random starts plus all sample-pair midpoints), maximize
// the surrogate subject to staying at least beta * Delta away from every
// sample - beta cycling <0.98, 0.6, 0.75, 0.2, 0.01> - then evaluate the true
// objective at the winner and append it. Needs at least n+1 initial sites.
// If the distance constraint is infeasible the next ratio in the cycle is
// tried; when every ratio is infeasible the solver stops.
SolverTrace cors_rbf(const ObjectiveFn& f, const std::vector<std::vector<double>>& initial_sites,
                     const BoxBounds& bounds, const CorsOptions& opts,
                     std::vector<CorsIterationInfo>* iteration_info = nullptr);

}  // namespace campo
