#include "campo/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>

namespace campo {

// ---------------------------------------------------------------- trace

const TraceRecord& SolverTrace::best() const {
    if (records.empty()) throw std::runtime_error("empty solver trace");
    return records[best_index()];
}

int SolverTrace::best_index() const {
    int best = 0;
    for (size_t i = 1; i < records.size(); ++i)
        if (records[i].value > records[best].value) best = static_cast<int>(i);
    return best;
}

int SolverTrace::first_reaching(double v, double tol) const {
    for (size_t i = 0; i < records.size(); ++i)
        if (records[i].value >= v - tol) return static_cast<int>(i);
    return -1;
}

void write_trace_csv(const SolverTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const int n = trace.records.empty() ? 0 : static_cast<int>(trace.records[0].x.size());
    out << "iter,evals,value,best_value,millis";
    for (int i = 0; i < n; ++i) out << ",x_" << i + 1;
    out << '\n';
    char buf[96];
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : trace.records) {
        best = std::max(best, r.value);
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.3f", r.iteration, r.evals, r.value, best,
                      r.millis);
        out << buf;
        for (double v : r.x) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------- bounds

double BoxBounds::diagonal() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += span(i) * span(i);
    return std::sqrt(s);
}

std::vector<double> BoxBounds::clip(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    for (int i = 0; i < dim(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
    return out;
}

bool BoxBounds::contains(std::span<const double> x) const {
    for (int i = 0; i < dim(); ++i)
        if (!(x[i] >= lo[i]) || !(x[i] <= hi[i])) return false;
    return true;
}

void BoxBounds::validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("bounds: dimension mismatch");
    for (size_t i = 0; i < lo.size(); ++i)
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
            throw std::invalid_argument("bounds: must be finite with lower <= upper");
}

// ---------------------------------------------------------------- helpers

namespace {

// Seeded uniform draws derived from raw 64-bit output, so results do not
// depend on the standard library's distribution implementation.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}
    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

class Recorder {
public:
    Recorder(const ObjectiveFn& f, int budget)
        : f_(f), budget_(budget), start_(std::chrono::steady_clock::now()) {}

    bool exhausted() const { return static_cast<int>(trace_.records.size()) >= budget_; }

    std::optional<double> eval(std::span<const double> x, int iteration) {
        if (exhausted()) return std::nullopt;
        const double v = f_(x);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                    start_)
                              .count();
        trace_.records.push_back({iteration, std::vector<double>(x.begin(), x.end()), v,
                                  static_cast<int>(trace_.records.size()) + 1, ms});
        return v;
    }

    SolverTrace take() { return std::move(trace_); }

private:
    const ObjectiveFn& f_;
    int budget_;
    std::chrono::steady_clock::time_point start_;
    SolverTrace trace_;
};

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------- nelder-mead

SolverTrace nelder_mead(const ObjectiveFn& f, const std::vector<std::vector<double>>& initial,
                        const BoxBounds& bounds, int budget) {
    bounds.validate();
    const int n = bounds.dim();
    if (initial.empty()) throw std::invalid_argument("nelder_mead: need at least one initial point");
    if (budget < n + 1) throw std::invalid_argument("nelder_mead: budget must be >= n+1");

    Recorder rec(f, budget);
    const double diag = bounds.diagonal();

    auto grow_simplex = [&](const std::vector<double>& x0) {
        std::vector<std::vector<double>> simplex{bounds.clip(x0)};
        for (int i = 0; i < n; ++i) {
            std::vector<double> v = simplex[0];
            const double h = 0.05 * bounds.span(i);
            v[i] = v[i] + h <= bounds.hi[i] ? v[i] + h : v[i] - h;
            simplex.push_back(bounds.clip(v));
        }
        return simplex;
    };

    std::vector<std::vector<double>> simplex;
    if (static_cast<int>(initial.size()) >= n + 1)
        for (int i = 0; i <= n; ++i) simplex.push_back(bounds.clip(initial[i]));
    else
        simplex = grow_simplex(initial[0]);

    std::vector<double> value(n + 1);
    for (int i = 0; i <= n; ++i) {
        auto v = rec.eval(simplex[i], 0);
        if (!v) return rec.take();
        value[i] = *v;
    }

    auto degenerate = [&](const std::vector<std::vector<double>>& s) {
        Eigen::MatrixXd edges(n, n);
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < n; ++d) edges(d, i) = s[i + 1][d] - s[0][d];
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(edges);
        qr.setThreshold(1e-12);
        return qr.rank() < n;
    };

    for (int iter = 1; !rec.exhausted(); ++iter) {
        // order best..worst (maximization)
        std::vector<int> ord(n + 1);
        for (int i = 0; i <= n; ++i) ord[i] = i;
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return value[a] > value[b]; });
        std::vector<std::vector<double>> s(n + 1);
        std::vector<double> sv(n + 1);
        for (int i = 0; i <= n; ++i) {
            s[i] = simplex[ord[i]];
            sv[i] = value[ord[i]];
        }
        simplex = s;
        value = sv;

        double diameter = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) diameter = std::max(diameter, distance(simplex[i], simplex[j]));
        if (diameter < 1e-6 * diag) break;

        if (degenerate(simplex)) {
            // clipping can flatten the simplex against a face; restart around
            // the incumbent at 5% of the domain span
            auto fresh = grow_simplex(simplex[0]);
            bool ok = true;
            for (int i = 1; i <= n; ++i) {
                auto v = rec.eval(fresh[i], iter);
                if (!v) {
                    ok = false;
                    break;
                }
                simplex[i] = fresh[i];
                value[i] = *v;
            }
            if (!ok) break;
            continue;
        }

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int v = 0; v < n; ++v) centroid[v] += simplex[i][v];
        }
        for (double& c : centroid) c /= n;
        const std::vector<double>& worst = simplex[n];

        auto along = [&](double coeff) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = centroid[i] + coeff * (centroid[i] - worst[i]);
            return bounds.clip(x);
        };

        const auto xr = along(1.0);
        auto fr = rec.eval(xr, iter);
        if (!fr) break;

        if (*fr > value[0]) {
            const auto xe = along(2.0);
            auto fe = rec.eval(xe, iter);
            if (!fe) break;
            if (*fe > *fr) {
                simplex[n] = xe;
                value[n] = *fe;
            } else {
                simplex[n] = xr;
                value[n] = *fr;
            }
        } else if (*fr > value[n - 1]) {
            simplex[n] = xr;
            value[n] = *fr;
        } else {
            const bool outside = *fr > value[n];
            const auto xc = along(outside ? 0.5 : -0.5);
            auto fc = rec.eval(xc, iter);
            if (!fc) break;
            const double gate = outside ? *fr : value[n];
            if (*fc >= gate) {
                simplex[n] = xc;
                value[n] = *fc;
            } else {
                // shrink toward the best vertex
                bool ok = true;
                for (int i = 1; i <= n; ++i) {
                    for (int v = 0; v < n; ++v)
                        simplex[i][v] = simplex[0][v] + 0.5 * (simplex[i][v] - simplex[0][v]);
                    auto fv = rec.eval(simplex[i], iter);
                    if (!fv) {
                        ok = false;
                        break;
                    }
                    value[i] = *fv;
                }
                if (!ok) break;
            }
        }
    }
    return rec.take();
}

// ---------------------------------------------------------------- pattern search

SolverTrace pattern_search(const ObjectiveFn& f, const std::vector<std::vector<double>>& initial,
                           const BoxBounds& bounds, int budget) {
    bounds.validate();
    const int n = bounds.dim();
    if (initial.empty()) throw std::invalid_argument("pattern_search: need at least one initial point");

    Recorder rec(f, budget);
    std::vector<double> center;
    double center_val = -std::numeric_limits<double>::infinity();
    for (const auto& x0 : initial) {
        auto x = bounds.clip(x0);
        auto v = rec.eval(x, 0);
        if (!v) return rec.take();
        if (*v > center_val) {
            center_val = *v;
            center = x;
        }
    }

    std::vector<double> step(n);
    for (int i = 0; i < n; ++i) step[i] = 0.25 * bounds.span(i);

    for (int iter = 1; !rec.exhausted(); ++iter) {
        bool all_tiny = true;
        for (int i = 0; i < n; ++i)
            if (step[i] >= 1e-6 * bounds.span(i) && bounds.span(i) > 0.0) all_tiny = false;
        if (all_tiny) break;

        bool improved = false;
        for (int i = 0; i < n && !improved; ++i) {
            for (int sign = 0; sign < 2 && !improved; ++sign) {
                std::vector<double> cand = center;
                cand[i] += sign == 0 ? step[i] : -step[i];
                cand = bounds.clip(cand);
                if (cand[i] == center[i]) continue;  // clipped to no-op
                auto v = rec.eval(cand, iter);
                if (!v) return rec.take();
                if (*v > center_val) {  // strict improvement only
                    center = cand;
                    center_val = *v;
                    improved = true;
                }
            }
        }
        if (!improved)
            for (double& s : step) s *= 0.5;
    }
    return rec.take();
}

// ---------------------------------------------------------------- RBF surrogate

namespace {
inline double cubic_kernel(double r) { return r * r * r; }
}

RbfSurrogate::RbfSurrogate(Eigen::MatrixXd sites, Eigen::VectorXd values, const BoxBounds& bounds)
    : n_(static_cast<int>(sites.cols())), sites_(std::move(sites)), values_(std::move(values)) {
    bounds.validate();
    if (n_ != bounds.dim()) throw std::invalid_argument("surrogate: site dimension mismatch");
    if (sites_.rows() != values_.size()) throw std::invalid_argument("surrogate: site/value count mismatch");
    if (sites_.rows() < n_ + 1)
        throw std::invalid_argument("surrogate: need at least n+1 samples, got " +
                                    std::to_string(sites_.rows()));
    min_site_distance_ = 1e-9 * bounds.diagonal();
    spans_.resize(n_);
    for (int i = 0; i < n_; ++i) spans_[i] = bounds.span(i);

    const int k = static_cast<int>(sites_.rows());
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if ((sites_.row(i) - sites_.row(j)).norm() <= min_site_distance_)
                throw std::invalid_argument("surrogate: duplicate sites " + std::to_string(i) +
                                            " and " + std::to_string(j));

    try {
        assemble_and_factor();
    } catch (const std::runtime_error&) {
        // jitter the newest site once, then give up
        for (int i = 0; i < n_; ++i)
            sites_(k - 1, i) += (i % 2 == 0 ? 1.0 : -1.0) * 1e-6 * spans_[i];
        assemble_and_factor();
    }
    rebuild_coefficients(solve(system_rhs()));
}

Eigen::VectorXd RbfSurrogate::system_rhs() const {
    const int k = static_cast<int>(sites_.rows());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + n_ + 1);
    for (int i = 0; i < base_sites_; ++i) rhs(i) = values_(i);
    for (int i = base_sites_; i < k; ++i) rhs(base_sites_ + n_ + 1 + (i - base_sites_)) = values_(i);
    return rhs;
}

void RbfSurrogate::assemble_and_factor() {
    const int k = static_cast<int>(sites_.rows());
    const int m = k + n_ + 1;
    system_.resize(m, m);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j)
            system_(i, j) = cubic_kernel((sites_.row(i) - sites_.row(j)).norm());
        system_(i, k) = 1.0;
        system_(k, i) = 1.0;
        for (int d = 0; d < n_; ++d) {
            system_(i, k + 1 + d) = sites_(i, d);
            system_(k + 1 + d, i) = sites_(i, d);
        }
    }
    system_.block(k, k, n_ + 1, n_ + 1).setZero();

    base_lu_.compute(system_);
    borders_.clear();
    base_sites_ = k;

    const Eigen::VectorXd diag = base_lu_.matrixLU().diagonal().cwiseAbs();
    const double dmax = diag.maxCoeff();
    if (dmax == 0.0 || diag.minCoeff() < 1e-14 * dmax)
        throw std::runtime_error("surrogate: interpolation system is singular");
    log_abs_det_ = diag.array().log().sum();
}

Eigen::VectorXd RbfSurrogate::solve(const Eigen::VectorXd& rhs) const {
    // peel the bordered levels from the outside in
    std::function<Eigen::VectorXd(int, const Eigen::VectorXd&)> level =
        [&](int k, const Eigen::VectorXd& b) -> Eigen::VectorXd {
        if (k == 0) return base_lu_.solve(b);
        const Border& border = borders_[k - 1];
        const int m = static_cast<int>(b.size()) - 1;
        const Eigen::VectorXd z = level(k - 1, b.head(m));
        const double beta = (b(m) - border.u.dot(z)) / border.schur;
        Eigen::VectorXd out(m + 1);
        out.head(m) = z - beta * border.y;
        out(m) = beta;
        return out;
    };
    return level(static_cast<int>(borders_.size()), rhs);
}

Eigen::VectorXd RbfSurrogate::system_row(std::span<const double> site) const {
    const int k = static_cast<int>(sites_.rows());
    Eigen::Map<const Eigen::VectorXd> s(site.data(), n_);
    Eigen::VectorXd u(k + n_ + 1);
    auto kernel_to = [&](int j) { return cubic_kernel((sites_.row(j).transpose() - s).norm()); };
    for (int j = 0; j < base_sites_; ++j) u(j) = kernel_to(j);
    u(base_sites_) = 1.0;
    for (int d = 0; d < n_; ++d) u(base_sites_ + 1 + d) = s(d);
    for (int j = base_sites_; j < k; ++j) u(base_sites_ + n_ + 1 + (j - base_sites_)) = kernel_to(j);
    return u;
}

void RbfSurrogate::rebuild_coefficients(const Eigen::VectorXd& w) {
    const int k = static_cast<int>(sites_.rows());
    lambda_.resize(k);
    for (int i = 0; i < base_sites_; ++i) lambda_(i) = w(i);
    for (int i = base_sites_; i < k; ++i) lambda_(i) = w(base_sites_ + n_ + 1 + (i - base_sites_));
    tail_ = w.segment(base_sites_, n_ + 1);
}

void RbfSurrogate::append(std::span<const double> site, double value) {
    if (static_cast<int>(site.size()) != n_) throw std::invalid_argument("surrogate: bad site dimension");
    const int k = static_cast<int>(sites_.rows());
    Eigen::Map<const Eigen::VectorXd> s(site.data(), n_);
    for (int i = 0; i < k; ++i)
        if ((sites_.row(i).transpose() - s).norm() <= min_site_distance_)
            throw std::invalid_argument("surrogate: new site duplicates site " + std::to_string(i));

    const Eigen::VectorXd u = system_row(site);
    const Eigen::VectorXd y = solve(u);
    const double schur = 0.0 - u.dot(y);

    // grow the stored system
    const int m = static_cast<int>(system_.rows());
    system_.conservativeResize(m + 1, m + 1);
    system_.row(m).head(m) = u.transpose();
    system_.col(m).head(m) = u;
    system_(m, m) = 0.0;

    sites_.conservativeResize(k + 1, n_);
    sites_.row(k) = s.transpose();
    values_.conservativeResize(k + 1);
    values_(k) = value;

    const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
    bool need_refactor = !(std::abs(schur) > 1e-12 * scale);
    if (!need_refactor) {
        borders_.push_back({u, y, schur});
        log_abs_det_ += std::log(std::abs(schur));
        const Eigen::VectorXd rhs = system_rhs();
        const Eigen::VectorXd w = solve(rhs);
        const double residual = (system_ * w - rhs).lpNorm<Eigen::Infinity>() /
                                (1.0 + rhs.lpNorm<Eigen::Infinity>());
        if (residual > 1e-6) {
            borders_.pop_back();
            need_refactor = true;
        } else {
            rebuild_coefficients(w);
            return;
        }
    }

    // bordered update unreliable: refactorize from scratch
    try {
        assemble_and_factor();
    } catch (const std::runtime_error&) {
        for (int i = 0; i < n_; ++i)
            sites_(k, i) += (i % 2 == 0 ? 1.0 : -1.0) * 1e-6 * spans_[i];
        assemble_and_factor();  // rethrows if still singular
    }
    rebuild_coefficients(solve(system_rhs()));
}

double RbfSurrogate::value_at(std::span<const double> x) const {
    Eigen::Map<const Eigen::VectorXd> p(x.data(), n_);
    double v = tail_(0);
    for (int d = 0; d < n_; ++d) v += tail_(1 + d) * p(d);
    for (int i = 0; i < sites_.rows(); ++i)
        v += lambda_(i) * cubic_kernel((sites_.row(i).transpose() - p).norm());
    return v;
}

double RbfSurrogate::max_interpolation_residual() const {
    double worst = 0.0;
    for (int i = 0; i < sites_.rows(); ++i) {
        std::vector<double> x(sites_.row(i).begin(), sites_.row(i).end());
        const double err = std::abs(value_at(x) - values_(i)) / (1.0 + std::abs(values_(i)));
        worst = std::max(worst, err);
    }
    return worst;
}

RbfSurrogate fit_surrogate(const Eigen::MatrixXd& sites, const Eigen::VectorXd& values,
                           const BoxBounds& bounds) {
    return RbfSurrogate(sites, values, bounds);
}

// ---------------------------------------------------------------- CORS-RBF

namespace {

double min_distance_to(const Eigen::MatrixXd& sites, std::span<const double> x) {
    Eigen::Map<const Eigen::RowVectorXd> p(x.data(), x.size());
    return (sites.rowwise() - p).rowwise().norm().minCoeff();
}

int nearest_site(const Eigen::MatrixXd& sites, std::span<const double> x) {
    Eigen::Map<const Eigen::RowVectorXd> p(x.data(), x.size());
    int idx = 0;
    (sites.rowwise() - p).rowwise().squaredNorm().minCoeff(&idx);
    return idx;
}

// max over the domain of the distance to the nearest sample, approximated by
// hill climbing on the min-distance function from random starts plus all
// sample-pair midpoints
double estimate_delta(const Eigen::MatrixXd& sites, const BoxBounds& bounds, Rng& rng,
                      int random_starts) {
    const int n = bounds.dim();
    const int k = static_cast<int>(sites.rows());
    const double diag = bounds.diagonal();

    std::vector<std::vector<double>> starts;
    starts.reserve(random_starts + k * (k - 1) / 2);
    for (int s = 0; s < random_starts; ++s) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
        starts.push_back(std::move(x));
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            std::vector<double> x(n);
            for (int d = 0; d < n; ++d) x[d] = 0.5 * (sites(i, d) + sites(j, d));
            starts.push_back(std::move(x));
        }

    double best = 0.0;
    for (auto& start : starts) {
        std::vector<double> x = bounds.clip(start);
        double d = min_distance_to(sites, x);
        double step = diag / 8.0;
        for (int it = 0; it < 64 && step > 1e-6 * diag; ++it) {
            const int near = nearest_site(sites, x);
            // ascent direction: straight away from the nearest sample
            std::vector<double> g(n);
            double glen = 0.0;
            for (int i = 0; i < n; ++i) {
                g[i] = x[i] - sites(near, i);
                glen += g[i] * g[i];
            }
            glen = std::sqrt(glen);
            if (glen == 0.0) break;
            std::vector<double> cand(n);
            for (int i = 0; i < n; ++i) cand[i] = x[i] + step * g[i] / glen;
            cand = bounds.clip(cand);
            const double dc = min_distance_to(sites, cand);
            if (dc > d) {
                x = cand;
                d = dc;
            } else {
                step *= 0.5;
            }
        }
        best = std::max(best, d);
    }
    return best;
}

// Maximizes the surrogate subject to min-distance >= radius from every
// sample: multistart compass search with infeasible candidates repaired by
// projecting away from the nearest sample. Returns nullopt when no feasible
// start can be drawn.
std::optional<std::vector<double>> maximize_surrogate(const RbfSurrogate& surrogate,
                                                      const BoxBounds& bounds, double radius,
                                                      Rng& rng, int multistarts) {
    const int n = bounds.dim();
    const Eigen::MatrixXd& sites = surrogate.sites();

    auto feasible = [&](std::span<const double> x) { return min_distance_to(sites, x) >= radius; };

    auto repair = [&](std::vector<double> x) -> std::optional<std::vector<double>> {
        for (int attempt = 0; attempt < 4; ++attempt) {
            if (feasible(x)) return x;
            const int near = nearest_site(sites, x);
            double len = 0.0;
            std::vector<double> dir(n);
            for (int i = 0; i < n; ++i) {
                dir[i] = x[i] - sites(near, i);
                len += dir[i] * dir[i];
            }
            len = std::sqrt(len);
            if (len == 0.0) return std::nullopt;
            for (int i = 0; i < n; ++i) x[i] = sites(near, i) + dir[i] / len * radius * (1.0 + 1e-12);
            x = bounds.clip(x);  // clipping may re-violate; loop re-checks
        }
        return feasible(x) ? std::optional(x) : std::nullopt;
    };

    std::vector<std::vector<double>> starts;
    const int max_attempts = 400 * multistarts;
    for (int a = 0; a < max_attempts && static_cast<int>(starts.size()) < multistarts; ++a) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
        if (feasible(x)) starts.push_back(std::move(x));
    }
    if (starts.empty()) return std::nullopt;

    std::optional<std::vector<double>> best;
    double best_val = -std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
        std::vector<double> cur = start;
        double cur_val = surrogate.value_at(cur);
        std::vector<double> step(n);
        for (int i = 0; i < n; ++i) step[i] = bounds.span(i) / 8.0;
        for (int round = 0; round < 64; ++round) {
            bool improved = false;
            for (int i = 0; i < n; ++i) {
                for (int sign = 0; sign < 2; ++sign) {
                    std::vector<double> cand = cur;
                    cand[i] += sign == 0 ? step[i] : -step[i];
                    cand = bounds.clip(cand);
                    auto fixed = repair(std::move(cand));
                    if (!fixed) continue;
                    const double v = surrogate.value_at(*fixed);
                    if (v > cur_val) {
                        cur = std::move(*fixed);
                        cur_val = v;
                        improved = true;
                    }
                }
            }
            if (!improved) {
                bool tiny = true;
                for (int i = 0; i < n; ++i) {
                    step[i] *= 0.5;
                    if (step[i] > 1e-8 * std::max(1.0, bounds.span(i))) tiny = false;
                }
                if (tiny) break;
            }
        }
        if (cur_val > best_val && feasible(cur)) {
            best_val = cur_val;
            best = cur;
        }
    }
    return best;
}

}  // namespace

SolverTrace cors_rbf(const ObjectiveFn& f, const std::vector<std::vector<double>>& initial_sites,
                     const BoxBounds& bounds, const CorsOptions& opts,
                     std::vector<CorsIterationInfo>* iteration_info) {
    bounds.validate();
    const int n = bounds.dim();
    if (static_cast<int>(initial_sites.size()) < n + 1)
        throw std::invalid_argument("cors_rbf: needs at least n+1 initial sites, got " +
                                    std::to_string(initial_sites.size()));
    for (const auto& s : initial_sites)
        if (!bounds.contains(s)) throw std::invalid_argument("cors_rbf: initial site out of bounds");

    static const double kRatios[5] = {0.98, 0.6, 0.75, 0.2, 0.01};
    const double min_gap = 1e-9 * bounds.diagonal();

    Recorder rec(f, opts.budget);
    Rng rng(opts.seed);

    Eigen::MatrixXd sites(initial_sites.size(), n);
    Eigen::VectorXd values(initial_sites.size());
    for (size_t i = 0; i < initial_sites.size(); ++i) {
        auto v = rec.eval(initial_sites[i], 0);
        if (!v) return rec.take();
        for (int d = 0; d < n; ++d) sites(static_cast<int>(i), d) = initial_sites[i][d];
        values(static_cast<int>(i)) = *v;
    }

    RbfSurrogate surrogate(sites, values, bounds);

    for (int iter = 1; !rec.exhausted(); ++iter) {
        const double delta = estimate_delta(surrogate.sites(), bounds, rng, opts.delta_random_starts);

        std::optional<std::vector<double>> winner;
        double used_beta = 0.0;
        for (int attempt = 0; attempt < 5; ++attempt) {
            const double beta = kRatios[(iter - 1 + attempt) % 5];
            const double radius = std::max(beta * delta, min_gap);
            winner = maximize_surrogate(surrogate, bounds, radius, rng, opts.search_multistarts);
            if (winner) {
                used_beta = beta;
                break;
            }
        }
        if (!winner) break;  // domain exhausted at every ratio

        auto val = rec.eval(*winner, iter);
        if (!val) break;
        surrogate.append(*winner, *val);
        if (iteration_info) iteration_info->push_back({delta, used_beta});
    }
    return rec.take();
}

}  // namespace campo
