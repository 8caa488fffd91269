#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlap/digraph.hpp"
#include "dlap/spectral.hpp"

namespace dlap {

/// Eigenvalues of P within this distance of the unit circle count as modulus 1.
inline constexpr double kUnitModulusTolerance = 1e-9;

/**
 * Perron matrix P = I - epsilon L with its structural flags.
 *
 * Diagonal entries that cancel to within a few ulps of zero are stored as
 * exactly zero, so epsilon = 1 / max_i l_ii yields a zero diagonal entry
 * rather than rounding noise of either sign.
 */
class PerronMatrix {
public:
    PerronMatrix(const LaplacianMatrix &l, double epsilon) : laplacian_(l), epsilon_(epsilon) {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
            throw std::invalid_argument("epsilon must be positive and finite");
        }
        const auto n = static_cast<Eigen::Index>(l.size());
        p_ = Matrix::Identity(n, n) - epsilon * l.matrix();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double snap = 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, epsilon * l(i, i));
            if (std::abs(p_(i, i)) <= snap) {
                p_(i, i) = 0.0;
            }
        }
        stochastic_ = (p_.array() >= 0.0).all() && ((p_.rowwise().sum().array() - 1.0).abs() <= 1e-12).all();
        positive_diagonal_ = (p_.diagonal().array() > 0.0).all();

        eigenvalues_ = dlap::eigenvalues(p_);
        std::size_t unit = 0;
        for (const auto &mu : eigenvalues_) {
            if (std::abs(std::abs(mu) - 1.0) <= kUnitModulusTolerance) {
                ++unit;
            }
        }
        primitive_ = stochastic_ && unit == 1;
    }

    double epsilon() const noexcept { return epsilon_; }
    const Matrix &matrix() const noexcept { return p_; }
    const LaplacianMatrix &laplacian() const noexcept { return laplacian_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(p_.rows()); }
    bool stochastic() const noexcept { return stochastic_; }
    bool positive_diagonal() const noexcept { return positive_diagonal_; }
    /// Stochastic with exactly one eigenvalue of modulus 1.
    bool primitive() const noexcept { return primitive_; }
    const std::vector<std::complex<double>> &eigenvalues() const noexcept { return eigenvalues_; }

    /// 1 - max |mu| over the eigenvalues mu != 1. Equals 1 when 1 is the only
    /// eigenvalue.
    double spectral_gap() const {
        double second = 0.0;
        for (const auto &mu : eigenvalues_) {
            if (std::abs(mu - 1.0) > kUnitModulusTolerance) {
                second = std::max(second, std::abs(mu));
            }
        }
        return 1.0 - second;
    }

private:
    LaplacianMatrix laplacian_;
    double epsilon_;
    Matrix p_;
    std::vector<std::complex<double>> eigenvalues_;
    bool stochastic_ = false;
    bool positive_diagonal_ = false;
    bool primitive_ = false;
};

/// 1 / (2 max_i l_ii), or 1 for a graph without arcs.
inline double default_epsilon(const LaplacianMatrix &l) {
    const double dmax = l.max_degree();
    return dmax > 0.0 ? 1.0 / (2.0 * dmax) : 1.0;
}

inline PerronMatrix perron(const LaplacianMatrix &l, std::optional<double> epsilon = std::nullopt) {
    return PerronMatrix(l, epsilon.value_or(default_epsilon(l)));
}

enum class LongRunMode { power, cesaro };

struct LongRunResult {
    Matrix limit;
    std::size_t iterations = 0;
    double residual = 0.0;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string &what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/**
 * Long-run transition matrix of a stochastic Perron matrix.
 *
 * power: repeated squaring P^(2^t) until successive squares differ by less
 * than `tolerance` (default 1e-12, at most 60 squarings). Requires a
 * positive diagonal.
 *
 * cesaro: running average A_m = m^-1 (P + ... + P^m) over m = 2, 4, 8, ...,
 * stopping once two successive increments |A_m - A_{m/2}|_max are below
 * `tolerance` and not growing (default 1e-6, m <= 10^6). Growing increments
 * mean the average is still tracking a slow transient.
 */
inline LongRunResult long_run_matrix(const PerronMatrix &p, LongRunMode mode,
                                     std::optional<double> tolerance = std::nullopt,
                                     std::optional<std::size_t> max_iter = std::nullopt) {
    if (!p.stochastic()) {
        throw std::invalid_argument("long-run matrix requires a stochastic Perron matrix");
    }
    if (mode == LongRunMode::power) {
        if (!p.positive_diagonal()) {
            throw std::invalid_argument("power mode requires a positive diagonal");
        }
        const double tol = tolerance.value_or(1e-12);
        const std::size_t limit = max_iter.value_or(60);
        Matrix q = p.matrix();
        double diff = std::numeric_limits<double>::infinity();
        for (std::size_t t = 1; t <= limit; ++t) {
            Matrix sq = q * q;
            diff = max_abs_diff(sq, q);
            q = std::move(sq);
            if (diff < tol) {
                return {q, t, diff};
            }
        }
        throw ConvergenceError("power limit did not converge in " + std::to_string(limit) + " squarings", diff);
    }

    const double tol = tolerance.value_or(1e-6);
    const std::size_t limit = max_iter.value_or(1'000'000);
    const Matrix &pm = p.matrix();
    Matrix power = pm;
    Matrix sum = pm;
    Matrix checkpoint = pm;
    std::size_t next = 2;
    double diff = std::numeric_limits<double>::infinity();
    double previous = diff;
    for (std::size_t m = 2; m <= limit; ++m) {
        power = power * pm;
        sum += power;
        if (m == next || m == limit) {
            Matrix average = sum / static_cast<double>(m);
            previous = diff;
            diff = max_abs_diff(average, checkpoint);
            if (diff < tol && previous < tol && diff <= previous) {
                return {average, m, diff};
            }
            checkpoint = std::move(average);
            next *= 2;
        }
    }
    throw ConvergenceError("Cesaro average did not converge in " + std::to_string(limit) + " terms", diff);
}

struct PrimitiveLimit {
    Vector v;
    Vector w;
    Matrix vw;
};

/**
 * lim P^k = v w^T for primitive stochastic P: v is the all-ones right
 * eigenvector and w the left eigenvector for eigenvalue 1 scaled so that
 * sum_i v_i w_i = 1. The left eigenvector is the right singular vector of
 * P^T - I for its smallest singular value.
 */
inline PrimitiveLimit primitive_limit(const PerronMatrix &p) {
    if (!p.stochastic() || !p.primitive()) {
        throw std::invalid_argument("primitive limit requires a primitive stochastic Perron matrix");
    }
    const auto n = static_cast<Eigen::Index>(p.size());
    const Matrix shifted = p.matrix().transpose() - Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    Vector w = svd.matrixV().col(n - 1);
    const Vector v = Vector::Ones(n);
    w /= v.dot(w);
    return {v, w, v * w.transpose()};
}

/// Projector onto consensus values: the power-mode long-run matrix of the
/// default Perron matrix of l.
inline Matrix consensus_projector(const LaplacianMatrix &l) {
    return long_run_matrix(perron(l), LongRunMode::power).limit;
}

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Vector> states;
    Vector limit_prediction;

    const Vector &final_state() const { return states.back(); }
    double final_deviation() const { return (states.back() - limit_prediction).cwiseAbs().maxCoeff(); }
};

namespace detail {

inline void check_initial(const Vector &x0, std::size_t n) {
    if (static_cast<std::size_t>(x0.size()) != n) {
        throw std::invalid_argument("initial state has " + std::to_string(x0.size()) + " entries, graph has " +
                                    std::to_string(n) + " vertices");
    }
}

}    // namespace detail

/// x(k+1) = P x(k) for k < steps. `projector` defaults to consensus_projector.
inline TrajectoryRecord simulate_discrete(const PerronMatrix &p, const Vector &x0, std::size_t steps,
                                          std::optional<Matrix> projector = std::nullopt) {
    detail::check_initial(x0, p.size());
    TrajectoryRecord rec;
    rec.limit_prediction = (projector ? *projector : consensus_projector(p.laplacian())) * x0;
    rec.times.reserve(steps + 1);
    rec.states.reserve(steps + 1);
    rec.times.push_back(0.0);
    rec.states.push_back(x0);
    for (std::size_t k = 1; k <= steps; ++k) {
        rec.states.push_back(p.matrix() * rec.states.back());
        rec.times.push_back(static_cast<double>(k));
    }
    return rec;
}

/**
 * Classical fourth-order Runge-Kutta for dx/dt = -L x, sampled every dt up to
 * t_end (the last step is shortened to land on t_end). Requires
 * 0 < dt <= 0.5 / max_i l_ii.
 */
inline TrajectoryRecord simulate_continuous(const LaplacianMatrix &l, const Vector &x0, double t_end, double dt,
                                            std::optional<Matrix> projector = std::nullopt) {
    detail::check_initial(x0, l.size());
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("t_end must be positive and finite");
    }
    const double dmax = l.max_degree();
    if (!(dt > 0.0) || (dmax > 0.0 && dt > 0.5 / dmax)) {
        throw std::invalid_argument("dt must lie in (0, 0.5 / max_i l_ii] = (0, " +
                                    std::to_string(dmax > 0.0 ? 0.5 / dmax : INFINITY) + "]");
    }
    TrajectoryRecord rec;
    rec.limit_prediction = (projector ? *projector : consensus_projector(l)) * x0;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    rec.times.reserve(steps + 1);
    rec.states.reserve(steps + 1);
    rec.times.push_back(0.0);
    rec.states.push_back(x0);

    const Matrix &lm = l.matrix();
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = k == steps ? t_end : static_cast<double>(k) * dt;
        const double h = t - rec.times.back();
        const Vector &x = rec.states.back();
        const Vector k1 = -(lm * x);
        const Vector k2 = -(lm * (x + 0.5 * h * k1));
        const Vector k3 = -(lm * (x + 0.5 * h * k2));
        const Vector k4 = -(lm * (x + h * k3));
        rec.states.push_back(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        rec.times.push_back(t);
    }
    return rec;
}

/// CSV with header "t,x0,...,x{n-1}"; values at full precision.
inline void write_csv(std::ostream &out, const TrajectoryRecord &rec) {
    const auto n = rec.states.empty() ? 0 : rec.states.front().size();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) {
        out << ",x" << i;
    }
    out << '\n';
    char buf[32];
    for (std::size_t s = 0; s < rec.states.size(); ++s) {
        std::snprintf(buf, sizeof buf, "%.17g", rec.times[s]);
        out << buf;
        for (Eigen::Index i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", rec.states[s](i));
            out << ',' << buf;
        }
        out << '\n';
    }
}

}    // namespace dlap
