#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlap/digraph.hpp"

namespace dlap {

inline constexpr std::size_t kSpectralLimit = 64;
inline constexpr double kDefaultTau = 1e8;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectralReport {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<double> singular_values;
    std::size_t numerical_rank = 0;
    std::size_t zero_multiplicity = 0;
    /// Smallest real part among the nontrivial eigenvalues; empty when every
    /// eigenvalue is within tolerance of zero.
    std::optional<double> min_positive_real_part;
    double tolerance = 0.0;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    std::size_t nullity() const noexcept { return size() - numerical_rank; }
};

/// 1e-9 * max(1, max_i |l_ii|).
inline double default_tolerance(const LaplacianMatrix &l) {
    return 1e-9 * std::max(1.0, l.matrix().diagonal().cwiseAbs().maxCoeff());
}

/// Number of singular values of m strictly above tol.
inline std::size_t numerical_rank(const Matrix &m, double tol) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto &s = svd.singularValues();
    return static_cast<std::size_t>((s.array() > tol).count());
}

/// Eigenvalues of a dense real matrix, sorted by (real, imag).
inline std::vector<std::complex<double>> eigenvalues(const Matrix &m) {
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("nonsymmetric eigensolver did not converge");
    }
    std::vector<std::complex<double>> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ev;
}

inline SpectralReport spectrum(const LaplacianMatrix &l, std::optional<double> tol = std::nullopt) {
    if (l.size() > kSpectralLimit) {
        throw std::length_error("spectral analysis limited to " + std::to_string(kSpectralLimit) + " vertices");
    }
    SpectralReport r;
    r.tolerance = tol.value_or(default_tolerance(l));
    if (!(r.tolerance > 0.0)) {
        throw std::invalid_argument("spectral tolerance must be positive");
    }
    r.eigenvalues = eigenvalues(l.matrix());

    Eigen::JacobiSVD<Matrix> svd(l.matrix());
    const auto &s = svd.singularValues();
    r.singular_values.assign(s.begin(), s.end());
    r.numerical_rank = static_cast<std::size_t>((s.array() > r.tolerance).count());

    for (const auto &lambda : r.eigenvalues) {
        if (std::abs(lambda) <= r.tolerance) {
            ++r.zero_multiplicity;
        } else if (!r.min_positive_real_part || lambda.real() < *r.min_positive_real_part) {
            r.min_positive_real_part = lambda.real();
        }
    }
    return r;
}

/// rank(L) = n - d, and the zero eigenvalue is semisimple with multiplicity d.
inline bool check_rank_law(const SpectralReport &r, std::size_t d) {
    return d <= r.size() && r.numerical_rank == r.size() - d && r.zero_multiplicity == d;
}

/// Every eigenvalue is either trivial (|lambda| <= tol) or has Re(lambda) > tol.
inline bool check_spectrum_localization(const SpectralReport &r, double tol) {
    return std::all_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                       [tol](const std::complex<double> &z) { return std::abs(z) <= tol || z.real() > tol; });
}

/**
 * (I + tau L)^{-1}, which tends to the eigenprojector onto ker L along
 * range L as tau grows, with O(1/tau) error.
 *
 * Throws NumericalError when the relative residual of the solve exceeds
 * 1e-10.
 */
inline Matrix eigenprojector_resolvent(const LaplacianMatrix &l, double tau = kDefaultTau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("tau must be positive and finite");
    }
    const auto n = static_cast<Eigen::Index>(l.size());
    const Matrix a = Matrix::Identity(n, n) + tau * l.matrix();
    Matrix x = a.fullPivLu().solve(Matrix::Identity(n, n));

    const double scale = a.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().rowwise().sum().maxCoeff();
    const double residual = (a * x - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!std::isfinite(residual) || residual > 1e-10 * scale) {
        throw NumericalError("resolvent solve is ill-conditioned (residual " + std::to_string(residual) + ")");
    }
    return x;
}

}    // namespace dlap
