#include "lnspdc/dispersion.hpp"

#include "lnspdc/errors.hpp"
#include "lnspdc/units.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace lnspdc {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 4 || y_.size() != x_.size())
        throw NumericError("cubic spline needs >= 4 matching samples");
    for (int i = 1; i < n; ++i)
        if (x_[i] <= x_[i - 1]) throw NumericError("cubic spline abscissae must be ascending");

    // Solve for the moments M_i = S''(x_i) with not-a-knot end rows.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    auto h = [&](int i) { return x_[i + 1] - x_[i]; };
    for (int i = 1; i + 1 < n; ++i) {
        A(i, i - 1) = h(i - 1);
        A(i, i) = 2.0 * (h(i - 1) + h(i));
        A(i, i + 1) = h(i);
        rhs(i) = 6.0 * ((y_[i + 1] - y_[i]) / h(i) - (y_[i] - y_[i - 1]) / h(i - 1));
    }
    A(0, 0) = h(1);
    A(0, 1) = -(h(0) + h(1));
    A(0, 2) = h(0);
    A(n - 1, n - 3) = h(n - 2);
    A(n - 1, n - 2) = -(h(n - 3) + h(n - 2));
    A(n - 1, n - 1) = h(n - 3);

    const Eigen::VectorXd M = A.partialPivLu().solve(rhs);

    b_.resize(n - 1);
    c_.resize(n - 1);
    d_.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        const double hi = h(i);
        b_[i] = (y_[i + 1] - y_[i]) / hi - hi * (2.0 * M(i) + M(i + 1)) / 6.0;
        c_[i] = M(i) / 2.0;
        d_[i] = (M(i + 1) - M(i)) / (6.0 * hi);
    }
}

int CubicSpline::segment(double x) const {
    if (x < x_.front() || x > x_.back()) {
        std::ostringstream msg;
        msg << "spline evaluation at " << x << " outside [" << x_.front() << ", " << x_.back() << "]";
        throw RangeError(msg.str());
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    int i = static_cast<int>(it - x_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
}

double CubicSpline::value(double x) const {
    const int i = segment(x);
    const double t = x - x_[i];
    return y_[i] + t * (b_[i] + t * (c_[i] + t * d_[i]));
}

double CubicSpline::deriv1(double x) const {
    const int i = segment(x);
    const double t = x - x_[i];
    return b_[i] + t * (2.0 * c_[i] + 3.0 * t * d_[i]);
}

double CubicSpline::deriv2(double x) const {
    const int i = segment(x);
    const double t = x - x_[i];
    return 2.0 * c_[i] + 6.0 * t * d_[i];
}

DispersionCurve DispersionCurve::from_samples(std::vector<double> lambda_um,
                                              std::vector<double> n_eff) {
    if (lambda_um.size() != n_eff.size())
        throw NumericError("dispersion curve: sample size mismatch");
    if (lambda_um.size() < 7)
        throw NumericError("dispersion curve needs >= 7 samples for second derivatives");

    std::vector<std::size_t> idx(lambda_um.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return lambda_um[a] < lambda_um[b]; });

    DispersionCurve c;
    for (std::size_t i : idx) {
        if (lambda_um[i] <= 0.0) throw NumericError("dispersion curve: wavelengths must be > 0");
        if (!c.lambda_samples_.empty() && lambda_um[i] == c.lambda_samples_.back())
            throw NumericError("dispersion curve: duplicate wavelength sample");
        c.lambda_samples_.push_back(lambda_um[i]);
        c.n_samples_.push_back(n_eff[i]);
    }
    // ω ascending = λ descending
    std::vector<double> omega, n_of_omega;
    for (std::size_t i = c.lambda_samples_.size(); i-- > 0;) {
        omega.push_back(units::omega_from_lambda(c.lambda_samples_[i]));
        n_of_omega.push_back(c.n_samples_[i]);
    }
    c.omega_samples_ = omega;
    c.spline_ = CubicSpline(std::move(omega), std::move(n_of_omega));
    return c;
}

DispersionCurve DispersionCurve::solve_te(const WaveguideGeometry& g,
                                          const MaterialCatalog& materials, double lambda_min_um,
                                          double lambda_max_um, double spacing_um,
                                          const GridSpec& grid, int threads) {
    if (spacing_um <= 0.0 || lambda_max_um <= lambda_min_um)
        throw ConfigError("dispersion sampling: require lambda_min < lambda_max, spacing > 0");
    std::vector<double> lambdas;
    for (double l = lambda_min_um; l <= lambda_max_um + 1e-12; l += spacing_um)
        lambdas.push_back(l);
    if (lambdas.size() < 7)
        throw ConfigError("dispersion sampling: fewer than 7 samples in range");

    std::vector<double> n_eff(lambdas.size(), 0.0);
    std::vector<std::string> failures(lambdas.size());
    std::atomic<std::size_t> next{0};
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(lambdas.size())));

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= lambdas.size()) return;
            try {
                n_eff[i] = fundamental_te(g, materials, lambdas[i], grid).n_eff;
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (!failures[i].empty())
            throw NumericError("dispersion sampling failed at lambda = " +
                               std::to_string(lambdas[i]) + " um: " + failures[i]);
    return from_samples(std::move(lambdas), std::move(n_eff));
}

double DispersionCurve::n_eff(double lambda_um) const {
    return spline_.value(units::omega_from_lambda(lambda_um));
}
double DispersionCurve::n_eff_omega(double omega) const { return spline_.value(omega); }

double DispersionCurve::k(double lambda_um) const {
    return k_omega(units::omega_from_lambda(lambda_um));
}
double DispersionCurve::k_omega(double omega) const {
    return spline_.value(omega) * omega / units::c_um_per_fs;
}

double DispersionCurve::k_prime_omega(double omega) const {
    return (spline_.value(omega) + omega * spline_.deriv1(omega)) / units::c_um_per_fs;
}

double DispersionCurve::gvd(double lambda_um) const {
    const double omega = units::omega_from_lambda(lambda_um);
    require_margin(omega);
    const double k2_fs2_um =
        (2.0 * spline_.deriv1(omega) + omega * spline_.deriv2(omega)) / units::c_um_per_fs;
    return k2_fs2_um * 1e3; // fs²/mm
}

void DispersionCurve::require_margin(double omega) const {
    const std::size_t n = omega_samples_.size();
    if (omega < omega_samples_[2] || omega > omega_samples_[n - 3]) {
        std::ostringstream msg;
        msg << "gvd at lambda = " << units::lambda_from_omega(omega)
            << " um is within two samples of the curve edge; no one-sided derivatives";
        throw RangeError(msg.str());
    }
}

double DispersionCurve::lambda_min_um() const { return lambda_samples_.front(); }
double DispersionCurve::lambda_max_um() const { return lambda_samples_.back(); }
bool DispersionCurve::covers(double lambda_um) const {
    return lambda_um >= lambda_samples_.front() && lambda_um <= lambda_samples_.back();
}

} // namespace lnspdc
