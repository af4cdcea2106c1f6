// Optimal local-hidden-state model for Bell-diagonal states, the steering
// boundary of the two-qubit GHZ-symmetric family, and the induced two-qubit
// local-hidden-variable model.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "ghzloc/ghz_states.hpp"
#include "ghzloc/linalg.hpp"
#include "ghzloc/numerics.hpp"

namespace ghzloc {

/// Joint outcome probabilities indexed by outcome bits (+1 -> 0, -1 -> 1),
/// first party most significant.
template <std::size_t N>
struct Distribution {
    std::array<double, N> p{};

    Distribution& operator+=(const Distribution& o) {
        for (std::size_t i = 0; i < N; ++i) p[i] += o.p[i];
        return *this;
    }
    Distribution& operator*=(double s) {
        for (auto& v : p) v *= s;
        return *this;
    }
    double& operator[](std::size_t i) { return p[i]; }
    double operator[](std::size_t i) const { return p[i]; }

    double total() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }
};

inline constexpr std::size_t outcome_bit(int a) { return a == 1 ? 0u : 1u; }
inline constexpr int outcome_sign(std::size_t bit) { return bit == 0 ? 1 : -1; }

inline std::size_t outcome_index(int a, int b) {
    if ((a != 1 && a != -1) || (b != 1 && b != -1)) throw std::invalid_argument("outcomes must be +1 or -1");
    return 2 * outcome_bit(a) + outcome_bit(b);
}

inline std::size_t outcome_index(int a, int b, int c) {
    if ((a != 1 && a != -1) || (b != 1 && b != -1) || (c != 1 && c != -1)) {
        throw std::invalid_argument("outcomes must be +1 or -1");
    }
    return 4 * outcome_bit(a) + 2 * outcome_bit(b) + outcome_bit(c);
}

/// sgn with the convention sgn(0) = +1.
inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

// ---------------------------------------------------------------------------
// Steering boundary
// ---------------------------------------------------------------------------

/// g(w) = |w| + arccosh|w| / sqrt(w^2 - 1), continued analytically through
/// |w| = 1 (arccos form below, series around 1).
inline double steering_g(double w) {
    const double a = std::abs(w);
    const double d = 1.0 - a;
    double f;
    if (std::abs(d) < 1e-4)
        f = 1.0 + d / 3.0 + 2.0 * d * d / 15.0;
    else if (a < 1.0)
        f = std::acos(a) / std::sqrt(1.0 - a * a);
    else
        f = std::acosh(a) / std::sqrt(a * a - 1.0);
    return a + f;
}

/// |p| on the steering boundary at slope w.
inline double boundary_abs_p(double w) {
    if (w == 0.0) throw std::domain_error("boundary_p_of_w: w = 0 is outside the physical domain");
    return 1.0 / (2.0 * steering_g(w));
}

/// Point on the steering boundary with slope w = sqrt(2) q / p. p carries the
/// sign of w so that q >= 0.
inline TwoQubitGhzPoint boundary_p_of_w(double w) {
    const double ap = boundary_abs_p(w);
    return {w > 0.0 ? ap : -ap, std::abs(w) * ap / kSqrt2};
}

/// Slope at which the steering boundary meets the triangle side
/// q/sqrt(2) - p + 1/4 = 0, i.e. g(w) = 2 - w.
inline double critical_w() {
    static const double wc = find_root([](double w) { return steering_g(w) - (2.0 - w); }, {0.05, 0.95}, 1e-16);
    return wc;
}

// ---------------------------------------------------------------------------
// LHS model
// ---------------------------------------------------------------------------

/// Integral of |T lambda| over the unit sphere.
inline double normalization_integral(const CorrelationMatrix& t, const SphereGrid& grid) {
    return sphere_integrate([&](const Vec3& lam) { return t.apply(lam).norm(); }, grid);
}

/// Cuts for an integrand with a |T lambda| factor, an optional sgn(x . lambda)
/// jump and extra latitude kinks.
inline SphereCuts model_cuts(const CorrelationMatrix& t, std::optional<Vec3> x, std::vector<double> latitudes = {}) {
    const auto graded = anisotropy_latitudes(t.tx, t.tz);
    latitudes.insert(latitudes.end(), graded.begin(), graded.end());
    return {x, std::move(latitudes)};
}

/// Same integral with the piecewise rule graded toward the near-singular band.
inline double normalization_integral(const CorrelationMatrix& t, int order = kDefaultQuadOrder) {
    QuadratureOptions opts;
    opts.order = order;
    return integrate_piecewise([&](const Vec3& lam) { return t.apply(lam).norm(); }, model_cuts(t, std::nullopt),
                               opts.piece_nodes());
}

/// Integral of |T lambda| minus 2 pi.
inline double normalization_residual(const CorrelationMatrix& t, int order = kDefaultQuadOrder) {
    return normalization_integral(t, order) - 2.0 * kPi;
}

struct LhsComponents {
    double omega;
    Mat2 hiddenState;
};

inline LhsComponents lhs_components(const CorrelationMatrix& t, const Vec3& lambda) {
    if (!is_unit(lambda)) throw std::invalid_argument("lhs_components: lambda is not a unit vector");
    const Vec3 tl = t.apply(lambda);
    const double n = tl.norm();
    if (n < 1e-300) throw std::domain_error("lhs_components: T lambda = 0");
    return {n / (2.0 * kPi), bloch_state(tl / n)};
}

/// Deterministic response of the steering party: (1 + a sgn(x . lambda))/2.
inline double response_A(int a, const Vec3& x, const Vec3& lambda) {
    if (a != 1 && a != -1) throw std::invalid_argument("response_A: outcome must be +1 or -1");
    return 0.5 * (1.0 + a * sgn(x.dot(lambda)));
}

/// Assemblage integral_omega P_A(a|x) rho_lambda for a = +1 (first) and -1.
inline std::pair<Mat2, Mat2> lhs_assemblage(const CorrelationMatrix& t, const Vec3& x, const QuadratureOptions& opts) {
    const SphereCuts cuts = model_cuts(t, x);
    auto member = [&](const Vec3& lam) {
        // |T lam| (1 + s)/(4 pi) * (I + T lam / |T lam| . sigma)/2, with s = +-1 split by outcome
        const Vec3 tl = t.apply(lam);
        const double s = sgn(x.dot(lam));
        Mat4 out;  // block-diagonal holder: upper-left a=+1, lower-right a=-1
        const double n = tl.norm();
        const cplx i{0.0, 1.0};
        const std::array<cplx, 4> rho{0.5 * (n + tl.z), 0.5 * (tl.x - i * tl.y), 0.5 * (tl.x + i * tl.y),
                                      0.5 * (n - tl.z)};
        const double wp = (1.0 + s) / (4.0 * kPi);
        const double wm = (1.0 - s) / (4.0 * kPi);
        out(0, 0) = wp * rho[0];
        out(0, 1) = wp * rho[1];
        out(1, 0) = wp * rho[2];
        out(1, 1) = wp * rho[3];
        out(2, 2) = wm * rho[0];
        out(2, 3) = wm * rho[1];
        out(3, 2) = wm * rho[2];
        out(3, 3) = wm * rho[3];
        return out;
    };
    const Mat4 both = integrate_model(member, cuts, opts);
    Mat2 plus, minus;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) {
            plus(r, c) = both(r, c);
            minus(r, c) = both(r + 2, c + 2);
        }
    return {plus, minus};
}

/// Max over a of || assemblage - (1 + a (T x) . sigma)/4 ||_F.
inline double verify_lhs(const CorrelationMatrix& t, const Vec3& x, const QuadratureOptions& opts = {}) {
    if (!is_unit(x)) throw std::invalid_argument("verify_lhs: x is not a unit vector");
    const auto [plus, minus] = lhs_assemblage(t, x, opts);
    const Vec3 tx = t.apply(x);
    const Mat2 targetPlus = (pauli::I + pauli::dot(tx)) * 0.25;
    const Mat2 targetMinus = (pauli::I - pauli::dot(tx)) * 0.25;
    return std::max((plus - targetPlus).frobenius_norm(), (minus - targetMinus).frobenius_norm());
}

// ---------------------------------------------------------------------------
// Two-qubit LHV model
// ---------------------------------------------------------------------------

/// All four P(a, b | x, y) of the LHV model with P_B = Tr(Pi_b^y rho_lambda).
inline Distribution<4> two_qubit_lhv_distribution(const CorrelationMatrix& t, const Vec3& x, const Vec3& y,
                                                  const QuadratureOptions& opts = {}) {
    if (!is_unit(x) || !is_unit(y)) throw std::invalid_argument("two_qubit_lhv: settings must be unit vectors");
    auto f = [&](const Vec3& lam) {
        const Vec3 tl = t.apply(lam);
        const double n = tl.norm();
        const double s = sgn(x.dot(lam));
        const double yb = y.dot(tl);  // n * (y . lambda')
        Distribution<4> d;
        for (std::size_t ia = 0; ia < 2; ++ia)
            for (std::size_t ib = 0; ib < 2; ++ib) {
                const double pa = 0.5 * (1.0 + outcome_sign(ia) * s);
                // omega * P_B = n/(2 pi) * (1 + b y.lambda')/2
                d[2 * ia + ib] = pa * (n + outcome_sign(ib) * yb) / (4.0 * kPi);
            }
        return d;
    };
    return integrate_model(f, model_cuts(t, x), opts);
}

inline double two_qubit_lhv_joint(const CorrelationMatrix& t, const Vec3& x, const Vec3& y, int a, int b,
                                  const QuadratureOptions& opts = {}) {
    return two_qubit_lhv_distribution(t, x, y, opts)[outcome_index(a, b)];
}

/// Tr(Pi_a^x (x) Pi_b^y rho) for all outcomes.
inline Distribution<4> quantum_distribution(const Mat4& rho, const Vec3& x, const Vec3& y) {
    Distribution<4> d;
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < 2; ++ib)
            d[2 * ia + ib] =
                trace_of_product(kron(projector(x, outcome_sign(ia)), projector(y, outcome_sign(ib))), rho).real();
    return d;
}

/// Tr(Pi_a^x (x) Pi_b^y (x) Pi_c^z rho) for all outcomes.
inline Distribution<8> quantum_distribution(const Mat8& rho, const Vec3& x, const Vec3& y, const Vec3& z) {
    std::array<Mat2, 2> px{projector(x, 1), projector(x, -1)};
    std::array<Mat2, 2> py{projector(y, 1), projector(y, -1)};
    std::array<Mat2, 2> pz{projector(z, 1), projector(z, -1)};
    Distribution<8> d;
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < 2; ++ib)
            for (std::size_t ic = 0; ic < 2; ++ic)
                d[4 * ia + 2 * ib + ic] = trace_of_product(kron(px[ia], py[ib], pz[ic]), rho).real();
    return d;
}

}  // namespace ghzloc
