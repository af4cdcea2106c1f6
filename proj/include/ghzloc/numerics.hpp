// Sphere quadrature, Monte Carlo sphere sampling, bracketed root finding and
// line/parametric-curve intersection.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ghzloc/linalg.hpp"

namespace ghzloc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kSqrt3 = std::numbers::sqrt3;

/// Default resolution of the deterministic sphere rules.
inline constexpr int kDefaultQuadOrder = 200;

struct QuadratureOptions {
    /// Gauss-Legendre order in cos(theta) of the product grid (2*order points in
    /// phi). The piecewise rule uses max(8, order/4) nodes per piece and arc.
    int order = kDefaultQuadOrder;
    /// When non-zero, model integrals are estimated by Monte Carlo with this
    /// many uniform samples instead of the deterministic rules.
    std::size_t mcSamples = 0;
    std::uint64_t seed = 7;

    int piece_nodes() const { return std::max(8, order / 4); }
};

// ---------------------------------------------------------------------------
// Gauss-Legendre
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending. Newton iteration
/// on P_n from Chebyshev-type initial guesses.
inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule r;
    if (n == 1) return {{0.0}, {2.0}};
    r.nodes.assign(static_cast<std::size_t>(n), 0.0);
    r.weights.assign(static_cast<std::size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Summation
// ---------------------------------------------------------------------------

namespace detail {

/// Neumaier-compensated sum for doubles; ordered plain sum for everything
/// else (matrices, arrays). Both are deterministic for a fixed node order.
template <class T>
class Accumulator {
public:
    explicit Accumulator(T zero) : sum_(std::move(zero)) {}
    void add(const T& v) { sum_ += v; }
    T value() const { return sum_; }

private:
    T sum_;
};

template <>
class Accumulator<double> {
public:
    explicit Accumulator(double zero) : sum_(zero) {}
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_;
    double comp_ = 0.0;
};

template <class T>
T zero_like(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return T{0};
    } else {
        T z = v;
        z *= 0.0;
        return z;
    }
}

template <class T>
T scaled(T v, double s) {
    v *= s;
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Product grid
// ---------------------------------------------------------------------------

struct SphereNode {
    Vec3 direction;
    double weight = 0.0;
};

/// Gauss-Legendre in cos(theta) x uniform trapezoid in phi. Weights sum to 4 pi
/// and the node set is closed under lambda -> -lambda.
struct SphereGrid {
    std::vector<SphereNode> nodes;
    int order = 0;

    static SphereGrid product(int order = kDefaultQuadOrder) {
        if (order < 1) throw std::invalid_argument("SphereGrid: order must be >= 1");
        const auto gl = gauss_legendre(order);
        const int nPhi = 2 * order;
        SphereGrid g;
        g.order = order;
        g.nodes.reserve(static_cast<std::size_t>(order) * nPhi);
        const double dphi = 2.0 * kPi / nPhi;
        for (int i = 0; i < order; ++i) {
            const double u = gl.nodes[static_cast<std::size_t>(i)];
            const double r = std::sqrt(std::max(0.0, 1.0 - u * u));
            for (int j = 0; j < nPhi; ++j) {
                const double phi = (j + 0.5) * dphi;
                g.nodes.push_back({{r * std::cos(phi), r * std::sin(phi), u},
                                   gl.weights[static_cast<std::size_t>(i)] * dphi});
            }
        }
        return g;
    }

    /// Highest total degree of polynomials in (x, y, z) integrated exactly.
    int design_degree() const { return 2 * order - 1; }
};

/// Integral over the unit sphere of f(lambda) d lambda on a fixed grid.
template <class F>
auto sphere_integrate(F&& f, const SphereGrid& grid) {
    if (grid.nodes.empty()) throw std::invalid_argument("sphere_integrate: empty grid");
    using R = std::decay_t<std::invoke_result_t<F&, const Vec3&>>;
    const R first = f(grid.nodes.front().direction);
    detail::Accumulator<R> acc(detail::zero_like(first));
    acc.add(detail::scaled(first, grid.nodes.front().weight));
    for (std::size_t i = 1; i < grid.nodes.size(); ++i)
        acc.add(detail::scaled(f(grid.nodes[i].direction), grid.nodes[i].weight));
    return acc.value();
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// n i.i.d. uniform unit vectors, deterministic for a given seed.
inline std::vector<Vec3> sphere_sample(std::uint64_t seed, std::size_t n) {
    if (n < 1) throw std::invalid_argument("sphere_sample: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(n);
    while (out.size() < n) {
        Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
        const double nv = v.norm();
        if (nv < 1e-12) continue;
        out.push_back(v / nv);
    }
    return out;
}

/// 4 pi * mean f over the samples.
template <class F>
auto mc_integrate(F&& f, const std::vector<Vec3>& samples) {
    if (samples.empty()) throw std::invalid_argument("mc_integrate: no samples");
    using R = std::decay_t<std::invoke_result_t<F&, const Vec3&>>;
    const R first = f(samples.front());
    detail::Accumulator<R> acc(detail::zero_like(first));
    acc.add(first);
    for (std::size_t i = 1; i < samples.size(); ++i) acc.add(f(samples[i]));
    return detail::scaled(acc.value(), 4.0 * kPi / static_cast<double>(samples.size()));
}

// ---------------------------------------------------------------------------
// Piecewise rule for integrands with a great-circle jump and latitude kinks
// ---------------------------------------------------------------------------

/// Layout of the discontinuities of an integrand on the sphere: an optional
/// great circle {lambda : cut . lambda = 0} and latitude circles
/// {lambda_z = u} given by their cos(theta) values.
struct SphereCuts {
    std::optional<Vec3> greatCircleNormal;
    std::vector<double> latitudes;
};

namespace detail {

/// smoothstep map s -> 3s^2 - 2s^3 and its derivative; turns sqrt-type endpoint
/// singularities into smooth behaviour.
inline std::pair<double, double> smoothstep(double s) { return {s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s)}; }

}  // namespace detail

/// Integral of f over the unit sphere, exact in structure for integrands that
/// are smooth away from the given cuts. Rings of constant theta are integrated
/// with Gauss-Legendre in theta on the pieces between latitude breaks (and the
/// latitudes where rings become tangent to the great circle); each ring is
/// split into the two arcs on either side of the great circle.
template <class F>
auto integrate_piecewise(F&& f, const SphereCuts& cuts, int nodes) {
    if (nodes < 2) throw std::invalid_argument("integrate_piecewise: nodes must be >= 2");
    using R = std::decay_t<std::invoke_result_t<F&, const Vec3&>>;

    std::vector<double> thetaBreaks{0.0, kPi};
    for (double u : cuts.latitudes) {
        if (std::abs(u) < 1.0) thetaBreaks.push_back(std::acos(u));
    }
    Vec3 n{};
    double rho = 0.0;
    double phiN = 0.0;
    const bool hasCut = cuts.greatCircleNormal.has_value();
    if (hasCut) {
        n = cuts.greatCircleNormal->normalized();
        rho = std::hypot(n.x, n.y);
        phiN = std::atan2(n.y, n.x);
        const double thetaT = std::acos(std::clamp(rho, 0.0, 1.0));
        if (thetaT > 1e-14) {
            thetaBreaks.push_back(thetaT);
            thetaBreaks.push_back(kPi - thetaT);
        }
    }
    std::sort(thetaBreaks.begin(), thetaBreaks.end());
    thetaBreaks.erase(std::unique(thetaBreaks.begin(), thetaBreaks.end(),
                                  [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                      thetaBreaks.end());

    const auto gl = gauss_legendre(nodes);
    const int nRing = 2 * nodes;

    std::optional<detail::Accumulator<R>> acc;
    auto add = [&](const Vec3& lam, double w) {
        R v = f(lam);
        if (!acc) acc.emplace(detail::zero_like(v));
        acc->add(detail::scaled(std::move(v), w));
    };

    auto arc = [&](double u, double r, double phi0, double phi1, double ringWeight) {
        const double half = 0.5 * (phi1 - phi0);
        const double mid = 0.5 * (phi1 + phi0);
        for (int k = 0; k < nodes; ++k) {
            const double phi = mid + half * gl.nodes[static_cast<std::size_t>(k)];
            add({r * std::cos(phi), r * std::sin(phi), u}, ringWeight * half * gl.weights[static_cast<std::size_t>(k)]);
        }
    };

    for (std::size_t piece = 0; piece + 1 < thetaBreaks.size(); ++piece) {
        const double ta = thetaBreaks[piece];
        const double tb = thetaBreaks[piece + 1];
        for (int i = 0; i < nodes; ++i) {
            const double s = 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
            const auto [map, dmap] = detail::smoothstep(s);
            const double theta = ta + (tb - ta) * map;
            const double u = std::cos(theta);
            const double r = std::sin(theta);
            const double ringWeight = 0.5 * gl.weights[static_cast<std::size_t>(i)] * (tb - ta) * dmap * r;
            if (ringWeight == 0.0) continue;

            double kappa = 2.0;
            if (hasCut && rho * r > 1e-300) kappa = -n.z * u / (r * rho);
            if (std::abs(kappa) >= 1.0) {
                const double dphi = 2.0 * kPi / nRing;
                for (int j = 0; j < nRing; ++j) {
                    const double phi = (j + 0.5) * dphi;
                    add({r * std::cos(phi), r * std::sin(phi), u}, ringWeight * dphi);
                }
            } else {
                const double beta = std::acos(kappa);
                arc(u, r, phiN - beta, phiN + beta, ringWeight);
                arc(u, r, phiN + beta, phiN + 2.0 * kPi - beta, ringWeight);
            }
        }
    }
    return acc->value();
}

/// Integral over the sphere of an integrand that depends on lambda_z only,
/// evaluated on the meridian phi = 0 with the same latitude pieces and theta
/// map as integrate_piecewise.
template <class F>
auto integrate_zonal(F&& f, const std::vector<double>& latitudes, int nodes) {
    if (nodes < 2) throw std::invalid_argument("integrate_zonal: nodes must be >= 2");
    using R = std::decay_t<std::invoke_result_t<F&, const Vec3&>>;
    std::vector<double> breaks{0.0, kPi};
    for (double u : latitudes)
        if (std::abs(u) < 1.0) breaks.push_back(std::acos(u));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 breaks.end());
    const auto gl = gauss_legendre(nodes);
    std::optional<detail::Accumulator<R>> acc;
    for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
        const double ta = breaks[piece], tb = breaks[piece + 1];
        for (int i = 0; i < nodes; ++i) {
            const double sn = 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
            const auto [map, dmap] = detail::smoothstep(sn);
            const double theta = ta + (tb - ta) * map;
            const double w = kPi * gl.weights[static_cast<std::size_t>(i)] * (tb - ta) * dmap * std::sin(theta);
            if (w == 0.0) continue;
            R v = f(Vec3{std::sin(theta), 0.0, std::cos(theta)});
            if (!acc) acc.emplace(detail::zero_like(v));
            acc->add(detail::scaled(std::move(v), w));
        }
    }
    return acc->value();
}

/// Extra latitudes for integrands built on |T lambda| with T = Diag[t, +-t, tz].
/// Its complex zeros sit within |t|/|tz| of the equator when |t| << |tz| and
/// within |tz|/|t| of the poles when |tz| << |t|; the breaks grade the pieces
/// geometrically toward that band.
inline std::vector<double> anisotropy_latitudes(double t, double tz) {
    constexpr double kStart = 1.0, kRatio = 3.0, kStop = 0.8;
    std::vector<double> out;
    const double a = std::abs(t), b = std::abs(tz);
    if (b > a) {
        const double eps = a / std::sqrt(b * b - a * a);
        if (eps >= kStart) return out;
        out.push_back(0.0);
        for (double z = eps; z < kStop; z *= kRatio) {
            out.push_back(z);
            out.push_back(-z);
        }
    } else if (a > b && a > 0.0) {
        const double r = b / a;
        if (r >= kStart) return out;
        for (double th = std::max(r, 1e-8); th < kStop; th *= kRatio) {
            out.push_back(std::cos(th));
            out.push_back(-std::cos(th));
        }
    }
    return out;
}

/// Model-integral dispatcher: Monte Carlo when options request it, otherwise
/// the piecewise rule.
template <class F>
auto integrate_model(F&& f, const SphereCuts& cuts, const QuadratureOptions& opts) {
    if (opts.mcSamples > 0) return mc_integrate(f, sphere_sample(opts.seed, opts.mcSamples));
    return integrate_piecewise(f, cuts, opts.piece_nodes());
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

struct Bracket {
    double lo;
    double hi;
};

/// Brent's method (inverse quadratic / secant steps with bisection fallback).
/// Returns x with |f(x)| <= tol or bracket width <= tol.
template <class F>
double find_root(F&& f, Bracket br, double tol = 1e-14) {
    double a = br.lo, b = br.hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        throw std::domain_error("find_root: no sign change in bracket [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");
    }
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 300; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0 || std::abs(fb) <= tol * 1e-3) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

/// Plain bisection; used as the independent refinement strategy in tests.
template <class F>
double bisect(F&& f, Bracket br, double tol = 1e-14) {
    double a = br.lo, b = br.hi, fa = f(a);
    if ((fa > 0.0) == (f(b) > 0.0) && fa != 0.0 && f(b) != 0.0) throw std::domain_error("bisect: no sign change");
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Line / parametric curve intersection
// ---------------------------------------------------------------------------

struct PlanePoint {
    double p = 0.0;
    double q = 0.0;
};

struct CurveHit {
    double v;
    double p;
    double q;
};

/// Intersection of the line through `a` and `b` with the parametric curve
/// v -> (p, q) on [vLo, vHi]. A sign-change scan over `scan` sub-intervals
/// detects zero or multiple crossings; the crossing is refined with Brent.
template <class Curve>
CurveHit intersect_line_curve(PlanePoint a, PlanePoint b, Curve&& curve, double vLo, double vHi, int scan = 256,
                              double tol = 1e-14) {
    const double dp = b.p - a.p;
    const double dq = b.q - a.q;
    const double len = std::hypot(dp, dq);
    if (len == 0.0) throw std::invalid_argument("intersect_line_curve: line points coincide");
    // signed distance from the line
    auto side = [&](double v) {
        const PlanePoint c = curve(v);
        return ((c.p - a.p) * dq - (c.q - a.q) * dp) / len;
    };
    auto hit = [&](double v) {
        const PlanePoint c = curve(v);
        return CurveHit{v, c.p, c.q};
    };

    std::vector<double> vs(static_cast<std::size_t>(scan) + 1);
    std::vector<double> fs(vs.size());
    for (int i = 0; i <= scan; ++i) {
        vs[static_cast<std::size_t>(i)] = vLo + (vHi - vLo) * i / scan;
        fs[static_cast<std::size_t>(i)] = side(vs[static_cast<std::size_t>(i)]);
    }
    constexpr double kOnLine = 1e-15;
    std::vector<std::pair<double, double>> brackets;
    std::vector<double> exact;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (std::abs(fs[i]) <= kOnLine) exact.push_back(vs[i]);
        if (i + 1 < vs.size() && std::abs(fs[i]) > kOnLine && std::abs(fs[i + 1]) > kOnLine &&
            (fs[i] > 0.0) != (fs[i + 1] > 0.0)) {
            brackets.emplace_back(vs[i], vs[i + 1]);
        }
    }
    // collapse consecutive on-line samples (tangential contact) into one hit
    std::vector<double> roots;
    for (double v : exact)
        if (roots.empty() || v - roots.back() > 2.0 * (vHi - vLo) / scan) roots.push_back(v);
    for (const auto& [lo, hi] : brackets) roots.push_back(find_root(side, {lo, hi}, tol));

    if (roots.empty()) throw std::domain_error("intersect_line_curve: no crossing in parameter range");
    if (roots.size() > 1) throw std::domain_error("intersect_line_curve: multiple crossings in parameter range");
    return hit(roots.front());
}

}  // namespace ghzloc
