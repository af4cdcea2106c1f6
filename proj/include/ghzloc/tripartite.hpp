// Tripartite hidden-variable models for three-qubit GHZ-symmetric states: the
// bilocal model obtained by embedding qubit B into span{|00>, |11>} of a BC
// pair, and a fully local model whose BC hidden states are either separable or
// filter-equivalent to an unsteerable two-qubit state.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "ghzloc/ghz_states.hpp"
#include "ghzloc/linalg.hpp"
#include "ghzloc/numerics.hpp"
#include "ghzloc/steering.hpp"

namespace ghzloc {

/// Raised when a model that needs a boundary correlation matrix is given one
/// that does not saturate the normalization condition.
class OffBoundary : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Pauli operators on span{|00>, |11>} of a qubit pair, zero on span{|01>, |10>}.
struct GeneralizedPauli {
    Mat4 s0, sx, sy, sz;

    static const GeneralizedPauli& get() {
        static const GeneralizedPauli g = [] {
            GeneralizedPauli r;
            r.s0(0, 0) = 1.0;
            r.s0(3, 3) = 1.0;
            r.sx(0, 3) = 1.0;
            r.sx(3, 0) = 1.0;
            r.sy(0, 3) = cplx{0.0, -1.0};
            r.sy(3, 0) = cplx{0.0, 1.0};
            r.sz(0, 0) = 1.0;
            r.sz(3, 3) = -1.0;
            return r;
        }();
        return g;
    }

    Mat4 dot(const Vec3& n) const { return sx * n.x + sy * n.y + sz * n.z; }
};

/// |01><01| and |10><10| on a qubit pair.
inline Mat4 ket01_projector() {
    Mat4 m;
    m(1, 1) = 1.0;
    return m;
}
inline Mat4 ket10_projector() {
    Mat4 m;
    m(2, 2) = 1.0;
    return m;
}

/// Normalized diagonal state w01 |01><01| + w10 |10><10|.
struct DiagonalD01 {
    double w01 = 0.5;
    double w10 = 0.5;

    Mat4 matrix() const { return ket01_projector() * w01 + ket10_projector() * w10; }
    static DiagonalD01 maximally_mixed() { return {0.5, 0.5}; }
};

// ---------------------------------------------------------------------------
// Bilocal model
// ---------------------------------------------------------------------------

/// (1 (x) S0 + sum_i T_i sigma_i (x) S_i) / 4.
inline Mat8 rho1(const CorrelationMatrix& t) {
    if (!is_bell_diagonal_physical(t)) throw std::domain_error("rho1: correlation matrix is not physical");
    const auto& g = GeneralizedPauli::get();
    Mat8 rho = kron(pauli::I, g.s0);
    rho += kron(pauli::X, g.sx) * t.tx;
    rho += kron(pauli::Y, g.sy) * t.ty;
    rho += kron(pauli::Z, g.sz) * t.tz;
    return rho * 0.25;
}

namespace detail {

/// Tr(Pi_b^y (x) Pi_c^z O) for O in {S0, Sx, Sy, Sz, |01><01|, |10><10|} and
/// all four (b, c); the BC response of every model here is linear in these.
struct BcExpectations {
    std::array<double, 4> e0{}, ex{}, ey{}, ez{}, e01{}, e10{};

    BcExpectations(const Vec3& y, const Vec3& z) {
        const auto& g = GeneralizedPauli::get();
        const Mat4 p01 = ket01_projector();
        const Mat4 p10 = ket10_projector();
        for (std::size_t ib = 0; ib < 2; ++ib)
            for (std::size_t ic = 0; ic < 2; ++ic) {
                const Mat4 pr = kron(projector(y, outcome_sign(ib)), projector(z, outcome_sign(ic)));
                const std::size_t k = 2 * ib + ic;
                e0[k] = trace_of_product(pr, g.s0).real();
                ex[k] = trace_of_product(pr, g.sx).real();
                ey[k] = trace_of_product(pr, g.sy).real();
                ez[k] = trace_of_product(pr, g.sz).real();
                e01[k] = trace_of_product(pr, p01).real();
                e10[k] = trace_of_product(pr, p10).real();
            }
    }

    /// Tr(Pi (x) Pi (S0 + n . S)/2)
    double pure(std::size_t k, const Vec3& n) const { return 0.5 * (e0[k] + n.x * ex[k] + n.y * ey[k] + n.z * ez[k]); }
};

inline void require_units(const Vec3& x, const Vec3& y, const Vec3& z, const char* who) {
    if (!is_unit(x) || !is_unit(y) || !is_unit(z)) {
        throw std::invalid_argument(std::string(who) + ": settings must be unit vectors");
    }
}

}  // namespace detail

/// Hidden BC state of the bilocal model, (S0 + lambda' . S)/2.
inline Mat4 bilocal_hidden_state(const CorrelationMatrix& t, const Vec3& lambda) {
    const Vec3 tl = t.apply(lambda);
    const double n = tl.norm();
    if (n < 1e-300) throw std::domain_error("bilocal_hidden_state: T lambda = 0");
    const auto& g = GeneralizedPauli::get();
    return (g.s0 + g.dot(tl / n)) * 0.5;
}

/// All eight P_b(a, b, c | x, y, z); no check that t is on the boundary.
inline Distribution<8> bilocal_distribution(const CorrelationMatrix& t, const Vec3& x, const Vec3& y, const Vec3& z,
                                            const QuadratureOptions& opts = {}) {
    detail::require_units(x, y, z, "bilocal_distribution");
    const detail::BcExpectations e(y, z);
    auto f = [&](const Vec3& lam) {
        const Vec3 tl = t.apply(lam);
        const double n = tl.norm();
        const double s = sgn(x.dot(lam));
        const Vec3 dir = n > 1e-300 ? tl / n : Vec3{};
        Distribution<8> d;
        for (std::size_t ia = 0; ia < 2; ++ia) {
            const double wa = n / (2.0 * kPi) * 0.5 * (1.0 + outcome_sign(ia) * s);
            for (std::size_t k = 0; k < 4; ++k) d[4 * ia + k] = wa * e.pure(k, dir);
        }
        return d;
    };
    return integrate_model(f, model_cuts(t, x), opts);
}

inline void require_boundary(const CorrelationMatrix& t, const char* who) {
    const double r = normalization_residual(t);
    if (std::abs(r) > 1e-7) {
        throw OffBoundary(std::string(who) + ": correlation matrix is off the steering boundary (normalization residual " +
                          std::to_string(r) + ")");
    }
}

inline double bilocal_joint(const CorrelationMatrix& t, const Vec3& x, const Vec3& y, const Vec3& z, int a, int b,
                            int c, const QuadratureOptions& opts = {}) {
    require_boundary(t, "bilocal_joint");
    return bilocal_distribution(t, x, y, z, opts)[outcome_index(a, b, c)];
}

/// Symmetrized slice point of rho1 at steering slope w >= w_c.
inline ThreeQubitGhzPoint bilocal_curve(double w) {
    if (!(w >= critical_w() - 1e-15)) {
        throw std::domain_error("bilocal_curve: w must satisfy w >= w_c = " + std::to_string(critical_w()));
    }
    const double p = boundary_abs_p(w);
    return {p, (2.0 * p * w + 0.5) / (2.0 * kSqrt3)};
}

/// Boundary correlation matrix Diag[2p, -2p, 2 sqrt(2) q] at two-qubit slope w.
inline CorrelationMatrix boundary_correlation(double w) { return correlation_matrix(boundary_p_of_w(w)); }

/// Average of a tripartite model with party A moved into each of the three positions.
template <class Model>
Distribution<8> symmetrize_over_parties(Model&& model, const Vec3& x, const Vec3& y, const Vec3& z) {
    const Distribution<8> d0 = model(x, y, z);
    const Distribution<8> dAB = model(y, x, z);  // parties (B, A, C)
    const Distribution<8> dAC = model(z, y, x);  // parties (C, B, A)
    Distribution<8> out;
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < 2; ++ib)
            for (std::size_t ic = 0; ic < 2; ++ic)
                out[4 * ia + 2 * ib + ic] =
                    (d0[4 * ia + 2 * ib + ic] + dAB[4 * ib + 2 * ia + ic] + dAC[4 * ic + 2 * ib + ia]) / 3.0;
    return out;
}

inline Distribution<8> symmetrized_bilocal_distribution(const CorrelationMatrix& t, const Vec3& x, const Vec3& y,
                                                        const Vec3& z, const QuadratureOptions& opts = {}) {
    return symmetrize_over_parties(
        [&](const Vec3& a, const Vec3& b, const Vec3& c) { return bilocal_distribution(t, a, b, c, opts); }, x, y, z);
}

inline double symmetrized_bilocal_joint(const CorrelationMatrix& t, const Vec3& x, const Vec3& y, const Vec3& z,
                                        int a, int b, int c, const QuadratureOptions& opts = {}) {
    require_boundary(t, "symmetrized_bilocal_joint");
    return symmetrized_bilocal_distribution(t, x, y, z, opts)[outcome_index(a, b, c)];
}

// ---------------------------------------------------------------------------
// Fully local model
// ---------------------------------------------------------------------------

/// (t 1 (x) S0 + sum_i T_i sigma_i (x) S_i)/4 + (1 - t)/2 1 (x) D01.
inline Mat8 rho2(double t, const CorrelationMatrix& tm, const DiagonalD01& d01) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("rho2: t must lie in [0, 1]");
    if (d01.w01 < -1e-12 || d01.w10 < -1e-12 || std::abs(d01.w01 + d01.w10 - 1.0) > 1e-12) {
        throw std::domain_error("rho2: D01 must be a normalized non-negative diagonal state");
    }
    const auto& g = GeneralizedPauli::get();
    Mat8 rho = kron(pauli::I, g.s0) * t;
    rho += kron(pauli::X, g.sx) * tm.tx;
    rho += kron(pauli::Y, g.sy) * tm.ty;
    rho += kron(pauli::Z, g.sz) * tm.tz;
    rho *= 0.25;
    rho += kron(pauli::I, d01.matrix()) * (0.5 * (1.0 - t));
    if (min_eigenvalue(rho) < -1e-10) throw std::domain_error("rho2: result is not positive semidefinite");
    return rho;
}

/// c = 1 - w_c, the cap of the weight function.
inline double weight_cap() { return 1.0 - critical_w(); }

/// Polar angle data of lambda'' = T lambda / |T lambda|.
struct HiddenDirection {
    Vec3 dir;
    double norm;
    double sinTheta;
    double cosTheta;
    double phi;
};

inline HiddenDirection hidden_direction(const CorrelationMatrix& t, const Vec3& lambda) {
    const Vec3 tl = t.apply(lambda);
    const double n = tl.norm();
    if (n < 1e-300) throw std::domain_error("hidden direction undefined: T lambda = 0");
    const Vec3 d = tl / n;
    return {d, n, std::hypot(d.x, d.y), d.z, std::atan2(d.y, d.x)};
}

/// chi(lambda) = min(sin theta'', c).
inline double weight_chi(const Vec3& lambda, const CorrelationMatrix& t, double c) {
    return std::min(hidden_direction(t, lambda).sinTheta, c);
}

enum class Branch { Separable = 1, Filtered = 2 };

/// Branch 1 (sin theta'' <= c, closed) or branch 2.
inline Branch branch_of(double sinTheta, double c) { return sinTheta <= c ? Branch::Separable : Branch::Filtered; }

/// D01 used by the hidden state on each branch.
inline DiagonalD01 branch_d01(const HiddenDirection& h, double c) {
    if (branch_of(h.sinTheta, c) == Branch::Separable) return DiagonalD01::maximally_mixed();
    // cos^2(theta''/2), sin^2(theta''/2)
    return {0.5 * (1.0 + h.cosTheta), 0.5 * (1.0 - h.cosTheta)};
}

struct BcHiddenState {
    Mat4 rho;
    Branch branch;
    double chi;
};

/// [ (S0 + lambda'' . S)/2 + chi D01 ] / (1 + chi).
inline BcHiddenState hidden_state_bc2(const Vec3& lambda, const CorrelationMatrix& t, double c) {
    const HiddenDirection h = hidden_direction(t, lambda);
    const double chi = std::min(h.sinTheta, c);
    const auto& g = GeneralizedPauli::get();
    Mat4 rho = (g.s0 + g.dot(h.dir)) * 0.5;
    rho += branch_d01(h, c).matrix() * chi;
    rho *= 1.0 / (1.0 + chi);
    return {rho, branch_of(h.sinTheta, c), chi};
}

/// Local filter (e^{i phi''} sin(theta''/2)|0><0| + cos(theta''/2)|1><1|) (x) 1.
inline Mat4 filter_map(const HiddenDirection& h) {
    const double half = 0.5 * std::atan2(h.sinTheta, h.cosTheta);
    Mat2 m;
    m(0, 0) = std::polar(std::sin(half), h.phi);
    m(1, 1) = std::cos(half);
    return kron(m, pauli::I);
}

/// The two-qubit GHZ-symmetric state where the steering boundary meets the
/// triangle side.
inline TwoQubitGhzPoint critical_boundary_point() { return boundary_p_of_w(critical_w()); }

/// Trace distance between the normalized filtered branch-2 hidden state and
/// the critical boundary state.
inline double filter_equivalence_defect(const Vec3& lambda, const CorrelationMatrix& t, double c) {
    const BcHiddenState hs = hidden_state_bc2(lambda, t, c);
    if (hs.branch != Branch::Filtered) throw std::domain_error("filter_equivalence_defect: lambda is on branch 1");
    const Mat4 m = filter_map(hidden_direction(t, lambda));
    Mat4 f = m * hs.rho * m.adjoint();
    f *= 1.0 / f.trace().real();
    return trace_distance(f.hermitized(1e-10), two_qubit_density(critical_boundary_point()));
}

/// Minimum eigenvalue of the partial transpose of a hidden BC state.
inline double ppt_min_eigenvalue(const Mat4& rho) { return min_eigenvalue(partial_transpose(rho, Qubit::B).hermitized(1e-10)); }

// ---- explicit local decompositions of the BC hidden states ----

/// Branch 1: the hidden state is the uniform alpha-average of product states
/// xi_B(alpha) (x) xi_C(alpha); exact with eight equally spaced alphas.
struct ProductTerm {
    double weight;
    Mat2 b;
    Mat2 c;
};

inline std::vector<ProductTerm> separable_decomposition(const HiddenDirection& h) {
    const double half = 0.5 * std::atan2(h.sinTheta, h.cosTheta);
    const double cc = std::cos(half);
    const double ss = std::sin(half);
    const double norm = cc + ss;
    constexpr int kAlphas = 8;
    std::vector<ProductTerm> terms;
    for (int k = 0; k < kAlphas; ++k) {
        const double alpha = 2.0 * kPi * k / kAlphas;
        const std::array<cplx, 2> vb{std::sqrt(cc / norm), std::polar(std::sqrt(ss / norm), alpha)};
        const std::array<cplx, 2> vc{std::sqrt(cc / norm), std::polar(std::sqrt(ss / norm), h.phi - alpha)};
        terms.push_back({1.0 / kAlphas, Mat2::outer(vb), Mat2::outer(vc)});
    }
    return terms;
}

/// Branch 2: the LHS model of the boundary state rho' (steered from C) pulled
/// back through the filter. With N = Tr(M rho M^dagger),
/// P(b, c | y, z) = integral N omega(mu) P_C(c|z, mu) Tr(Pi_b^y M^-1 rho_mu M^-dagger) d mu.
inline Distribution<4> filtered_local_distribution(const Vec3& lambda, const CorrelationMatrix& t, double c,
                                                   const Vec3& y, const Vec3& z, const QuadratureOptions& opts = {}) {
    const HiddenDirection h = hidden_direction(t, lambda);
    if (branch_of(h.sinTheta, c) != Branch::Filtered) {
        throw std::domain_error("filtered_local_distribution: lambda is on branch 1");
    }
    const BcHiddenState hs = hidden_state_bc2(lambda, t, c);
    const Mat4 m = filter_map(h);
    const double norm = (m * hs.rho * m.adjoint()).trace().real();

    const double half = 0.5 * std::atan2(h.sinTheta, h.cosTheta);
    Mat2 minv;
    minv(0, 0) = std::polar(1.0 / std::sin(half), -h.phi);
    minv(1, 1) = 1.0 / std::cos(half);

    const CorrelationMatrix tc = correlation_matrix(critical_boundary_point());
    const std::array<Mat2, 2> pb{projector(y, 1), projector(y, -1)};
    auto f = [&](const Vec3& mu) {
        const Vec3 tm = tc.apply(mu);
        const double n = tm.norm();
        const double s = sgn(z.dot(mu));
        const Mat2 pulled = minv * bloch_state(tm / n) * minv.adjoint();
        Distribution<4> d;
        for (std::size_t ib = 0; ib < 2; ++ib) {
            const double pbv = trace_of_product(pb[ib], pulled).real();
            for (std::size_t ic = 0; ic < 2; ++ic)
                d[2 * ib + ic] = norm * n / (2.0 * kPi) * 0.5 * (1.0 + outcome_sign(ic) * s) * pbv;
        }
        return d;
    };
    return integrate_model(f, model_cuts(tc, z), opts);
}

// ---- parameters ----

struct FullyLocalParams {
    double v = 1.0;
    double s = 0.0;   ///< overall scale of T1
    double t1 = 0.0;
    CorrelationMatrix T1;
    double c = 0.0;
    double residualNorm = 0.0;    ///< integral |T1 l|/(2 pi) - t1
    double residualWeight = 0.0;  ///< integral |T1 l| chi/(2 pi) - (1 - t1)

    ThreeQubitGhzPoint point() const { return {0.5 * T1.tx, (t1 + T1.tz - 0.5) / (2.0 * kSqrt3)}; }
};

/// cos(theta) of the latitudes where sin(theta'') = c for T = Diag[v, -v, 1].
inline double branch_latitude(double v, double c) {
    const double a = v * v * (1.0 - c * c);
    return std::sqrt(a / (a + c * c));
}

namespace detail {

struct RelationIntegrals {
    double norm;    // integral |T l| / (2 pi)
    double weight;  // integral |T l| chi / (2 pi)
};

inline RelationIntegrals relation_integrals(const CorrelationMatrix& t, double c, int nodes) {
    const double uc = branch_latitude(std::abs(t.tx / t.tz), c);
    struct Pair {
        double a = 0.0, b = 0.0;
        Pair& operator+=(const Pair& o) {
            a += o.a;
            b += o.b;
            return *this;
        }
        Pair& operator*=(double s) {
            a *= s;
            b *= s;
            return *this;
        }
    };
    // both integrands depend on lambda_z only
    const Pair r = integrate_zonal(
        [&](const Vec3& lam) {
            const HiddenDirection h = hidden_direction(t, lam);
            const double w = h.norm / (2.0 * kPi);
            return Pair{w, w * std::min(h.sinTheta, c)};
        },
        model_cuts(t, std::nullopt, {-uc, uc}).latitudes, nodes);
    return {r.a, r.b};
}

}  // namespace detail

/// T1(v) = s Diag[v, -v, 1] with s and t1 fixed by the two relations
/// integral |T1 l|/(2 pi) = t1 and integral |T1 l| chi/(2 pi) = 1 - t1. Both are
/// homogeneous of degree one in s, so s = 1/(I1 + I2) for the unit-scale
/// integrals I1, I2.
inline FullyLocalParams solve_fully_local_params(double v, int order = kDefaultQuadOrder) {
    if (!(v > 0.0 && v <= 1.0)) throw std::domain_error("fully_local_params: v must lie in (0, 1]");
    const double c = weight_cap();
    const int nodes = std::max(8, order / 4);
    const auto unit = detail::relation_integrals({v, -v, 1.0}, c, nodes);
    FullyLocalParams fp;
    fp.v = v;
    fp.c = c;
    fp.s = 1.0 / (unit.norm + unit.weight);
    if (!(fp.s > 0.0 && fp.s <= 1.0)) throw std::domain_error("fully_local_params: no solution for s in (0, 1]");
    fp.t1 = fp.s * unit.norm;
    fp.T1 = {fp.s * v, -fp.s * v, fp.s};
    // residuals re-evaluated at twice the resolution
    const auto check = detail::relation_integrals(fp.T1, c, 2 * nodes);
    fp.residualNorm = check.norm - fp.t1;
    fp.residualWeight = check.weight - (1.0 - fp.t1);
    return fp;
}

/// Cached solve; the cache is shared and guarded.
inline FullyLocalParams fully_local_params(double v, int order = kDefaultQuadOrder) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, FullyLocalParams> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find({v, order}); it != cache.end()) return it->second;
    }
    const FullyLocalParams fp = solve_fully_local_params(v, order);
    std::lock_guard lock(mu);
    cache.emplace(std::make_pair(v, order), fp);
    return fp;
}

inline double max_relation_residual(const FullyLocalParams& fp) {
    return std::max(std::abs(fp.residualNorm), std::abs(fp.residualWeight));
}

/// Numeric symmetrized point of rho2(t1, T1) at v.
inline ThreeQubitGhzPoint fully_local_curve(double v, int order = kDefaultQuadOrder) {
    return fully_local_params(v, order).point();
}

// ---- the model ----

namespace detail {

inline SphereCuts fully_local_cuts(const FullyLocalParams& fp, const Vec3& x) {
    const double uc = branch_latitude(std::abs(fp.T1.tx / fp.T1.tz), fp.c);
    return model_cuts(fp.T1, x, {-uc, uc});
}

}  // namespace detail

/// Literal model: omega = |T1 l|/(2 pi) (1 + chi), P_A from sgn(x . l), and
/// P_BC = Tr(Pi_b (x) Pi_c rho_l^BC) with the branch-dependent D01.
inline Distribution<8> fully_local_raw_distribution(const FullyLocalParams& fp, const Vec3& x, const Vec3& y,
                                                    const Vec3& z, const QuadratureOptions& opts = {}) {
    detail::require_units(x, y, z, "fully_local_distribution");
    const detail::BcExpectations e(y, z);
    auto f = [&](const Vec3& lam) {
        const HiddenDirection h = hidden_direction(fp.T1, lam);
        const double chi = std::min(h.sinTheta, fp.c);
        const DiagonalD01 d01 = branch_d01(h, fp.c);
        const double s = sgn(x.dot(lam));
        // omega * rho^BC = |T1 l|/(2 pi) [ (S0 + l'' . S)/2 + chi D01 ]
        const double base = h.norm / (2.0 * kPi);
        Distribution<8> d;
        for (std::size_t ia = 0; ia < 2; ++ia) {
            const double wa = base * 0.5 * (1.0 + outcome_sign(ia) * s);
            for (std::size_t k = 0; k < 4; ++k)
                d[4 * ia + k] = wa * (e.pure(k, h.dir) + chi * (d01.w01 * e.e01[k] + d01.w10 * e.e10[k]));
        }
        return d;
    };
    return integrate_model(f, detail::fully_local_cuts(fp, x), opts);
}

/// Average of the literal model and its B <-> C relabelling; still fully local.
inline Distribution<8> fully_local_distribution(const FullyLocalParams& fp, const Vec3& x, const Vec3& y,
                                                const Vec3& z, const QuadratureOptions& opts = {}) {
    const Distribution<8> d = fully_local_raw_distribution(fp, x, y, z, opts);
    const Distribution<8> sw = fully_local_raw_distribution(fp, x, z, y, opts);
    Distribution<8> out;
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < 2; ++ib)
            for (std::size_t ic = 0; ic < 2; ++ic)
                out[4 * ia + 2 * ib + ic] = 0.5 * (d[4 * ia + 2 * ib + ic] + sw[4 * ia + 2 * ic + ib]);
    return out;
}

inline double fully_local_joint(const FullyLocalParams& fp, const Vec3& x, const Vec3& y, const Vec3& z, int a, int b,
                                int c, const QuadratureOptions& opts = {}) {
    if (max_relation_residual(fp) > 1e-5) {
        throw std::domain_error("fully_local_joint: parameters violate the normalization relations (residual " +
                                std::to_string(max_relation_residual(fp)) + ")");
    }
    return fully_local_distribution(fp, x, y, z, opts)[outcome_index(a, b, c)];
}

inline Distribution<8> symmetrized_fully_local_distribution(const FullyLocalParams& fp, const Vec3& x, const Vec3& y,
                                                            const Vec3& z, const QuadratureOptions& opts = {}) {
    return symmetrize_over_parties(
        [&](const Vec3& a, const Vec3& b, const Vec3& c) { return fully_local_distribution(fp, a, b, c, opts); }, x, y,
        z);
}

/// omega-weighted average of the branch D01 states, normalized by 1 - t1.
inline DiagonalD01 effective_d01(const FullyLocalParams& fp, const QuadratureOptions& opts = {}) {
    struct Pair {
        double a = 0.0, b = 0.0;
        Pair& operator+=(const Pair& o) {
            a += o.a;
            b += o.b;
            return *this;
        }
        Pair& operator*=(double s) {
            a *= s;
            b *= s;
            return *this;
        }
    };
    const double uc = branch_latitude(std::abs(fp.T1.tx / fp.T1.tz), fp.c);
    const Pair r = integrate_model(
        [&](const Vec3& lam) {
            const HiddenDirection h = hidden_direction(fp.T1, lam);
            const double w = h.norm / (2.0 * kPi) * std::min(h.sinTheta, fp.c);
            const DiagonalD01 d = branch_d01(h, fp.c);
            return Pair{w * d.w01, w * d.w10};
        },
        model_cuts(fp.T1, std::nullopt, {-uc, uc}), opts);
    const double total = r.a + r.b;
    return {r.a / total, r.b / total};
}

/// The state reproduced by the fully local model.
inline Mat8 fully_local_state(const FullyLocalParams& fp, const QuadratureOptions& opts = {}) {
    return rho2(fp.t1, fp.T1, effective_d01(fp, opts));
}

/// K(x) = integral |T1 l|/(2 pi) c cos(theta'') 1[branch 2] sgn(x . l).
inline double raw_model_kernel(const FullyLocalParams& fp, const Vec3& x, const QuadratureOptions& opts = {}) {
    return integrate_model(
        [&](const Vec3& lam) {
            const HiddenDirection h = hidden_direction(fp.T1, lam);
            if (branch_of(h.sinTheta, fp.c) == Branch::Separable) return 0.0;
            return h.norm / (2.0 * kPi) * fp.c * h.cosTheta * sgn(x.dot(lam));
        },
        detail::fully_local_cuts(fp, x), opts);
}

/// Literal model minus rho2 prediction: (a/8) K(x) (b y_z - c z_z).
inline Distribution<8> raw_model_correction(const FullyLocalParams& fp, const Vec3& x, const Vec3& y, const Vec3& z,
                                            const QuadratureOptions& opts = {}) {
    const double k = raw_model_kernel(fp, x, opts);
    Distribution<8> d;
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < 2; ++ib)
            for (std::size_t ic = 0; ic < 2; ++ic)
                d[4 * ia + 2 * ib + ic] =
                    outcome_sign(ia) / 8.0 * k * (outcome_sign(ib) * y.z - outcome_sign(ic) * z.z);
    return d;
}

// ---- closed form ----

struct ClosedFormCurvePoint {
    double G0;
    double G1;
    ThreeQubitGhzPoint point;
};

/// Closed form for the symmetrized fully local curve, evaluated as
/// written: p = 1/(2G), q = ((G0 + v)/G - 1/2)/(2 sqrt 3), G = G0 + G1.
inline ClosedFormCurvePoint fully_local_curve_closed_form(double v) {
    if (!(v > 0.0 && v <= 1.0)) throw std::domain_error("fully_local_curve_closed_form: v must lie in (0, 1]");
    const double c = weight_cap();
    const double v2 = v * v;
    const double k2 = 1.0 - v2;

    // G0 = v^2 arctan(sqrt(1 - v^2))/sqrt(1 - v^2) + 1
    double atanRatio;
    if (k2 < 1e-4)
        atanRatio = 1.0 - k2 / 3.0 + k2 * k2 / 5.0;
    else
        atanRatio = std::atan(std::sqrt(k2)) / std::sqrt(k2);
    const double g0 = v2 * atanRatio + 1.0;

    const double c2 = c * c;
    const double d = c2 * (v2 - 1.0) + 1.0;
    const double n = c2 * (v2 * v2 - 1.0) + 1.0;
    const double a = std::sqrt(n / d);
    double r;
    if (std::abs(k2) < 1e-4) {
        // arccos(1 - y)/sqrt(1 - v^2) with y/(1 - v^2) = c^2 v^2/(D (1 + A))
        const double y = std::abs(1.0 - a);
        const double ratio = c2 * v2 / (d * (1.0 + a));
        r = std::sqrt(2.0 * ratio) * (1.0 + y / 12.0 + 3.0 * y * y / 160.0);
    } else {
        r = std::acos(std::min(1.0, a)) / std::sqrt(k2);
    }
    const double sc = std::sqrt(1.0 - c2);
    const double g1 = c2 * v * std::sqrt(n) / (2.0 * d) + c * r / 2.0 + std::atan(sc / (c * v)) + c * v * sc / d;

    const double g = g0 + g1;
    return {g0, g1, {1.0 / (2.0 * g), ((g0 + v) / g - 0.5) / (2.0 * kSqrt3)}};
}

}  // namespace ghzloc
