// GHZ-symmetric two- and three-qubit states: construction, symmetrization,
// SLOCC classification and entanglement measures.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ghzloc/linalg.hpp"
#include "ghzloc/numerics.hpp"

namespace ghzloc {

/// Raised when a (p, q) pair lies outside the physical triangle, including
/// coordinates extracted from a non-positive "pseudo-state".
class OutOfTriangle : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Spin-correlation matrix Diag[Tx, Ty, Tz] of a Bell-diagonal state.
struct CorrelationMatrix {
    double tx = 0.0;
    double ty = 0.0;
    double tz = 0.0;

    Vec3 apply(const Vec3& v) const { return {tx * v.x, ty * v.y, tz * v.z}; }
    CorrelationMatrix scaled(double s) const { return {tx * s, ty * s, tz * s}; }
    bool operator==(const CorrelationMatrix&) const = default;
};

// ---------------------------------------------------------------------------
// Two qubits
// ---------------------------------------------------------------------------

struct TwoQubitGhzPoint {
    double p = 0.0;
    double q = 0.0;
};

inline constexpr double kTwoQubitQMax = 1.0 / (2.0 * kSqrt2);

inline bool in_two_qubit_triangle(const TwoQubitGhzPoint& pt, double tol = 1e-12) {
    return pt.q <= kTwoQubitQMax + tol && pt.q >= -kTwoQubitQMax - tol && pt.q / kSqrt2 + pt.p + 0.25 >= -tol &&
           pt.q / kSqrt2 - pt.p + 0.25 >= -tol;
}

inline CorrelationMatrix correlation_matrix(const TwoQubitGhzPoint& pt) {
    return {2.0 * pt.p, -2.0 * pt.p, 2.0 * kSqrt2 * pt.q};
}

/// Inverse of correlation_matrix; requires Tx = -Ty.
inline TwoQubitGhzPoint two_qubit_point(const CorrelationMatrix& t, double tol = 1e-12) {
    if (std::abs(t.tx + t.ty) > tol) throw std::domain_error("two_qubit_point: Tx != -Ty, not GHZ-symmetric");
    return {0.5 * t.tx, t.tz / (2.0 * kSqrt2)};
}

/// (1 + sum_i T_i sigma_i (x) sigma_i)/4
inline Mat4 bell_diagonal_density(const CorrelationMatrix& t) {
    Mat4 rho = Mat4::identity();
    rho += kron(pauli::X, pauli::X) * t.tx;
    rho += kron(pauli::Y, pauli::Y) * t.ty;
    rho += kron(pauli::Z, pauli::Z) * t.tz;
    return rho * 0.25;
}

/// Bell-diagonal positivity: the four Bell-basis weights are non-negative.
inline bool is_bell_diagonal_physical(const CorrelationMatrix& t, double tol = 1e-12) {
    const std::array<double, 4> w{1 + t.tx - t.ty + t.tz, 1 - t.tx + t.ty + t.tz, 1 + t.tx + t.ty - t.tz,
                                  1 - t.tx - t.ty - t.tz};
    return std::all_of(w.begin(), w.end(), [&](double x) { return x >= -4.0 * tol; });
}

namespace detail {
inline const std::array<cplx, 4> kPhiPlus{1.0 / kSqrt2, 0.0, 0.0, 1.0 / kSqrt2};
inline const std::array<cplx, 4> kPhiMinus{1.0 / kSqrt2, 0.0, 0.0, -1.0 / kSqrt2};
}  // namespace detail

inline Mat4 two_qubit_density(const TwoQubitGhzPoint& pt) {
    if (!in_two_qubit_triangle(pt)) {
        throw OutOfTriangle("two_qubit_density: (p, q) outside the two-qubit triangle");
    }
    Mat4 rho = Mat4::outer(detail::kPhiPlus) * (kSqrt2 * pt.q + pt.p);
    rho += Mat4::outer(detail::kPhiMinus) * (kSqrt2 * pt.q - pt.p);
    rho += Mat4::identity() * ((1.0 - 2.0 * kSqrt2 * pt.q) / 4.0);
    return rho;
}

// ---------------------------------------------------------------------------
// Three qubits
// ---------------------------------------------------------------------------

struct ThreeQubitGhzPoint {
    double p = 0.0;
    double q = 0.0;
};

inline constexpr double kThreeQubitQMax = kSqrt3 / 4.0;
inline constexpr double kThreeQubitQMin = -1.0 / (4.0 * kSqrt3);

/// |p| bound of the triangle at height q.
inline double triangle_half_width(double q) { return 0.125 + 0.5 * kSqrt3 * q; }

inline bool in_three_qubit_triangle(const ThreeQubitGhzPoint& pt, double tol = 1e-12) {
    return pt.q <= kThreeQubitQMax + tol && std::abs(pt.p) <= triangle_half_width(pt.q) + tol;
}

inline void require_three_qubit_triangle(const ThreeQubitGhzPoint& pt, const char* who) {
    if (pt.q > kThreeQubitQMax + 1e-12) {
        throw OutOfTriangle(std::string(who) + ": q = " + std::to_string(pt.q) + " exceeds sqrt(3)/4");
    }
    if (std::abs(pt.p) > triangle_half_width(pt.q) + 1e-12) {
        throw OutOfTriangle(std::string(who) + ": |p| = " + std::to_string(std::abs(pt.p)) +
                            " exceeds 1/8 + (sqrt(3)/2) q = " + std::to_string(triangle_half_width(pt.q)));
    }
}

namespace detail {
inline const std::array<cplx, 8> kGhzPlus{1.0 / kSqrt2, 0, 0, 0, 0, 0, 0, 1.0 / kSqrt2};
inline const std::array<cplx, 8> kGhzMinus{1.0 / kSqrt2, 0, 0, 0, 0, 0, 0, -1.0 / kSqrt2};

inline cplx expectation(const std::array<cplx, 8>& psi, const Mat8& rho) {
    cplx s{};
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) s += std::conj(psi[i]) * rho(i, j) * psi[j];
    return s;
}
}  // namespace detail

inline Mat8 ghz_plus_projector() { return Mat8::outer(detail::kGhzPlus); }
inline Mat8 ghz_minus_projector() { return Mat8::outer(detail::kGhzMinus); }

/// The GHZ-symmetric operator at (p, q) with no triangle check.
inline Mat8 ghz_symmetric_operator(double p, double q) {
    Mat8 rho = ghz_plus_projector() * (2.0 * q / kSqrt3 + p);
    rho += ghz_minus_projector() * (2.0 * q / kSqrt3 - p);
    rho += Mat8::identity() * ((1.0 - 4.0 * q / kSqrt3) / 8.0);
    return rho;
}

inline Mat8 three_qubit_density(const ThreeQubitGhzPoint& pt) {
    require_three_qubit_triangle(pt, "three_qubit_density");
    return ghz_symmetric_operator(pt.p, pt.q);
}

/// Coordinates of the symmetrized operator from the two GHZ matrix elements,
/// without any physicality check.
inline ThreeQubitGhzPoint ghz_coordinates(const Mat8& rho) {
    const double gp = detail::expectation(detail::kGhzPlus, rho).real();
    const double gm = detail::expectation(detail::kGhzMinus, rho).real();
    return {0.5 * (gp - gm), (gp + gm - 0.25) / kSqrt3};
}

/// Coordinates of rho^S(rho). rho must be Hermitian with unit trace but need not
/// be positive; the resulting point must lie in the triangle.
inline ThreeQubitGhzPoint symmetrize_coords(const Mat8& rho) {
    require_density(rho, false, "symmetrize_coords");
    const ThreeQubitGhzPoint pt = ghz_coordinates(rho);
    if (!in_three_qubit_triangle(pt)) {
        throw OutOfTriangle("symmetrize_coords: pseudo-state maps outside the triangle (p = " + std::to_string(pt.p) +
                            ", q = " + std::to_string(pt.q) + ")");
    }
    return pt;
}

namespace detail {

/// Permutation matrix sending qubit k of the input to position perm[k].
inline Mat8 qubit_permutation(const std::array<int, 3>& perm) {
    Mat8 m;
    for (std::size_t idx = 0; idx < 8; ++idx) {
        const std::array<std::size_t, 3> bits{(idx >> 2) & 1u, (idx >> 1) & 1u, idx & 1u};
        std::array<std::size_t, 3> out{};
        for (std::size_t k = 0; k < 3; ++k) out[static_cast<std::size_t>(perm[k])] = bits[k];
        m(4 * out[0] + 2 * out[1] + out[2], idx) = 1.0;
    }
    return m;
}

}  // namespace detail

/// Brute-force group average over qubit permutations, the simultaneous flip
/// sigma_x^{(x)3}, and correlated z rotations on an nPhi x nPhi grid.
inline Mat8 symmetrize_oracle(const Mat8& rho, int nPhi = 8) {
    if (nPhi < 1) throw std::invalid_argument("symmetrize_oracle: nPhi must be >= 1");
    std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    const Mat8 flip = kron(pauli::X, pauli::X, pauli::X);

    Mat8 acc;
    for (int i1 = 0; i1 < nPhi; ++i1) {
        for (int i2 = 0; i2 < nPhi; ++i2) {
            const double phi1 = 2.0 * kPi * i1 / nPhi;
            const double phi2 = 2.0 * kPi * i2 / nPhi;
            // U(phi1, phi2) is diagonal: phase exp(i(phi1 z_a + phi2 z_b - (phi1+phi2) z_c))
            std::array<cplx, 8> phase{};
            for (std::size_t idx = 0; idx < 8; ++idx) {
                const double za = ((idx >> 2) & 1u) ? -1.0 : 1.0;
                const double zb = ((idx >> 1) & 1u) ? -1.0 : 1.0;
                const double zc = (idx & 1u) ? -1.0 : 1.0;
                phase[idx] = std::polar(1.0, phi1 * za + phi2 * zb - (phi1 + phi2) * zc);
            }
            Mat8 rotated;
            for (std::size_t r = 0; r < 8; ++r)
                for (std::size_t c = 0; c < 8; ++c) rotated(r, c) = phase[r] * rho(r, c) * std::conj(phase[c]);
            const Mat8 flipped = flip * rotated * flip;
            for (const auto& perm : perms) {
                const Mat8 pm = detail::qubit_permutation(perm);
                acc += pm * rotated * pm.adjoint();
                acc += pm * flipped * pm.adjoint();
            }
        }
    }
    return acc * (1.0 / (12.0 * nPhi * nPhi));
}

// ---------------------------------------------------------------------------
// SLOCC classes and their boundaries
// ---------------------------------------------------------------------------

enum class EntanglementClass { Separable = 0, Biseparable = 1, W = 2, GHZ = 3 };

inline std::string_view to_string(EntanglementClass c) {
    switch (c) {
        case EntanglementClass::Separable: return "Separable";
        case EntanglementClass::Biseparable: return "Biseparable";
        case EntanglementClass::W: return "W";
        case EntanglementClass::GHZ: return "GHZ";
    }
    return "?";
}

/// Tolerance for assigning boundary points to the lower class.
inline constexpr double kBoundaryTol = 1e-12;

/// |p| on the separable/biseparable line at height q.
inline double separable_boundary_p(double q) { return -kSqrt3 / 6.0 * q + 0.125; }

/// |p| on the biseparable/W line at height q.
inline double biseparable_w_boundary_p(double q) { return -kSqrt3 / 2.0 * q + 0.375; }

/// Positive-p branch of the W/GHZ boundary, v in [0, 1].
inline ThreeQubitGhzPoint wghz_boundary(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("wghz_boundary: v must lie in [0, 1]");
    const double v2 = v * v;
    const double v3 = v2 * v;
    const double p = (v3 * v2 + 8.0 * v3) / (8.0 * (4.0 - v2));
    const double q = kSqrt3 * (4.0 - v2 - v2 * v2) / (4.0 * (4.0 - v2));
    return {p, q};
}

/// Inverse lookups on the W/GHZ curve. The curve is monotone (p increasing,
/// q decreasing in v), so both p -> v and q -> v are single valued.
class WGhzBoundary {
public:
    static const WGhzBoundary& instance() {
        static const WGhzBoundary table;
        return table;
    }

    static constexpr double kPEnd = 0.375;  // p at v = 1

    /// v with p(v) = p, for p in [0, 3/8].
    double v_of_p(double p) const {
        if (p <= 0.0) return 0.0;
        if (p >= kPEnd) return 1.0;
        const auto it = std::lower_bound(ps_.begin(), ps_.end(), p);
        const std::size_t hi = static_cast<std::size_t>(std::distance(ps_.begin(), it));
        const std::size_t lo = hi == 0 ? 0 : hi - 1;
        return find_root([&](double v) { return wghz_boundary(v).p - p; }, {vs_[lo], vs_[hi]}, 1e-16);
    }

    /// |p| of the boundary at height q; +infinity below the curve's lower end
    /// (q < sqrt(3)/6), where no GHZ states exist.
    double p_at(double q) const {
        const double qEnd = wghz_boundary(1.0).q;
        if (q < qEnd) return std::numeric_limits<double>::infinity();
        if (q >= kThreeQubitQMax) return 0.0;
        // q(v) decreasing: search on the reversed order
        std::size_t lo = 0, hi = vs_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (qs_[mid] >= q)
                lo = mid;
            else
                hi = mid;
        }
        const double v = find_root([&](double t) { return wghz_boundary(t).q - q; }, {vs_[lo], vs_[hi]}, 1e-16);
        return wghz_boundary(v).p;
    }

    /// True when (|p|, q) lies strictly on the GHZ side of the curve.
    bool beyond(double absP, double q) const {
        if (absP > kPEnd + kBoundaryTol) return true;
        const double v = v_of_p(std::min(absP, kPEnd));
        return q > wghz_boundary(v).q + kBoundaryTol;
    }

private:
    WGhzBoundary() {
        constexpr int kSamples = 1024;
        vs_.resize(kSamples + 1);
        ps_.resize(kSamples + 1);
        qs_.resize(kSamples + 1);
        for (int i = 0; i <= kSamples; ++i) {
            const double v = static_cast<double>(i) / kSamples;
            const auto pt = wghz_boundary(v);
            vs_[static_cast<std::size_t>(i)] = v;
            ps_[static_cast<std::size_t>(i)] = pt.p;
            qs_[static_cast<std::size_t>(i)] = pt.q;
        }
    }

    std::vector<double> vs_, ps_, qs_;
};

/// SLOCC class of a GHZ-symmetric state; boundary points go to the lower class.
inline EntanglementClass classify(const ThreeQubitGhzPoint& pt) {
    require_three_qubit_triangle(pt, "classify");
    const double ap = std::abs(pt.p);
    if (ap <= separable_boundary_p(pt.q) + kBoundaryTol) return EntanglementClass::Separable;
    if (ap <= biseparable_w_boundary_p(pt.q) + kBoundaryTol) return EntanglementClass::Biseparable;
    if (!WGhzBoundary::instance().beyond(ap, pt.q)) return EntanglementClass::W;
    return EntanglementClass::GHZ;
}

// ---------------------------------------------------------------------------
// Entanglement measures
// ---------------------------------------------------------------------------

/// p coordinate where the line from (|p|, q) to the |G+> corner meets the
/// W/GHZ boundary.
inline double three_tangle_reference_p(const ThreeQubitGhzPoint& pt) {
    const PlanePoint corner{0.5, kThreeQubitQMax};
    const PlanePoint from{std::abs(pt.p), pt.q};
    const auto hit = intersect_line_curve(
        from, corner,
        [](double v) {
            const auto b = wghz_boundary(v);
            return PlanePoint{b.p, b.q};
        },
        0.0, 1.0);
    return hit.p;
}

inline double three_tangle(const ThreeQubitGhzPoint& pt) {
    require_three_qubit_triangle(pt, "three_tangle");
    const double ap = std::abs(pt.p);
    if (std::hypot(ap - 0.5, pt.q - kThreeQubitQMax) < 1e-13) return 1.0;
    const double pW = three_tangle_reference_p(pt);
    return std::clamp((ap - pW) / (0.5 - pW), 0.0, 1.0);
}

struct Concurrences {
    double total;    ///< C_T, total entanglement
    double genuine;  ///< C_G, genuine multipartite entanglement
};

inline Concurrences concurrences(const ThreeQubitGhzPoint& pt) {
    require_three_qubit_triangle(pt, "concurrences");
    const double ap = std::abs(pt.p);
    return {std::max(0.0, 2.0 * ap + kSqrt3 / 3.0 * pt.q - 0.25), std::max(0.0, 2.0 * ap + kSqrt3 * pt.q - 0.75)};
}

}  // namespace ghzloc
