#include <gtest/gtest.h>

#include <random>

#include "ghzloc/ghz_states.hpp"

using namespace ghzloc;

namespace {

constexpr double kQTop = kSqrt3 / 4.0;

template <std::size_t N>
double max_diff(const Matrix<N>& a, const Matrix<N>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

/// Hermitian, unit trace, usually not positive: I/8 + eps H with H traceless.
Mat8 random_pseudo_state(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (double eps = 0.4;; eps *= 0.7) {
        Mat8 h;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) h(i, j) = cplx{g(rng), g(rng)};
        h = (h + h.adjoint()) * 0.5;
        h -= Mat8::identity() * (h.trace().real() / 8.0);
        h *= 1.0 / h.frobenius_norm();
        const Mat8 rho = Mat8::identity() * 0.125 + h * eps;
        if (in_three_qubit_triangle(ghz_coordinates(rho))) return rho;
    }
}

ThreeQubitGhzPoint random_triangle_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // uniform in the triangle with vertices (+-1/2, sqrt3/4) and (0, -1/(4 sqrt3))
    double a = u(rng), b = u(rng);
    if (a + b > 1) {
        a = 1 - a;
        b = 1 - b;
    }
    const PlanePoint v0{0.0, kThreeQubitQMin}, v1{0.5, kQTop}, v2{-0.5, kQTop};
    return {v0.p + a * (v1.p - v0.p) + b * (v2.p - v0.p), v0.q + a * (v1.q - v0.q) + b * (v2.q - v0.q)};
}

/// Brute-force p^W: dense v-scan for the sign change of the side-of-line
/// function, then linear interpolation.
double tangle_reference_by_scan(double ap, double q, int samples) {
    const double dp = 0.5 - ap, dq = kQTop - q;
    double prevV = 0.0, prevF = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double v = static_cast<double>(i) / samples;
        const double x = (v * v * v * v * v + 8 * v * v * v) / (8 * (4 - v * v));
        const double y = kSqrt3 * (4 - v * v - v * v * v * v) / (4 * (4 - v * v));
        const double f = (x - ap) * dq - (y - q) * dp;
        if (i > 0 && (f > 0) != (prevF > 0)) {
            const double t = prevF / (prevF - f);
            const double vs = prevV + t * (v - prevV);
            return (vs * vs * vs * vs * vs + 8 * vs * vs * vs) / (8 * (4 - vs * vs));
        }
        prevV = v;
        prevF = f;
    }
    return std::nan("");
}

}  // namespace

TEST(TwoQubitDensity, Fixtures) {
    EXPECT_LT(max_diff(two_qubit_density({0.0, 0.0}), Mat4::identity() * 0.25), 1e-16);
    Mat4 phi;
    phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
    EXPECT_LT(max_diff(two_qubit_density({0.5, 1.0 / (2.0 * kSqrt2)}), phi), 1e-15);
    EXPECT_THROW(two_qubit_density({0.5, 0.0}), OutOfTriangle);
}

TEST(TwoQubitDensity, SpinCorrelations) {
    const TwoQubitGhzPoint pt{0.13, 0.21};
    const Mat4 rho = two_qubit_density(pt);
    EXPECT_NEAR(trace_of_product(rho, kron(pauli::X, pauli::X)).real(), 2 * pt.p, 1e-15);
    EXPECT_NEAR(trace_of_product(rho, kron(pauli::Y, pauli::Y)).real(), -2 * pt.p, 1e-15);
    EXPECT_NEAR(trace_of_product(rho, kron(pauli::Z, pauli::Z)).real(), 2 * kSqrt2 * pt.q, 1e-15);
    EXPECT_LT(max_diff(rho, bell_diagonal_density(correlation_matrix(pt))), 1e-15);
    const auto back = two_qubit_point(correlation_matrix(pt));
    EXPECT_NEAR(back.p, pt.p, 1e-15);
    EXPECT_NEAR(back.q, pt.q, 1e-15);
    EXPECT_THROW(two_qubit_point({0.1, 0.2, 0.3}), std::domain_error);
}

TEST(ThreeQubitDensity, Fixtures) {
    EXPECT_LT(max_diff(three_qubit_density({0.0, 0.0}), Mat8::identity() * 0.125), 1e-16);
    EXPECT_LT(max_diff(three_qubit_density({0.5, kQTop}), ghz_plus_projector()), 1e-15);
    EXPECT_LT(max_diff(three_qubit_density({-0.5, kQTop}), ghz_minus_projector()), 1e-15);
    EXPECT_THROW(three_qubit_density({0.4, 0.0}), OutOfTriangle);
    EXPECT_THROW(three_qubit_density({0.0, 0.5}), OutOfTriangle);
}

TEST(ThreeQubitDensity, PositiveInsideTriangle) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 100; ++k) {
        const Mat8 rho = three_qubit_density(random_triangle_point(rng));
        EXPECT_GE(min_eigenvalue(rho), -1e-12);
        EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    }
}

TEST(SymmetrizeCoords, Fixtures) {
    const auto g = symmetrize_coords(ghz_plus_projector());
    EXPECT_NEAR(g.p, 0.5, 1e-15);
    EXPECT_NEAR(g.q, kQTop, 1e-15);
    const auto mixed = symmetrize_coords(Mat8::identity() * 0.125);
    EXPECT_NEAR(mixed.p, 0.0, 1e-16);
    EXPECT_NEAR(mixed.q, 0.0, 1e-16);
    Mat8 zero;
    zero(0, 0) = 1.0;
    const auto z = symmetrize_coords(zero);
    EXPECT_NEAR(z.p, 0.0, 1e-16);
    EXPECT_NEAR(z.q, kQTop, 1e-15);
}

TEST(SymmetrizeCoords, Errors) {
    Mat8 bad = Mat8::identity() * 0.125;
    bad(0, 1) = 0.1;
    EXPECT_THROW(symmetrize_coords(bad), std::domain_error);
    // Hermitian unit trace, but maps outside the triangle: q < -1/(4 sqrt 3)
    Mat8 out = Mat8::identity() * (1.2 / 6.0);
    out(0, 0) = out(7, 7) = -0.1;
    EXPECT_THROW(symmetrize_coords(out), OutOfTriangle);
}

TEST(SymmetrizeCoords, RoundTrip) {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 200; ++k) {
        const auto pt = random_triangle_point(rng);
        const auto back = symmetrize_coords(three_qubit_density(pt));
        EXPECT_NEAR(back.p, pt.p, 1e-12);
        EXPECT_NEAR(back.q, pt.q, 1e-12);
    }
}

TEST(SymmetrizeOracle, Fixtures) {
    EXPECT_LT(max_diff(symmetrize_oracle(Mat8::identity() * 0.125, 8), Mat8::identity() * 0.125), 1e-15);
    EXPECT_LT(max_diff(symmetrize_oracle(ghz_plus_projector(), 8), ghz_plus_projector()), 1e-14);
}

TEST(SymmetrizeOracle, AgreesWithCoordinatePath) {
    std::mt19937_64 rng(3);
    int nonPositive = 0;
    for (int k = 0; k < 50; ++k) {
        const Mat8 rho = random_pseudo_state(rng);
        if (min_eigenvalue(rho) < 0) ++nonPositive;
        const Mat8 viaGroup = symmetrize_oracle(rho, 8);
        const Mat8 viaCoords = three_qubit_density(symmetrize_coords(rho));
        EXPECT_LE(trace_distance(viaGroup, viaCoords), 1e-10);
    }
    EXPECT_GT(nonPositive, 0);
}

TEST(Classify, Fixtures) {
    EXPECT_EQ(classify({0.0, 0.0}), EntanglementClass::Separable);
    EXPECT_EQ(classify({0.5, kQTop}), EntanglementClass::GHZ);
    EXPECT_EQ(classify({-0.5, kQTop}), EntanglementClass::GHZ);
    EXPECT_EQ(classify({0.375, kSqrt3 / 6.0}), EntanglementClass::W);
    EXPECT_EQ(classify({0.0, kQTop}), EntanglementClass::Separable);
    EXPECT_EQ(classify({0.2, 0.1}), EntanglementClass::Biseparable);
    EXPECT_EQ(to_string(EntanglementClass::W), "W");
}

TEST(Classify, BoundaryPointsGoToLowerClass) {
    for (double q : {-0.1, 0.0, 0.2, 0.4}) {
        const double ps = separable_boundary_p(q);
        if (in_three_qubit_triangle({ps, q})) {
            EXPECT_EQ(classify({ps, q}), EntanglementClass::Separable);
        }
        const double pb = biseparable_w_boundary_p(q);
        if (in_three_qubit_triangle({pb, q})) {
            EXPECT_EQ(classify({pb, q}), EntanglementClass::Biseparable);
        }
    }
    for (double v : {0.1, 0.5, 0.9, 1.0}) EXPECT_EQ(classify(wghz_boundary(v)), EntanglementClass::W);
}

TEST(Classify, TripleJunction) {
    EXPECT_NEAR(separable_boundary_p(kQTop), 0.0, 1e-12);
    EXPECT_NEAR(biseparable_w_boundary_p(kQTop), 0.0, 1e-12);
    EXPECT_NEAR(wghz_boundary(0.0).p, 0.0, 1e-12);
    EXPECT_NEAR(wghz_boundary(0.0).q, kQTop, 1e-12);
}

TEST(Classify, MonotoneAlongRaysAndMirrorSymmetric) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 100; ++k) {
        const auto end = random_triangle_point(rng);
        int last = 0;
        for (int i = 0; i <= 200; ++i) {
            const double s = i / 200.0;
            const ThreeQubitGhzPoint pt{s * end.p, s * end.q};
            const int c = static_cast<int>(classify(pt));
            EXPECT_GE(c, last) << end.p << " " << end.q << " " << s;
            last = c;
            EXPECT_EQ(classify(pt), classify({-pt.p, pt.q}));
        }
    }
}

TEST(WGhzBoundary, EndpointsAndContainment) {
    EXPECT_NEAR(wghz_boundary(0.0).p, 0.0, 1e-16);
    EXPECT_NEAR(wghz_boundary(0.0).q, kQTop, 1e-16);
    EXPECT_NEAR(wghz_boundary(1.0).p, 0.375, 1e-16);
    EXPECT_NEAR(wghz_boundary(1.0).q, kSqrt3 / 6.0, 1e-16);
    for (int i = 0; i <= 1000; ++i) EXPECT_TRUE(in_three_qubit_triangle(wghz_boundary(i / 1000.0)));
    EXPECT_THROW(wghz_boundary(1.1), std::domain_error);
    EXPECT_THROW(wghz_boundary(-0.1), std::domain_error);
}

TEST(WGhzBoundary, TableInversion) {
    const auto& table = WGhzBoundary::instance();
    for (double v : {0.05, 0.3, 0.77, 0.99}) {
        const auto pt = wghz_boundary(v);
        EXPECT_NEAR(table.v_of_p(pt.p), v, 1e-10);
        EXPECT_NEAR(table.p_at(pt.q), pt.p, 1e-10);
    }
}

TEST(ThreeTangle, Fixtures) {
    EXPECT_DOUBLE_EQ(three_tangle({0.5, kQTop}), 1.0);
    EXPECT_NEAR(three_tangle({0.375, kSqrt3 / 6.0}), 0.0, 1e-12);
    EXPECT_EQ(three_tangle({0.0, 0.0}), 0.0);
}

TEST(ThreeTangle, AgreesWithDenseScan) {
    for (const auto& pt : {ThreeQubitGhzPoint{0.45, 0.40}, ThreeQubitGhzPoint{0.3, 0.41}, ThreeQubitGhzPoint{-0.42, 0.35}}) {
        const double pw = tangle_reference_by_scan(std::abs(pt.p), pt.q, 1'000'000);
        const double want = (std::abs(pt.p) - pw) / (0.5 - pw);
        const double got = three_tangle(pt);
        EXPECT_GT(got, 0.0);
        EXPECT_LT(got, 1.0);
        EXPECT_NEAR(got, want, 1e-9);
    }
}

TEST(ThreeTangle, VanishesOnBoundaryAndGrowsAboveIt) {
    for (int i = 0; i <= 100; ++i) EXPECT_LE(three_tangle(wghz_boundary(i / 100.0)), 1e-10);
    for (double q : {0.3, 0.37, 0.42}) {
        const double p0 = WGhzBoundary::instance().p_at(q);
        double last = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double p = p0 + (triangle_half_width(q) - p0) * i / 50.0;
            const double t = three_tangle({p, q});
            EXPECT_GT(t, last);
            last = t;
        }
    }
}

TEST(Concurrences, Fixtures) {
    const auto zero = concurrences({0.0, 0.0});
    EXPECT_EQ(zero.total, 0.0);
    EXPECT_EQ(zero.genuine, 0.0);
    const auto corner = concurrences({0.5, kQTop});
    EXPECT_NEAR(corner.total, 1.0, 1e-15);
    EXPECT_NEAR(corner.genuine, 1.0, 1e-15);
    for (int i = 0; i <= 100; ++i) {
        const double q = kQTop * i / 100.0;
        EXPECT_LE(concurrences({separable_boundary_p(q), q}).total, 1e-10);
    }
}

TEST(Concurrences, GenuineMatchesGenuineClasses) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 2000; ++k) {
        const auto pt = random_triangle_point(rng);
        const auto c = concurrences(pt);
        const auto cls = classify(pt);
        const bool genuine = cls == EntanglementClass::W || cls == EntanglementClass::GHZ;
        EXPECT_EQ(c.genuine > 1e-12, genuine) << pt.p << " " << pt.q;
        if (c.genuine > 0) {
            EXPECT_GT(c.total, 0.0);
        }
        EXPECT_EQ(c.total, concurrences({-pt.p, pt.q}).total);
        EXPECT_NEAR(three_tangle(pt), three_tangle({-pt.p, pt.q}), 1e-15);
    }
}
