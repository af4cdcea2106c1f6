// Dense complex matrices for one to three qubits.
//
// Everything in this library lives in spaces of dimension 2, 4 or 8, so the
// matrix type is fixed-size and stack allocated. Basis ordering for
// multi-qubit operators is the usual Kronecker ordering, |abc> -> 4a + 2b + c.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>

namespace ghzloc {

using cplx = std::complex<double>;

/// Real 3-vector. Used for Bloch vectors, measurement directions and hidden
/// variables on the unit sphere.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr bool operator==(const Vec3&) const = default;

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const { return *this / norm(); }
};

using BlochVector = Vec3;

inline constexpr Vec3 kXAxis{1.0, 0.0, 0.0};
inline constexpr Vec3 kYAxis{0.0, 1.0, 0.0};
inline constexpr Vec3 kZAxis{0.0, 0.0, 1.0};

inline bool is_unit(const Vec3& v, double tol = 1e-12) { return std::abs(v.norm() - 1.0) <= tol; }

template <std::size_t N>
class Matrix {
public:
    static constexpr std::size_t dim = N;

    constexpr Matrix() { a_.fill(cplx{0.0, 0.0}); }

    /// Row-major initializer; missing entries are zero.
    Matrix(std::initializer_list<cplx> rowMajor) {
        if (rowMajor.size() > N * N) {
            throw std::invalid_argument("Matrix: too many initializer entries");
        }
        a_.fill(cplx{0.0, 0.0});
        std::copy(rowMajor.begin(), rowMajor.end(), a_.begin());
    }

    static Matrix identity() {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const double> d) {
        if (d.size() != N) throw std::invalid_argument("Matrix::diagonal: size mismatch");
        Matrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
        return m;
    }

    /// |psi><psi| for an (unnormalized) state vector.
    static Matrix outer(const std::array<cplx, N>& psi) {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m(i, j) = psi[i] * std::conj(psi[j]);
        return m;
    }

    cplx& operator()(std::size_t r, std::size_t c) { return a_[r * N + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * N + c]; }

    Matrix& operator+=(const Matrix& o) {
        for (std::size_t i = 0; i < N * N; ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (std::size_t i = 0; i < N * N; ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }
    Matrix& operator*=(double s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix l, const Matrix& r) { return l += r; }
    friend Matrix operator-(Matrix l, const Matrix& r) { return l -= r; }
    friend Matrix operator*(Matrix m, double s) { return m *= s; }
    friend Matrix operator*(double s, Matrix m) { return m *= s; }
    friend Matrix operator*(Matrix m, cplx s) { return m *= s; }
    friend Matrix operator*(cplx s, Matrix m) { return m *= s; }

    friend Matrix operator*(const Matrix& l, const Matrix& r) {
        Matrix out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                const cplx lik = l(i, k);
                if (lik == cplx{}) continue;
                for (std::size_t j = 0; j < N; ++j) out(i, j) += lik * r(k, j);
            }
        return out;
    }

    Matrix adjoint() const {
        Matrix out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj((*this)(j, i));
        return out;
    }

    Matrix transpose() const {
        Matrix out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) out(i, j) = (*this)(j, i);
        return out;
    }

    cplx trace() const {
        cplx t{};
        for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    /// max |A - A^dagger| entry.
    double hermiticity_defect() const {
        double d = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i; j < N; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d;
    }

    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    /// (A + A^dagger)/2. Throws if the drift being removed exceeds `tol`.
    Matrix hermitized(double tol = 1e-12) const {
        if (hermiticity_defect() > tol) {
            throw std::domain_error("Matrix::hermitized: drift " + std::to_string(hermiticity_defect()) +
                                    " exceeds tolerance");
        }
        Matrix out = *this;
        out += adjoint();
        out *= 0.5;
        return out;
    }

    const std::array<cplx, N * N>& data() const { return a_; }

private:
    std::array<cplx, N * N> a_;
};

using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;
using Mat8 = Matrix<8>;

/// Tr(A B) without forming the product.
template <std::size_t N>
cplx trace_of_product(const Matrix<N>& a, const Matrix<N>& b) {
    cplx t{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) t += a(i, k) * b(k, i);
    return t;
}

template <std::size_t N, std::size_t M>
Matrix<N * M> kron(const Matrix<N>& a, const Matrix<M>& b) {
    Matrix<N * M> out;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t k = 0; k < M; ++k)
                for (std::size_t l = 0; l < M; ++l) out(i * M + k, j * M + l) = aij * b(k, l);
        }
    return out;
}

template <std::size_t N, std::size_t M, std::size_t K>
Matrix<N * M * K> kron(const Matrix<N>& a, const Matrix<M>& b, const Matrix<K>& c) {
    return kron(kron(a, b), c);
}

namespace pauli {
inline const Mat2 I{1.0, 0.0, 0.0, 1.0};
inline const Mat2 X{0.0, 1.0, 1.0, 0.0};
inline const Mat2 Y{0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};
inline const Mat2 Z{1.0, 0.0, 0.0, -1.0};

/// n . sigma
inline Mat2 dot(const Vec3& n) { return X * n.x + Y * n.y + Z * n.z; }
}  // namespace pauli

/// Pi_a^x = (1 + a x.sigma)/2 for a unit direction x and outcome a = +-1.
inline Mat2 projector(const Vec3& x, int a) {
    if (!is_unit(x)) throw std::invalid_argument("projector: measurement direction is not a unit vector");
    if (a != 1 && a != -1) throw std::invalid_argument("projector: outcome must be +1 or -1");
    return (pauli::I + pauli::dot(x) * static_cast<double>(a)) * 0.5;
}

/// Qubit state (1 + r.sigma)/2.
inline Mat2 bloch_state(const Vec3& r) { return (pauli::I + pauli::dot(r)) * 0.5; }

namespace detail {

inline std::size_t product_of(std::span<const std::size_t> v) {
    return std::accumulate(v.begin(), v.end(), std::size_t{1}, std::multiplies<>{});
}

}  // namespace detail

/// Reduced operator on the subsystems listed in `keep` (ascending subsystem
/// indices into `dims`). `Out` must equal the product of the kept dimensions.
template <std::size_t Out, std::size_t N>
Matrix<Out> partial_trace(const Matrix<N>& rho, std::span<const std::size_t> dims,
                          std::span<const std::size_t> keep) {
    if (detail::product_of(dims) != N) throw std::invalid_argument("partial_trace: dims do not multiply to matrix dimension");
    if (!std::is_sorted(keep.begin(), keep.end()) ||
        std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
        throw std::invalid_argument("partial_trace: keep must be strictly ascending");
    }
    for (auto k : keep)
        if (k >= dims.size()) throw std::invalid_argument("partial_trace: subsystem index out of range");

    std::size_t keptDim = 1;
    for (auto k : keep) keptDim *= dims[k];
    if (keptDim != Out) throw std::invalid_argument("partial_trace: output dimension mismatch");

    const std::size_t n = dims.size();
    std::array<bool, 8> kept{};
    for (auto k : keep) kept[k] = true;

    // Mixed-radix digits of a full index; subsystem 0 is most significant.
    auto digits = [&](std::size_t idx) {
        std::array<std::size_t, 8> d{};
        for (std::size_t s = n; s-- > 0;) {
            d[s] = idx % dims[s];
            idx /= dims[s];
        }
        return d;
    };
    auto keptIndex = [&](const std::array<std::size_t, 8>& d) {
        std::size_t r = 0;
        for (std::size_t s = 0; s < n; ++s)
            if (kept[s]) r = r * dims[s] + d[s];
        return r;
    };

    Matrix<Out> out;
    for (std::size_t i = 0; i < N; ++i) {
        const auto di = digits(i);
        for (std::size_t j = 0; j < N; ++j) {
            const auto dj = digits(j);
            bool traced_match = true;
            for (std::size_t s = 0; s < n && traced_match; ++s)
                if (!kept[s] && di[s] != dj[s]) traced_match = false;
            if (traced_match) out(keptIndex(di), keptIndex(dj)) += rho(i, j);
        }
    }
    return out;
}

enum class Qubit { A, B };

/// Partial transpose of a two-qubit operator over the named qubit.
inline Mat4 partial_transpose(const Mat4& rho, Qubit which) {
    Mat4 out;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t d = 0; d < 2; ++d) {
                    // element <ab| rho |cd>
                    const cplx v = rho(2 * a + b, 2 * c + d);
                    if (which == Qubit::A)
                        out(2 * c + b, 2 * a + d) = v;
                    else
                        out(2 * a + d, 2 * c + b) = v;
                }
    return out;
}

/// Eigenvalues of a Hermitian matrix, ascending. Cyclic complex Jacobi.
template <std::size_t N>
std::array<double, N> hermitian_eigenvalues(const Matrix<N>& h, double hermitianTol = 1e-12) {
    const double scale = std::max(1.0, h.frobenius_norm());
    if (h.hermiticity_defect() > hermitianTol * scale) {
        throw std::domain_error("hermitian_eigenvalues: input is not Hermitian");
    }
    Matrix<N> a = h.hermitized(hermitianTol * scale);

    auto offNorm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && offNorm() > 1e-16 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const double r = std::abs(a(p, q));
                if (r < 1e-300) continue;
                const cplx phase = a(p, q) / r;  // e^{i alpha}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double zeta = (aqq - app) / (2.0 * r);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // G = diag(1, e^{-i alpha}) * [[c, s], [-s, c]] acting on (p, q).
                const cplx gpp = c;
                const cplx gpq = s;
                const cplx gqp = -s * std::conj(phase);
                const cplx gqq = c * std::conj(phase);
                // A <- A G
                for (std::size_t k = 0; k < N; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                // A <- G^dagger A
                for (std::size_t k = 0; k < N; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::array<double, N> ev{};
    for (std::size_t i = 0; i < N; ++i) ev[i] = a(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

template <std::size_t N>
double min_eigenvalue(const Matrix<N>& h) {
    return hermitian_eigenvalues(h).front();
}

/// (1/2) || A - B ||_1 for Hermitian A, B.
template <std::size_t N>
double trace_distance(const Matrix<N>& a, const Matrix<N>& b) {
    const auto ev = hermitian_eigenvalues(a - b, 1e-10);
    double s = 0.0;
    for (double e : ev) s += std::abs(e);
    return 0.5 * s;
}

/// Validity of a density operator: Hermitian, unit trace and (optionally)
/// positive semidefinite.
template <std::size_t N>
void require_density(const Matrix<N>& rho, bool requirePositive, const char* who) {
    if (!rho.is_hermitian(1e-12)) throw std::domain_error(std::string(who) + ": operator is not Hermitian");
    const cplx tr = rho.trace();
    if (std::abs(tr - cplx{1.0, 0.0}) > 1e-12) throw std::domain_error(std::string(who) + ": trace is not 1");
    if (requirePositive && min_eigenvalue(rho) < -1e-10) {
        throw std::domain_error(std::string(who) + ": operator is not positive semidefinite");
    }
}

}  // namespace ghzloc
