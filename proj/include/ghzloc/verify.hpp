// Batch comparison of hidden-variable model probabilities with quantum
// predictions, plus certification sweeps over hidden states.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghzloc/ghz_states.hpp"
#include "ghzloc/linalg.hpp"
#include "ghzloc/numerics.hpp"
#include "ghzloc/steering.hpp"
#include "ghzloc/tripartite.hpp"

namespace ghzloc {

enum class ModelKind { Lhs2q, Lhv2q, Bilocal, SymmetrizedBilocal, FullyLocal, SymmetrizedFullyLocal, FullyLocalRaw };

inline std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Lhs2q: return "lhs2q";
        case ModelKind::Lhv2q: return "lhv2q";
        case ModelKind::Bilocal: return "bilocal";
        case ModelKind::SymmetrizedBilocal: return "symmetrized-bilocal";
        case ModelKind::FullyLocal: return "fullylocal";
        case ModelKind::SymmetrizedFullyLocal: return "symmetrized-fullylocal";
        case ModelKind::FullyLocalRaw: return "fullylocal-raw";
    }
    return "?";
}

inline ModelKind parse_model(const std::string& name) {
    for (auto m : {ModelKind::Lhs2q, ModelKind::Lhv2q, ModelKind::Bilocal, ModelKind::SymmetrizedBilocal,
                   ModelKind::FullyLocal, ModelKind::SymmetrizedFullyLocal, ModelKind::FullyLocalRaw}) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown model '" + name + "'");
}

inline bool is_fully_local(ModelKind m) {
    return m == ModelKind::FullyLocal || m == ModelKind::SymmetrizedFullyLocal || m == ModelKind::FullyLocalRaw;
}

/// Model parameters: w selects the steering-boundary matrix for the two-qubit
/// and bilocal models, v the fully local family. scaleT multiplies the
/// correlation matrix afterwards (1 keeps it on its boundary).
struct ModelParams {
    double w = 1.0;
    double v = 0.5;
    double scaleT = 1.0;
};

struct Setting {
    Vec3 x, y, z;
};

struct SettingsBatch {
    std::string mode;
    std::uint64_t seed = 0;
    std::vector<Setting> settings;

    static SettingsBatch random(std::size_t n, std::uint64_t seed) {
        if (n < 1) throw std::invalid_argument("SettingsBatch: need at least one setting");
        const auto dirs = sphere_sample(seed, 3 * n);
        SettingsBatch b{"random", seed, {}};
        for (std::size_t i = 0; i < n; ++i) b.settings.push_back({dirs[3 * i], dirs[3 * i + 1], dirs[3 * i + 2]});
        return b;
    }

    /// All 27 triples of coordinate axes.
    static SettingsBatch pauli_axes() {
        const std::array<Vec3, 3> axes{kXAxis, kYAxis, kZAxis};
        SettingsBatch b{"pauli-axes", 0, {}};
        for (const auto& x : axes)
            for (const auto& y : axes)
                for (const auto& z : axes) b.settings.push_back({x, y, z});
        return b;
    }

    /// JSON list of setting triples [[x1,x2,x3],[y1,y2,y3],[z1,z2,z3]]; pairs
    /// are accepted and z defaults to the z axis.
    static SettingsBatch from_json(const nlohmann::json& j) {
        if (!j.is_array() || j.empty()) throw std::invalid_argument("settings file: expected a non-empty array");
        SettingsBatch b{"file", 0, {}};
        auto vec = [](const nlohmann::json& v) {
            if (!v.is_array() || v.size() != 3) throw std::invalid_argument("settings file: direction needs 3 numbers");
            const Vec3 d{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
            if (!is_unit(d)) throw std::invalid_argument("settings file: direction is not a unit vector");
            return d;
        };
        for (const auto& s : j) {
            if (!s.is_array() || s.size() < 2 || s.size() > 3) {
                throw std::invalid_argument("settings file: each entry needs 2 or 3 directions");
            }
            b.settings.push_back({vec(s[0]), vec(s[1]), s.size() == 3 ? vec(s[2]) : kZAxis});
        }
        return b;
    }

    static SettingsBatch from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open settings file " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("settings file: ") + e.what());
        }
        return from_json(j);
    }
};

struct VerificationReport {
    std::string model;
    ModelParams params;
    std::string batchMode;
    std::size_t batchSize = 0;
    std::uint64_t seed = 0;
    int gridOrder = 0;
    std::size_t mcSamples = 0;
    double maxDeviation = 0.0;
    double meanDeviation = 0.0;
    double maxSimplexResidual = 0.0;
    double tolerance = 0.0;
    /// Normalization residual (boundary models) or largest relation residual
    /// (fully local models).
    double parameterResidual = 0.0;
    double parameterTolerance = 0.0;
    std::size_t pptPasses = 0, pptSamples = 0;
    std::size_t filterPasses = 0, filterSamples = 0;
    Setting worstSetting{};
    bool pass = false;
    double wallSeconds = 0.0;

    nlohmann::json to_json(bool includeTiming = true) const {
        auto v3 = [](const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); };
        nlohmann::json j{
            {"model", model},
            {"params", {{"w", params.w}, {"v", params.v}, {"scale_T", params.scaleT}}},
            {"batch", {{"mode", batchMode}, {"size", batchSize}, {"seed", seed}}},
            {"grid", {{"order", gridOrder}, {"mc_samples", mcSamples}}},
            {"deviations", {{"max", maxDeviation}, {"mean", meanDeviation}}},
            {"simplex_residual", maxSimplexResidual},
            {"tolerance", tolerance},
            {"parameter_residual", parameterResidual},
            {"certification",
             {{"ppt_passes", pptPasses},
              {"ppt_samples", pptSamples},
              {"filter_passes", filterPasses},
              {"filter_samples", filterSamples}}},
            {"pass", pass},
            {"worst_setting", {v3(worstSetting.x), v3(worstSetting.y), v3(worstSetting.z)}},
        };
        if (includeTiming) j["wall_time_s"] = wallSeconds;
        return j;
    }

    std::string to_text() const {
        std::ostringstream os;
        os.precision(6);
        os << "model            " << model << "\n"
           << "batch            " << batchMode << " (" << batchSize << " settings, seed " << seed << ")\n"
           << "grid             order " << gridOrder;
        if (mcSamples > 0) os << ", monte carlo " << mcSamples << " samples";
        os << "\n"
           << "max deviation    " << maxDeviation << " (tolerance " << tolerance << ")\n"
           << "mean deviation   " << meanDeviation << "\n"
           << "simplex residual " << maxSimplexResidual << "\n"
           << "param residual   " << parameterResidual << " (tolerance " << parameterTolerance << ")\n";
        if (pptSamples + filterSamples > 0) {
            os << "certified        branch 1 " << pptPasses << "/" << pptSamples << ", branch 2 " << filterPasses << "/"
               << filterSamples << "\n";
        }
        os << "worst setting    x=(" << worstSetting.x.x << ", " << worstSetting.x.y << ", " << worstSetting.x.z
           << ") y=(" << worstSetting.y.x << ", " << worstSetting.y.y << ", " << worstSetting.y.z << ") z=("
           << worstSetting.z.x << ", " << worstSetting.z.y << ", " << worstSetting.z.z << ")\n"
           << "result           " << (pass ? "PASS" : "FAIL") << "\n";
        return os.str();
    }
};

/// Model tolerance: 1e-6 for the steering-type models, 1e-5 for the fully local
/// ones, 3/sqrt(N) in Monte Carlo mode.
inline double model_tolerance(ModelKind m, const QuadratureOptions& opts) {
    if (opts.mcSamples > 0) return 3.0 / std::sqrt(static_cast<double>(opts.mcSamples));
    return is_fully_local(m) ? 1e-5 : 1e-6;
}

namespace detail {

template <std::size_t N>
double max_abs_difference(const Distribution<N>& a, const Distribution<N>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

template <std::size_t N>
double simplex_residual(const Distribution<N>& a) {
    double r = std::abs(a.total() - 1.0);
    for (double v : a.p) r = std::max(r, -v);
    return r;
}

}  // namespace detail

/// Fraction of sampled hidden states that pass certification.
struct CertificationCounts {
    std::size_t pptPasses = 0, pptSamples = 0;
    std::size_t filterPasses = 0, filterSamples = 0;
};

/// Branch-1 states must be positive and PPT (min eigenvalue >= -1e-10);
/// branch-2 states must filter to the critical boundary state within 1e-8.
inline CertificationCounts certify_hidden_states(const FullyLocalParams& fp, std::size_t n, std::uint64_t seed) {
    CertificationCounts cc;
    for (const Vec3& lam : sphere_sample(seed, n)) {
        const BcHiddenState hs = hidden_state_bc2(lam, fp.T1, fp.c);
        const bool positive = min_eigenvalue(hs.rho) >= -1e-10;
        if (hs.branch == Branch::Separable) {
            ++cc.pptSamples;
            if (positive && ppt_min_eigenvalue(hs.rho) >= -1e-10) ++cc.pptPasses;
        } else {
            ++cc.filterSamples;
            if (positive && filter_equivalence_defect(lam, fp.T1, fp.c) <= 1e-8) ++cc.filterPasses;
        }
    }
    return cc;
}

inline VerificationReport run_verification(ModelKind model, const ModelParams& params, const SettingsBatch& batch,
                                           const QuadratureOptions& opts) {
    if (batch.settings.empty()) throw std::invalid_argument("run_verification: empty settings batch");
    if (!(params.scaleT > 0.0)) throw std::invalid_argument("run_verification: scale-T must be positive");
    const auto start = std::chrono::steady_clock::now();

    VerificationReport r;
    r.model = to_string(model);
    r.params = params;
    r.batchMode = batch.mode;
    r.batchSize = batch.settings.size();
    r.seed = batch.seed;
    r.gridOrder = opts.order;
    r.mcSamples = opts.mcSamples;
    r.tolerance = model_tolerance(model, opts);

    // Per-setting deviation functions, built for the chosen model.
    std::function<std::pair<double, double>(const Setting&)> deviation;
    FullyLocalParams fp;
    CorrelationMatrix t;

    if (!is_fully_local(model)) {
        t = boundary_correlation(params.w).scaled(params.scaleT);
        r.parameterResidual = normalization_residual(t);
        r.parameterTolerance = 1e-7;
    } else {
        fp = fully_local_params(params.v, opts.order);
        if (params.scaleT != 1.0) {
            // keep t1 and rescale T1: the normalization relations then fail
            fp.T1 = fp.T1.scaled(params.scaleT);
            const auto check = detail::relation_integrals(fp.T1, fp.c, 2 * opts.piece_nodes());
            fp.residualNorm = check.norm - fp.t1;
            fp.residualWeight = check.weight - (1.0 - fp.t1);
        }
        r.parameterResidual = max_relation_residual(fp);
        r.parameterTolerance = 1e-5;
    }

    switch (model) {
        case ModelKind::Lhs2q:
            deviation = [&](const Setting& s) { return std::pair{verify_lhs(t, s.x, opts), 0.0}; };
            break;
        case ModelKind::Lhv2q: {
            const Mat4 rho = bell_diagonal_density(t);
            deviation = [&, rho](const Setting& s) {
                const auto m = two_qubit_lhv_distribution(t, s.x, s.y, opts);
                return std::pair{detail::max_abs_difference(m, quantum_distribution(rho, s.x, s.y)),
                                 detail::simplex_residual(m)};
            };
            break;
        }
        case ModelKind::Bilocal: {
            const Mat8 rho = rho1(t);
            deviation = [&, rho](const Setting& s) {
                const auto m = bilocal_distribution(t, s.x, s.y, s.z, opts);
                return std::pair{detail::max_abs_difference(m, quantum_distribution(rho, s.x, s.y, s.z)),
                                 detail::simplex_residual(m)};
            };
            break;
        }
        case ModelKind::SymmetrizedBilocal: {
            const Mat8 rho = three_qubit_density(symmetrize_coords(rho1(t)));
            deviation = [&, rho](const Setting& s) {
                const auto m = symmetrized_bilocal_distribution(t, s.x, s.y, s.z, opts);
                return std::pair{detail::max_abs_difference(m, quantum_distribution(rho, s.x, s.y, s.z)),
                                 detail::simplex_residual(m)};
            };
            break;
        }
        case ModelKind::FullyLocal: {
            const Mat8 rho = rho2(fp.t1, fp.T1, effective_d01(fp, opts));
            deviation = [&, rho](const Setting& s) {
                const auto m = fully_local_distribution(fp, s.x, s.y, s.z, opts);
                return std::pair{detail::max_abs_difference(m, quantum_distribution(rho, s.x, s.y, s.z)),
                                 detail::simplex_residual(m)};
            };
            break;
        }
        case ModelKind::SymmetrizedFullyLocal: {
            const Mat8 rho = three_qubit_density(symmetrize_coords(rho2(fp.t1, fp.T1, effective_d01(fp, opts))));
            deviation = [&, rho](const Setting& s) {
                const auto m = symmetrized_fully_local_distribution(fp, s.x, s.y, s.z, opts);
                return std::pair{detail::max_abs_difference(m, quantum_distribution(rho, s.x, s.y, s.z)),
                                 detail::simplex_residual(m)};
            };
            break;
        }
        case ModelKind::FullyLocalRaw: {
            const Mat8 rho = rho2(fp.t1, fp.T1, effective_d01(fp, opts));
            deviation = [&, rho](const Setting& s) {
                auto m = fully_local_raw_distribution(fp, s.x, s.y, s.z, opts);
                const double simplex = detail::simplex_residual(m);
                const auto corr = raw_model_correction(fp, s.x, s.y, s.z, opts);
                for (std::size_t i = 0; i < 8; ++i) m[i] -= corr[i];
                return std::pair{detail::max_abs_difference(m, quantum_distribution(rho, s.x, s.y, s.z)), simplex};
            };
            break;
        }
    }

    double sum = 0.0;
    r.maxDeviation = -1.0;
    for (const auto& s : batch.settings) {
        const auto [dev, simplex] = deviation(s);
        sum += dev;
        r.maxSimplexResidual = std::max(r.maxSimplexResidual, simplex);
        if (dev > r.maxDeviation) {
            r.maxDeviation = dev;
            r.worstSetting = s;
        }
    }
    r.meanDeviation = sum / static_cast<double>(batch.settings.size());

    bool certified = true;
    if (is_fully_local(model)) {
        const auto cc = certify_hidden_states(fp, batch.settings.size(), batch.seed + 1);
        r.pptPasses = cc.pptPasses;
        r.pptSamples = cc.pptSamples;
        r.filterPasses = cc.filterPasses;
        r.filterSamples = cc.filterSamples;
        certified = cc.pptPasses == cc.pptSamples && cc.filterPasses == cc.filterSamples;
    }

    r.pass = r.maxDeviation <= r.tolerance && std::abs(r.parameterResidual) <= r.parameterTolerance &&
             r.maxSimplexResidual <= 1e-10 && certified;
    r.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---------------------------------------------------------------------------
// Mermin operator
// ---------------------------------------------------------------------------

/// XXX - XYY - YXY - YYX
inline Mat8 mermin_operator() {
    using namespace pauli;
    Mat8 m = kron(X, X, X);
    m -= kron(X, Y, Y);
    m -= kron(Y, X, Y);
    m -= kron(Y, Y, X);
    return m;
}

enum class BellOperator { Mermin };

inline double bell_value(const Mat8& rho, BellOperator op = BellOperator::Mermin) {
    require_density(rho, true, "bell_value");
    switch (op) {
        case BellOperator::Mermin: return trace_of_product(rho, mermin_operator()).real();
    }
    return 0.0;
}

}  // namespace ghzloc
