// ghzloc command-line tool: classification, curve and figure data, matrix
// symmetrization and model verification runs.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghzloc/ghzloc.hpp"

using namespace ghzloc;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

/// Input problems that map to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

int default_quad_order() {
    if (const char* env = std::getenv("GHZLOC_QUAD_ORDER")) {
        int v = 0;
        const std::string s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 2) {
            throw InputError("GHZLOC_QUAD_ORDER must be an integer >= 2, got '" + s + "'");
        }
        return v;
    }
    return kDefaultQuadOrder;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void write(std::ostream& os) const {
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
            os << "\n";
        }
    }
};

void emit(const Table& t, const std::string& path) {
    if (path.empty() || path == "-") {
        t.write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    t.write(out);
    if (!out) throw InputError("write failed for " + path);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    v.back() = b;
    return v;
}

std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    v.front() = a;
    v.back() = b;
    return v;
}

struct CurveOptions {
    std::string name;
    int samples = 201;
    double wMax = 0.0;  // 0 selects the per-curve default
    double vMin = 0.01;
    int order = kDefaultQuadOrder;
};

Table curve_table(const CurveOptions& o) {
    if (o.samples < 2) throw InputError("--samples must be >= 2");
    Table t;
    const double wc = critical_w();
    if (o.name == "sep3q") {
        t.header = {"q", "p", "q"};
        for (double q : linspace(0.0, kSqrt3 / 4.0, o.samples)) t.rows.push_back({q, separable_boundary_p(q), q});
    } else if (o.name == "bisepw3q") {
        t.header = {"q", "p", "q"};
        for (double q : linspace(1.0 / (4.0 * kSqrt3), kSqrt3 / 4.0, o.samples))
            t.rows.push_back({q, biseparable_w_boundary_p(q), q});
    } else if (o.name == "wghz3q") {
        t.header = {"v", "p", "q"};
        for (double v : linspace(0.0, 1.0, o.samples)) {
            const auto pt = wghz_boundary(v);
            t.rows.push_back({v, pt.p, pt.q});
        }
    } else if (o.name == "sep2q") {
        t.header = {"p", "p", "q"};
        for (double p : linspace(-0.25, 0.25, o.samples))
            t.rows.push_back({p, p, 1.0 / (2.0 * kSqrt2) - kSqrt2 * std::abs(p)});
    } else if (o.name == "steer2q") {
        const double wMax = o.wMax > 0 ? o.wMax : 10.0;
        if (wMax <= wc) throw InputError("--w-max must exceed w_c = " + fmt(wc));
        t.header = {"w", "p", "q"};
        auto branch = geomspace(wc, wMax, o.samples);
        for (auto it = branch.rbegin(); it != branch.rend(); ++it) {
            const auto pt = boundary_p_of_w(-*it);
            t.rows.push_back({-*it, pt.p, pt.q});
        }
        for (double w : branch) {
            const auto pt = boundary_p_of_w(w);
            t.rows.push_back({w, pt.p, pt.q});
        }
    } else if (o.name == "bilocal3q") {
        const double wMax = o.wMax > 0 ? o.wMax : 1e4;
        if (wMax <= wc) throw InputError("--w-max must exceed w_c = " + fmt(wc));
        t.header = {"w", "p", "q"};
        for (double w : geomspace(wc, wMax, o.samples)) {
            const auto pt = bilocal_curve(w);
            t.rows.push_back({w, pt.p, pt.q});
        }
    } else if (o.name == "fullylocal3q") {
        if (!(o.vMin > 0.0 && o.vMin < 1.0)) throw InputError("--v-min must lie in (0, 1)");
        t.header = {"v", "p", "q", "p_closed_form", "q_closed_form", "closed_form_in_triangle"};
        for (double v : linspace(o.vMin, 1.0, o.samples)) {
            const auto num = fully_local_curve(v, o.order);
            const auto cf = fully_local_curve_closed_form(v).point;
            t.rows.push_back({v, num.p, num.q, cf.p, cf.q, in_three_qubit_triangle(cf) ? 1.0 : 0.0});
        }
    } else {
        throw InputError("unknown curve '" + o.name +
                         "' (expected sep3q, bisepw3q, wghz3q, steer2q, bilocal3q, fullylocal3q, sep2q)");
    }
    return t;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

/// Accepts points within tol of the triangle and projects them onto it.
ThreeQubitGhzPoint admit_point(double p, double q, double tol) {
    ThreeQubitGhzPoint pt{p, q};
    if (pt.q > kThreeQubitQMax) {
        if (pt.q - kThreeQubitQMax > tol) {
            throw InputError("point outside the triangle: q = " + fmt(q) + " exceeds sqrt(3)/4");
        }
        pt.q = kThreeQubitQMax;
    }
    const double hw = triangle_half_width(pt.q);
    if (hw < -tol) {
        throw InputError("point outside the triangle: q = " + fmt(q) + " is below -1/(4 sqrt(3))");
    }
    if (std::abs(pt.p) > hw) {
        if (std::abs(pt.p) - hw > tol) {
            throw InputError("point outside the triangle: |p| = " + fmt(std::abs(p)) +
                             " exceeds 1/8 + (sqrt(3)/2) q = " + fmt(hw));
        }
        pt.p = std::copysign(std::max(hw, 0.0), pt.p);
    }
    return pt;
}

json classify_json(const ThreeQubitGhzPoint& pt) {
    const auto c = concurrences(pt);
    return {{"p", pt.p},
            {"q", pt.q},
            {"class", std::string(to_string(classify(pt)))},
            {"C_T", c.total},
            {"C_G", c.genuine},
            {"tau3", three_tangle(pt)}};
}

void print_bundle(const json& j) {
    std::cout << "p      " << fmt(j["p"].get<double>()) << "\n"
              << "q      " << fmt(j["q"].get<double>()) << "\n"
              << "class  " << j["class"].get<std::string>() << "\n";
    if (j.contains("C_T")) {
        std::cout << "C_T    " << fmt(j["C_T"].get<double>()) << "\n"
                  << "C_G    " << fmt(j["C_G"].get<double>()) << "\n"
                  << "tau3   " << fmt(j["tau3"].get<double>()) << "\n";
    }
    if (j.contains("oracle_trace_distance")) {
        std::cout << "oracle trace distance " << fmt(j["oracle_trace_distance"].get<double>()) << "\n";
    }
}

// ---------------------------------------------------------------------------
// symmetrize
// ---------------------------------------------------------------------------

Mat8 read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("entries")) throw InputError("matrix JSON needs an \"entries\" field");
    if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<int>() != 8)) {
        throw InputError("matrix JSON: dim must be 8");
    }
    const auto& e = j["entries"];
    if (!e.is_array() || e.size() != 8) throw InputError("matrix JSON: entries must have 8 rows");
    Mat8 m;
    for (std::size_t r = 0; r < 8; ++r) {
        if (!e[r].is_array() || e[r].size() != 8) throw InputError("matrix JSON: each row must have 8 entries");
        for (std::size_t c = 0; c < 8; ++c) {
            const auto& z = e[r][c];
            if (z.is_number()) {
                m(r, c) = z.get<double>();
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                m(r, c) = cplx{z[0].get<double>(), z[1].get<double>()};
            } else {
                throw InputError("matrix JSON: entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                 ") must be [re, im]");
            }
        }
    }
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local hidden-variable models and entanglement classes of GHZ-symmetric states"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.fallthrough();

    bool asJson = false;
    int quadOrder = 0;
    std::size_t mcSamples = 0;
    std::uint64_t seed = 7;
    app.add_flag("--json", asJson, "Print JSON instead of text");
    app.add_option("--quad-order", quadOrder, "Quadrature order (default 200 or GHZLOC_QUAD_ORDER)")
        ->check(CLI::Range(2, 100000));
    app.add_option("--mc-samples", mcSamples, "Use Monte Carlo with this many samples");
    app.add_option("--seed", seed, "Random seed (default 7)");

    // classify
    auto* cls = app.add_subcommand("classify", "Entanglement class and measures at (p, q)");
    double cp = 0, cq = 0, tol = 1e-4;
    cls->add_option("--p", cp, "p coordinate")->required();
    cls->add_option("--q", cq, "q coordinate")->required();
    cls->add_option("--tol", tol, "Distance from the triangle accepted and projected (default 1e-4)")
        ->check(CLI::NonNegativeNumber);

    // curve
    auto* crv = app.add_subcommand("curve", "Emit a boundary or model curve as CSV");
    CurveOptions co;
    std::string curveOut;
    crv->add_option("--name", co.name, "sep3q | bisepw3q | wghz3q | steer2q | bilocal3q | fullylocal3q | sep2q")
        ->required();
    crv->add_option("--samples", co.samples, "Number of samples (per branch for steer2q)");
    crv->add_option("--w-max", co.wMax, "Largest slope for steer2q / bilocal3q");
    crv->add_option("--v-min", co.vMin, "Smallest v for fullylocal3q");
    crv->add_option("--out", curveOut, "Output file (default stdout)");

    // figure
    auto* fig = app.add_subcommand("figure", "Write the CSV layers of a figure");
    int figId = 0;
    std::string figDir = ".";
    int figSamples = 401;
    fig->add_option("--id", figId, "Figure 1, 2 or 3")->required()->check(CLI::IsMember({1, 2, 3}));
    fig->add_option("--out", figDir, "Output directory (default .)");
    fig->add_option("--samples", figSamples, "Samples per curve");

    // symmetrize
    auto* sym = app.add_subcommand("symmetrize", "GHZ-symmetrize an 8x8 matrix given as JSON");
    std::string symIn;
    bool oracle = false;
    sym->add_option("input", symIn, "JSON file {\"dim\": 8, \"entries\": [[[re, im], ...], ...]}")->required();
    sym->add_flag("--oracle", oracle, "Also run the group-average path and report the trace distance");

    // verify
    auto* ver = app.add_subcommand("verify", "Compare a model with quantum predictions");
    std::string model = "bilocal", batchMode = "random", settingsFile, verOut;
    ModelParams mp;
    std::size_t nSettings = 100;
    ver->add_option("--model", model,
                    "lhs2q | lhv2q | bilocal | symmetrized-bilocal | fullylocal | symmetrized-fullylocal | "
                    "fullylocal-raw");
    ver->add_option("--w", mp.w, "Steering-boundary slope for two-qubit and bilocal models (default 1)");
    ver->add_option("--v", mp.v, "Fully local family parameter in (0, 1] (default 0.5)");
    ver->add_option("--scale-T", mp.scaleT, "Scale the correlation matrix (default 1)");
    ver->add_option("--settings,--samples", nSettings, "Number of random settings (default 100)");
    ver->add_option("--batch", batchMode, "random | pauli | file");
    ver->add_option("--settings-file", settingsFile, "JSON list of setting triples (implies --batch file)");
    ver->add_option("--out", verOut, "Write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        QuadratureOptions opts;
        opts.order = quadOrder > 0 ? quadOrder : default_quad_order();
        opts.mcSamples = mcSamples;
        opts.seed = seed;

        if (*cls) {
            const auto pt = admit_point(cp, cq, tol);
            const json j = classify_json(pt);
            if (asJson)
                std::cout << j.dump(2) << "\n";
            else
                print_bundle(j);
            return kExitPass;
        }

        if (*crv) {
            co.order = opts.order;
            emit(curve_table(co), curveOut);
            return kExitPass;
        }

        if (*fig) {
            namespace fs = std::filesystem;
            std::error_code ec;
            fs::create_directories(figDir, ec);
            if (ec) throw InputError("cannot create " + figDir + ": " + ec.message());
            auto path = [&](const std::string& name) { return (fs::path(figDir) / name).string(); };
            auto layer = [&](const std::string& name, int n = 0) {
                CurveOptions c;
                c.name = name;
                c.samples = n > 0 ? n : figSamples;
                c.order = opts.order;
                emit(curve_table(c), path(name + ".csv"));
            };
            std::vector<std::string> written;
            if (figId == 1) {
                Table tri{{"p", "q"},
                          {{-0.5, 1.0 / (2 * kSqrt2)}, {0.5, 1.0 / (2 * kSqrt2)}, {0.0, -1.0 / (2 * kSqrt2)},
                           {-0.5, 1.0 / (2 * kSqrt2)}}};
                emit(tri, path("triangle2q.csv"));
                layer("sep2q");
                layer("steer2q");
                written = {"triangle2q.csv", "sep2q.csv", "steer2q.csv"};
            } else if (figId == 2) {
                Table tri{{"p", "q"},
                          {{-0.5, kSqrt3 / 4}, {0.5, kSqrt3 / 4}, {0.0, kThreeQubitQMin}, {-0.5, kSqrt3 / 4}}};
                emit(tri, path("triangle3q.csv"));
                for (const char* n : {"sep3q", "bisepw3q", "wghz3q", "bilocal3q"}) layer(n);
                layer("fullylocal3q", std::min(figSamples, 200));
                written = {"triangle3q.csv", "sep3q.csv",     "bisepw3q.csv",
                           "wghz3q.csv",     "bilocal3q.csv", "fullylocal3q.csv"};
            } else {
                Table t{{"p", "w", "q", "C_T", "C_G", "tau3"}, {}};
                const auto ws = geomspace(critical_w(), 1e4, figSamples);
                for (auto it = ws.rbegin(); it != ws.rend(); ++it) {
                    const auto pt = bilocal_curve(*it);
                    const auto c = concurrences(pt);
                    t.rows.push_back({pt.p, *it, pt.q, c.total, c.genuine, three_tangle(pt)});
                }
                emit(t, path("fig3_bilocal_measures.csv"));
                written = {"fig3_bilocal_measures.csv"};
            }
            if (asJson) {
                std::cout << json{{"figure", figId}, {"directory", figDir}, {"files", written}}.dump(2) << "\n";
            } else {
                for (const auto& w : written) std::cout << path(w) << "\n";
            }
            return kExitPass;
        }

        if (*sym) {
            const Mat8 rho = read_matrix(symIn);
            ThreeQubitGhzPoint pt;
            try {
                pt = symmetrize_coords(rho);
            } catch (const std::domain_error& e) {
                throw InputError(e.what());
            }
            json j{{"p", pt.p}, {"q", pt.q}, {"class", std::string(to_string(classify(pt)))}};
            if (oracle) {
                j["oracle_trace_distance"] = trace_distance(symmetrize_oracle(rho, 8), three_qubit_density(pt));
            }
            if (asJson)
                std::cout << j.dump(2) << "\n";
            else
                print_bundle(j);
            return kExitPass;
        }

        if (*ver) {
            ModelKind kind;
            try {
                kind = parse_model(model);
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            }
            SettingsBatch batch;
            if (!settingsFile.empty() || batchMode == "file") {
                if (settingsFile.empty()) throw InputError("--batch file needs --settings-file");
                try {
                    batch = SettingsBatch::from_file(settingsFile);
                } catch (const std::invalid_argument& e) {
                    throw InputError(e.what());
                }
            } else if (batchMode == "pauli") {
                batch = SettingsBatch::pauli_axes();
            } else if (batchMode == "random") {
                if (nSettings < 1) throw InputError("--settings must be >= 1");
                batch = SettingsBatch::random(nSettings, seed);
            } else {
                throw InputError("unknown --batch '" + batchMode + "' (expected random, pauli or file)");
            }
            VerificationReport r;
            try {
                r = run_verification(kind, mp, batch, opts);
            } catch (const std::exception& e) {
                throw InputError(std::string("invalid model parameters: ") + e.what());
            }
            if (asJson)
                std::cout << r.to_json().dump(2) << "\n";
            else
                std::cout << r.to_text();
            if (!verOut.empty()) {
                std::ofstream out(verOut);
                if (!out) throw InputError("cannot write " + verOut);
                out << r.to_json().dump(2) << "\n";
            }
            return r.pass ? kExitPass : kExitFail;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
