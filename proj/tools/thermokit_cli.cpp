// thermokit command-line front end over the C API.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "thermokit/thermokit.h"

namespace {

struct Failure {
    int code;
    std::string message;
};

[[noreturn]] void config_error(const std::string& msg) { throw Failure{2, msg}; }

int exit_code(tk_status s) {
    switch (s) {
        case TK_OK: return 0;
        case TK_INVALID_ARGUMENT:
        case TK_CONFIG: return 2;
        case TK_NONCONVERGENCE:
        case TK_NUMERIC: return 3;
        case TK_BUDGET: return 4;
        default: return 1;
    }
}

void check(tk_status s) {
    if (s != TK_OK) throw Failure{exit_code(s), tk_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using MapPtr = std::unique_ptr<tk_map, Deleter<tk_map, tk_map_free>>;
using EnginePtr = std::unique_ptr<tk_engine, Deleter<tk_engine, tk_engine_free>>;
using CurvePtr = std::unique_ptr<tk_curve, Deleter<tk_curve, tk_curve_free>>;
using SpectrumPtr = std::unique_ptr<tk_spectrum, Deleter<tk_spectrum, tk_spectrum_free>>;

std::string take(char* s) {
    std::string out(s ? s : "");
    tk_string_free(s);
    return out;
}

std::vector<double> parse_grid(const std::string& spec, const char* flag) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            config_error(std::string(flag) + " expects a:b:n, got '" + spec + "'");
        }
    }
    if (parts.size() != 3) config_error(std::string(flag) + " expects a:b:n");
    const double a = parts[0], b = parts[1], nf = parts[2];
    const long n = static_cast<long>(nf);
    if (static_cast<double>(n) != nf || n < 1 || n > 100000) config_error(std::string(flag) + ": n must be an integer in 1..100000");
    if (n > 1 && !(b > a)) config_error(std::string(flag) + ": need a < b");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

struct Config {
    std::string map_path;
    std::string family;
    std::string out = "-";
    std::string format;
    std::string t_grid;
    std::string alpha_grid;
    std::vector<long> truncations;
    std::optional<int> depth_cap;
    std::optional<double> tol;
    std::uint64_t seed = 1;
    std::string method;
};

MapPtr load_map(const Config& c) {
    if (c.map_path.empty() == c.family.empty()) config_error("give exactly one of --map or --family");
    tk_map* m = nullptr;
    if (!c.map_path.empty()) {
        check(tk_map_from_file(c.map_path.c_str(), &m));
    } else {
        const std::string doc = "{\"family\": \"" + c.family + "\"}";
        if (c.family.find_first_of("\"\\") != std::string::npos) config_error("invalid family name");
        check(tk_map_from_json(doc.c_str(), &m));
    }
    return MapPtr(m);
}

tk_engine_options engine_options(const Config& c) {
    tk_engine_options o;
    tk_engine_options_default(&o);
    if (c.method == "cylinder") o.route = TK_ROUTE_CYLINDER;
    else if (c.method == "induced") o.route = TK_ROUTE_INDUCED;
    else if (!c.method.empty()) config_error("--method must be cylinder or induced");
    if (c.tol) o.tol = *c.tol;
    if (c.depth_cap) o.depth_cap = *c.depth_cap;
    return o;
}

EnginePtr make_engine(const tk_map* m, const Config& c) {
    const auto o = engine_options(c);
    tk_engine* e = nullptr;
    check(tk_engine_create(m, &o, &e));
    return EnginePtr(e);
}

void emit(const Config& c, const std::string& text) {
    if (c.out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
    if (!f) throw Failure{2, "cannot write '" + c.out + "'"};
    f << text;
    if (!f) throw Failure{2, "write to '" + c.out + "' failed"};
}

std::string drop_header(const std::string& csv) {
    std::size_t pos = 0;
    for (int k = 0; k < 2 && pos != std::string::npos; ++k) {
        pos = csv.find('\n', pos);
        if (pos != std::string::npos) ++pos;
    }
    return pos == std::string::npos ? std::string() : csv.substr(pos);
}

void require_format(Config& c, bool csv, bool json) {
    if (c.format.empty()) c.format = csv ? "csv" : "json";
    if (c.format == "csv" && csv) return;
    if (c.format == "json" && json) return;
    if (c.format != "csv" && c.format != "json") config_error("--format must be csv or json");
    config_error("this command does not emit " + c.format);
}

int cmd_pressure_curve(Config& c) {
    require_format(c, true, true);
    MapPtr base = load_map(c);
    const std::vector<double> grid = c.t_grid.empty() ? std::vector<double>{} : parse_grid(c.t_grid, "--t-grid");
    std::vector<long> Ns = c.truncations;
    if (Ns.empty()) Ns.push_back(0);
    if (Ns.size() > 1 && c.format == "json") config_error("JSON output takes a single map; drop --truncations or use csv");
    std::string text;
    bool converged = true;
    for (std::size_t k = 0; k < Ns.size(); ++k) {
        MapPtr m;
        if (Ns[k] > 0) {
            tk_map* t = nullptr;
            check(tk_map_truncate(base.get(), Ns[k], &t));
            m.reset(t);
        }
        const tk_map* use = m ? m.get() : base.get();
        EnginePtr e = make_engine(use, c);
        tk_curve* cv = nullptr;
        check(tk_curve_build(e.get(), grid.empty() ? nullptr : grid.data(), grid.size(), &cv));
        CurvePtr curve(cv);
        int ok = 1;
        check(tk_curve_converged(curve.get(), &ok));
        converged = converged && ok;
        char* s = nullptr;
        check(c.format == "json" ? tk_curve_json(curve.get(), &s) : tk_curve_csv(curve.get(), &s));
        const std::string part = take(s);
        text += k == 0 ? part : drop_header(part);
    }
    emit(c, text);
    return converged ? 0 : 3;
}

SpectrumPtr build_spectrum(const tk_map* m, const Config& c, CurvePtr& curve_out) {
    EnginePtr e = make_engine(m, c);
    tk_curve* cv = nullptr;
    check(tk_curve_build(e.get(), nullptr, 0, &cv));
    curve_out.reset(cv);
    const std::vector<double> grid =
        c.alpha_grid.empty() ? std::vector<double>{} : parse_grid(c.alpha_grid, "--alpha-grid");
    for (double a : grid)
        if (!(a > 0.0)) config_error("--alpha-grid values must be positive");
    tk_spectrum* sp = nullptr;
    check(tk_spectrum_build(curve_out.get(), grid.empty() ? nullptr : grid.data(), grid.size(), &sp));
    return SpectrumPtr(sp);
}

int cmd_spectrum(Config& c, bool features, std::optional<double> alpha) {
    MapPtr m = load_map(c);
    if (!c.truncations.empty()) {
        require_format(c, false, true);
        if (!alpha) config_error("--truncations needs --alpha");
        char* s = nullptr;
        check(tk_truncated_spectra_json(m.get(), *alpha, c.truncations.data(), c.truncations.size(), &s));
        emit(c, take(s));
        return 0;
    }
    if (features) require_format(c, false, true);
    else require_format(c, true, true);
    CurvePtr curve;
    SpectrumPtr sp = build_spectrum(m.get(), c, curve);
    char* s = nullptr;
    check(c.format == "json" ? tk_spectrum_features_json(sp.get(), &s) : tk_spectrum_csv(sp.get(), &s));
    emit(c, take(s));
    int ok = 1;
    check(tk_curve_converged(curve.get(), &ok));
    return ok ? 0 : 3;
}

int cmd_inflection(Config& c) {
    require_format(c, false, true);
    MapPtr m = load_map(c);
    CurvePtr curve;
    SpectrumPtr sp = build_spectrum(m.get(), c, curve);
    char* s = nullptr;
    check(tk_inflection_json(sp.get(), &s));
    emit(c, take(s));
    return 0;
}

int cmd_validate(Config& c) {
    require_format(c, false, true);
    MapPtr m = load_map(c);
    char* s = nullptr;
    check(tk_map_validate_json(m.get(), c.depth_cap.value_or(6), &s));
    emit(c, take(s));
    return 0;
}

struct GurevichArgs {
    std::string rule = "renewal";
    long N = 0;
    long base = 0;
    long n_max = 400;
    long cap = 50;
    double phi = 0.0;
};

int cmd_gurevich(Config& c, const GurevichArgs& g) {
    require_format(c, true, false);
    tk_rule_kind k;
    if (g.rule == "renewal") k = TK_RULE_RENEWAL;
    else if (g.rule == "n_renewal") k = TK_RULE_N_RENEWAL;
    else if (g.rule == "infinite_renewal") k = TK_RULE_INFINITE_RENEWAL;
    else config_error("--rule must be renewal, n_renewal or infinite_renewal");
    std::vector<long> caps = c.truncations.empty() ? std::vector<long>{g.cap} : c.truncations;
    std::string text;
    for (std::size_t i = 0; i < caps.size(); ++i) {
        char* s = nullptr;
        check(tk_gurevich_csv(k, g.N, g.phi, g.base, g.n_max, caps[i], &s));
        const std::string part = take(s);
        text += i == 0 ? part : drop_header(part);
    }
    emit(c, text);
    return 0;
}

int cmd_shift_check(Config& c, long N) {
    require_format(c, false, true);
    MapPtr m = load_map(c);
    char* s = nullptr;
    check(tk_shift_check_json(m.get(), N, c.depth_cap.value_or(4), &s));
    emit(c, take(s));
    return 0;
}

int cmd_orbit_stats(Config& c, long count, long n) {
    require_format(c, true, false);
    MapPtr m = load_map(c);
    char* s = nullptr;
    check(tk_orbit_csv(m.get(), count, n, c.seed, &s));
    emit(c, take(s));
    return 0;
}

int cmd_cf(Config& c, const std::string& x, long n, bool backward, unsigned bits) {
    require_format(c, false, true);
    if (x.empty()) config_error("cf needs --x");
    char* s = nullptr;
    check(tk_cf_json(x.c_str(), n, backward, bits, &s));
    emit(c, take(s));
    return 0;
}

int cmd_report(Config& c) {
    require_format(c, false, true);
    MapPtr m = load_map(c);
    const auto o = engine_options(c);
    char* s = nullptr;
    check(tk_report_json(m.get(), &o, c.seed, &s));
    emit(c, take(s));
    return 0;
}

void check_threads_env() {
    const char* env = std::getenv("THERMOKIT_THREADS");
    if (!env) return;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) config_error("THERMOKIT_THREADS must be a positive integer");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermokit: pressure and Lyapunov spectra of countable-branch interval maps"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(tk_version()));

    Config c;
    app.add_option("--map", c.map_path, "map JSON file");
    app.add_option("--family", c.family, "builtin family without parameters (gauss, renyi)");
    app.add_option("--out", c.out, "output path, - for stdout");
    app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--t-grid", c.t_grid, "a:b:n");
    app.add_option("--alpha-grid", c.alpha_grid, "a:b:n");
    app.add_option("--truncations", c.truncations, "comma-separated list")->delimiter(',');
    app.add_option("--depth-cap", c.depth_cap, "depth cap")->check(CLI::PositiveNumber);
    app.add_option("--tol", c.tol, "solver tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--method", c.method, "cylinder or induced")->check(CLI::IsMember({"cylinder", "induced"}));

    auto* pc = app.add_subcommand("pressure-curve", "t, P, lower, upper, N, depth");
    bool features = false;
    std::optional<double> alpha;
    auto* sp = app.add_subcommand("spectrum", "alpha, L, t_alpha, residual, flags");
    sp->add_flag("--features", features, "emit the SpectrumFeatures JSON");
    sp->add_option("--alpha", alpha, "alpha for truncated spectra")->check(CLI::PositiveNumber);
    auto* inf = app.add_subcommand("inflection", "inflection points and residual sign checks");
    auto* vm = app.add_subcommand("validate-map", "structural condition checks");
    GurevichArgs g;
    auto* gu = app.add_subcommand("gurevich", "n, estimate, cap");
    gu->add_option("--rule", g.rule, "renewal, n_renewal or infinite_renewal");
    gu->add_option("--N", g.N, "block parameter of n_renewal");
    gu->add_option("--base", g.base, "base vertex")->check(CLI::NonNegativeNumber);
    gu->add_option("--n-max", g.n_max, "longest cycle length");
    gu->add_option("--cap", g.cap, "vertex cap");
    gu->add_option("--phi", g.phi, "constant potential");
    long shift_N = 2;
    auto* sc = app.add_subcommand("shift-check", "itinerary conjugacy report");
    sc->add_option("--N", shift_N, "branches kept")->check(CLI::Range(2, 12));
    long count = 1000, n = 10000;
    auto* os = app.add_subcommand("orbit-stats", "x0, n, lambda_hat, escaped");
    os->add_option("--count", count, "samples")->check(CLI::PositiveNumber);
    os->add_option("--n", n, "iterations")->check(CLI::PositiveNumber);
    std::string x;
    long digits = 20;
    bool backward = false;
    unsigned bits = 256;
    auto* cf = app.add_subcommand("cf", "continued-fraction digits and approximants");
    cf->add_option("--x", x, "decimal or golden, 1/pi, sqrt2-1, e-2");
    cf->add_option("--n", digits, "digit count")->check(CLI::PositiveNumber);
    cf->add_flag("--backward", backward, "backward digits of the Renyi orbit");
    cf->add_option("--bits", bits, "mantissa bits")->check(CLI::Range(64u, 65536u));
    auto* rp = app.add_subcommand("report", "full battery as one JSON document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        check_threads_env();
        if (pc->parsed()) return cmd_pressure_curve(c);
        if (sp->parsed()) return cmd_spectrum(c, features, alpha);
        if (inf->parsed()) return cmd_inflection(c);
        if (vm->parsed()) return cmd_validate(c);
        if (gu->parsed()) return cmd_gurevich(c, g);
        if (sc->parsed()) return cmd_shift_check(c, shift_N);
        if (os->parsed()) return cmd_orbit_stats(c, count, n);
        if (cf->parsed()) return cmd_cf(c, x, digits, backward, bits);
        if (rp->parsed()) return cmd_report(c);
    } catch (const Failure& f) {
        std::cerr << "thermokit: " << f.message << "\n";
        return f.code;
    }
    return 2;
}
