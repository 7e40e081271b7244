#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace thermokit {

namespace {

void only_keys(const Json& obj, const std::set<std::string>& keys, const std::string& where) {
    if (!obj.is_object()) fail(ErrorCode::config, where + " must be an object");
    for (const auto& [k, v] : obj.items())
        if (!keys.count(k)) fail(ErrorCode::config, "unknown field '" + k + "' in " + where);
}

double get_number(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(ErrorCode::config, where + " requires '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(ErrorCode::config, where + "." + key + " must be a number");
    return v.get<double>();
}

long get_integer(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(ErrorCode::config, where + " requires '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(ErrorCode::config, where + "." + key + " must be an integer");
    return v.get<long>();
}

// Constructor argument checks surface as config errors here.
template <class F>
MapModel build_checked(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_argument) fail(ErrorCode::config, e.what());
        throw;
    }
}

}  // namespace

MapModel map_from_json(const Json& doc) {
    only_keys(doc, {"family", "params"}, "map");
    if (!doc.contains("family") || !doc.at("family").is_string()) fail(ErrorCode::config, "map requires a 'family' string");
    const std::string name = doc.at("family").get<std::string>();
    const auto fam = parse_family(name);
    if (!fam) fail(ErrorCode::config, "unknown family '" + name + "'");
    const Json params = doc.contains("params") ? doc.at("params") : Json::object();
    switch (*fam) {
        case Family::gauss:
            only_keys(params, {}, "params");
            return build_gauss();
        case Family::renyi:
            only_keys(params, {}, "params");
            return build_renyi();
        case Family::infinite_mp: {
            only_keys(params, {"beta"}, "params");
            const double beta = get_number(params, "beta", "params");
            return build_checked([&] { return build_infinite_mp(beta); });
        }
        case Family::pathological: {
            only_keys(params, {"N", "beta"}, "params");
            const long N = get_integer(params, "N", "params");
            const double beta = params.contains("beta") ? get_number(params, "beta", "params") : 1.0;
            return build_checked([&] { return build_pathological(N, beta); });
        }
        case Family::linear_custom: {
            only_keys(params, {"branches", "slopes"}, "params");
            if (params.contains("branches") == params.contains("slopes"))
                fail(ErrorCode::config, "linear_custom takes exactly one of 'branches' or 'slopes'");
            if (params.contains("slopes")) {
                const auto& s = params.at("slopes");
                if (!s.is_array() || s.empty()) fail(ErrorCode::config, "params.slopes must be a nonempty array");
                std::vector<double> slopes;
                for (const auto& v : s) {
                    if (!v.is_number()) fail(ErrorCode::config, "params.slopes entries must be numbers");
                    slopes.push_back(v.get<double>());
                }
                return build_checked([&] { return build_linear_from_slopes(slopes); });
            }
            const auto& bs = params.at("branches");
            if (!bs.is_array() || bs.empty()) fail(ErrorCode::config, "params.branches must be a nonempty array");
            std::vector<AffineBranch> branches;
            for (const auto& b : bs) {
                only_keys(b, {"interval", "slope"}, "branch");
                if (!b.contains("interval") || !b.at("interval").is_array() || b.at("interval").size() != 2 ||
                    !b.at("interval")[0].is_number() || !b.at("interval")[1].is_number())
                    fail(ErrorCode::config, "branch.interval must be [lo, hi]");
                branches.push_back({{b.at("interval")[0].get<double>(), b.at("interval")[1].get<double>()},
                                    get_number(b, "slope", "branch")});
            }
            return build_checked([&] { return build_linear_custom(branches); });
        }
    }
    fail(ErrorCode::config, "unknown family");
}

MapModel map_from_text(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::config, std::string("map JSON: ") + e.what());
    }
    return map_from_json(doc);
}

MapModel map_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::config, "cannot open map file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return map_from_text(ss.str());
}

Json map_to_json(const MapModel& model) {
    Json j;
    j["family"] = family_name(model.family());
    const auto p = model.params();
    Json params = Json::object();
    switch (model.family()) {
        case Family::infinite_mp: params["beta"] = p.beta; break;
        case Family::pathological:
            params["N"] = p.N;
            params["beta"] = p.beta;
            break;
        case Family::linear_custom: {
            Json bs = Json::array();
            for (const auto& b : p.affine) bs.push_back({{"interval", {b.interval.lo, b.interval.hi}}, {"slope", b.slope}});
            params["branches"] = bs;
            break;
        }
        default: break;
    }
    j["params"] = params;
    return j;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

CsvTable::CsvTable(std::string command, std::vector<std::string> columns)
    : command_(std::move(command)), columns_(std::move(columns)) {}

void CsvTable::add(std::vector<std::string> row) {
    require(row.size() == columns_.size(), "csv row width mismatch");
    rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
    os << "# thermokit " << command_ << " csv v" << kSchemaVersion << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
    for (const auto& n : notes_) os << "# " << n << "\n";
}

std::string CsvTable::str() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json document(std::string_view command) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const PressureEstimate& e) {
    return {{"value", number(e.value)}, {"lower", number(e.lower)}, {"upper", number(e.upper)},
            {"error", number(e.error)}, {"infinite", e.infinite}, {"converged", e.converged},
            {"N", e.N},                 {"depth", e.depth},       {"method", method_name(e.method)}};
}

Json to_json(const CurvePoint& p) {
    return {{"t", p.t},         {"P", number(p.value)}, {"lower", number(p.lower)}, {"upper", number(p.upper)},
            {"error", number(p.error)}, {"infinite", p.infinite}, {"N", p.N}, {"depth", p.depth},
            {"method", method_name(p.method)}};
}

Json to_json(const RegimeReport& r) {
    return {{"t_star", r.t_star},
            {"dim_estimate", r.dim_estimate},
            {"regime", regime_name(r.regime)},
            {"differentiable_at_dim", r.differentiable_at_dim},
            {"confidence", number(r.confidence)},
            {"derivative_gap", number(r.derivative_gap)},
            {"slow_convergence", r.slow_convergence}};
}

Json to_json(const LeftDerivative& d) {
    Json raw = Json::array();
    for (double v : d.raw) raw.push_back(number(v));
    return {{"value", d.value}, {"error", number(d.error)}, {"slow_convergence", d.slow_convergence}, {"raw", raw}};
}

Json to_json(const SpectrumPoint& p) {
    return {{"alpha", p.alpha},
            {"L", number(p.L)},
            {"L_error", number(p.L_error)},
            {"t_alpha", number(p.t_alpha)},
            {"residual", number(p.residual)},
            {"residual_error", number(p.residual_error)},
            {"flags", p.flags()}};
}

Json to_json(const SpectrumFeatures& f) {
    Json infl = Json::array();
    for (double a : f.inflections) infl.push_back(a);
    return {{"alpha_star", {{"value", f.alpha_star.value},
                            {"error", number(f.alpha_star.error)},
                            {"slow_convergence", f.alpha_star.slow_convergence}}},
            {"alpha_min", f.alpha_min},
            {"alpha_max_at", f.alpha_max_at},
            {"L_max", f.L_max},
            {"boundary_maximum", f.boundary_maximum},
            {"asymptote", f.asymptote ? Json(*f.asymptote) : Json(nullptr)},
            {"asymptote_error", number(f.asymptote_error)},
            {"inflections", infl},
            {"inflections_incomplete", f.inflections_incomplete},
            {"dim_estimate", f.dim_estimate},
            {"dim_irregular", f.dim_irregular}};
}

Json to_json(const ValidationReport& v) {
    Json checks = Json::array();
    for (const auto& c : v.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    Json rho = Json::array();
    for (double r : v.rho) rho.push_back(number(r));
    return {{"passed", v.passed()},  {"checks", checks},   {"expansion_m", v.expansion_m},
            {"gamma", number(v.gamma)}, {"log_C", number(v.log_C)}, {"growth_drift", number(v.growth_drift)},
            {"rho", rho},            {"inverse_error", number(v.inverse_error)}};
}

Json to_json(const ConjugacyReport& r) {
    Json ms = Json::array();
    for (const auto& m : r.mismatches) ms.push_back({{"word", m.word}, {"cycle", m.cycle}, {"reason", m.reason}});
    return {{"branches", r.branches},           {"depth", r.depth},
            {"block", r.block},                 {"coding", "renewal_block(" + std::to_string(r.block) + ")"},
            {"words_checked", r.words_checked}, {"cycles_checked", r.cycles_checked},
            {"mismatch_count", r.mismatch_count}, {"mismatches", ms}};
}

Json to_json(const TruncatedSpectra& s) {
    Json vals = Json::array();
    for (const auto& v : s.values)
        vals.push_back({{"N", v.N}, {"present", v.present}, {"L", number(v.L)}, {"t_alpha", number(v.t_alpha)}});
    return {{"alpha", s.alpha},
            {"values", vals},
            {"monotone", s.monotone},
            {"full_L", s.full_L ? number(*s.full_L) : Json(nullptr)},
            {"gap", number(s.gap)}};
}

Json to_json(const CFExpansion& cf) {
    Json j{{"kind", cf.kind == CFKind::regular ? "regular" : "backward"},
           {"origin", cf.origin.str(30)},
           {"digits", cf.digits},
           {"truncated", cf.truncated},
           {"reason", cf.reason}};
    if (cf.kind == CFKind::regular) {
        Json apps = Json::array();
        for (const auto& a : approximants(cf.digits)) apps.push_back({a.p.str(), a.q.str()});
        j["approximants"] = apps;
    }
    return j;
}

CsvTable pressure_csv(const std::vector<CurvePoint>& points) {
    CsvTable t("pressure-curve", {"t", "P", "lower", "upper", "N", "depth"});
    for (const auto& p : points)
        t.add({format_number(p.t), format_number(p.infinite ? kInf : p.value), format_number(p.infinite ? kInf : p.lower),
               format_number(p.infinite ? kInf : p.upper), std::to_string(p.N), std::to_string(p.depth)});
    std::string missed;
    for (const auto& p : points)
        if (!p.converged) missed += (missed.empty() ? "" : ",") + format_number(p.t);
    if (!missed.empty()) t.note("nonconverged t=" + missed);
    return t;
}

CsvTable spectrum_csv(const std::vector<SpectrumPoint>& points) {
    CsvTable t("spectrum", {"alpha", "L", "t_alpha", "residual", "flags"});
    for (const auto& p : points)
        t.add({format_number(p.alpha), format_number(p.L), format_number(p.present ? p.t_alpha : std::nan("")),
               format_number(p.present ? p.residual : std::nan("")), p.flags()});
    return t;
}

CsvTable gurevich_csv(const GurevichResult& r) {
    CsvTable t("gurevich", {"n", "estimate", "cap"});
    for (const auto& e : r.sequence) t.add({std::to_string(e.n), format_number(e.estimate), std::to_string(r.cap)});
    return t;
}

CsvTable orbit_csv(const std::vector<BirkhoffSample>& samples) {
    CsvTable t("orbit-stats", {"x0", "n", "lambda_hat", "escaped"});
    for (const auto& s : samples)
        t.add({format_number(s.x0), std::to_string(s.n), format_number(s.lambda_hat), s.escaped ? "1" : "0"});
    return t;
}

CsvTable induced_csv(const std::vector<InducedBranch>& branches) {
    CsvTable t("induced-scheme", {"n", "j", "interval_lo", "interval_hi", "deriv_inf", "deriv_sup"});
    for (const auto& b : branches)
        t.add({std::to_string(b.n), std::to_string(b.j), format_number(b.interval.lo), format_number(b.interval.hi),
               format_number(b.deriv_inf), format_number(b.deriv_sup)});
    return t;
}

}  // namespace thermokit
