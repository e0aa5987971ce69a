#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geotomo/determinant_geometry.hpp"
#include "geotomo/diagnostics.hpp"
#include "geotomo/errors.hpp"
#include "geotomo/interval_flow.hpp"
#include "geotomo/parallel.hpp"
#include "geotomo/radon.hpp"
#include "geotomo/sphere_grid.hpp"
#include "geotomo/star_body.hpp"
#include "geotomo/steiner.hpp"
#include "geotomo/volume_functionals.hpp"

using namespace geotomo;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitConfig = 3;
constexpr int kExitUsage = 64;

constexpr const char* kOutputDirEnv = "GEOTOMO_OUTPUT_DIR";

struct Result {
    json data;           // JSON commands
    std::string table;   // CSV commands
    int exit_code = kExitOk;
};

struct Command {
    std::string name;
    std::string help;
    bool csv;
    json defaults;
    std::function<Result(const json&)> run;
};

json body_defaults(std::string body = "ellipsoid:1,2,3") {
    return {{"body", body},     {"dim", 3},   {"grid", 4096},       {"grid_kind", "fibonacci"},
            {"grid_seed", 1},   {"circle", 0}, {"interp", "nearest"}};
}

json with(json base, const json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
    return base;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string join(const std::vector<double>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += fmt(v[i]);
    }
    return s;
}

std::string join(const Vec& v, char sep) { return join(std::vector<double>(v.data(), v.data() + v.size()), sep); }

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + tok + "'");
        }
        if (pos != tok.size()) throw ConfigError("not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

Interpolation parse_interp(const std::string& s) {
    if (s == "nearest") return Interpolation::nearest();
    if (s == "analytic") return Interpolation::analytic();
    if (s.rfind("local-average", 0) == 0) {
        int k = 6;
        if (s.size() > 13) {
            if (s[13] != ':') throw ConfigError("bad interpolation '" + s + "'");
            k = static_cast<int>(parse_numbers(s.substr(14)).at(0));
        }
        if (k < 1) throw ConfigError("local-average needs k >= 1");
        return Interpolation::local_average(k);
    }
    throw ConfigError("unknown interpolation '" + s + "'");
}

SphereGridPtr make_grid(const json& c) {
    GridKind kind;
    try {
        kind = grid_kind_from_string(c["grid_kind"].get<std::string>());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    std::optional<std::uint64_t> seed;
    if (kind == GridKind::MonteCarlo) seed = c["grid_seed"].get<std::uint64_t>();
    try {
        return build_grid(c["dim"].get<int>(), c["grid"].get<int>(), kind, seed);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

StarBody make_body(const std::string& spec, const json& c, const SphereGridPtr& g) {
    return materialize(parse_body_spec(spec, c["dim"].get<int>()), g);
}

RadonParams make_radon(const json& c) {
    RadonParams p;
    p.circle_resolution = c["circle"].get<int>();
    p.derived = parse_interp(c["interp"].get<std::string>());
    p.seed = c.value("seed", 0);
    return p;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

Vec direction_or_sample(const json& c, int dim, std::uint64_t seed) {
    std::string s = c["u"].get<std::string>();
    if (s.empty()) return sample_directions(dim, 1, seed)[0];
    auto v = parse_numbers(s);
    if (static_cast<int>(v.size()) != dim) throw ConfigError("u must have dim components");
    Vec u(dim);
    for (int i = 0; i < dim; ++i) u[i] = v[i];
    if (!(u.norm() > 0)) throw ConfigError("u must be nonzero");
    return u / u.norm();
}

// ---- commands ----

Result cmd_ibody(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    auto IK = intersection_body(K, make_radon(c));
    return {{{"body", to_json(IK)}, {"volume", volume(IK)}, {"input_volume", volume(K)}}};
}

Result cmd_iterate(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    auto it = iterate_I(K, c["steps"].get<int>(), c["renormalize"].get<bool>(), make_radon(c));
    std::string t = "step,eccentricity,volume,min_rho,max_rho\n";
    for (std::size_t i = 0; i < it.bodies.size(); ++i)
        t += std::to_string(i) + "," + fmt(it.eccentricity[i]) + "," + fmt(volume(it.bodies[i])) + "," +
             fmt(it.bodies[i].min_rho()) + "," + fmt(it.bodies[i].max_rho()) + "\n";
    return {{}, t};
}

Result cmd_fixedpoint(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    int order = c["order"].get<int>();
    if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
    auto r = fixed_point_residual(K, order, make_radon(c));
    return {{{"order", r.order}, {"c_best", r.c_best}, {"residual", r.residual}}};
}

Result cmd_busemann(const json& c) {
    auto g = make_grid(c);
    const double tol = c["tolerance"].get<double>();
    std::string t = "body,lhs,rhs,gap,relative_gap,tolerance,verdict\n";
    Result res;
    for (const auto& b : split(c["bodies"].get<std::string>(), ';')) {
        auto K = make_body(b, c, g);
        auto bg = busemann_gap(K, make_radon(c));
        std::string verdict = bg.relative_gap > tol ? "strict" : (bg.relative_gap >= -tol ? "equal" : "violated");
        if (verdict == "violated") res.exit_code = kExitAssertion;
        t += "\"" + b + "\"," + fmt(bg.lhs) + "," + fmt(bg.rhs) + "," + fmt(bg.gap) + "," + fmt(bg.relative_gap) +
             "," + fmt(tol) + "," + verdict + "\n";
    }
    res.table = t;
    return res;
}

const char* kEstimateHeader = "body,method,u,value,std_error,n_samples,seed,p_schedule,warning\n";

std::string estimate_row(const std::string& body, const std::string& u, const MCEstimate& e) {
    return "\"" + body + "\"," + e.method + "," + u + "," + fmt(e.value) + "," + fmt(e.std_error) + "," +
           std::to_string(e.n_samples) + "," + std::to_string(e.seed) + "," + join(e.p_schedule, ';') + ",\"" +
           e.warning + "\"\n";
}

Result cmd_i0(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    I0Params p;
    p.p_schedule = c["p_schedule"].get<std::vector<double>>();
    std::string m = c["method"];
    if (m == "slab") p.method = I0Method::SlabImportance;
    else if (m == "naive") p.method = I0Method::Naive;
    else throw ConfigError("method must be slab or naive");
    for (double q : p.p_schedule)
        if (!(q > -1 && q < 0)) throw ConfigError("p values must lie in (-1, 0)");
    auto e = estimate_I0(K, c["samples"].get<long>(), c["seed"].get<std::uint64_t>(), p);
    return {{}, std::string(kEstimateHeader) + estimate_row(c["body"], "", e)};
}

Result cmd_iu(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    const int n = K.dim();
    std::vector<Vec> dirs;
    if (!c["u"].get<std::string>().empty()) dirs.push_back(direction_or_sample(c, n, 0));
    else dirs = sample_directions(n, c["directions"].get<int>(), c["seed"].get<std::uint64_t>());
    std::string t = kEstimateHeader;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        auto e = estimate_Iu(K, dirs[i], c["samples"].get<long>(), derive_seed(c["seed"].get<std::uint64_t>(), i));
        t += estimate_row(c["body"], join(dirs[i], ';'), e);
    }
    return {{}, t};
}

Result cmd_steiner_flow(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    Vec u = direction_or_sample(c, K.dim(), c["seed"].get<std::uint64_t>());
    SteinerParams p;
    p.radon = make_radon(c);
    p.h = c["cell_size"].get<double>();
    p.s_res = c["s_res"].get<int>();
    std::string mode = c["mode"];
    if (mode == "exact") p.mode = FiberMode::Exact;
    else if (mode == "grid") p.mode = FiberMode::Grid;
    else throw ConfigError("mode must be exact or grid");
    int steps = c["t_steps"].get<int>();
    if (steps < 1) throw ConfigError("t_steps must be >= 1");
    std::vector<double> ts;
    for (int i = 0; i <= steps; ++i) ts.push_back(static_cast<double>(i) / steps);
    return {to_json(flow_report(K, u, ts, p))};
}

Result cmd_classify_boxes(const json& c) {
    std::vector<int> dims;
    for (double d : c["dims"].get<std::vector<double>>()) dims.push_back(static_cast<int>(d));
    auto corpus = classifier_corpus(dims, c["cases"].get<int>(), c["seed"].get<std::uint64_t>());
    std::string t = "index,dim,intended,verdict,derivative,f1,facet,facet_brute_force,consistent\n";
    Result res;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& k = corpus[i];
        auto v = classify_equality(k.R, k.theta);
        double f1 = box_section_volume(Box{k.R.c * 0.0, k.R.l}, k.theta, 0.0);
        bool violated = v.tag == EqualityTag::Violated;
        bool ok = violated == (std::abs(v.derivative_estimate) > 1e-3 * f1);
        std::string fc = "", fb = "";
        if (v.tag != EqualityTag::NoSection) {
            bool a = facet_criterion(k.R, k.theta), b = facet_criterion_brute_force(k.R, k.theta);
            fc = a ? "1" : "0";
            fb = b ? "1" : "0";
            ok = ok && a == b;
        }
        if (!ok) res.exit_code = kExitAssertion;
        t += std::to_string(i) + "," + std::to_string(k.theta.size()) + "," + to_string(k.intended) + "," +
             to_string(v.tag) + "," + fmt(v.derivative_estimate) + "," + fmt(f1) + "," + fc + "," + fb + "," +
             (ok ? "1" : "0") + "\n";
    }
    res.table = t;
    return res;
}

Result cmd_detect_ellipsoid(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    auto dirs = sample_directions(K.dim(), c["directions"].get<int>(), c["seed"].get<std::uint64_t>());
    auto d = ellipsoid_detector(K, dirs, c["delta"].get<double>(), c["threshold"].get<double>(),
                                c["base_resolution"].get<int>());
    return {to_json(d)};
}

Result cmd_radon_spectrum(const json& c) {
    if (c["dim"].get<int>() != 3) throw ConfigError("radon-spectrum is defined for dim 3");
    auto g = make_grid(c);
    auto p = make_radon(c);
    std::string t = "m,nu_quadrature,nu_exact,abs_error\n";
    for (int m = 0; m <= c["max_m"].get<int>(); ++m) {
        double q = radon_eigenvalue3(g, m, p), e = radon_multiplier3(m);
        t += std::to_string(m) + "," + fmt(q) + "," + fmt(e) + "," + fmt(std::abs(q - e)) + "\n";
    }
    return {{}, t};
}

Result cmd_stationarity(const json& c) {
    auto g = make_grid(c);
    auto K = make_body(c["body"], c, g);
    auto rp = make_radon(c);
    double cc = c["c"].get<double>();
    if (cc <= 0) cc = fixed_point_residual(K, 2, rp).c_best;
    auto dirs = sample_directions(K.dim(), c["directions"].get<int>(), c["seed"].get<std::uint64_t>());
    StationarityParams p;
    p.n_samples = c["samples"].get<long>();
    p.seed = c["seed"].get<std::uint64_t>();
    return {to_json(stationarity_report(K, cc, dirs, c["t_step"].get<double>(), p))};
}

// ---- selfcheck ----

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

IntervalUnion random_union(Rng& rng) {
    int k = 1 + static_cast<int>(rng.uniform() * 5);
    std::vector<IntervalUnion::Interval> iv;
    double x = -5 + 2 * rng.uniform();
    for (int i = 0; i < k; ++i) {
        double len = 0.05 + rng.uniform();
        iv.push_back({x, x + len});
        x += len + 0.01 + rng.uniform();
    }
    return IntervalUnion(iv);
}

Check check_flow_laws(std::uint64_t seed, int cases) {
    int bad = 0;
    for (int i = 0; i < cases; ++i) {
        Rng rng(derive_seed(seed, i));
        auto J = random_union(rng);
        double s = rng.uniform(), t = rng.uniform();
        auto a = flow(J, s), b = flow(J, t);
        if (std::abs(a.length() - J.length()) > 1e-12 * (1 + J.length())) ++bad;
        auto ab = flow(flow(J, s), t);
        auto direct = flow(J, s + t - s * t);
        if (hausdorff(ab, direct) > 1e-10) ++bad;
        double R = std::max(std::abs(J.lo()), std::abs(J.hi()));
        if (hausdorff(a, J) > R * s + 1e-10) ++bad;
        if (!is_subset(flow(J, 1.0), centered(J), 1e-12) || !is_subset(centered(J), flow(J, 1.0), 1e-12)) ++bad;
        (void)b;
    }
    return {"interval-flow-laws", bad == 0, std::to_string(bad) + " violations in " + std::to_string(cases)};
}

Check check_classifier(std::uint64_t seed, int cases) {
    auto corpus = classifier_corpus({2, 3, 4}, cases, seed);
    int bad = 0;
    for (const auto& k : corpus) {
        auto v = classify_equality(k.R, k.theta);
        double f1 = box_section_volume(Box{k.R.c * 0.0, k.R.l}, k.theta, 0.0);
        if ((v.tag == EqualityTag::Violated) != (std::abs(v.derivative_estimate) > 1e-3 * f1)) ++bad;
        if (v.tag != EqualityTag::NoSection &&
            facet_criterion(k.R, k.theta) != facet_criterion_brute_force(k.R, k.theta))
            ++bad;
    }
    return {"rectangle-classifier", bad == 0, std::to_string(bad) + " inconsistent of " + std::to_string(cases)};
}

Check check_ball_fixed_point() {
    auto g = build_grid(3, 1024, GridKind::Fibonacci);
    auto r = fixed_point_residual(materialize(BodySpec::ball(3, 1), g), 1);
    bool ok = std::abs(r.c_best / M_PI - 1) < 5e-3 && r.residual < 1e-2;
    return {"ball-fixed-point", ok, "c_best " + fmt(r.c_best) + " residual " + fmt(r.residual)};
}

Check check_planar(std::uint64_t seed) {
    auto g = build_grid(2, 512, GridKind::UniformAngle);
    Rng rng(seed);
    std::vector<double> a(4), b(4);
    for (int k = 0; k < 4; ++k) {
        a[k] = 0.05 * rng.normal();
        b[k] = 0.05 * rng.normal();
    }
    std::vector<double> rho(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
        double phi = std::atan2(g->node(i)[1], g->node(i)[0]);
        double r = 1;
        for (int k = 0; k < 4; ++k) r += a[k] * std::cos(2 * (k + 1) * phi) + b[k] * std::sin(2 * (k + 1) * phi);
        rho[i] = std::max(r, 0.2);
    }
    StarBody K(g, rho);
    auto I2 = intersection_body(intersection_body(K));
    double err = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) err = std::max(err, std::abs(I2.rho()[i] / (4 * rho[i]) - 1));
    return {"planar-I2-equals-4K", err < 5e-3, "sup relative error " + fmt(err)};
}

Check check_spectrum() {
    auto g = build_grid(3, 2048, GridKind::Fibonacci);
    RadonParams p;
    p.circle_resolution = 256;
    double err = 0;
    for (int m = 0; m <= 8; ++m) err = std::max(err, std::abs(radon_eigenvalue3(g, m, p) - radon_multiplier3(m)));
    return {"radon-spectrum", err < 1e-3, "max eigenvalue error " + fmt(err)};
}

Check check_detector(std::uint64_t seed) {
    auto g = build_grid(3, 1024, GridKind::Fibonacci);
    auto dirs = sample_directions(3, 4, seed);
    auto e = ellipsoid_detector(materialize(BodySpec::ellipsoid({1, 2, 3}), g), dirs, 0, kEllipsoidThreshold, 11);
    auto q = ellipsoid_detector(materialize(BodySpec::cube(3, 1), g), sample_directions(3, 16, seed), 0,
                                kEllipsoidThreshold, 11);
    return {"ellipsoid-detector", e.ellipsoid_consistent && !q.ellipsoid_consistent,
            "ellipsoid " + fmt(e.max_residual) + " cube " + fmt(q.max_residual)};
}

Check check_box_sections(std::uint64_t seed) {
    // brute-force Cavalieri check in 2D: section length of a rectangle by a line through 0
    int bad = 0;
    for (int i = 0; i < 200; ++i) {
        Rng rng(derive_seed(seed, 1000 + i));
        Vec c(2), l(2), th(2);
        c << rng.normal(), rng.normal();
        l << 0.2 + rng.uniform(), 0.2 + rng.uniform();
        double a = 2 * M_PI * rng.uniform();
        th << std::cos(a), std::sin(a);
        if (th.cwiseAbs().minCoeff() < 1e-3) continue;
        // parametrize the line x = s * (-th1, th0) and clip against the box
        Vec d(2);
        d << -th[1], th[0];
        double lo = -1e300, hi = 1e300;
        for (int k = 0; k < 2; ++k) {
            double s1 = (c[k] - l[k]) / d[k], s2 = (c[k] + l[k]) / d[k];
            lo = std::max(lo, std::min(s1, s2));
            hi = std::min(hi, std::max(s1, s2));
        }
        double ref = std::max(0.0, hi - lo);
        if (std::abs(box_section_volume(Box{c, l}, th, 0.0) - ref) > 1e-9) ++bad;
    }
    return {"box-sections-2d", bad == 0, std::to_string(bad) + " mismatches"};
}

Result cmd_selfcheck(const json& c) {
    const auto seed = c["seed"].get<std::uint64_t>();
    const int cases = c["cases"].get<int>();
    std::vector<Check> checks{check_flow_laws(seed, cases), check_classifier(seed, cases), check_box_sections(seed),
                              check_ball_fixed_point(),     check_planar(seed),            check_spectrum(),
                              check_detector(seed)};
    Result r;
    json arr = json::array();
    for (const auto& ch : checks) {
        arr.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
        if (!ch.passed) r.exit_code = kExitAssertion;
        std::fprintf(stderr, "%s %s (%s)\n", ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
    }
    r.data = {{"checks", arr}, {"passed", r.exit_code == kExitOk}};
    return r;
}

std::vector<Command> commands() {
    const json mc{{"seed", 1}};
    return {
        {"ibody", "compute IK and dump its radial table", false, body_defaults(), cmd_ibody},
        {"iterate", "eccentricity trace of I^m K", true,
         with(body_defaults("perturbed-ball:0.05:2"), {{"steps", 6}, {"renormalize", false}}), cmd_iterate},
        {"fixedpoint", "I^m K = c K residual report", false, with(body_defaults(), {{"order", 1}}), cmd_fixedpoint},
        {"busemann", "Busemann gap table over a list of bodies", true,
         with(body_defaults(), {{"bodies", "ball:1;cube:1;ellipsoid:1,2,3"}, {"tolerance", kBusemannTolerance}}),
         cmd_busemann},
        {"i0", "Monte Carlo I0 estimate", true,
         with(body_defaults("ball:1"),
              {{"samples", 200000}, {"seed", 1}, {"method", "slab"}, {"p_schedule", I0Params{}.p_schedule}}),
         cmd_i0},
        {"iu", "Monte Carlo Iu estimate", true,
         with(body_defaults("ball:1"), {{"samples", 50000}, {"seed", 1}, {"u", ""}, {"directions", 2}}), cmd_iu},
        {"steiner-flow", "continuous Steiner symmetrization report", false,
         with(body_defaults("cube:1"), {{"u", ""},
                                        {"seed", 1},
                                        {"t_steps", 10},
                                        {"mode", "exact"},
                                        {"cell_size", 0.0},
                                        {"s_res", 128}}),
         cmd_steiner_flow},
        {"classify-boxes", "equality-verdict corpus for boxes", true,
         {{"cases", 10000}, {"dims", std::vector<double>{2, 3, 4}}, {"seed", 1}}, cmd_classify_boxes},
        {"detect-ellipsoid", "midpoint-hyperplane sweep", false,
         with(body_defaults(), {{"directions", 16},
                                {"seed", 1},
                                {"delta", 0.0},
                                {"threshold", kEllipsoidThreshold},
                                {"base_resolution", 21}}),
         cmd_detect_ellipsoid},
        {"radon-spectrum", "Radon eigenvalues on Legendre polynomials (dim 3)", true,
         with(body_defaults(), {{"max_m", 12}}), cmd_radon_spectrum},
        {"stationarity", "first variation of |IK| - (n-1) c |K| along Steiner flows", false,
         with(body_defaults(), {{"c", 0.0}, {"directions", 8}, {"t_step", 0.02}, {"samples", 20000}, {"seed", 1}}),
         cmd_stationarity},
        {"selfcheck", "quick property suite", false, {{"seed", 1}, {"cases", 2000}}, cmd_selfcheck},
    };
}

json coerce(const json& def, const std::string& key, const std::string& raw) {
    try {
        if (def.is_boolean()) {
            if (raw == "true" || raw == "1") return true;
            if (raw == "false" || raw == "0") return false;
            throw ConfigError("");
        }
        if (def.is_number_integer() || def.is_number_unsigned()) {
            std::size_t pos;
            long long v = std::stoll(raw, &pos);
            if (pos != raw.size()) throw ConfigError("");
            return v;
        }
        if (def.is_number()) {
            std::size_t pos;
            double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw ConfigError("");
            return v;
        }
        if (def.is_array()) return parse_numbers(raw);
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": '" + raw + "'");
    }
    return raw;
}

void check_type(const json& def, const std::string& key, const json& v) {
    bool ok = (def.is_boolean() && v.is_boolean()) || (def.is_number_integer() && v.is_number_integer()) ||
              (def.is_number_float() && v.is_number()) || (def.is_string() && v.is_string()) ||
              (def.is_array() && v.is_array());
    if (!ok) throw ConfigError("config key '" + key + "' has the wrong type");
}

std::string dashed(std::string k) {
    for (char& ch : k)
        if (ch == '_') ch = '-';
    return k;
}

void emit(const Command& cmd, const json& cfg, const Result& r, const std::string& out_path) {
    std::ostringstream os;
    if (cmd.csv) {
        os << "# geotomo " << GEOTOMO_VERSION << "\n# command: " << cmd.name << "\n# config: " << cfg.dump() << "\n"
           << r.table;
    } else {
        json doc{{"version", GEOTOMO_VERSION}, {"command", cmd.name}, {"config", cfg}, {"result", r.data}};
        os << doc.dump(2) << "\n";
    }
    std::string path = out_path;
    if (path.empty()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir)
            path = std::string(dir) + "/" + cmd.name + (cmd.csv ? ".csv" : ".json");
    }
    if (path.empty()) {
        std::cout << os.str();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geotomo: intersection bodies, Steiner flows and volume functionals"};
    app.set_version_flag("--version", GEOTOMO_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_path;
    int workers = 0;
    app.add_option("--config", config_path, "JSON file with option values");
    app.add_option("--out", out_path, std::string("output file (default: $") + kOutputDirEnv + "/<command>.<ext>, else stdout)");
    app.add_option("--workers", workers, "worker threads (default: available cores)")->check(CLI::NonNegativeNumber);

    auto cmds = commands();
    std::vector<std::map<std::string, std::string>> raw(cmds.size());
    std::vector<std::map<std::string, CLI::Option*>> opts(cmds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        subs.push_back(sub);
        for (auto it = cmds[i].defaults.begin(); it != cmds[i].defaults.end(); ++it) {
            std::string key = it.key();
            std::string desc = "default " + it.value().dump();
            if (it.value().is_boolean())
                opts[i][key] = sub->add_flag("--" + dashed(key), desc);
            else
                opts[i][key] = sub->add_option("--" + dashed(key), raw[i][key], desc);
        }
    }

    if (argc >= 2 && argv[1][0] != '-') {
        bool known = false;
        for (const auto& c : cmds) known = known || c.name == argv[1];
        if (!known) {
            std::cerr << "unknown command '" << argv[1] << "'\n" << app.help();
            return kExitUsage;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::RequiredError& e) {
        std::cerr << app.help();
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    std::size_t ci = 0;
    while (!subs[ci]->parsed()) ++ci;
    const Command& cmd = cmds[ci];

    try {
        json cfg = cmd.defaults;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot read config " + config_path);
            json file;
            try {
                file = json::parse(f);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            if (!file.is_object()) throw ConfigError("config must be a JSON object");
            for (auto it = file.begin(); it != file.end(); ++it) {
                if (it.key() == "command") {
                    if (it.value() != cmd.name) throw ConfigError("config is for command " + it.value().dump());
                    continue;
                }
                if (!cfg.contains(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
                check_type(cfg[it.key()], it.key(), it.value());
                cfg[it.key()] = it.value();
            }
        }
        for (auto& [key, opt] : opts[ci]) {
            if (opt->count() == 0) continue;
            if (cmd.defaults[key].is_boolean()) cfg[key] = true;
            else cfg[key] = coerce(cmd.defaults[key], key, raw[ci][key]);
        }
        if (workers > 0) set_worker_count(workers);
        Result r = cmd.run(cfg);
        emit(cmd, cfg, r, out_path);
        return r.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
