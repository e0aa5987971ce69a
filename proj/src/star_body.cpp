#include "geotomo/star_body.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>

#include "geotomo/errors.hpp"

namespace geotomo {

BodySpec BodySpec::ball(int dim, double r) {
    BodySpec s;
    s.kind = Kind::Ball;
    s.dim = dim;
    s.radius = r;
    return s;
}

BodySpec BodySpec::ellipsoid(std::vector<double> axes, Mat rotation) {
    BodySpec s;
    s.kind = Kind::Ellipsoid;
    s.dim = static_cast<int>(axes.size());
    s.semi_axes = std::move(axes);
    s.rotation = std::move(rotation);
    return s;
}

BodySpec BodySpec::linear_image(const Mat& T) {
    BodySpec s;
    s.kind = Kind::Ellipsoid;
    s.dim = static_cast<int>(T.rows());
    s.linear_map = T;
    return s;
}

BodySpec BodySpec::lp_ball(int dim, double p, std::vector<double> scales) {
    BodySpec s;
    s.kind = Kind::LpBall;
    s.dim = dim;
    s.p = p;
    s.scales = scales.empty() ? std::vector<double>(dim, 1.0) : std::move(scales);
    return s;
}

BodySpec BodySpec::cube(int dim, double half_side) {
    BodySpec s;
    s.kind = Kind::Cube;
    s.dim = dim;
    s.half_side = half_side;
    return s;
}

BodySpec BodySpec::perturbed_ball(int dim, double amplitude, int degree) {
    BodySpec s;
    s.kind = Kind::PerturbedBall;
    s.dim = dim;
    s.amplitude = amplitude;
    s.degree = degree;
    return s;
}

BodySpec BodySpec::radial_table(std::string path) {
    BodySpec s;
    s.kind = Kind::RadialTable;
    s.table_path = std::move(path);
    return s;
}

void BodySpec::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0) || !std::isfinite(v)) throw DomainError(std::string("body spec: ") + what + " must be positive");
    };
    if (dim < 2 || dim > kMaxDim) throw DomainError("body spec: dimension out of range");
    positive(scale, "scale");
    switch (kind) {
        case Kind::Ball: positive(radius, "radius"); break;
        case Kind::Ellipsoid:
            if (linear_map.size() > 0) {
                if (linear_map.rows() != dim || linear_map.cols() != dim)
                    throw DomainError("body spec: linear map has wrong shape");
                if (!(std::abs(linear_map.determinant()) > 0)) throw DomainError("body spec: singular linear map");
            } else {
                if (static_cast<int>(semi_axes.size()) != dim) throw DomainError("body spec: need one semi-axis per dimension");
                for (double a : semi_axes) positive(a, "semi-axis");
                if (rotation.size() > 0 && (rotation.rows() != dim || rotation.cols() != dim))
                    throw DomainError("body spec: rotation has wrong shape");
            }
            break;
        case Kind::LpBall:
            positive(p, "p");
            if (static_cast<int>(scales.size()) != dim) throw DomainError("body spec: need one scale per dimension");
            for (double a : scales) positive(a, "scale");
            break;
        case Kind::Cube: positive(half_side, "half-side"); break;
        case Kind::PerturbedBall:
            if (!(std::abs(amplitude) < 1.0)) throw DomainError("body spec: perturbation amplitude must be < 1");
            if (degree < 0) throw DomainError("body spec: negative harmonic degree");
            break;
        case Kind::RadialTable:
            if (table_path.empty()) throw DomainError("body spec: empty table path");
            break;
    }
}

void BodySpec::prepare() const {
    if (kind != Kind::Ellipsoid || tinv_.size() > 0) return;
    Mat T;
    if (linear_map.size() > 0) {
        T = linear_map;
    } else {
        T = Mat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) T(i, i) = semi_axes[i];
        if (rotation.size() > 0) T = rotation * T;
    }
    tinv_ = T.inverse();
}

double BodySpec::radial(const Vec& theta) const {
    double r = 0;
    switch (kind) {
        case Kind::Ball: r = radius; break;
        case Kind::Ellipsoid: {
            if (tinv_.size() == 0) {
                BodySpec copy = *this;
                copy.prepare();
                return copy.radial(theta);
            }
            r = 1.0 / (tinv_ * theta).norm();
            break;
        }
        case Kind::LpBall: {
            double s = 0;
            for (int i = 0; i < dim; ++i) s += std::pow(std::abs(theta[i]) / scales[i], p);
            r = std::pow(s, -1.0 / p);
            break;
        }
        case Kind::Cube: r = half_side / theta.cwiseAbs().maxCoeff(); break;
        case Kind::PerturbedBall: {
            std::complex<double> z(theta[0], theta[1]);
            r = 1.0 + amplitude * std::pow(z, degree).real();
            break;
        }
        case Kind::RadialTable: throw ConfigError("radial-table spec has no analytic radial function");
    }
    return scale * r;
}

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in body spec");
        }
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

BodySpec parse_body_spec(const std::string& s, int dim) {
    auto parts = split(s, ':');
    if (parts.empty()) throw ConfigError("empty body spec");
    const std::string& name = parts[0];
    auto need = [&](std::size_t k) {
        if (parts.size() != k) throw ConfigError("body spec '" + s + "': wrong number of fields");
    };
    BodySpec b;
    if (name == "ball") {
        double r = 1.0;
        if (parts.size() == 2) r = parse_list(parts[1]).at(0);
        else need(1);
        b = BodySpec::ball(dim, r);
    } else if (name == "ellipsoid") {
        need(2);
        b = BodySpec::ellipsoid(parse_list(parts[1]));
    } else if (name == "lp-ball") {
        if (parts.size() < 2 || parts.size() > 3) need(3);
        double p = parse_list(parts[1]).at(0);
        std::vector<double> sc = parts.size() == 3 ? parse_list(parts[2]) : std::vector<double>(dim, 1.0);
        b = BodySpec::lp_ball(static_cast<int>(sc.size()), p, sc);
    } else if (name == "cube") {
        double h = 1.0;
        if (parts.size() == 2) h = parse_list(parts[1]).at(0);
        else need(1);
        b = BodySpec::cube(dim, h);
    } else if (name == "perturbed-ball") {
        need(3);
        b = BodySpec::perturbed_ball(dim, parse_list(parts[1]).at(0), static_cast<int>(parse_list(parts[2]).at(0)));
    } else if (name == "table" || name == "radial-table") {
        if (parts.size() < 2) need(2);
        b = BodySpec::radial_table(s.substr(name.size() + 1));
        b.dim = dim;
    } else {
        throw ConfigError("unknown body '" + name + "'");
    }
    try {
        b.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return b;
}

namespace {

nlohmann::json mat_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

Mat json_mat(const nlohmann::json& j) {
    int r = static_cast<int>(j.size());
    if (r == 0) return Mat();
    int c = static_cast<int>(j[0].size());
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
    return m;
}

const char* kind_name(BodySpec::Kind k) {
    switch (k) {
        case BodySpec::Kind::Ball: return "ball";
        case BodySpec::Kind::Ellipsoid: return "ellipsoid";
        case BodySpec::Kind::LpBall: return "lp-ball";
        case BodySpec::Kind::Cube: return "cube";
        case BodySpec::Kind::PerturbedBall: return "perturbed-ball";
        case BodySpec::Kind::RadialTable: return "radial-table";
    }
    return "?";
}

}  // namespace

nlohmann::json to_json(const BodySpec& s) {
    nlohmann::json j{{"kind", kind_name(s.kind)}, {"dim", s.dim}, {"scale", s.scale}};
    switch (s.kind) {
        case BodySpec::Kind::Ball: j["radius"] = s.radius; break;
        case BodySpec::Kind::Ellipsoid:
            if (s.linear_map.size() > 0) j["linear_map"] = mat_json(s.linear_map);
            else j["semi_axes"] = s.semi_axes;
            if (s.rotation.size() > 0) j["rotation"] = mat_json(s.rotation);
            break;
        case BodySpec::Kind::LpBall: j["p"] = s.p; j["scales"] = s.scales; break;
        case BodySpec::Kind::Cube: j["half_side"] = s.half_side; break;
        case BodySpec::Kind::PerturbedBall: j["amplitude"] = s.amplitude; j["degree"] = s.degree; break;
        case BodySpec::Kind::RadialTable: j["file"] = s.table_path; break;
    }
    return j;
}

BodySpec body_spec_from_json(const nlohmann::json& j, int dim) {
    if (j.is_string()) return parse_body_spec(j.get<std::string>(), dim);
    BodySpec b;
    try {
        std::string kind = j.at("kind").get<std::string>();
        int d = j.value("dim", dim);
        if (kind == "ball") b = BodySpec::ball(d, j.value("radius", 1.0));
        else if (kind == "ellipsoid") {
            if (j.contains("linear_map")) b = BodySpec::linear_image(json_mat(j["linear_map"]));
            else b = BodySpec::ellipsoid(j.at("semi_axes").get<std::vector<double>>(),
                                         j.contains("rotation") ? json_mat(j["rotation"]) : Mat());
        } else if (kind == "lp-ball") b = BodySpec::lp_ball(d, j.at("p").get<double>(), j.value("scales", std::vector<double>{}));
        else if (kind == "cube") b = BodySpec::cube(d, j.value("half_side", 1.0));
        else if (kind == "perturbed-ball") b = BodySpec::perturbed_ball(d, j.at("amplitude").get<double>(), j.at("degree").get<int>());
        else if (kind == "radial-table") {
            b = BodySpec::radial_table(j.at("file").get<std::string>());
            b.dim = d;
        } else throw ConfigError("unknown body kind '" + kind + "'");
        b.scale = j.value("scale", 1.0);
        b.validate();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad body spec: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return b;
}

std::string to_string(const Interpolation& i) {
    switch (i.kind) {
        case Interpolation::Kind::Nearest: return "nearest";
        case Interpolation::Kind::LocalAverage: return "local-average(" + std::to_string(i.k) + ")";
        case Interpolation::Kind::Analytic: return "analytic";
    }
    return "?";
}

StarBody::StarBody(SphereGridPtr grid, std::vector<double> rho, Interpolation interp, std::optional<BodySpec> spec)
    : grid_(std::move(grid)), rho_(std::move(rho)), interp_(interp), spec_(std::move(spec)) {
    if (!grid_) throw DomainError("star body: null grid");
    if (rho_.size() != grid_->size()) throw DomainError("star body: rho size does not match grid");
    for (std::size_t i = 0; i < rho_.size(); ++i)
        if (!(rho_[i] > 0) || !std::isfinite(rho_[i])) {
            std::ostringstream os;
            os << "star body: radial value " << rho_[i] << " at node " << i << " is not positive";
            throw DomainError(os.str());
        }
    if (interp_.kind == Interpolation::Kind::Analytic && !(spec_ && spec_->analytic()))
        interp_ = Interpolation::nearest();
    if (interp_.kind == Interpolation::Kind::LocalAverage && interp_.k < 1)
        throw DomainError("star body: local-average needs k >= 1");
    if (spec_) spec_->prepare();
}

double StarBody::radial(const Vec& theta) const {
    switch (interp_.kind) {
        case Interpolation::Kind::Analytic: return spec_->radial(theta);
        case Interpolation::Kind::Nearest: return rho_[grid_->nearest(theta)];
        case Interpolation::Kind::LocalAverage: {
            thread_local std::vector<std::size_t> idx;
            thread_local std::vector<double> dist;
            grid_->k_nearest(theta, interp_.k, idx, dist);
            if (dist[0] < 1e-14) return rho_[idx[0]];
            double sw = 0, s = 0;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                double w = 1.0 / (dist[i] * dist[i]);
                sw += w;
                s += w * rho_[idx[i]];
            }
            return s / sw;
        }
    }
    return 0;
}

double StarBody::gauge(const Vec& x) const {
    double r = x.norm();
    if (r == 0) return 0.0;
    return r / radial(x / r);
}

double StarBody::min_rho() const { return *std::min_element(rho_.begin(), rho_.end()); }
double StarBody::max_rho() const { return *std::max_element(rho_.begin(), rho_.end()); }

StarBody StarBody::scaled(double c) const {
    if (!(c > 0)) throw DomainError("scaled: factor must be positive");
    std::vector<double> r(rho_);
    for (double& v : r) v *= c;
    std::optional<BodySpec> s = spec_;
    if (s) s->scale *= c;
    return StarBody(grid_, std::move(r), interp_, s);
}

StarBody StarBody::with_interpolation(Interpolation i) const { return StarBody(grid_, rho_, i, spec_); }

StarBody materialize(const BodySpec& spec, const SphereGridPtr& grid, Interpolation interp) {
    spec.validate();
    if (spec.kind == BodySpec::Kind::RadialTable) {
        StarBody t = load_body(spec.table_path);
        if (!(t.grid().descriptor() == grid->descriptor()))
            throw ConfigError("radial table '" + spec.table_path + "' was stored on a different grid");
        std::vector<double> r(t.rho());
        if (spec.scale != 1.0)
            for (double& v : r) v *= spec.scale;
        Interpolation ii = interp.kind == Interpolation::Kind::Analytic ? Interpolation::nearest() : interp;
        return StarBody(grid, std::move(r), ii, spec);
    }
    if (spec.dim != grid->dim()) throw ConfigError("body dimension does not match grid dimension");
    std::vector<double> r(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) r[i] = spec.radial(grid->node(i));
    return StarBody(grid, std::move(r), interp, spec);
}

double volume(const StarBody& K) {
    const int n = K.dim();
    std::vector<double> f(K.rho().size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(K.rho()[i], n);
    return unit_ball_volume(n) * quadrature(K.grid(), f);
}

double eccentricity(const StarBody& K) { return std::log(K.max_rho() / K.min_rho()); }

StarBody normalize_volume(const StarBody& K, double target) {
    if (!(target > 0)) throw DomainError("normalize_volume: target must be positive");
    double c = std::pow(target / volume(K), 1.0 / K.dim());
    return K.scaled(c);
}

LipschitzEstimate lipschitz_estimate(const StarBody& K, int neighbours) {
    const auto& g = K.grid();
    const auto& rho = K.rho();
    std::vector<std::size_t> idx;
    std::vector<double> dist;
    double L = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.k_nearest(g.node(i), neighbours + 1, idx, dist);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (idx[j] == i || dist[j] <= 0) continue;
            double geo = 2.0 * std::asin(std::min(1.0, dist[j] / 2));
            L = std::max(L, std::abs(rho[i] - rho[idx[j]]) / geo);
        }
    }
    double rmin = K.min_rho();
    // |grad ||x||_K| <= sqrt(1/rho^2 + |grad_S rho|^2 / rho^4)
    double G = std::sqrt(1.0 / (rmin * rmin) + L * L / std::pow(rmin, 4));
    return {L, G};
}

nlohmann::json to_json(const StarBody& K) {
    nlohmann::json j{{"grid", to_json(K.grid().descriptor())}, {"rho", K.rho()}};
    if (K.spec()) j["spec"] = to_json(*K.spec());
    return j;
}

StarBody body_from_json(const nlohmann::json& j) {
    try {
        auto grid = build_grid(grid_descriptor_from_json(j.at("grid")));
        auto rho = j.at("rho").get<std::vector<double>>();
        if (rho.size() != grid->size()) throw ConfigError("body file: rho length does not match grid");
        std::optional<BodySpec> spec;
        if (j.contains("spec") && !j["spec"].is_null()) {
            spec = body_spec_from_json(j["spec"], grid->dim());
            if (spec->kind == BodySpec::Kind::RadialTable) spec.reset();
        }
        try {
            return StarBody(grid, std::move(rho), Interpolation::nearest(), spec);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("body file: ") + e.what());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad body file: ") + e.what());
    }
}

StarBody load_body(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open body file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("body file '" + path + "' is not valid JSON");
    }
    return body_from_json(j);
}

void save_body(const StarBody& K, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << to_json(K).dump(1) << "\n";
}

}  // namespace geotomo
