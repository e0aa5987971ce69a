#include "geotomo/sphere_grid.hpp"

#include <cmath>
#include <sstream>

#include "geotomo/errors.hpp"
#include "geotomo/parallel.hpp"
#include "kdtree.hpp"

namespace geotomo {

std::string to_string(GridKind k) {
    switch (k) {
        case GridKind::UniformAngle: return "uniform-angle";
        case GridKind::Fibonacci: return "fibonacci";
        case GridKind::LatLong: return "lat-long";
        case GridKind::MonteCarlo: return "monte-carlo";
    }
    return "?";
}

GridKind grid_kind_from_string(const std::string& s) {
    if (s == "uniform-angle") return GridKind::UniformAngle;
    if (s == "fibonacci") return GridKind::Fibonacci;
    if (s == "lat-long") return GridKind::LatLong;
    if (s == "monte-carlo") return GridKind::MonteCarlo;
    throw ConfigError("unknown grid kind '" + s + "'");
}

nlohmann::json to_json(const GridDescriptor& d) {
    nlohmann::json j{{"dim", d.dim}, {"kind", to_string(d.kind)}, {"resolution", d.resolution}};
    j["seed"] = d.seed ? nlohmann::json(*d.seed) : nlohmann::json(nullptr);
    return j;
}

GridDescriptor grid_descriptor_from_json(const nlohmann::json& j) {
    GridDescriptor d;
    try {
        d.dim = j.at("dim").get<int>();
        d.kind = grid_kind_from_string(j.at("kind").get<std::string>());
        d.resolution = j.at("resolution").get<int>();
        if (j.contains("seed") && !j["seed"].is_null()) d.seed = j["seed"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad grid descriptor: ") + e.what());
    }
    return d;
}

SphereGrid::SphereGrid(GridDescriptor desc, std::vector<Vec> nodes, std::vector<double> weights)
    : desc_(desc), nodes_(std::move(nodes)), weights_(std::move(weights)),
      tree_(std::make_unique<KdTree>(nodes_, desc.dim)) {}

SphereGrid::~SphereGrid() = default;

std::size_t SphereGrid::nearest(const Vec& theta) const { return tree_->nearest(theta); }

void SphereGrid::k_nearest(const Vec& theta, int k, std::vector<std::size_t>& idx,
                           std::vector<double>& dist) const {
    tree_->k_nearest(theta, k, idx, dist);
    for (auto& d : dist) d = std::sqrt(d);
}

namespace {

void normalize_weights(std::vector<double>& w) {
    long double s = 0;
    for (double x : w) s += x;
    for (double& x : w) x = static_cast<double>(x / s);
}

}  // namespace

SphereGridPtr build_grid(int dim, int resolution, GridKind kind, std::optional<std::uint64_t> seed) {
    GridDescriptor d{dim, kind, resolution, seed};
    return build_grid(d);
}

SphereGridPtr build_grid(const GridDescriptor& d) {
    if (d.dim < 2 || d.dim > kMaxDim) throw ConfigError("grid dimension must be in [2, 8]");
    std::vector<Vec> nodes;
    std::vector<double> w;
    const int N = d.resolution;
    switch (d.kind) {
        case GridKind::UniformAngle: {
            if (d.dim != 2) throw ConfigError("uniform-angle grids exist only for dim 2");
            if (N < 4) throw ConfigError("uniform-angle grid needs resolution >= 4");
            for (int k = 0; k < N; ++k) {
                double a = 2.0 * M_PI * k / N;
                Vec v(2);
                v << std::cos(a), std::sin(a);
                nodes.push_back(v);
            }
            w.assign(N, 1.0 / N);
            break;
        }
        case GridKind::Fibonacci: {
            if (d.dim != 3) throw ConfigError("fibonacci grids exist only for dim 3");
            if (N < 16) throw ConfigError("resolution must be >= 16");
            const double ga = M_PI * (3.0 - std::sqrt(5.0));
            for (int k = 0; k < N; ++k) {
                double z = 1.0 - (2.0 * k + 1.0) / N;
                double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                double phi = ga * k;
                Vec v(3);
                v << r * std::cos(phi), r * std::sin(phi), z;
                nodes.push_back(v / v.norm());
            }
            w.assign(N, 1.0 / N);
            break;
        }
        case GridKind::LatLong: {
            if (d.dim != 3) throw ConfigError("lat-long grids exist only for dim 3");
            if (N < 16) throw ConfigError("resolution must be >= 16");
            int nlat = std::max(2, static_cast<int>(std::lround(std::sqrt(N / 2.0))));
            int nlon = 2 * nlat;
            for (int i = 0; i < nlat; ++i) {
                double lat0 = -M_PI / 2 + M_PI * i / nlat, lat1 = lat0 + M_PI / nlat;
                double lat = 0.5 * (lat0 + lat1);
                double cell = std::sin(lat1) - std::sin(lat0);  // exact band area / (2 pi)
                for (int j = 0; j < nlon; ++j) {
                    double lon = 2.0 * M_PI * (j + 0.5) / nlon;
                    Vec v(3);
                    v << std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat);
                    nodes.push_back(v);
                    w.push_back(cell);
                }
            }
            normalize_weights(w);
            break;
        }
        case GridKind::MonteCarlo: {
            if (N < 16) throw ConfigError("resolution must be >= 16");
            Rng rng(d.seed.value_or(0));
            for (int k = 0; k < N; ++k) {
                Vec v(d.dim);
                double nv = 0;
                do {
                    for (int i = 0; i < d.dim; ++i) v[i] = rng.normal();
                    nv = v.norm();
                } while (nv < 1e-12);
                nodes.push_back(v / nv);
            }
            w.assign(N, 1.0 / N);
            break;
        }
    }
    return std::make_shared<SphereGrid>(d, std::move(nodes), std::move(w));
}

CircleRule subsphere_rule(const Vec& u, int resolution, std::optional<std::uint64_t> seed) {
    const int n = static_cast<int>(u.size());
    double nu = u.norm();
    if (!(nu > 0)) throw DomainError("subsphere_rule: zero direction");
    if (std::abs(nu - 1.0) > 1e-10) throw DomainError("subsphere_rule: direction is not a unit vector");
    CircleRule r;
    r.center_direction = u;
    Mat B = complement_basis(u);
    if (n == 2) {
        Vec a = B.col(0);
        r.nodes = {a, -a};
        r.weights = {0.5, 0.5};
        return r;
    }
    if (resolution < 1) throw DomainError("subsphere_rule: resolution must be positive");
    if (n == 3) {
        for (int k = 0; k < resolution; ++k) {
            double a = 2.0 * M_PI * k / resolution;
            Vec v = std::cos(a) * B.col(0) + std::sin(a) * B.col(1);
            r.nodes.push_back(v / v.norm());
        }
    } else {
        Rng rng(seed.value_or(0));
        for (int k = 0; k < resolution; ++k) {
            Vec c(n - 1);
            double nc;
            do {
                for (int i = 0; i < n - 1; ++i) c[i] = rng.normal();
                nc = c.norm();
            } while (nc < 1e-12);
            Vec v = B * (c / nc);
            r.nodes.push_back(v / v.norm());
        }
    }
    r.weights.assign(resolution, 1.0 / resolution);
    return r;
}

double quadrature(const SphereGrid& grid, const std::vector<double>& f) {
    if (f.size() != grid.size()) throw DomainError("quadrature: field size does not match grid");
    // pairwise summation, fixed order
    std::vector<double> terms(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i])) {
            std::ostringstream os;
            os << "quadrature: non-finite value at node " << i;
            throw NumericError(os.str());
        }
        terms[i] = grid.weight(i) * f[i];
    }
    std::size_t m = terms.size();
    while (m > 1) {
        std::size_t h = (m + 1) / 2;
        for (std::size_t i = 0; i < m / 2; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (m % 2) terms[h - 1] = terms[m - 1];
        m = h;
    }
    return terms.empty() ? 0.0 : terms[0];
}

}  // namespace geotomo
