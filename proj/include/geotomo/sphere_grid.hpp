#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "geotomo/vec.hpp"

namespace geotomo {

enum class GridKind { UniformAngle, Fibonacci, LatLong, MonteCarlo };

std::string to_string(GridKind k);
GridKind grid_kind_from_string(const std::string& s);

struct GridDescriptor {
    int dim = 3;
    GridKind kind = GridKind::Fibonacci;
    int resolution = 4096;
    std::optional<std::uint64_t> seed;

    bool operator==(const GridDescriptor&) const = default;
};

nlohmann::json to_json(const GridDescriptor& d);
GridDescriptor grid_descriptor_from_json(const nlohmann::json& j);

class KdTree;

/**
 * Quadrature nodes on S^{n-1} with probability weights.
 * Immutable once built; share through SphereGridPtr.
 */
class SphereGrid {
public:
    SphereGrid(GridDescriptor desc, std::vector<Vec> nodes, std::vector<double> weights);
    ~SphereGrid();

    int dim() const { return desc_.dim; }
    std::size_t size() const { return nodes_.size(); }
    const GridDescriptor& descriptor() const { return desc_; }
    const std::vector<Vec>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    const Vec& node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    // index of the node closest to the unit vector theta
    std::size_t nearest(const Vec& theta) const;
    // k closest nodes with their chordal distances, closest first
    void k_nearest(const Vec& theta, int k, std::vector<std::size_t>& idx,
                   std::vector<double>& dist) const;

private:
    GridDescriptor desc_;
    std::vector<Vec> nodes_;
    std::vector<double> weights_;
    std::unique_ptr<KdTree> tree_;
};

using SphereGridPtr = std::shared_ptr<const SphereGrid>;

SphereGridPtr build_grid(int dim, int resolution, GridKind kind,
                         std::optional<std::uint64_t> seed = std::nullopt);
SphereGridPtr build_grid(const GridDescriptor& d);

struct CircleRule {
    Vec center_direction;
    std::vector<Vec> nodes;
    std::vector<double> weights;
};

/// Uniform rule on the great subsphere S^{n-1} cap u-perp.
/// n=2: the two points +-u_perp. n=3: equally spaced circle. n>=4: seeded sample.
CircleRule subsphere_rule(const Vec& u, int resolution, std::optional<std::uint64_t> seed = std::nullopt);

double quadrature(const SphereGrid& grid, const std::vector<double>& f);

}  // namespace geotomo
