#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "geotomo/sphere_grid.hpp"
#include "geotomo/vec.hpp"

namespace geotomo {

// Analytic test-body catalog.
struct BodySpec {
    enum class Kind { Ball, Ellipsoid, LpBall, Cube, PerturbedBall, RadialTable };

    Kind kind = Kind::Ball;
    int dim = 3;
    double radius = 1.0;           // ball
    std::vector<double> semi_axes; // ellipsoid
    Mat rotation;                  // ellipsoid: body = rotation * diag(semi_axes) * B; empty = identity
    Mat linear_map;                // ellipsoid alternative: body = linear_map * B (e.g. shears)
    double p = 2.0;                // lp-ball exponent
    std::vector<double> scales;    // lp-ball
    double half_side = 1.0;        // cube
    double amplitude = 0.0;        // perturbed-ball
    int degree = 2;                // perturbed-ball: rho = 1 + a Re((t1 + i t2)^degree)
    std::string table_path;        // radial-table
    double scale = 1.0;            // global dilation applied on top of everything

    static BodySpec ball(int dim, double r);
    static BodySpec ellipsoid(std::vector<double> axes, Mat rotation = Mat());
    static BodySpec linear_image(const Mat& T);
    static BodySpec lp_ball(int dim, double p, std::vector<double> scales);
    static BodySpec cube(int dim, double half_side);
    static BodySpec perturbed_ball(int dim, double amplitude, int degree);
    static BodySpec radial_table(std::string path);

    void validate() const;
    // Radial function at a unit vector (not available for RadialTable).
    double radial(const Vec& theta) const;
    bool analytic() const { return kind != Kind::RadialTable; }

private:
    friend class StarBody;
    mutable Mat tinv_;  // cached inverse of the ellipsoid map
    void prepare() const;
};

// Parses "ellipsoid:1,2,3", "ball:2", "cube:1", "lp-ball:4:1,1,1",
// "perturbed-ball:0.05:2", "table:path.json". dim is used where the string
// does not fix it.
BodySpec parse_body_spec(const std::string& s, int dim);
nlohmann::json to_json(const BodySpec& s);
BodySpec body_spec_from_json(const nlohmann::json& j, int dim);

struct Interpolation {
    enum class Kind { Nearest, LocalAverage, Analytic };
    Kind kind = Kind::Nearest;
    int k = 6;  // neighbours for LocalAverage

    static Interpolation nearest() { return {Kind::Nearest, 6}; }
    static Interpolation local_average(int k) { return {Kind::LocalAverage, k}; }
    static Interpolation analytic() { return {Kind::Analytic, 6}; }
};

std::string to_string(const Interpolation& i);

/**
 * Star body given by its radial function on a sphere grid.
 *
 * Off-node values come from the interpolation rule; the Analytic rule evaluates the
 * retained BodySpec and is only allowed when one is attached.
 */
class StarBody {
public:
    StarBody(SphereGridPtr grid, std::vector<double> rho, Interpolation interp = Interpolation::nearest(),
             std::optional<BodySpec> spec = std::nullopt);

    int dim() const { return grid_->dim(); }
    const SphereGrid& grid() const { return *grid_; }
    const SphereGridPtr& grid_ptr() const { return grid_; }
    const std::vector<double>& rho() const { return rho_; }
    const Interpolation& interpolation() const { return interp_; }
    const std::optional<BodySpec>& spec() const { return spec_; }

    // rho at a unit vector
    double radial(const Vec& theta) const;
    // gauge ||x||_K; 0 at the origin
    double gauge(const Vec& x) const;
    bool contains(const Vec& x) const { return gauge(x) <= 1.0; }

    double min_rho() const;
    double max_rho() const;

    StarBody scaled(double c) const;
    StarBody with_interpolation(Interpolation i) const;

private:
    SphereGridPtr grid_;
    std::vector<double> rho_;
    Interpolation interp_;
    std::optional<BodySpec> spec_;
};

StarBody materialize(const BodySpec& spec, const SphereGridPtr& grid,
                     Interpolation interp = Interpolation::analytic());

double volume(const StarBody& K);
double eccentricity(const StarBody& K);
StarBody normalize_volume(const StarBody& K, double target);

struct LipschitzEstimate {
    double radial;  // max slope of rho over neighbouring nodes
    double gauge;   // resulting Lipschitz bound for the gauge on R^n
};
LipschitzEstimate lipschitz_estimate(const StarBody& K, int neighbours = 8);

// JSON body file: {grid, rho, spec?}
nlohmann::json to_json(const StarBody& K);
StarBody body_from_json(const nlohmann::json& j);
StarBody load_body(const std::string& path);
void save_body(const StarBody& K, const std::string& path);

}  // namespace geotomo
