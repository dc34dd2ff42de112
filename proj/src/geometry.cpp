#include "rilab/geometry.hpp"

#include "rilab/random.hpp"

#include <cmath>

namespace rilab {

ImagingGeometry::ImagingGeometry(double wavelength, double standoff, double aperture, double grid_spacing,
                                 int grid_side, bool centered)
    : wavelength_(wavelength), standoff_(standoff), aperture_(aperture), spacing_(grid_spacing), side_(grid_side),
      centered_(centered) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive and finite");
    };
    positive(wavelength, "wavelength");
    positive(standoff, "z0");
    positive(aperture, "aperture");
    positive(grid_spacing, "grid_spacing");
    if (grid_side < 1) throw ValidationError("grid_side must be >= 1");
}

double ImagingGeometry::lattice_offset() const {
    return centered_ ? (side_ + 1) * spacing_ / 2.0 : 0.0;
}

double ImagingGeometry::sensor_offset() const {
    return centered_ ? (side_ + 1) * aperture_ / (2.0 * side_) : 0.0;
}

std::vector<GridPoint> build_lattice(const ImagingGeometry& geometry) {
    const int side = geometry.grid_side();
    const double h = geometry.grid_spacing();
    const double offset = geometry.lattice_offset();
    std::vector<GridPoint> points;
    points.reserve(static_cast<std::size_t>(geometry.grid_size()));
    for (int i = 1; i <= side; ++i)
        for (int j = 1; j <= side; ++j)
            points.push_back({lattice_index(i, j, side), i, j, i * h - offset, j * h - offset});
    return points;
}

Complex green_exact(const Eigen::Vector3d& r, const Eigen::Vector3d& r_prime, double wavenumber) {
    const double d = (r - r_prime).norm();
    if (d == 0.0) throw CoincidentPointsError();
    return std::polar(1.0 / (4.0 * kPi * d), wavenumber * d);
}

Complex green_paraxial(double x, double y, const Sensor& sensor, const ImagingGeometry& geometry) {
    const double w = geometry.wavenumber();
    const double z0 = geometry.standoff();
    const double dx = x - sensor.xi;
    const double dy = y - sensor.eta;
    return std::polar(1.0 / (4.0 * kPi * z0), w * z0 + w * (dx * dx + dy * dy) / (2.0 * z0));
}

double fresnel_metric(const ImagingGeometry& g) {
    const double extent = g.aperture() + g.grid_spacing() * g.grid_side();
    return std::pow(extent, 4) / (g.wavelength() * std::pow(g.standoff(), 3));
}

double rayleigh_ratio(const ImagingGeometry& g) {
    return g.aperture() * g.grid_spacing() / (g.wavelength() * g.standoff());
}

std::vector<double> sensor_coordinate_set(const ImagingGeometry& g) {
    const int side = g.grid_side();
    std::vector<double> d(static_cast<std::size_t>(side));
    for (int q = 1; q <= side; ++q) d[static_cast<std::size_t>(q - 1)] = q * g.aperture() / side - g.sensor_offset();
    return d;
}

SensorArray sample_sensors(const ImagingGeometry& g, Index n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("sensor count must be >= 1");
    const auto coords = sensor_coordinate_set(g);
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, coords.size() - 1);
    SensorArray array{{}, seed};
    array.positions.reserve(static_cast<std::size_t>(n));
    for (Index l = 0; l < n; ++l) {
        const double xi = coords[pick(rng)];
        const double eta = coords[pick(rng)];
        array.positions.push_back({xi, eta, g.standoff()});
    }
    return array;
}

SensorArray sample_transceivers(const ImagingGeometry& g, Index n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("transceiver count must be >= 1");
    const double lo = g.centered() ? -g.aperture() / 2.0 : 0.0;
    Rng rng(seed);
    std::uniform_real_distribution<double> u(lo, lo + g.aperture());
    SensorArray array{{}, seed};
    array.positions.reserve(static_cast<std::size_t>(n));
    for (Index l = 0; l < n; ++l) {
        const double xi = u(rng);
        const double eta = u(rng);
        array.positions.push_back({xi, eta, g.standoff()});
    }
    return array;
}

IlluminationEnsemble sample_illuminations(const ImagingGeometry& g, Index p, std::uint64_t seed) {
    if (p < 1) throw ValidationError("illumination count must be >= 1");
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    IlluminationEnsemble ens{RMatrix(p, g.grid_size()), seed};
    // row-major fill so the draw order does not depend on Eigen's storage order
    for (Index k = 0; k < p; ++k)
        for (Index j = 0; j < g.grid_size(); ++j) {
            double theta = u(rng);
            if (theta >= kTwoPi) theta = 0.0;
            ens.phases(k, j) = theta;
        }
    return ens;
}

} // namespace rilab
