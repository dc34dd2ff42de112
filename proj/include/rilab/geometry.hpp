#pragma once

#include "rilab/core.hpp"

#include <cstdint>
#include <vector>

namespace rilab {

/// Physical scales of the imaging scene: wavelength, standoff, sensor aperture and
/// the object lattice. All lengths share one (arbitrary) unit.
///
/// The lattice follows the index map l = (i-1)*side + j with points (i*spacing, j*spacing).
/// With `centered` set, lattice points are shifted by -(side+1)*spacing/2 and sensor
/// coordinates by -(side+1)*aperture/(2*side), which puts both sets symmetric about the
/// optical axis.
class ImagingGeometry {
public:
    ImagingGeometry(double wavelength, double standoff, double aperture, double grid_spacing, int grid_side,
                    bool centered = false);

    double wavelength() const { return wavelength_; }
    double wavenumber() const { return kTwoPi / wavelength_; }
    double standoff() const { return standoff_; }
    double aperture() const { return aperture_; }
    double grid_spacing() const { return spacing_; }
    int grid_side() const { return side_; }
    Index grid_size() const { return static_cast<Index>(side_) * side_; }
    bool centered() const { return centered_; }

    /// Offset subtracted from the raw lattice coordinates (0 when not centered).
    double lattice_offset() const;
    /// Offset subtracted from the raw sensor coordinates (0 when not centered).
    double sensor_offset() const;

    bool operator==(const ImagingGeometry&) const = default;

private:
    double wavelength_;
    double standoff_;
    double aperture_;
    double spacing_;
    int side_;
    bool centered_;
};

struct GridPoint {
    Index index; ///< 1-based lattice index l
    int i;       ///< 1-based row
    int j;       ///< 1-based column
    double x;
    double y;
};

/// l = (i-1)*side + j, all 1-based.
constexpr Index lattice_index(int i, int j, int side) { return static_cast<Index>(i - 1) * side + j; }

struct LatticeCoords {
    int i;
    int j;
};
constexpr LatticeCoords lattice_coords(Index l, int side) {
    return {static_cast<int>((l - 1) / side) + 1, static_cast<int>((l - 1) % side) + 1};
}

std::vector<GridPoint> build_lattice(const ImagingGeometry& geometry);

/// Sensor position (xi, eta, z). z is stored explicitly.
struct Sensor {
    double xi;
    double eta;
    double z;
};

struct SensorArray {
    std::vector<Sensor> positions;
    std::uint64_t seed = 0;

    Index size() const { return static_cast<Index>(positions.size()); }
    const Sensor& operator[](Index l) const { return positions[static_cast<std::size_t>(l)]; }
};

/// Phase matrix theta (p x N), entries uniform in [0, 2*pi).
struct IlluminationEnsemble {
    RMatrix phases;
    std::uint64_t seed = 0;

    Index count() const { return phases.rows(); }
};

Complex green_exact(const Eigen::Vector3d& r, const Eigen::Vector3d& r_prime, double wavenumber);

/// Paraxial Green function between object-plane point (x, y, 0) and a sensor in z = z0.
Complex green_paraxial(double x, double y, const Sensor& sensor, const ImagingGeometry& geometry);

/// (A + spacing*side)^4 / (lambda z0^3); the paraxial model needs this << 1.
double fresnel_metric(const ImagingGeometry& geometry);

/// A*spacing / (lambda z0): 1 at the diffraction limit, < 1 when under-resolved.
double rayleigh_ratio(const ImagingGeometry& geometry);

/// The discrete sensor coordinate set {q A / side : q = 1..side}, shifted when centered.
std::vector<double> sensor_coordinate_set(const ImagingGeometry& geometry);

/// n sensors with xi, eta drawn i.i.d. uniformly from sensor_coordinate_set().
SensorArray sample_sensors(const ImagingGeometry& geometry, Index n, std::uint64_t seed);

/// n transceivers with xi, eta i.i.d. continuous uniform on [0, A] (shifted when centered).
SensorArray sample_transceivers(const ImagingGeometry& geometry, Index n, std::uint64_t seed);

IlluminationEnsemble sample_illuminations(const ImagingGeometry& geometry, Index p, std::uint64_t seed);

} // namespace rilab
