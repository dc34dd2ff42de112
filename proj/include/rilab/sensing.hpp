#pragma once

#include "rilab/core.hpp"
#include "rilab/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace rilab {

enum class EnsembleKind : std::uint32_t { PointParaxial = 0, PointExact = 1, Extended = 2, Multistatic = 3 };
enum class GreenKind { Paraxial, Exact };

std::string to_string(EnsembleKind kind);

struct BuildOptions {
    /// Upper bound on rows * cols of a dense sensing matrix.
    Index max_entries = 50'000'000;
};

/// A realized sensing matrix with unit-norm columns plus everything it was built from.
/// Row i = k*n + l (0-based) pairs illumination k with sensor l; multistatic ensembles
/// index rows by unordered transceiver pairs (l <= l') in lexicographic order.
struct SensingEnsemble {
    CMatrix matrix;
    SensorArray sensors;
    IlluminationEnsemble illuminations;
    EnsembleKind kind;
    ImagingGeometry geometry;
    /// Euclidean norm of each physical column before normalization; dividing a recovered
    /// amplitude by it maps back to the physical reflectivity.
    RVector column_scale;

    Index rows() const { return matrix.rows(); }
    Index cols() const { return matrix.cols(); }
    Index row_index(Index k, Index l) const { return k * sensors.size() + l; }
};

SensingEnsemble build_point_matrix(const ImagingGeometry& geometry, const SensorArray& sensors,
                                   const IlluminationEnsemble& illuminations, GreenKind green,
                                   const BuildOptions& options = {});

/// Fourier-times-random-phase matrix for pixelated extended objects.
/// Throws NormalizationRiskError if some sensor has |xi| spacing/(lambda z0) >= 1 (or the same for eta).
SensingEnsemble build_extended_matrix(const ImagingGeometry& geometry, const SensorArray& sensors,
                                      const IlluminationEnsemble& illuminations, const BuildOptions& options = {});

/// Pixel-integrated gain g(a) of a square pixel seen from sensor a (removable singularities evaluate to 1).
double sinc_gain(const Sensor& sensor, const ImagingGeometry& geometry);

/// Multistatic-response baseline: rows are unordered transceiver pairs (l <= l'),
/// entry proportional to Gp(a_l, r_j) Gp(a_l', r_j), columns normalized.
SensingEnsemble build_multistatic_matrix(const ImagingGeometry& geometry, const SensorArray& transceivers,
                                         const BuildOptions& options = {});

// ---------------------------------------------------------------------------

/// Object amplitudes on the lattice; the support is derived from the values.
class SceneVector {
public:
    SceneVector() = default;
    explicit SceneVector(CVector values);

    const CVector& values() const { return values_; }
    const Support& support() const { return support_; }
    Index size() const { return values_.size(); }
    Index sparsity() const { return static_cast<Index>(support_.size()); }
    /// Smallest modulus over the support; throws ValidationError for an empty support.
    double x_min() const;

private:
    CVector values_;
    Support support_;
};

enum class ValueKind { PositiveReal, SignedReal, ComplexPhase };

struct AmplitudeRange {
    double lo = 1.0;
    double hi = 2.0;
};

/// s grid points chosen uniformly without replacement, amplitudes uniform in the range,
/// sign or phase according to `kind`.
SceneVector random_scene(const ImagingGeometry& geometry, Index s, AmplitudeRange range, ValueKind kind,
                         std::uint64_t seed);
SceneVector random_scene(Index grid_size, Index s, AmplitudeRange range, ValueKind kind, std::uint64_t seed);

enum class NoiseModel { None, ComplexGaussian, RelativeGaussian, UniformPercent };

/// ComplexGaussian: level = sigma, entries CN(0, sigma^2).
/// RelativeGaussian: level = fraction, entries CN(0, (fraction*||Y||)^2).
/// UniformPercent: level = fraction, entries (fraction/sqrt2)(u1 + i u2)||Y||/sqrt(m), u ~ U[0,1].
struct NoiseSpec {
    NoiseModel model = NoiseModel::None;
    double level = 0.0;

    bool relative() const { return model == NoiseModel::RelativeGaussian || model == NoiseModel::UniformPercent; }
};

std::string to_string(NoiseModel model);

CVector make_noise(const NoiseSpec& spec, Index m, std::uint64_t seed);
CVector make_noise(const NoiseSpec& spec, std::uint64_t seed, const CVector& reference);

struct Measurement {
    CVector data;
    CVector noise;
    NoiseSpec spec;
    /// Per-entry complex-Gaussian standard deviation, when the model has one.
    std::optional<double> sigma;
};

/// Y = Phi X + E with E drawn from `noise` (relative models use Phi X as the reference).
Measurement forward(const SensingEnsemble& ensemble, const SceneVector& scene, const NoiseSpec& noise,
                    std::uint64_t seed);
Measurement forward(const CMatrix& matrix, const SceneVector& scene, const NoiseSpec& noise, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Grayscale raster, row-major, top row first.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

enum class PixelateMode {
    Resample, ///< nearest-neighbour resampling of the raster over the whole lattice
    Embed     ///< raster placed pixel-for-pixel in the centre of the lattice, zero elsewhere
};

struct PixelatedScene {
    SceneVector scene;
    /// ||O - O_l||_{L1}, with O the raster as a piecewise-constant function over the domain
    /// and O_l its lattice sampling; tensor-product midpoint quadrature at 8x refinement.
    double l1_error = 0.0;
    double pixel_area = 0.0;
};

PixelatedScene pixelate(const GrayImage& image, const ImagingGeometry& geometry,
                        PixelateMode mode = PixelateMode::Resample);

struct DiscretizationCheck {
    double min_gain;
    double budget; ///< (epsilon / sqrt(m)) * min_l |g(a_l)|
    bool satisfied;
};

/// Whether the L1 discretization error keeps the data-space error below epsilon.
DiscretizationCheck check_discretization(const PixelatedScene& scene, const SensingEnsemble& ensemble,
                                         double epsilon);

} // namespace rilab
