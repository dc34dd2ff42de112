#include "rilab/sensing.hpp"

#include "rilab/random.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace rilab {

std::string to_string(EnsembleKind kind) {
    switch (kind) {
    case EnsembleKind::PointParaxial: return "point-paraxial";
    case EnsembleKind::PointExact: return "point-exact";
    case EnsembleKind::Extended: return "extended";
    case EnsembleKind::Multistatic: return "multistatic";
    }
    return "unknown";
}

std::string to_string(NoiseModel model) {
    switch (model) {
    case NoiseModel::None: return "none";
    case NoiseModel::ComplexGaussian: return "complex-gaussian";
    case NoiseModel::RelativeGaussian: return "relative-gaussian";
    case NoiseModel::UniformPercent: return "uniform-percent";
    }
    return "unknown";
}

namespace {

void check_cap(Index rows, Index cols, const BuildOptions& options) {
    if (rows > 0 && cols > options.max_entries / rows) throw DimensionOverflowError(rows, cols, options.max_entries);
}

void check_consistent(const ImagingGeometry& g, const IlluminationEnsemble& ill) {
    if (ill.phases.cols() != g.grid_size())
        throw ValidationError("illumination ensemble has " + std::to_string(ill.phases.cols()) +
                              " phases per probe, lattice has " + std::to_string(g.grid_size()) + " points");
    if (ill.phases.rows() < 1) throw ValidationError("illumination ensemble is empty");
}

RVector normalize_columns(CMatrix& m) {
    RVector norms = m.colwise().norm().transpose();
    for (Index j = 0; j < m.cols(); ++j) {
        if (norms(j) == 0.0) throw ValidationError("zero column " + std::to_string(j) + " cannot be normalized");
        m.col(j) /= norms(j);
    }
    return norms;
}

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

} // namespace

SensingEnsemble build_point_matrix(const ImagingGeometry& g, const SensorArray& sensors,
                                   const IlluminationEnsemble& ill, GreenKind green, const BuildOptions& options) {
    check_consistent(g, ill);
    const Index n = sensors.size();
    const Index p = ill.count();
    const Index N = g.grid_size();
    if (n < 1) throw ValidationError("sensor array is empty");
    check_cap(n * p, N, options);

    const auto lattice = build_lattice(g);
    const double w = g.wavenumber();
    const double z0 = g.standoff();
    CMatrix phi(n * p, N);
    RVector scale;

    if (green == GreenKind::Paraxial) {
        const double amp = 1.0 / std::sqrt(static_cast<double>(n * p));
        for (Index j = 0; j < N; ++j) {
            const auto& r = lattice[static_cast<std::size_t>(j)];
            for (Index l = 0; l < n; ++l) {
                const double dx = r.x - sensors[l].xi;
                const double dy = r.y - sensors[l].eta;
                const double quad = w * (dx * dx + dy * dy) / (2.0 * z0);
                for (Index k = 0; k < p; ++k) phi(k * n + l, j) = std::polar(amp, quad + ill.phases(k, j));
            }
        }
        scale = RVector::Constant(N, std::sqrt(static_cast<double>(n * p)) / (4.0 * kPi * z0));
    } else {
        for (Index j = 0; j < N; ++j) {
            const auto& r = lattice[static_cast<std::size_t>(j)];
            const Eigen::Vector3d rj(r.x, r.y, 0.0);
            for (Index l = 0; l < n; ++l) {
                const Eigen::Vector3d a(sensors[l].xi, sensors[l].eta, sensors[l].z);
                const Complex gl = green_exact(a, rj, w);
                for (Index k = 0; k < p; ++k) phi(k * n + l, j) = gl * std::polar(1.0, ill.phases(k, j));
            }
        }
        scale = normalize_columns(phi);
    }
    return {std::move(phi), sensors, ill,
            green == GreenKind::Paraxial ? EnsembleKind::PointParaxial : EnsembleKind::PointExact, g,
            std::move(scale)};
}

SensingEnsemble build_extended_matrix(const ImagingGeometry& g, const SensorArray& sensors,
                                      const IlluminationEnsemble& ill, const BuildOptions& options) {
    check_consistent(g, ill);
    const Index n = sensors.size();
    const Index p = ill.count();
    const Index N = g.grid_size();
    if (n < 1) throw ValidationError("sensor array is empty");
    check_cap(n * p, N, options);

    const double lz = g.wavelength() * g.standoff();
    for (Index l = 0; l < n; ++l) {
        const double ratio = std::max(std::abs(sensors[l].xi), std::abs(sensors[l].eta)) * g.grid_spacing() / lz;
        if (ratio >= 1.0) throw NormalizationRiskError(l, ratio);
    }

    const auto lattice = build_lattice(g);
    const double w = g.wavenumber();
    const double z0 = g.standoff();
    const double amp = 1.0 / std::sqrt(static_cast<double>(n * p));
    CMatrix phi(n * p, N);
    for (Index j = 0; j < N; ++j) {
        const auto& r = lattice[static_cast<std::size_t>(j)];
        for (Index l = 0; l < n; ++l) {
            const double lin = -w * (sensors[l].xi * r.x + sensors[l].eta * r.y) / z0;
            for (Index k = 0; k < p; ++k) phi(k * n + l, j) = std::polar(amp, lin + ill.phases(k, j));
        }
    }
    return {std::move(phi), sensors, ill, EnsembleKind::Extended, g, RVector::Ones(N)};
}

double sinc_gain(const Sensor& sensor, const ImagingGeometry& g) {
    const double c = g.wavenumber() * g.grid_spacing() / (2.0 * g.standoff());
    return sinc(c * sensor.xi) * sinc(c * sensor.eta);
}

SensingEnsemble build_multistatic_matrix(const ImagingGeometry& g, const SensorArray& tx,
                                         const BuildOptions& options) {
    const Index n = tx.size();
    if (n < 2) throw ValidationError("multistatic ensemble needs at least 2 transceivers");
    const Index rows = n * (n + 1) / 2;
    const Index N = g.grid_size();
    check_cap(rows, N, options);

    const auto lattice = build_lattice(g);
    CMatrix phi(rows, N);
    for (Index j = 0; j < N; ++j) {
        const auto& r = lattice[static_cast<std::size_t>(j)];
        CVector col_g(n);
        for (Index l = 0; l < n; ++l) col_g(l) = green_paraxial(r.x, r.y, tx[l], g);
        Index row = 0;
        for (Index l = 0; l < n; ++l)
            for (Index lp = l; lp < n; ++lp) phi(row++, j) = col_g(l) * col_g(lp);
    }
    RVector scale = normalize_columns(phi);
    return {std::move(phi), tx, IlluminationEnsemble{}, EnsembleKind::Multistatic, g, std::move(scale)};
}

// ---------------------------------------------------------------------------

SceneVector::SceneVector(CVector values) : values_(std::move(values)) {
    for (Index j = 0; j < values_.size(); ++j)
        if (values_(j) != Complex(0.0, 0.0)) support_.push_back(j);
}

double SceneVector::x_min() const {
    if (support_.empty()) throw ValidationError("x_min of an empty support");
    double m = std::abs(values_(support_.front()));
    for (Index j : support_) m = std::min(m, std::abs(values_(j)));
    return m;
}

SceneVector random_scene(const ImagingGeometry& geometry, Index s, AmplitudeRange range, ValueKind kind,
                         std::uint64_t seed) {
    return random_scene(geometry.grid_size(), s, range, kind, seed);
}

SceneVector random_scene(Index N, Index s, AmplitudeRange range, ValueKind kind, std::uint64_t seed) {
    if (s < 0 || s > N) throw ValidationError("sparsity " + std::to_string(s) + " outside [0, " + std::to_string(N) + "]");
    if (!(range.lo > 0.0) || range.hi < range.lo) throw ValidationError("amplitude range must satisfy 0 < lo <= hi");
    Rng rng(seed);
    std::vector<Index> idx(static_cast<std::size_t>(N));
    std::iota(idx.begin(), idx.end(), Index{0});
    // partial Fisher-Yates: the first s slots are a uniform s-subset
    for (Index k = 0; k < s; ++k) {
        std::uniform_int_distribution<Index> pick(k, N - 1);
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    std::uniform_real_distribution<double> amp(range.lo, range.hi);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::bernoulli_distribution coin(0.5);
    CVector x = CVector::Zero(N);
    for (Index k = 0; k < s; ++k) {
        const double a = amp(rng);
        Complex v;
        switch (kind) {
        case ValueKind::PositiveReal: v = a; break;
        case ValueKind::SignedReal: v = coin(rng) ? a : -a; break;
        case ValueKind::ComplexPhase: v = std::polar(a, phase(rng)); break;
        }
        x(idx[static_cast<std::size_t>(k)]) = v;
    }
    return SceneVector(std::move(x));
}

CVector make_noise(const NoiseSpec& spec, Index m, std::uint64_t seed) {
    if (spec.relative()) throw MissingReferenceError();
    if (spec.model == NoiseModel::None || spec.level == 0.0) return CVector::Zero(m);
    if (spec.level < 0.0) throw ValidationError("noise level must be >= 0");
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, spec.level / std::sqrt(2.0));
    CVector e(m);
    for (Index i = 0; i < m; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        e(i) = {re, im};
    }
    return e;
}

CVector make_noise(const NoiseSpec& spec, std::uint64_t seed, const CVector& reference) {
    const Index m = reference.size();
    if (spec.level < 0.0) throw ValidationError("noise level must be >= 0");
    switch (spec.model) {
    case NoiseModel::None:
    case NoiseModel::ComplexGaussian: return make_noise(spec, m, seed);
    case NoiseModel::RelativeGaussian:
        return make_noise(NoiseSpec{NoiseModel::ComplexGaussian, spec.level * reference.norm()}, m, seed);
    case NoiseModel::UniformPercent: {
        Rng rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double amp = spec.level / std::sqrt(2.0) * reference.norm() / std::sqrt(static_cast<double>(m));
        CVector e(m);
        for (Index i = 0; i < m; ++i) {
            const double re = u(rng);
            const double im = u(rng);
            e(i) = amp * Complex(re, im);
        }
        return e;
    }
    }
    return CVector::Zero(m);
}

Measurement forward(const CMatrix& matrix, const SceneVector& scene, const NoiseSpec& noise, std::uint64_t seed) {
    if (scene.size() != matrix.cols())
        throw ValidationError("scene length " + std::to_string(scene.size()) + " does not match " +
                              std::to_string(matrix.cols()) + " columns");
    CVector clean = matrix * scene.values();
    Measurement out;
    out.spec = noise;
    out.noise = make_noise(noise, seed, clean);
    out.data = clean + out.noise;
    if (noise.model == NoiseModel::ComplexGaussian) out.sigma = noise.level;
    else if (noise.model == NoiseModel::RelativeGaussian) out.sigma = noise.level * clean.norm();
    else if (noise.model == NoiseModel::None) out.sigma = 0.0;
    return out;
}

Measurement forward(const SensingEnsemble& ensemble, const SceneVector& scene, const NoiseSpec& noise,
                    std::uint64_t seed) {
    return forward(ensemble.matrix, scene, noise, seed);
}

// ---------------------------------------------------------------------------

PixelatedScene pixelate(const GrayImage& image, const ImagingGeometry& g, PixelateMode mode) {
    if (image.width <= 0 || image.height <= 0 || image.pixels.empty()) throw ImageError("empty image");
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw ImageError("image pixel count does not match its dimensions");
    const int side = g.grid_side();
    const double h = g.grid_spacing();
    CVector x = CVector::Zero(g.grid_size());
    PixelatedScene out;
    out.pixel_area = h * h;

    if (mode == PixelateMode::Embed) {
        if (image.height > side || image.width > side)
            throw ImageError("image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                             " does not fit the " + std::to_string(side) + "x" + std::to_string(side) + " lattice");
        const int r0 = (side - image.height) / 2;
        const int c0 = (side - image.width) / 2;
        for (int r = 0; r < image.height; ++r)
            for (int c = 0; c < image.width; ++c)
                x(lattice_index(r0 + r + 1, c0 + c + 1, side) - 1) = image.at(r, c);
        out.scene = SceneVector(std::move(x));
        out.l1_error = 0.0; // the raster pixels coincide with lattice pixels
        return out;
    }

    // The raster spans the lattice domain; O(u, v) is the raster pixel containing (u, v),
    // u, v in [0, 1) measured in lattice-domain units.
    auto sample = [&](double u, double v) {
        const int r = std::min(image.height - 1, static_cast<int>(std::floor(u * image.height)));
        const int c = std::min(image.width - 1, static_cast<int>(std::floor(v * image.width)));
        return image.at(r, c);
    };
    constexpr int refine = 8;
    const double cell = h / refine;
    double l1 = 0.0;
    for (int i = 1; i <= side; ++i)
        for (int j = 1; j <= side; ++j) {
            const double centre = sample((i - 0.5) / side, (j - 0.5) / side);
            x(lattice_index(i, j, side) - 1) = centre;
            for (int a = 0; a < refine; ++a)
                for (int b = 0; b < refine; ++b) {
                    const double u = (i - 1 + (a + 0.5) / refine) / side;
                    const double v = (j - 1 + (b + 0.5) / refine) / side;
                    l1 += std::abs(sample(u, v) - centre) * cell * cell;
                }
        }
    out.scene = SceneVector(std::move(x));
    out.l1_error = l1;
    return out;
}

DiscretizationCheck check_discretization(const PixelatedScene& scene, const SensingEnsemble& ensemble,
                                         double epsilon) {
    double min_gain = std::numeric_limits<double>::infinity();
    for (const auto& s : ensemble.sensors.positions)
        min_gain = std::min(min_gain, std::abs(sinc_gain(s, ensemble.geometry)));
    const double budget = epsilon / std::sqrt(static_cast<double>(ensemble.rows())) * min_gain;
    return {min_gain, budget, scene.l1_error <= budget};
}

} // namespace rilab
