#include "rilab/analysis.hpp"
#include "rilab/random.hpp"
#include "rilab/sensing.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace rilab;

namespace {

double max_norm_deviation(const CMatrix& m) {
    return (m.colwise().norm().array() - 1.0).abs().maxCoeff();
}

const ImagingGeometry kDesk(0.1, 10000.0, 100.0, 10.0, 20, true);

} // namespace

TEST_SUITE("sensing") {

TEST_CASE("paraxial point matrix entries") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 4, true);
    const auto sensors = sample_sensors(g, 3, 1);
    const auto ill = sample_illuminations(g, 5, 2);
    const auto e = build_point_matrix(g, sensors, ill, GreenKind::Paraxial);
    REQUIRE(e.rows() == 15);
    REQUIRE(e.cols() == 16);
    const auto lattice = build_lattice(g);
    const double w = kTwoPi / 0.1;
    for (Index k = 0; k < 5; ++k)
        for (Index l = 0; l < 3; ++l)
            for (Index j = 0; j < 16; ++j) {
                const double dx = lattice[j].x - sensors[l].xi, dy = lattice[j].y - sensors[l].eta;
                const Complex expect = std::exp(Complex(0.0, w * dx * dx / 2e4)) * std::exp(Complex(0.0, w * dy * dy / 2e4)) *
                                       std::exp(Complex(0.0, ill.phases(k, j))) / std::sqrt(15.0);
                CHECK(std::abs(e.matrix(e.row_index(k, l), j) - expect) < 1e-12);
                CHECK(std::abs(std::abs(e.matrix(k * 3 + l, j)) - 1.0 / std::sqrt(15.0)) < 1e-15);
            }
    CHECK(max_norm_deviation(e.matrix) <= 1e-12);
}

TEST_CASE("1x1 paraxial matrix is a unimodular scalar") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 1);
    const auto e = build_point_matrix(g, sample_sensors(g, 1, 1), sample_illuminations(g, 1, 1), GreenKind::Paraxial);
    REQUIRE(e.rows() == 1);
    REQUIRE(e.cols() == 1);
    CHECK(std::abs(std::abs(e.matrix(0, 0)) - 1.0) < 1e-15);
}

TEST_CASE("exact-green matrix is explicitly normalized") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 3, false);
    const auto e = build_point_matrix(g, sample_sensors(g, 2, 4), sample_illuminations(g, 3, 5), GreenKind::Exact);
    REQUIRE(e.rows() == 6);
    REQUIRE(e.cols() == 9);
    CHECK(e.column_scale.maxCoeff() > e.column_scale.minCoeff());
    CHECK(max_norm_deviation(e.matrix) <= 1e-12);
}

TEST_CASE("every ensemble kind has unit columns") {
    const std::uint64_t seed = 99;
    const auto s = sample_sensors(kDesk, 4, seed);
    const auto ill = sample_illuminations(kDesk, 5, seed + 1);
    CHECK(max_norm_deviation(build_point_matrix(kDesk, s, ill, GreenKind::Paraxial).matrix) <= 1e-12);
    CHECK(max_norm_deviation(build_point_matrix(kDesk, s, ill, GreenKind::Exact).matrix) <= 1e-12);
    CHECK(max_norm_deviation(build_extended_matrix(kDesk, s, ill).matrix) <= 1e-12);
    CHECK(max_norm_deviation(build_multistatic_matrix(kDesk, sample_transceivers(kDesk, 6, seed)).matrix) <= 1e-12);
}

TEST_CASE("extended and point matrices differ by unitary diagonal factors") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 2, true);
    const auto s = sample_sensors(g, 2, 8);
    const auto ill = sample_illuminations(g, 3, 9);
    const CMatrix pt = build_point_matrix(g, s, ill, GreenKind::Paraxial).matrix;
    const CMatrix ex = build_extended_matrix(g, s, ill).matrix;
    for (Index i = 0; i < pt.rows(); ++i)
        for (Index j = 0; j < pt.cols(); ++j) CHECK(std::abs(std::abs(pt(i, j) / ex(i, j)) - 1.0) < 1e-12);

    const auto sb = sample_sensors(kDesk, 3, 10);
    const auto ib = sample_illuminations(kDesk, 4, 11);
    const CMatrix a = build_point_matrix(kDesk, sb, ib, GreenKind::Paraxial).matrix;
    const CMatrix b = build_extended_matrix(kDesk, sb, ib).matrix;
    const CMatrix ga = a.adjoint() * a, gb = b.adjoint() * b;
    CHECK((ga.cwiseAbs() - gb.cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(worst_case_coherence(a).mu - worst_case_coherence(b).mu) <= 1e-12);
}

TEST_CASE("extended matrix with an on-axis sensor is pure random phase") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 3, true);
    SensorArray s{{{0.0, 0.0, 10000.0}}, 0};
    const auto ill = sample_illuminations(g, 4, 3);
    const auto e = build_extended_matrix(g, s, ill);
    for (Index k = 0; k < 4; ++k)
        for (Index j = 0; j < 9; ++j) CHECK(std::abs(e.matrix(k, j) - std::polar(0.5, ill.phases(k, j))) < 1e-15);
}

TEST_CASE("extended matrix refuses sensors outside the normalizable band") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 3, false);
    // xi * spacing / (lambda z0) = 100 * 10 / 1000 = 1
    SensorArray s{{{10.0, 10.0, 1e4}, {100.0, 0.0, 1e4}}, 0};
    try {
        build_extended_matrix(g, s, sample_illuminations(g, 1, 1));
        FAIL("expected NormalizationRiskError");
    } catch (const NormalizationRiskError& e) {
        CHECK(e.sensor() == 1);
        CHECK(e.ratio() == doctest::Approx(1.0));
    }
}

TEST_CASE("pixel gain") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 20);
    CHECK(sinc_gain({0.0, 0.0, 1e4}, g) == 1.0);
    // w xi l / (2 z0) = pi/2  <=>  xi = pi z0 / (w l) = lambda z0 / (2 l)
    const double xi = 0.1 * 10000.0 / 20.0;
    CHECK(sinc_gain({xi, 0.0, 1e4}, g) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
    const double u = (kTwoPi / 0.1) * 100.0 * 10.0 / 2e4;
    CHECK(sinc_gain({100.0, 100.0, 1e4}, g) == doctest::Approx(std::pow(std::sin(u) / u, 2)).epsilon(1e-14));
}

TEST_CASE("multistatic matrix rows are unordered transceiver pairs") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 3, true);
    CHECK(build_multistatic_matrix(g, sample_transceivers(g, 2, 1)).rows() == 3);
    CHECK_THROWS_AS(build_multistatic_matrix(g, sample_transceivers(g, 1, 1)), ValidationError);

    const auto tx = sample_transceivers(g, 3, 5);
    const auto e = build_multistatic_matrix(g, tx);
    REQUIRE(e.rows() == 6);
    CHECK(max_norm_deviation(e.matrix) <= 1e-12);
    const auto lattice = build_lattice(g);
    // every ordered pair product matches exactly one stored row, and stored rows are distinct
    for (Index l = 0; l < 3; ++l)
        for (Index lp = 0; lp < 3; ++lp) {
            CVector row(9);
            for (Index j = 0; j < 9; ++j)
                row(j) = green_paraxial(lattice[j].x, lattice[j].y, tx[l], g) * green_paraxial(lattice[j].x, lattice[j].y, tx[lp], g) /
                         e.column_scale(j);
            int matches = 0;
            for (Index r = 0; r < 6; ++r) matches += (e.matrix.row(r).transpose() - row).norm() < 1e-12;
            CHECK(matches == 1);
        }
    for (Index r = 0; r < 6; ++r)
        for (Index q = r + 1; q < 6; ++q) CHECK((e.matrix.row(r) - e.matrix.row(q)).norm() > 1e-6);
}

TEST_CASE("matrix size cap") {
    BuildOptions tiny;
    tiny.max_entries = 100;
    CHECK_THROWS_AS(build_point_matrix(kDesk, sample_sensors(kDesk, 1, 1), sample_illuminations(kDesk, 1, 1),
                                       GreenKind::Paraxial, tiny),
                    DimensionOverflowError);
}

TEST_CASE("forward model") {
    const auto e = build_point_matrix(kDesk, sample_sensors(kDesk, 2, 1), sample_illuminations(kDesk, 5, 2), GreenKind::Paraxial);
    const SceneVector zero(CVector::Zero(400));
    CHECK(forward(e, zero, {}, 1).data.norm() == 0.0);

    CVector x = CVector::Zero(400);
    x(17) = Complex(1.5, -0.5);
    const auto y = forward(e, SceneVector(x), {}, 1);
    CHECK((y.data - e.matrix.col(17) * x(17)).norm() < 1e-15);

    const auto scene = random_scene(kDesk, 6, {}, ValueKind::ComplexPhase, 3);
    const auto noisy = forward(e, scene, {NoiseModel::ComplexGaussian, 0.1}, 4);
    CHECK(((noisy.data - noisy.noise) - e.matrix * scene.values()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(noisy.sigma.value() == 0.1);

    const auto a = forward(e, scene, {NoiseModel::RelativeGaussian, 0.05}, 7);
    const auto b = forward(e, scene, {NoiseModel::RelativeGaussian, 0.05}, 7);
    CHECK(a.data == b.data);
    CHECK_THROWS_AS(forward(e, SceneVector(CVector::Zero(3)), {}, 1), ValidationError);
}

TEST_CASE("complex gaussian noise second moment") {
    const double sigma = 0.3;
    const Index m = 60, draws = 10000;
    double total = 0.0;
    for (Index t = 0; t < draws; ++t)
        total += make_noise({NoiseModel::ComplexGaussian, sigma}, m, child_seed(5, t)).squaredNorm() / m;
    CHECK(total / draws == doctest::Approx(sigma * sigma).epsilon(0.03));
    CHECK(make_noise({NoiseModel::ComplexGaussian, 0.0}, 8, 1).norm() == 0.0);
}

TEST_CASE("relative and uniform noise") {
    const Index m = 60;
    CVector ref(m);
    for (Index i = 0; i < m; ++i) ref(i) = std::polar(1.0, 0.1 * static_cast<double>(i));
    ref.normalize();
    const double frac = 0.1;
    double total = 0.0;
    const Index draws = 10000;
    for (Index t = 0; t < draws; ++t) total += make_noise({NoiseModel::RelativeGaussian, frac}, child_seed(6, t), ref).squaredNorm();
    CHECK(total / draws == doctest::Approx(m * frac * frac).epsilon(0.03));

    const CVector u = make_noise({NoiseModel::UniformPercent, 0.05}, 3, ref);
    for (Index i = 0; i < m; ++i) {
        CHECK(std::abs(u(i)) <= 0.05 / std::sqrt(static_cast<double>(m)) + 1e-17);
        CHECK(u(i).real() >= 0.0);
        CHECK(u(i).imag() >= 0.0);
    }
    CHECK_THROWS_AS(make_noise({NoiseModel::RelativeGaussian, 0.1}, m, 1), MissingReferenceError);
    CHECK_THROWS_AS(make_noise({NoiseModel::UniformPercent, 0.1}, m, 1), MissingReferenceError);
    CHECK_THROWS_AS(make_noise({NoiseModel::ComplexGaussian, -1.0}, m, 1), ValidationError);
}

TEST_CASE("random scenes") {
    const auto full = random_scene(25, 25, {}, ValueKind::PositiveReal, 1);
    CHECK(full.sparsity() == 25);
    for (ValueKind kind : {ValueKind::PositiveReal, ValueKind::SignedReal, ValueKind::ComplexPhase}) {
        const auto x = random_scene(400, 30, {1.0, 2.0}, kind, 2);
        CHECK(x.sparsity() == 30);
        for (Index j : x.support()) {
            CHECK(std::abs(x.values()(j)) >= 1.0);
            CHECK(std::abs(x.values()(j)) <= 2.0);
            if (kind != ValueKind::ComplexPhase) CHECK(x.values()(j).imag() == 0.0);
            if (kind == ValueKind::PositiveReal) CHECK(x.values()(j).real() > 0.0);
        }
        CHECK(x.x_min() >= 1.0);
    }
    CHECK_THROWS_AS(random_scene(10, 11, {}, ValueKind::PositiveReal, 1), ValidationError);
    CHECK_THROWS_AS(SceneVector(CVector::Zero(4)).x_min(), ValidationError);

    std::vector<Index> counts(100, 0);
    const Index draws = 100000;
    for (Index t = 0; t < draws; ++t) ++counts[random_scene(100, 1, {}, ValueKind::PositiveReal, child_seed(9, t)).support()[0]];
    double chi2 = 0.0;
    for (Index c : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
    CHECK(chi2 < 148.2); // 99 degrees of freedom, 0.1% tail
}

TEST_CASE("scene support tracks the values") {
    CVector v = CVector::Zero(6);
    v(1) = 2.0;
    v(4) = Complex(0.0, -1.0);
    const SceneVector x(v);
    CHECK(x.support() == Support{1, 4});
    CHECK(x.x_min() == 1.0);
}

TEST_CASE("pixelation") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 4);
    GrayImage aligned{4, 4, {}};
    for (int k = 0; k < 16; ++k) aligned.pixels.push_back(k % 3);
    const auto pa = pixelate(aligned, g);
    CHECK(pa.l1_error == 0.0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(pa.scene.values()(lattice_index(r + 1, c + 1, 4) - 1).real() == aligned.at(r, c));

    GrayImage ones{3, 5, std::vector<double>(15, 1.0)};
    const auto po = pixelate(ones, g);
    CHECK(po.scene.sparsity() == 16);
    CHECK(po.scene.values().real().minCoeff() == 1.0);

    GrayImage ramp{256, 256, {}};
    for (int r = 0; r < 256; ++r)
        for (int c = 0; c < 256; ++c) ramp.pixels.push_back((r + c) / 510.0);
    const double coarse = pixelate(ramp, ImagingGeometry(0.1, 10000.0, 100.0, 10.0, 8)).l1_error;
    const double fine = pixelate(ramp, ImagingGeometry(0.1, 10000.0, 100.0, 5.0, 16)).l1_error;
    CHECK(coarse > 0.0);
    CHECK(coarse / fine >= 1.8);

    CHECK_THROWS_AS(pixelate(GrayImage{}, g), ImageError);
    GrayImage small{2, 2, {1, 0, 0, 1}};
    const auto pe = pixelate(small, g, PixelateMode::Embed);
    CHECK(pe.scene.support() == Support{lattice_index(2, 2, 4) - 1, lattice_index(3, 3, 4) - 1});
    CHECK_THROWS_AS(pixelate(GrayImage{5, 5, std::vector<double>(25, 1.0)}, g, PixelateMode::Embed), ImageError);
}

TEST_CASE("discretization budget") {
    const ImagingGeometry g(0.1, 10000.0, 100.0, 10.0, 4, true);
    const auto s = sample_sensors(g, 2, 3);
    const auto e = build_extended_matrix(g, s, sample_illuminations(g, 8, 4));
    PixelatedScene ps;
    ps.l1_error = 0.0;
    const auto chk = check_discretization(ps, e, 0.5);
    const double gmin = std::min(std::abs(sinc_gain(s[0], g)), std::abs(sinc_gain(s[1], g)));
    CHECK(chk.min_gain == doctest::Approx(gmin));
    CHECK(chk.budget == doctest::Approx(0.5 / 4.0 * gmin));
    CHECK(chk.satisfied);
    ps.l1_error = 1.0;
    CHECK_FALSE(check_discretization(ps, e, 0.5).satisfied);
}

}
