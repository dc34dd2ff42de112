#include "rilab/config.hpp"

#include <doctest.h>

#include <string>

using namespace rilab;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("empty text gives the documented defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.wavelength == 0.1);
    CHECK(c.z0 == 10000.0);
    CHECK(c.grid_side == 20);
    CHECK(c.kind == EnsembleKind::PointParaxial);
    CHECK(c.n == 1);
    CHECK(c.p == 60);
    CHECK(c.method == Method::Lasso);
    CHECK(c.tau_rule == TauRule::Auto);
    CHECK(c.seed == 1);
    CHECK(canonical_text(c) == canonical_text(RunConfig{}));
}

TEST_CASE("values are parsed and validated") {
    const RunConfig c = parse_config("[geometry]\nwavelength = 0.25\ngrid_side=8\n"
                                     "[ensemble]\nkind = mr\nn = 12\n"
                                     "[noise]\nmodel = complex-gaussian\nlevel = 0.01\n"
                                     "[solver]\nmethod = omp\ntau = half-xmin\nreal_only = yes\n"
                                     "[run]\nseed = 18446744073709551615\n");
    CHECK(c.wavelength == 0.25);
    CHECK(c.grid_side == 8);
    CHECK(c.kind == EnsembleKind::Multistatic);
    CHECK(c.n == 12);
    CHECK(c.noise.model == NoiseModel::ComplexGaussian);
    CHECK(c.noise.level == 0.01);
    CHECK(c.method == Method::OMP);
    CHECK(c.tau_rule == TauRule::HalfXmin);
    CHECK(c.solver.real_only);
    CHECK(c.seed == 18446744073709551615ULL);

    const RunConfig t = parse_config("[solver]\ntau = 0.3\n");
    CHECK(t.tau_rule == TauRule::Value);
    CHECK(t.tau == 0.3);
}

TEST_CASE("errors name the offending key") {
    CHECK(error_of("[geometry]\nbogus = 1\n").find("geometry.bogus") != std::string::npos);
    CHECK(error_of("[nosuch]\nx = 1\n").find("nosuch.x") != std::string::npos);
    CHECK(error_of("[geometry]\nwavelength = -1\n").find("geometry.wavelength") != std::string::npos);
    CHECK(error_of("[geometry]\nwavelength = abc\n").find("geometry.wavelength") != std::string::npos);
    CHECK(error_of("[geometry]\ngrid_side = 2.5\n").find("geometry.grid_side") != std::string::npos);
    CHECK(error_of("[ensemble]\nkind = spiral\n").find("ensemble.kind") != std::string::npos);
    CHECK(error_of("[solver]\ntau = sometimes\n").find("solver.tau") != std::string::npos);
    CHECK(error_of("[scene]\namplitude_lo = 3\namplitude_hi = 2\n").find("amplitude_hi") != std::string::npos);
    CHECK(error_of("stray = 1\n").find("stray") != std::string::npos);
    CHECK_FALSE(error_of("[geometry\n").empty());
}

TEST_CASE("list syntax") {
    const RunConfig c = parse_config("[experiment]\nsetups = ri:2:30, mr:11, ri-exact:1:60\n"
                                     "sparsities = 1-4, 7, 10-11\nnoise_levels = 0, 0.05\nmethods = lasso, omp, bpdn\n");
    REQUIRE(c.setups.size() == 3);
    CHECK(c.setups[0].kind == EnsembleKind::PointParaxial);
    CHECK(c.setups[0].n == 2);
    CHECK(c.setups[0].p == 30);
    CHECK(c.setups[1].kind == EnsembleKind::Multistatic);
    CHECK(c.setups[1].n == 11);
    CHECK(c.setups[2].kind == EnsembleKind::PointExact);
    CHECK(c.sparsities == std::vector<Index>{1, 2, 3, 4, 7, 10, 11});
    CHECK(c.noise_levels == std::vector<double>{0.0, 0.05});
    CHECK(c.methods == std::vector<Method>{Method::Lasso, Method::OMP, Method::BPDN});
    CHECK_THROWS_AS(parse_config("[experiment]\nsparsities = 4-2\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[experiment]\nsetups = ri:0:3\n"), ValidationError);
}

TEST_CASE("canonical text and hash") {
    RunConfig a;
    RunConfig b = a;
    b.threads = 7;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
    // the canonical form parses back to itself
    std::string ini, section;
    const std::string text = canonical_text(a);
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t end = text.find('\n', pos);
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        const std::size_t dot = line.find('.'), eq = line.find('=');
        const std::string sec = line.substr(0, dot);
        if (sec != section) {
            ini += "[" + sec + "]\n";
            section = sec;
        }
        ini += line.substr(dot + 1, eq - dot - 1) + " = " + line.substr(eq + 1) + "\n";
    }
    CHECK(canonical_text(parse_config(ini)) == canonical_text(a));
    const RunConfig c = parse_config("[geometry]\nz0 = 1e4\n");
    CHECK(config_hash(c) == config_hash(a));
}

TEST_CASE("presets") {
    const auto names = preset_names();
    CHECK(names.size() == 5);
    for (const auto& n : names) {
        CAPTURE(n);
        CHECK_NOTHROW(parse_config(preset_text(n)));
    }
    CHECK_THROWS_AS(preset_text("nope"), ValidationError);
    const RunConfig f4 = parse_config(preset_text("fig4-desk"));
    CHECK(f4.study == Study::RecoverableCount);
    CHECK(f4.setups.size() == 9);
    for (const auto& s : f4.setups) CHECK(s.n * s.p == 60);
}

TEST_CASE("experiment spec set-up precedence") {
    RunConfig c;
    CHECK(experiment_spec(c).setups.size() == 1);
    c.quadratic_n = {3, 5};
    auto spec = experiment_spec(c);
    REQUIRE(spec.setups.size() == 2);
    CHECK(spec.setups[1].p == 3);
    c.fixed_product = 12;
    CHECK(experiment_spec(c).setups.size() == 6);
    c.setups = {{EnsembleKind::Multistatic, 4, 1}};
    CHECK(experiment_spec(c).setups.size() == 1);
    c.study = Study::SuccessCurve;
    CHECK_FALSE(experiment_spec(c).scan);
    c.study = Study::RecoverableCount;
    CHECK(experiment_spec(c).scan);
    c.noise.model = NoiseModel::None;
    CHECK(experiment_spec(c).noise_model == NoiseModel::RelativeGaussian);
}

TEST_CASE("schema help lists every key") {
    const std::string help = schema_help();
    const std::string canon = canonical_text(RunConfig{});
    for (std::size_t pos = 0; pos < canon.size();) {
        const std::size_t end = canon.find('\n', pos);
        const std::string line = canon.substr(pos, end - pos);
        pos = end + 1;
        const std::string key = line.substr(line.find('.') + 1, line.find('=') - line.find('.') - 1);
        CAPTURE(key);
        CHECK(help.find("  " + key + " (") != std::string::npos);
    }
    CHECK(help.find("  threads (") != std::string::npos);
}

}
