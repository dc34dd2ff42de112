#pragma once

#include "rilab/analysis.hpp"
#include "rilab/experiments.hpp"
#include "rilab/geometry.hpp"
#include "rilab/sensing.hpp"
#include "rilab/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rilab {

enum class TauRule { Value, Auto, HalfXmin };

enum class Study { SuccessCurve, RecoverableCount, Superresolution, NoiseRobustness, ModelMismatch, ExtendedObject };
std::string to_string(Study study);

/// Everything a CLI run needs, after schema validation. Defaults are the documented schema defaults.
struct RunConfig {
    // [geometry]
    double wavelength = 0.1;
    double z0 = 10000.0;
    double aperture = 100.0;
    double grid_spacing = 10.0;
    int grid_side = 20;
    bool centered = true;
    // [ensemble]
    EnsembleKind kind = EnsembleKind::PointParaxial;
    Index n = 1;
    Index p = 60;
    GreenKind forward_green = GreenKind::Paraxial;
    // [scene]
    Index s = 3;
    AmplitudeRange amplitudes;
    ValueKind value_kind = ValueKind::PositiveReal;
    bool normalize = false;
    std::string image;
    PixelateMode pixelate = PixelateMode::Embed;
    // [noise]
    NoiseSpec noise;
    // [solver]
    Method method = Method::Lasso;
    SolverConfig solver;
    std::optional<double> sigma;
    TauRule tau_rule = TauRule::Auto;
    double tau = 0.0;
    // [analysis]
    double delta = 0.05;
    std::optional<double> t;
    double c0 = 1.0;
    double a0 = 1.0;
    double c1 = 1.0;
    Index bound_trials = 0;
    // [experiment]
    Study study = Study::RecoverableCount;
    std::vector<Setup> setups;
    Index fixed_product = 0;
    std::vector<Index> quadratic_n;
    std::vector<Index> sparsities{1, 2, 3};
    std::vector<double> noise_levels{0.0};
    std::vector<Method> methods{Method::Lasso};
    Index trials = 100;
    double threshold = 0.9;
    SuccessCriterion success = SuccessCriterion::ExactSupport;
    OstRule ost_rule = OstRule::HalfXmin;
    Index scan_stop_after = 2;
    Index batch = 10;
    Index seeds = 10;
    // [run]
    std::uint64_t seed = 1;
    unsigned threads = 0;

    ImagingGeometry geometry() const;
};

/// Parses INI text; unknown sections or keys and malformed values throw ValidationError naming the key.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Names of the bundled presets and their INI text.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

/// Canonical key=value rendering of every effective setting (one per line, fixed order).
std::string canonical_text(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

/// Human-readable schema (sections, keys, types, defaults) for --help.
std::string schema_help();

ExperimentSpec experiment_spec(const RunConfig& config);
ExtendedSpec extended_spec(const RunConfig& config);

} // namespace rilab
