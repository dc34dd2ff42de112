#pragma once

#include "rilab/core.hpp"
#include "rilab/geometry.hpp"
#include "rilab/sensing.hpp"
#include "rilab/solvers.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rilab {

enum class Regime { DiffractionLimited, UnderResolved };
std::string to_string(Regime regime);
/// Diffraction-limited when the Rayleigh ratio is 1 (to rounding), under-resolved below.
Regime classify_regime(const ImagingGeometry& geometry);

enum class SuccessCriterion {
    ExactSupport, ///< recovered support equals the true support
    WithinOneCell ///< every recovered point within one lattice cell of a true point and vice versa
};

enum class OstRule {
    Theory,   ///< tau = 4 sqrt(ln N) max(sigma, 12 sqrt2 mu) from the realized matrix
    HalfXmin, ///< tau = X_min / 2
    Fixed     ///< tau = ExperimentSpec::ost_tau
};

/// One imaging set-up: random illumination with n sensors and p probes, or a multistatic
/// array of n transceivers (p is ignored). `kind` selects the inversion matrix.
struct Setup {
    EnsembleKind kind = EnsembleKind::PointParaxial;
    Index n = 1;
    Index p = 1;
};
std::string setup_label(const Setup& setup);

struct ExperimentSpec {
    ImagingGeometry geometry{0.1, 10000.0, 100.0, 10.0, 20, true};
    std::vector<Setup> setups;
    std::vector<Index> sparsities;
    /// Noise axis; the level meaning depends on noise_model.
    std::vector<double> noise_levels{0.0};
    NoiseModel noise_model = NoiseModel::RelativeGaussian;
    std::vector<Method> methods{Method::Lasso};
    Index trials = 100;
    SuccessCriterion success = SuccessCriterion::ExactSupport;
    double threshold = 0.9;
    ValueKind value_kind = ValueKind::PositiveReal;
    AmplitudeRange amplitudes;
    /// Rescale every scene to ||X|| = 1 before the forward model.
    bool normalize_scene = false;
    SolverConfig solver;
    OstRule ost_rule = OstRule::HalfXmin;
    double ost_tau = 0.0;
    /// Green function used to synthesize data for point set-ups.
    GreenKind forward_green = GreenKind::Paraxial;
    /// Recoverable-count scan: cells run in increasing s, a method stops after
    /// `scan_stop_after` consecutive below-threshold cells, and a cell stops running a method
    /// once the threshold is out of reach (checked after every `batch` trials).
    bool scan = false;
    Index scan_stop_after = 2;
    Index batch = 10;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    /// Stop after this many newly computed cells (the result is then marked incomplete).
    std::optional<Index> max_new_cells;
};

/// Canonical text of every field that affects results; hashed into outputs.
std::string canonical_text(const ExperimentSpec& spec);
std::uint64_t spec_hash(const ExperimentSpec& spec);

struct TrialRecord {
    Index trial = 0;
    bool success = false;
    Index false_positives = 0;
    Index false_negatives = 0;
    double relative_error = 0.0;
    int iterations = 0;
    bool converged = true;
};

struct CellResult {
    Setup setup;
    Index s = 0;
    double noise = 0.0;
    Method method = Method::Lasso;
    Index trials = 0;
    Index successes = 0;
    double success_rate = 0.0;
    double standard_error = 0.0;
    /// Trials stopped early because the threshold could no longer be met.
    bool truncated = false;
    std::uint64_t seed = 0;
    std::vector<TrialRecord> records;
};

/// Largest s with success rate >= threshold, per (setup, noise, method).
struct RecoverableCount {
    Setup setup;
    double noise = 0.0;
    Method method = Method::Lasso;
    Index s_star = 0;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::vector<RecoverableCount> counts;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    bool complete = true;
};

/// Key naming one cell (set-up, sparsity, noise); shared by all methods of the cell.
std::string cell_key(const Setup& setup, Index s, double noise);

/// Optional persistence hooks: `load` returns the finished results of a cell (all methods)
/// when known, `save` receives each newly computed cell.
struct CellStore {
    std::function<std::optional<std::vector<CellResult>>(const std::string& key)> load;
    std::function<void(const std::string& key, const std::vector<CellResult>&)> save;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, const CellStore& store = {});

/// Success probability per sparsity at a fixed set of set-ups.
ExperimentResult success_curve(ExperimentSpec spec, const CellStore& store = {});
/// s* per set-up by an increasing-s scan.
ExperimentResult recoverable_count_sweep(ExperimentSpec spec, const CellStore& store = {});
/// Single-sensor success over (p, s); requires n = 1 or a Rayleigh ratio below 1.
ExperimentResult superresolution_study(ExperimentSpec spec, const CellStore& store = {});
/// Success against relative noise level per set-up.
ExperimentResult noise_robustness(ExperimentSpec spec, const CellStore& store = {});

struct MismatchResult {
    /// Paraxial-inversion cells (kind PointParaxial) and exact-inversion cells (PointExact),
    /// both on data synthesized with `forward_green`.
    ExperimentResult result;
    /// max over cells |rate(paraxial inversion) - rate(exact inversion)|.
    double max_gap = 0.0;
};
/// Runs every set-up with both inversion models on shared data.
MismatchResult model_mismatch_study(ExperimentSpec spec, const CellStore& store = {});

/// Divisor pairs (n, p) with n p = product, n increasing.
std::vector<Setup> fixed_product_setups(Index product, EnsembleKind kind = EnsembleKind::PointParaxial);
/// (n, (n+1)/2) for odd n.
std::vector<Setup> quadratic_setups(const std::vector<Index>& ns, EnsembleKind kind = EnsembleKind::PointParaxial);

bool support_success(const Support& truth, const Support& estimate, SuccessCriterion criterion, int grid_side);

/// CSV of cells: setup,kind,n,p,s,noise,method,trials,successes,success_rate,stderr,s_star,truncated,seed,config_hash.
void write_cells_csv(std::ostream& out, const ExperimentResult& result);
/// CSV of raw trial records.
void write_trials_csv(std::ostream& out, const ExperimentResult& result);
/// CSV of s* per group.
void write_counts_csv(std::ostream& out, const ExperimentResult& result);

// ---------------------------------------------------------------------------
// Extended objects

struct ExtendedSpec {
    ImagingGeometry geometry{0.1, 10000.0, 100.0, 10.0, 32, true};
    Index n = 1;
    Index p = 200;
    NoiseSpec noise{NoiseModel::UniformPercent, 0.05};
    PixelateMode mode = PixelateMode::Embed;
    Index seeds = 10;
    std::uint64_t seed = 1;
    SolverConfig solver;
    unsigned threads = 0;
};

struct ExtendedTrial {
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    double relative_error = 0.0;
    double per_pixel_error = 0.0;
    double residual_norm = 0.0;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = true;
    DiscretizationCheck discretization{};
    CVector estimate;
};

struct ExtendedResult {
    PixelatedScene scene;
    std::vector<ExtendedTrial> trials;
    double median_relative_error = 0.0;
    std::uint64_t config_hash = 0;
};

std::string canonical_text(const ExtendedSpec& spec);

/// BPDN reconstructions of a pixelated image, one per derived seed, with epsilon set to the
/// realized noise norm.
ExtendedResult extended_object_study(const GrayImage& image, const ExtendedSpec& spec);

void write_extended_csv(std::ostream& out, const ExtendedResult& result);
/// Reconstruction magnitude laid out on the lattice.
GrayImage lattice_image(const CVector& values, int side);

/// Built-in 16 x 32 binary glyph used by the extended-object preset.
GrayImage desk_glyph();

} // namespace rilab
