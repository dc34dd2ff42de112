#include "rilab/experiments.hpp"

#include "rilab/analysis.hpp"
#include "rilab/io.hpp"
#include "rilab/parallel.hpp"
#include "rilab/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace rilab {

std::string to_string(Regime regime) {
    return regime == Regime::DiffractionLimited ? "diffraction-limited" : "under-resolved";
}

Regime classify_regime(const ImagingGeometry& g) {
    return rayleigh_ratio(g) >= 1.0 - 1e-9 ? Regime::DiffractionLimited : Regime::UnderResolved;
}

std::string setup_label(const Setup& s) {
    switch (s.kind) {
    case EnsembleKind::Multistatic: return "mr";
    case EnsembleKind::PointExact: return "ri-exact";
    case EnsembleKind::Extended: return "ri-extended";
    case EnsembleKind::PointParaxial: break;
    }
    return "ri";
}

namespace {

const char* criterion_name(SuccessCriterion c) {
    return c == SuccessCriterion::ExactSupport ? "exact-support" : "within-one-cell";
}

const char* ost_rule_name(OstRule r) {
    switch (r) {
    case OstRule::Theory: return "theory";
    case OstRule::HalfXmin: return "half-xmin";
    case OstRule::Fixed: return "fixed";
    }
    return "?";
}

const char* value_kind_name(ValueKind k) {
    switch (k) {
    case ValueKind::PositiveReal: return "positive-real";
    case ValueKind::SignedReal: return "signed-real";
    case ValueKind::ComplexPhase: return "complex-phase";
    }
    return "?";
}

void geometry_text(std::ostringstream& out, const ImagingGeometry& g) {
    out << "geometry.wavelength=" << format_double(g.wavelength()) << '\n'
        << "geometry.z0=" << format_double(g.standoff()) << '\n'
        << "geometry.aperture=" << format_double(g.aperture()) << '\n'
        << "geometry.grid_spacing=" << format_double(g.grid_spacing()) << '\n'
        << "geometry.grid_side=" << g.grid_side() << '\n'
        << "geometry.centered=" << (g.centered() ? "true" : "false") << '\n';
}

void solver_text(std::ostringstream& out, const SolverConfig& c) {
    out << "solver.max_iterations=" << c.max_iterations << '\n'
        << "solver.tolerance=" << format_double(c.tolerance) << '\n'
        << "solver.gamma=" << (c.gamma ? format_double(*c.gamma) : "default") << '\n'
        << "solver.support_threshold=" << format_double(c.support_threshold) << '\n'
        << "solver.noiseless_lambda_ratio=" << format_double(c.noiseless_lambda_ratio) << '\n'
        << "solver.bpdn_max_steps=" << c.bpdn_max_steps << '\n'
        << "solver.bpdn_rel_tol=" << format_double(c.bpdn_rel_tol) << '\n'
        << "solver.real_only=" << (c.real_only ? "true" : "false") << '\n'
        << "solver.sp_max_iterations=" << c.sp_max_iterations << '\n';
}

} // namespace

std::string canonical_text(const ExperimentSpec& spec) {
    std::ostringstream out;
    geometry_text(out, spec.geometry);
    out << "setups=";
    for (const auto& s : spec.setups) out << setup_label(s) << ':' << s.n << ':' << s.p << ';';
    out << "\nsparsities=";
    for (Index s : spec.sparsities) out << s << ';';
    out << "\nnoise_levels=";
    for (double v : spec.noise_levels) out << format_double(v) << ';';
    out << "\nnoise_model=" << to_string(spec.noise_model) << "\nmethods=";
    for (Method m : spec.methods) out << to_string(m) << ';';
    out << "\ntrials=" << spec.trials << "\nsuccess=" << criterion_name(spec.success)
        << "\nthreshold=" << format_double(spec.threshold) << "\nvalue_kind=" << value_kind_name(spec.value_kind)
        << "\namplitude_lo=" << format_double(spec.amplitudes.lo)
        << "\namplitude_hi=" << format_double(spec.amplitudes.hi)
        << "\nnormalize_scene=" << (spec.normalize_scene ? "true" : "false") << '\n';
    solver_text(out, spec.solver);
    out << "ost_rule=" << ost_rule_name(spec.ost_rule) << "\nost_tau=" << format_double(spec.ost_tau)
        << "\nforward_green=" << (spec.forward_green == GreenKind::Exact ? "exact" : "paraxial")
        << "\nscan=" << (spec.scan ? "true" : "false") << "\nscan_stop_after=" << spec.scan_stop_after
        << "\nbatch=" << spec.batch << "\nseed=" << spec.seed << '\n';
    return out.str();
}

std::uint64_t spec_hash(const ExperimentSpec& spec) { return fnv1a64(canonical_text(spec)); }

std::string cell_key(const Setup& setup, Index s, double noise) {
    return setup_label(setup) + ";n=" + std::to_string(setup.n) + ";p=" + std::to_string(setup.p) +
           ";s=" + std::to_string(s) + ";noise=" + format_double(noise);
}

bool support_success(const Support& truth, const Support& estimate, SuccessCriterion criterion, int side) {
    if (criterion == SuccessCriterion::ExactSupport) {
        Support a = truth, b = estimate;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }
    auto near = [side](Index u, Index v) {
        const Index ui = u / side, uj = u % side, vi = v / side, vj = v % side;
        return std::abs(ui - vi) <= 1 && std::abs(uj - vj) <= 1;
    };
    auto covered = [&](const Support& from, const Support& to) {
        return std::all_of(from.begin(), from.end(), [&](Index u) {
            return std::any_of(to.begin(), to.end(), [&](Index v) { return near(u, v); });
        });
    };
    return covered(truth, estimate) && covered(estimate, truth);
}

namespace {

struct TrialOutcome {
    std::vector<TrialRecord> per_method; // aligned with the active method list
};

/// Per-entry Gaussian-equivalent noise level for the Lasso penalty.
double noise_sigma(NoiseModel model, double level, const CVector& clean) {
    switch (model) {
    case NoiseModel::None: return 0.0;
    case NoiseModel::ComplexGaussian: return level;
    case NoiseModel::RelativeGaussian: return level * clean.norm();
    case NoiseModel::UniformPercent:
        return clean.size() ? level * clean.norm() / std::sqrt(3.0 * static_cast<double>(clean.size())) : 0.0;
    }
    return 0.0;
}

SensingEnsemble build_inversion(const ImagingGeometry& g, const Setup& setup, std::uint64_t ts) {
    if (setup.kind == EnsembleKind::Multistatic)
        return build_multistatic_matrix(g, sample_transceivers(g, setup.n, child_seed(ts, stream::sensors)));
    const auto sensors = sample_sensors(g, setup.n, child_seed(ts, stream::sensors));
    const auto ill = sample_illuminations(g, setup.p, child_seed(ts, stream::illuminations));
    switch (setup.kind) {
    case EnsembleKind::PointExact: return build_point_matrix(g, sensors, ill, GreenKind::Exact);
    case EnsembleKind::Extended: return build_extended_matrix(g, sensors, ill);
    default: return build_point_matrix(g, sensors, ill, GreenKind::Paraxial);
    }
}

TrialOutcome run_trial(const ExperimentSpec& spec, const Setup& setup, Index s, double level,
                       const std::vector<Method>& methods, std::uint64_t ts, Index trial) {
    const auto& g = spec.geometry;
    const SensingEnsemble ens = build_inversion(g, setup, ts);
    SceneVector scene = random_scene(g, s, spec.amplitudes, spec.value_kind, child_seed(ts, stream::scene));
    if (spec.normalize_scene && s > 0) scene = SceneVector(CVector(scene.values() / scene.values().norm()));

    // data synthesized with the other Green function when the set-up asks for it
    CVector clean;
    const bool point = setup.kind == EnsembleKind::PointParaxial || setup.kind == EnsembleKind::PointExact;
    const GreenKind inv_green = setup.kind == EnsembleKind::PointExact ? GreenKind::Exact : GreenKind::Paraxial;
    if (point && spec.forward_green != inv_green) {
        const auto fwd = build_point_matrix(g, ens.sensors, ens.illuminations, spec.forward_green);
        clean = fwd.matrix * scene.values();
    } else {
        clean = ens.matrix * scene.values();
    }
    const NoiseSpec nspec{level > 0.0 ? spec.noise_model : NoiseModel::None, level};
    const CVector noise = make_noise(nspec, child_seed(ts, stream::noise), clean);
    const CVector y = clean + noise;
    const double sigma = noise_sigma(nspec.model, level, clean);
    const double noise_norm = noise.norm();

    std::optional<double> lipschitz;
    auto get_lipschitz = [&]() {
        if (!lipschitz) {
            const double sn = spectral_norm(ens.matrix);
            lipschitz = sn * sn;
        }
        return *lipschitz;
    };

    TrialOutcome out;
    for (Method method : methods) {
        TrialRecord rec;
        rec.trial = trial;
        RecoveryResult<Complex> r;
        bool failed = false;
        try {
            switch (method) {
            case Method::Lasso: {
                double lambda = 0.0;
                if (sigma > 0.0) {
                    lambda = spec.solver.gamma.value_or(default_gamma(ens.cols())) * sigma;
                } else {
                    CVector corr = ens.matrix.adjoint() * y;
                    if (spec.solver.real_only) corr = corr.real().cast<Complex>();
                    lambda = spec.solver.noiseless_lambda_ratio * corr.cwiseAbs().maxCoeff();
                }
                LassoOptions opt;
                opt.lipschitz = get_lipschitz();
                r = lasso_penalized(ens.matrix, y, lambda, spec.solver, opt);
                break;
            }
            case Method::BPDN: {
                LassoOptions opt;
                opt.lipschitz = get_lipschitz();
                const double eps = std::max(noise_norm, spec.solver.bpdn_rel_tol * y.norm());
                r = bpdn(ens.matrix, y, eps, spec.solver, opt);
                break;
            }
            case Method::OST: {
                double tau = spec.ost_tau;
                if (spec.ost_rule == OstRule::HalfXmin) tau = s > 0 ? 0.5 * scene.x_min() : 0.0;
                else if (spec.ost_rule == OstRule::Theory)
                    tau = ost_threshold(ens.cols(), sigma, worst_case_coherence(ens.matrix).mu);
                r = ost(ens.matrix, y, tau);
                break;
            }
            case Method::OMP: {
                const double eps = std::max(noise_norm, 1e-9 * y.norm());
                r = omp(ens.matrix, y, eps);
                break;
            }
            case Method::SubspacePursuit:
                if (s == 0) {
                    r.estimate = CVector::Zero(ens.cols());
                } else if (s > ens.rows()) {
                    failed = true;
                } else {
                    r = subspace_pursuit(ens.matrix, y, s, spec.solver.sp_max_iterations);
                }
                break;
            }
        } catch (const RankDeficientError&) {
            failed = true;
        }
        if (failed) {
            rec.success = false;
            rec.false_negatives = s;
            rec.relative_error = 1.0;
            rec.converged = false;
        } else {
            const auto m = support_metrics(scene.support(), scene.values(), r.support, r.estimate);
            rec.success = support_success(scene.support(), r.support, spec.success, g.grid_side());
            rec.false_positives = m.false_positives;
            rec.false_negatives = m.false_negatives;
            rec.relative_error = m.relative_l2_error;
            rec.iterations = r.iterations;
            rec.converged = r.converged;
        }
        out.per_method.push_back(rec);
    }
    return out;
}

Index allowed_failures(Index trials, double threshold) {
    const double need = std::ceil(threshold * static_cast<double>(trials) - 1e-9);
    return trials - static_cast<Index>(need);
}

void finalize_cell(CellResult& c) {
    c.trials = static_cast<Index>(c.records.size());
    c.successes = 0;
    for (const auto& r : c.records) c.successes += r.success;
    c.success_rate = c.trials ? static_cast<double>(c.successes) / static_cast<double>(c.trials) : 0.0;
    c.standard_error =
        c.trials ? std::sqrt(c.success_rate * (1.0 - c.success_rate) / static_cast<double>(c.trials)) : 0.0;
}

std::vector<CellResult> compute_cell(const ExperimentSpec& spec, const Setup& setup, Index s, double level,
                                     const std::vector<Method>& methods) {
    // draws depend on (n, p, s, noise) only, so set-ups of the same size share sensors and scenes
    const std::string data_key =
        "n=" + std::to_string(setup.n) + ";p=" + std::to_string(setup.p) + ";s=" + std::to_string(s) +
        ";noise=" + format_double(level);
    const std::uint64_t cell_seed = child_seed(spec.seed, fnv1a64(data_key));
    std::vector<CellResult> cells(methods.size());
    for (std::size_t k = 0; k < methods.size(); ++k) {
        cells[k].setup = setup;
        cells[k].s = s;
        cells[k].noise = level;
        cells[k].method = methods[k];
        cells[k].seed = cell_seed;
    }
    std::vector<char> active(methods.size(), 1);
    const Index batch = spec.scan ? std::max<Index>(1, spec.batch) : spec.trials;
    const Index allowed = allowed_failures(spec.trials, spec.threshold);
    for (Index t0 = 0; t0 < spec.trials; t0 += batch) {
        std::vector<Method> run_methods;
        std::vector<std::size_t> slot;
        for (std::size_t k = 0; k < methods.size(); ++k)
            if (active[k]) {
                run_methods.push_back(methods[k]);
                slot.push_back(k);
            }
        if (run_methods.empty()) break;
        const Index t1 = std::min(spec.trials, t0 + batch);
        std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(t1 - t0));
        parallel_for(outcomes.size(), spec.threads, [&](std::size_t i) {
            const Index t = t0 + static_cast<Index>(i);
            outcomes[i] = run_trial(spec, setup, s, level, run_methods, child_seed(cell_seed, static_cast<std::uint64_t>(t)), t);
        });
        for (const auto& o : outcomes)
            for (std::size_t q = 0; q < slot.size(); ++q) cells[slot[q]].records.push_back(o.per_method[q]);
        if (spec.scan) {
            for (std::size_t k = 0; k < methods.size(); ++k) {
                if (!active[k]) continue;
                Index failures = 0;
                for (const auto& r : cells[k].records) failures += !r.success;
                if (failures > allowed) {
                    active[k] = 0;
                    if (t1 < spec.trials) cells[k].truncated = true;
                }
            }
        }
    }
    for (auto& c : cells) finalize_cell(c);
    return cells;
}

bool same_setup(const Setup& a, const Setup& b) { return a.kind == b.kind && a.n == b.n && a.p == b.p; }

void compute_counts(const ExperimentSpec& spec, ExperimentResult& result) {
    result.counts.clear();
    for (const auto& setup : spec.setups)
        for (double level : spec.noise_levels)
            for (Method method : spec.methods) {
                RecoverableCount rc{setup, level, method, 0};
                for (const auto& c : result.cells)
                    if (same_setup(c.setup, setup) && c.noise == level && c.method == method && !c.truncated &&
                        c.trials > 0 && c.success_rate >= spec.threshold)
                        rc.s_star = std::max(rc.s_star, c.s);
                result.counts.push_back(rc);
            }
}

void validate(const ExperimentSpec& spec) {
    if (spec.setups.empty()) throw ValidationError("experiment needs at least one set-up");
    if (spec.sparsities.empty()) throw ValidationError("experiment needs at least one sparsity");
    if (spec.methods.empty()) throw ValidationError("experiment needs at least one method");
    if (spec.noise_levels.empty()) throw ValidationError("experiment needs at least one noise level");
    if (spec.trials < 1) throw ValidationError("trials must be >= 1");
    if (!(spec.threshold > 0.0 && spec.threshold <= 1.0)) throw ValidationError("threshold must lie in (0, 1]");
    for (const auto& s : spec.setups)
        if (s.n < 1 || s.p < 1) throw ValidationError("set-up needs n >= 1 and p >= 1");
    for (Index s : spec.sparsities)
        if (s < 0 || s > spec.geometry.grid_size()) throw ValidationError("sparsity out of range");
    for (double v : spec.noise_levels)
        if (!(v >= 0.0)) throw ValidationError("noise levels must be >= 0");
    if (spec.scan && !std::is_sorted(spec.sparsities.begin(), spec.sparsities.end()))
        throw ValidationError("a recoverable-count scan needs increasing sparsities");
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const CellStore& store) {
    validate(spec);
    ExperimentResult result;
    result.config_hash = spec_hash(spec);
    result.seed = spec.seed;
    Index new_cells = 0;
    for (const auto& setup : spec.setups)
        for (double level : spec.noise_levels) {
            std::vector<Index> below(spec.methods.size(), 0);
            for (Index s : spec.sparsities) {
                std::vector<Method> methods;
                for (std::size_t k = 0; k < spec.methods.size(); ++k)
                    if (!spec.scan || below[k] < spec.scan_stop_after) methods.push_back(spec.methods[k]);
                if (methods.empty()) break;
                const std::string key = cell_key(setup, s, level);
                std::optional<std::vector<CellResult>> cells;
                if (store.load) cells = store.load(key);
                if (!cells) {
                    if (spec.max_new_cells && new_cells >= *spec.max_new_cells) {
                        result.complete = false;
                        compute_counts(spec, result);
                        return result;
                    }
                    cells = compute_cell(spec, setup, s, level, methods);
                    ++new_cells;
                    if (store.save) store.save(key, *cells);
                }
                for (const auto& c : *cells) {
                    const auto pos = std::find(spec.methods.begin(), spec.methods.end(), c.method) - spec.methods.begin();
                    if (static_cast<std::size_t>(pos) < below.size()) {
                        const bool pass = !c.truncated && c.success_rate >= spec.threshold;
                        below[static_cast<std::size_t>(pos)] = pass ? 0 : below[static_cast<std::size_t>(pos)] + 1;
                    }
                    result.cells.push_back(c);
                }
            }
        }
    compute_counts(spec, result);
    return result;
}

ExperimentResult success_curve(ExperimentSpec spec, const CellStore& store) {
    spec.scan = false;
    return run_experiment(spec, store);
}

ExperimentResult recoverable_count_sweep(ExperimentSpec spec, const CellStore& store) {
    spec.scan = true;
    std::sort(spec.sparsities.begin(), spec.sparsities.end());
    return run_experiment(spec, store);
}

ExperimentResult superresolution_study(ExperimentSpec spec, const CellStore& store) {
    for (const auto& s : spec.setups)
        if (s.n != 1 && rayleigh_ratio(spec.geometry) >= 1.0)
            throw ValidationError("superresolution study needs n = 1 or a Rayleigh ratio below 1");
    return run_experiment(spec, store);
}

ExperimentResult noise_robustness(ExperimentSpec spec, const CellStore& store) {
    if (spec.noise_model != NoiseModel::RelativeGaussian)
        throw ValidationError("noise robustness sweeps use the relative Gaussian noise model");
    return run_experiment(spec, store);
}

MismatchResult model_mismatch_study(ExperimentSpec spec, const CellStore& store) {
    std::vector<Setup> both;
    for (const auto& s : spec.setups) {
        if (s.kind != EnsembleKind::PointParaxial && s.kind != EnsembleKind::PointExact)
            throw ValidationError("model mismatch study needs point set-ups");
        both.push_back({EnsembleKind::PointParaxial, s.n, s.p});
        both.push_back({EnsembleKind::PointExact, s.n, s.p});
    }
    spec.setups = both;
    MismatchResult out;
    out.result = run_experiment(spec, store);
    for (const auto& a : out.result.cells) {
        if (a.setup.kind != EnsembleKind::PointParaxial) continue;
        for (const auto& b : out.result.cells)
            if (b.setup.kind == EnsembleKind::PointExact && b.setup.n == a.setup.n && b.setup.p == a.setup.p &&
                b.s == a.s && b.noise == a.noise && b.method == a.method)
                out.max_gap = std::max(out.max_gap, std::abs(a.success_rate - b.success_rate));
    }
    return out;
}

std::vector<Setup> fixed_product_setups(Index product, EnsembleKind kind) {
    if (product < 1) throw ValidationError("product must be >= 1");
    std::vector<Setup> out;
    for (Index n = 1; n <= product; ++n)
        if (product % n == 0) out.push_back({kind, n, product / n});
    return out;
}

std::vector<Setup> quadratic_setups(const std::vector<Index>& ns, EnsembleKind kind) {
    std::vector<Setup> out;
    for (Index n : ns) {
        if (n < 1 || n % 2 == 0) throw ValidationError("quadratic sweep needs odd n");
        out.push_back({kind, n, (n + 1) / 2});
    }
    return out;
}

void write_cells_csv(std::ostream& out, const ExperimentResult& result) {
    CsvWriter w(out);
    w.row({"setup", "kind", "n", "p", "s", "noise", "method", "trials", "successes", "success_rate", "stderr",
           "s_star", "truncated", "seed", "config_hash"});
    const std::string hash = hex64(result.config_hash);
    for (const auto& c : result.cells) {
        Index s_star = 0;
        for (const auto& rc : result.counts)
            if (same_setup(rc.setup, c.setup) && rc.noise == c.noise && rc.method == c.method) s_star = rc.s_star;
        w.row({setup_label(c.setup), to_string(c.setup.kind), std::to_string(c.setup.n), std::to_string(c.setup.p),
               std::to_string(c.s), format_double(c.noise), to_string(c.method), std::to_string(c.trials),
               std::to_string(c.successes), format_double(c.success_rate), format_double(c.standard_error),
               std::to_string(s_star), c.truncated ? "1" : "0", std::to_string(result.seed), hash});
    }
}

void write_trials_csv(std::ostream& out, const ExperimentResult& result) {
    CsvWriter w(out);
    w.row({"setup", "n", "p", "s", "noise", "method", "trial", "success", "false_positives", "false_negatives",
           "relative_error", "iterations", "converged", "cell_seed", "config_hash"});
    const std::string hash = hex64(result.config_hash);
    for (const auto& c : result.cells)
        for (const auto& r : c.records)
            w.row({setup_label(c.setup), std::to_string(c.setup.n), std::to_string(c.setup.p), std::to_string(c.s),
                   format_double(c.noise), to_string(c.method), std::to_string(r.trial), r.success ? "1" : "0",
                   std::to_string(r.false_positives), std::to_string(r.false_negatives),
                   format_double(r.relative_error), std::to_string(r.iterations), r.converged ? "1" : "0",
                   std::to_string(c.seed), hash});
}

void write_counts_csv(std::ostream& out, const ExperimentResult& result) {
    CsvWriter w(out);
    w.row({"setup", "n", "p", "noise", "method", "s_star", "seed", "config_hash"});
    const std::string hash = hex64(result.config_hash);
    for (const auto& rc : result.counts)
        w.row({setup_label(rc.setup), std::to_string(rc.setup.n), std::to_string(rc.setup.p), format_double(rc.noise),
               to_string(rc.method), std::to_string(rc.s_star), std::to_string(result.seed), hash});
}

// ---------------------------------------------------------------------------

std::string canonical_text(const ExtendedSpec& spec) {
    std::ostringstream out;
    geometry_text(out, spec.geometry);
    out << "n=" << spec.n << "\np=" << spec.p << "\nnoise_model=" << to_string(spec.noise.model)
        << "\nnoise_level=" << format_double(spec.noise.level)
        << "\nmode=" << (spec.mode == PixelateMode::Embed ? "embed" : "resample") << "\nseeds=" << spec.seeds
        << "\nseed=" << spec.seed << '\n';
    solver_text(out, spec.solver);
    return out.str();
}

ExtendedResult extended_object_study(const GrayImage& image, const ExtendedSpec& spec) {
    if (spec.seeds < 1) throw ValidationError("extended study needs at least one seed");
    ExtendedResult result;
    result.scene = pixelate(image, spec.geometry, spec.mode);
    result.config_hash = fnv1a64(canonical_text(spec));
    const CVector& x = result.scene.scene.values();
    const Index s = result.scene.scene.sparsity();
    result.trials.resize(static_cast<std::size_t>(spec.seeds));
    parallel_for(result.trials.size(), spec.threads, [&](std::size_t k) {
        ExtendedTrial& tr = result.trials[k];
        tr.seed = child_seed(spec.seed, k);
        const auto sensors = sample_sensors(spec.geometry, spec.n, child_seed(tr.seed, stream::sensors));
        const auto ill = sample_illuminations(spec.geometry, spec.p, child_seed(tr.seed, stream::illuminations));
        const auto ens = build_extended_matrix(spec.geometry, sensors, ill);
        const CVector clean = ens.matrix * x;
        const CVector noise = make_noise(spec.noise, child_seed(tr.seed, stream::noise), clean);
        const CVector y = clean + noise;
        tr.epsilon = noise.norm();
        const auto r = bpdn(ens.matrix, y, tr.epsilon, spec.solver);
        tr.estimate = r.estimate;
        const auto m = support_metrics(result.scene.scene.support(), x, r.support, r.estimate);
        tr.relative_error = m.relative_l2_error;
        tr.per_pixel_error = s > 0 ? (r.estimate - x).norm() / std::sqrt(static_cast<double>(s)) : (r.estimate - x).norm();
        tr.residual_norm = r.residual_norm;
        tr.lambda = r.lambda.value_or(0.0);
        tr.iterations = r.iterations;
        tr.converged = r.converged;
        tr.discretization = check_discretization(result.scene, ens, tr.epsilon);
    });
    std::vector<double> errs;
    for (const auto& t : result.trials) errs.push_back(t.relative_error);
    std::sort(errs.begin(), errs.end());
    const std::size_t mid = errs.size() / 2;
    result.median_relative_error = errs.size() % 2 ? errs[mid] : 0.5 * (errs[mid - 1] + errs[mid]);
    return result;
}

void write_extended_csv(std::ostream& out, const ExtendedResult& result) {
    CsvWriter w(out);
    w.row({"trial", "seed", "epsilon", "relative_error", "per_pixel_error", "residual_norm", "lambda", "iterations",
           "converged", "l1_discretization_error", "discretization_budget", "discretization_ok", "config_hash"});
    const std::string hash = hex64(result.config_hash);
    for (std::size_t k = 0; k < result.trials.size(); ++k) {
        const auto& t = result.trials[k];
        w.row({std::to_string(k), std::to_string(t.seed), format_double(t.epsilon), format_double(t.relative_error),
               format_double(t.per_pixel_error), format_double(t.residual_norm), format_double(t.lambda),
               std::to_string(t.iterations), t.converged ? "1" : "0", format_double(result.scene.l1_error),
               format_double(t.discretization.budget), t.discretization.satisfied ? "1" : "0", hash});
    }
}

GrayImage lattice_image(const CVector& values, int side) {
    if (values.size() != static_cast<Index>(side) * side) throw ValidationError("lattice image size mismatch");
    GrayImage img;
    img.width = side;
    img.height = side;
    img.pixels.resize(static_cast<std::size_t>(values.size()));
    // lattice index (i-1) side + (j-1) maps to raster row i-1, column j-1
    for (Index k = 0; k < values.size(); ++k) img.pixels[static_cast<std::size_t>(k)] = std::abs(values(k));
    return img;
}

GrayImage desk_glyph() {
    static const char* rows[16] = {
        "................................",
        "................................",
        "..######.....#####.....#.....#..",
        "..#.....#......#.......##...##..",
        "..#.....#......#.......#.#.#.#..",
        "..#.....#......#.......#..#..#..",
        "..######.......#.......#.....#..",
        "..#...#........#.......#.....#..",
        "..#....#.......#.......#.....#..",
        "..#.....#......#.......#.....#..",
        "..#.....#....#####.....#.....#..",
        "................................",
        "................................",
        "................................",
        "................................",
        "................................",
    };
    GrayImage img;
    img.width = 32;
    img.height = 16;
    for (const char* r : rows)
        for (int c = 0; c < 32; ++c) img.pixels.push_back(r[c] == '#' ? 1.0 : 0.0);
    return img;
}

} // namespace rilab
