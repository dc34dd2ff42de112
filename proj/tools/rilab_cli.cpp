// Command-line front end: build | analyze | recover | experiment.

#include "rilab/analysis.hpp"
#include "rilab/config.hpp"
#include "rilab/experiments.hpp"
#include "rilab/io.hpp"
#include "rilab/random.hpp"
#include "rilab/sensing.hpp"
#include "rilab/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace rilab;

namespace {

struct CommonOptions {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::optional<unsigned> threads;
    // recover overrides
    std::string method;
    std::optional<double> gamma;
    std::optional<double> sigma;
    std::optional<double> epsilon;
    std::string tau;
    std::optional<int> max_iterations;
};

RunConfig resolve_config(const CommonOptions& o) {
    RunConfig c;
    if (!o.preset.empty()) c = parse_config(preset_text(o.preset), c);
    if (!o.config.empty()) c = load_config_file(o.config, c);
    if (o.seed) c.seed = *o.seed;
    if (o.threads) c.threads = *o.threads;
    if (!o.method.empty()) c.method = parse_method(o.method);
    if (o.gamma) c.solver.gamma = *o.gamma;
    if (o.sigma) c.sigma = *o.sigma;
    if (o.epsilon) c.solver.epsilon = *o.epsilon;
    if (o.max_iterations) c.solver.max_iterations = *o.max_iterations;
    if (o.tau == "auto") {
        c.tau_rule = TauRule::Auto;
    } else if (o.tau == "half-xmin") {
        c.tau_rule = TauRule::HalfXmin;
    } else if (!o.tau.empty()) {
        try {
            std::size_t used = 0;
            c.tau = std::stod(o.tau, &used);
            if (used != o.tau.size() || c.tau < 0.0) throw std::invalid_argument(o.tau);
        } catch (const std::exception&) {
            throw ValidationError("--tau expects a nonnegative number, 'auto' or 'half-xmin', got '" + o.tau + "'");
        }
        c.tau_rule = TauRule::Value;
    }
    return c;
}

std::string provenance(const RunConfig& c) {
    return "config_hash=" + hex64(config_hash(c)) + " seed=" + std::to_string(c.seed);
}

/// Writes CSV text preceded by a '#' provenance line.
void write_csv(const fs::path& path, const RunConfig& c, const std::string& body) {
    write_file_atomic(path, "# " + provenance(c) + "\n" + body);
}

class KeyValueText {
public:
    void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, format_double(value)); }
    void add(const std::string& key, Index value) { add(key, std::to_string(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

    std::string text() const {
        std::string out;
        for (const auto& [k, v] : lines_) out += k + "=" + v + "\n";
        return out;
    }
    std::string csv() const {
        std::ostringstream out;
        CsvWriter w(out);
        w.row({"key", "value"});
        for (const auto& [k, v] : lines_) w.row({k, v});
        return out.str();
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

void add_provenance(KeyValueText& kv, const RunConfig& c) {
    kv.add("config_hash", hex64(config_hash(c)));
    kv.add("seed", std::to_string(c.seed));
}

SensingEnsemble build_ensemble(const RunConfig& c) {
    const auto g = c.geometry();
    const auto sensor_seed = child_seed(c.seed, stream::sensors);
    if (c.kind == EnsembleKind::Multistatic) return build_multistatic_matrix(g, sample_transceivers(g, c.n, sensor_seed));
    const auto sensors = sample_sensors(g, c.n, sensor_seed);
    const auto ill = sample_illuminations(g, c.p, child_seed(c.seed, stream::illuminations));
    switch (c.kind) {
    case EnsembleKind::PointExact: return build_point_matrix(g, sensors, ill, GreenKind::Exact);
    case EnsembleKind::Extended: return build_extended_matrix(g, sensors, ill);
    default: return build_point_matrix(g, sensors, ill, GreenKind::Paraxial);
    }
}

std::string sensors_csv(const SensingEnsemble& e) {
    std::ostringstream out;
    CsvWriter w(out);
    w.row({"index", "xi", "eta", "z"});
    for (Index l = 0; l < e.sensors.size(); ++l) {
        const auto& s = e.sensors[l];
        w.row({std::to_string(l), format_double(s.xi), format_double(s.eta), format_double(s.z)});
    }
    return out.str();
}

std::string illuminations_csv(const SensingEnsemble& e) {
    std::ostringstream out;
    CsvWriter w(out);
    w.row({"probe", "point", "theta"});
    const auto& th = e.illuminations.phases;
    for (Index k = 0; k < th.rows(); ++k)
        for (Index j = 0; j < th.cols(); ++j) w.row({std::to_string(k), std::to_string(j), format_double(th(k, j))});
    return out.str();
}

int cmd_build(const CommonOptions& o) {
    const RunConfig c = resolve_config(o);
    const auto e = build_ensemble(c);
    const fs::path out = o.out;
    write_matrix_binary(out / "matrix.bin", e.matrix, e.kind);
    write_csv(out / "sensors.csv", c, sensors_csv(e));
    if (e.kind != EnsembleKind::Multistatic) write_csv(out / "illuminations.csv", c, illuminations_csv(e));
    KeyValueText kv;
    const auto g = c.geometry();
    kv.add("kind", to_string(e.kind));
    kv.add("rows", e.rows());
    kv.add("cols", e.cols());
    kv.add("fresnel_metric", fresnel_metric(g));
    kv.add("rayleigh_ratio", rayleigh_ratio(g));
    kv.add("regime", to_string(classify_regime(g)));
    add_provenance(kv, c);
    write_file_atomic(out / "metadata.txt", kv.text());
    std::cout << "built " << e.rows() << "x" << e.cols() << " " << to_string(e.kind) << " matrix in " << out.string() << "\n";
    return 0;
}

void add_prediction(KeyValueText& kv, PredictMethod m, const PredictionInputs& in) {
    const std::string p = "predict." + to_string(m) + ".";
    try {
        const auto t = predict(m, in);
        kv.add(p + "sparsity_cap", t.sparsity_cap);
        if (t.threshold) kv.add(p + "threshold", *t.threshold);
        if (t.x_min_requirement) kv.add(p + "x_min_requirement", *t.x_min_requirement);
        if (t.probability_lower_bound) kv.add(p + "probability_lower_bound", *t.probability_lower_bound);
        kv.add(p + "vacuous", t.vacuous);
        kv.add(p + "premise_holds", t.premise_holds);
        for (const auto& [name, ok] : t.conditions) kv.add(p + "condition." + name, ok);
        for (const auto& [name, v] : t.parameters) kv.add(p + "parameter." + name, v);
    } catch (const MissingInputError& e) {
        kv.add(p + "missing", e.symbol());
    }
}

int cmd_analyze(const CommonOptions& o, const std::string& matrix_path) {
    KeyValueText kv;
    CMatrix phi;
    std::optional<RunConfig> config;
    const RunConfig resolved = resolve_config(o);
    if (!matrix_path.empty()) {
        const auto stored = read_matrix_binary(matrix_path);
        phi = stored.matrix;
        kv.add("source", matrix_path);
        kv.add("kind", to_string(stored.kind));
    } else {
        config = resolved;
        const auto e = build_ensemble(*config);
        phi = e.matrix;
        kv.add("source", std::string("config"));
        kv.add("kind", to_string(e.kind));
    }
    if (phi.cols() < 2) throw ValidationError("analysis needs a matrix with at least two columns");
    const auto rep = coherence_report(phi);
    kv.add("rows", rep.rows);
    kv.add("cols", rep.cols);
    kv.add("mu", rep.mu);
    kv.add("mu_pair", std::to_string(rep.argmax_first) + ":" + std::to_string(rep.argmax_second));
    kv.add("nu", rep.nu);
    kv.add("spectral_norm", rep.spectral_norm);
    kv.add("welch_lower_bound", rep.welch_lower);
    if (config) {
        const auto& c = *config;
        const auto g = c.geometry();
        const Index N = g.grid_size();
        const double K = mesh_constant_K(N, c.delta);
        const double a = a_parameter(g);
        kv.add("fresnel_metric", fresnel_metric(g));
        kv.add("rayleigh_ratio", rayleigh_ratio(g));
        kv.add("a_parameter", a);
        kv.add("K", K);
        kv.add("delta", c.delta);
        if (c.kind == EnsembleKind::PointParaxial || c.kind == EnsembleKind::PointExact ||
            c.kind == EnsembleKind::Extended) {
            const double np = static_cast<double>(c.n * c.p);
            const double bound = 2.0 * K * K / std::sqrt(np);
            const double full = a * K * std::sqrt(2.0) / std::sqrt(static_cast<double>(c.p)) + bound;
            kv.add("coherence_bound", bound);
            kv.add("coherence_bound_pass", rep.mu <= bound);
            kv.add("coherence_bound_with_a", full);
            kv.add("coherence_bound_with_a_pass", rep.mu <= full);
            kv.add("operator_norm_bound", 2.0 * static_cast<double>(N) / np);
            kv.add("operator_norm_bound_pass", rep.spectral_norm * rep.spectral_norm < 2.0 * static_cast<double>(N) / np);
        }
        PredictionInputs in;
        in.mu = rep.mu;
        in.nu = rep.nu;
        in.spectral_norm = rep.spectral_norm;
        in.K = K;
        in.delta = c.delta;
        in.a = a;
        in.rho = density_bound_rho(g);
        in.n = c.n;
        in.p = c.p;
        in.N = N;
        in.s = c.s;
        in.m = rep.rows;
        in.t = c.t;
        in.c0 = c.c0;
        in.a0 = c.a0;
        in.c1 = c.c1;
        if (c.sigma) in.sigma = *c.sigma;
        else if (c.noise.model == NoiseModel::ComplexGaussian) in.sigma = c.noise.level;
        else if (c.noise.model == NoiseModel::None) in.sigma = 0.0;
        in.x_min = c.amplitudes.lo;
        if (c.solver.epsilon) in.epsilon = *c.solver.epsilon;
        else if (c.noise.model == NoiseModel::None) in.epsilon = 0.0;
        for (auto m : {PredictMethod::OMP, PredictMethod::OST, PredictMethod::LassoRI, PredictMethod::LassoMR,
                       PredictMethod::BPDN})
            add_prediction(kv, m, in);
        if (c.bound_trials > 0) {
            const auto chk = coherence_bound_check(g, c.n, c.p, K, c.delta, c.bound_trials,
                                                   child_seed(c.seed, 17), 0.0, c.threads);
            kv.add("bound_check.trials", chk.trials);
            kv.add("bound_check.mu.frequency", chk.mu.frequency);
            kv.add("bound_check.mu.theoretical_failure", chk.mu.theoretical_failure);
            kv.add("bound_check.nu.frequency", chk.nu.frequency);
            kv.add("bound_check.nu.threshold", chk.nu.threshold);
            kv.add("bound_check.norm.frequency", chk.norm.frequency);
            kv.add("bound_check.norm.threshold", chk.norm.threshold);
            kv.add("bound_check.mean_mu", chk.mean_mu);
            kv.add("bound_check.mean_norm_squared", chk.mean_norm_squared);
        }
    }
    add_provenance(kv, resolved);
    const fs::path out = o.out;
    write_file_atomic(out / "report.txt", kv.text());
    write_csv(out / "report.csv", resolved, kv.csv());
    std::cout << "mu=" << format_double(rep.mu) << " nu=" << format_double(rep.nu)
              << " spectral_norm=" << format_double(rep.spectral_norm) << "\n";
    return 0;
}

std::string vector_csv(const CVector& v) {
    std::ostringstream out;
    write_vector_csv(out, v);
    return out.str();
}

int cmd_recover(const CommonOptions& o) {
    const RunConfig c = resolve_config(o);
    const auto e = build_ensemble(c);
    const auto g = c.geometry();
    SceneVector scene = random_scene(g.grid_size(), c.s, c.amplitudes, c.value_kind, child_seed(c.seed, stream::scene));
    if (c.normalize && c.s > 0) scene = SceneVector(CVector(scene.values() / scene.values().norm()));
    const auto meas = forward(e, scene, c.noise, child_seed(c.seed, stream::noise));
    const CVector& y = meas.data;
    const double noise_norm = meas.noise.norm();

    std::optional<double> sigma = c.sigma;
    if (!sigma && meas.sigma && c.noise.model != NoiseModel::None) sigma = meas.sigma;

    KeyValueText kv;
    RecoveryResult<Complex> r;
    switch (c.method) {
    case Method::OST: {
        double tau = c.tau;
        if (c.tau_rule == TauRule::Auto) {
            if (!sigma)
                throw ValidationError("solver.tau = auto needs sigma: set solver.sigma or a gaussian noise model");
            tau = ost_threshold(e.cols(), *sigma, worst_case_coherence(e.matrix).mu);
        } else if (c.tau_rule == TauRule::HalfXmin) {
            tau = scene.sparsity() > 0 ? 0.5 * scene.x_min() : 0.0;
        }
        r = ost(e.matrix, y, tau);
        break;
    }
    case Method::OMP:
        r = omp(e.matrix, y, c.solver.epsilon.value_or(std::max(noise_norm, 1e-9 * y.norm())));
        break;
    case Method::Lasso: {
        double lambda;
        if (sigma && *sigma > 0.0) {
            lambda = c.solver.gamma.value_or(default_gamma(e.cols())) * *sigma;
        } else {
            CVector corr = e.matrix.adjoint() * y;
            if (c.solver.real_only) corr = corr.real().cast<Complex>();
            lambda = c.solver.noiseless_lambda_ratio * (corr.size() ? corr.cwiseAbs().maxCoeff() : 0.0);
        }
        r = lasso_penalized(e.matrix, y, lambda, c.solver);
        break;
    }
    case Method::BPDN:
        r = bpdn(e.matrix, y, c.solver.epsilon.value_or(std::max(noise_norm, c.solver.bpdn_rel_tol * y.norm())), c.solver);
        break;
    case Method::SubspacePursuit:
        if (c.s < 1) throw ValidationError("subspace pursuit needs scene.s >= 1");
        r = subspace_pursuit(e.matrix, y, c.s, c.solver.sp_max_iterations);
        break;
    }
    const auto m = support_metrics(scene.support(), scene.values(), r.support, r.estimate);
    kv.add("method", to_string(c.method));
    kv.add("exact_support", m.exact);
    kv.add("false_positives", m.false_positives);
    kv.add("false_negatives", m.false_negatives);
    kv.add("relative_error", m.relative_l2_error);
    kv.add("per_pixel_error", m.per_pixel_error);
    kv.add("residual_norm", r.residual_norm);
    kv.add("noise_norm", noise_norm);
    kv.add("iterations", static_cast<Index>(r.iterations));
    kv.add("converged", r.converged);
    if (r.kkt_residual) kv.add("kkt_residual", *r.kkt_residual);
    if (r.lambda) kv.add("lambda", *r.lambda);
    if (r.threshold) kv.add("threshold", *r.threshold);
    if (r.condition) kv.add("condition", *r.condition);
    if (!r.note.empty()) kv.add("note", r.note);
    add_provenance(kv, c);
    const fs::path out = o.out;
    write_csv(out / "estimate.csv", c, vector_csv(r.estimate));
    write_csv(out / "truth.csv", c, vector_csv(scene.values()));
    write_csv(out / "measurement.csv", c, vector_csv(y));
    write_file_atomic(out / "summary.txt", kv.text());
    std::cout << to_string(c.method) << ": exact_support=" << (m.exact ? "true" : "false")
              << " fp=" << m.false_positives << " fn=" << m.false_negatives
              << " relative_error=" << format_double(m.relative_l2_error) << " iterations=" << r.iterations
              << (r.threshold ? " threshold=" + format_double(*r.threshold) : std::string()) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// experiment journal: one JSON line per finished cell, keyed by the config hash

json cells_to_json(const std::vector<CellResult>& cells) {
    json arr = json::array();
    for (const auto& c : cells) {
        json recs = json::array();
        for (const auto& r : c.records)
            recs.push_back({r.trial, r.success, r.false_positives, r.false_negatives, r.relative_error, r.iterations,
                            r.converged});
        arr.push_back({{"kind", static_cast<int>(c.setup.kind)},
                       {"n", c.setup.n},
                       {"p", c.setup.p},
                       {"s", c.s},
                       {"noise", c.noise},
                       {"method", to_string(c.method)},
                       {"truncated", c.truncated},
                       {"seed", c.seed},
                       {"records", recs}});
    }
    return arr;
}

std::vector<CellResult> cells_from_json(const json& arr) {
    std::vector<CellResult> out;
    for (const auto& j : arr) {
        CellResult c;
        c.setup.kind = static_cast<EnsembleKind>(j.at("kind").get<int>());
        c.setup.n = j.at("n").get<Index>();
        c.setup.p = j.at("p").get<Index>();
        c.s = j.at("s").get<Index>();
        c.noise = j.at("noise").get<double>();
        c.method = parse_method(j.at("method").get<std::string>());
        c.truncated = j.at("truncated").get<bool>();
        c.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& r : j.at("records")) {
            TrialRecord t;
            t.trial = r.at(0).get<Index>();
            t.success = r.at(1).get<bool>();
            t.false_positives = r.at(2).get<Index>();
            t.false_negatives = r.at(3).get<Index>();
            t.relative_error = r.at(4).get<double>();
            t.iterations = r.at(5).get<int>();
            t.converged = r.at(6).get<bool>();
            c.records.push_back(t);
        }
        c.trials = static_cast<Index>(c.records.size());
        for (const auto& t : c.records) c.successes += t.success;
        c.success_rate = c.trials ? static_cast<double>(c.successes) / static_cast<double>(c.trials) : 0.0;
        c.standard_error = c.trials ? std::sqrt(c.success_rate * (1.0 - c.success_rate) / static_cast<double>(c.trials)) : 0.0;
        out.push_back(std::move(c));
    }
    return out;
}

/// Reads the journal, keeps well-formed lines of this configuration and rewrites the file
/// without any torn trailing line.
std::map<std::string, std::vector<CellResult>> load_journal(const fs::path& path, const std::string& hash) {
    std::map<std::string, std::vector<CellResult>> cells;
    if (!fs::exists(path)) return cells;
    std::ifstream in(path);
    std::string line, kept;
    while (std::getline(in, line)) {
        try {
            const json j = json::parse(line);
            if (j.at("config_hash").get<std::string>() != hash) continue;
            cells[j.at("key").get<std::string>()] = cells_from_json(j.at("cells"));
            kept += line + "\n";
        } catch (const std::exception&) {
            // torn or foreign line
        }
    }
    write_file_atomic(path, kept);
    return cells;
}

std::string csv_of(void (*writer)(std::ostream&, const ExperimentResult&), const ExperimentResult& r) {
    std::ostringstream out;
    writer(out, r);
    return out.str();
}

void write_manifest(const fs::path& out, const RunConfig& c, const std::string& hash, bool complete,
                    const std::vector<std::string>& files) {
    json m;
    m["config_hash"] = hash;
    m["seed"] = std::to_string(c.seed);
    m["study"] = to_string(c.study);
    m["complete"] = complete;
    if (c.study == Study::ExtendedObject) {
        m["noise"] = {{"model", to_string(c.noise.model)}, {"level", c.noise.level}};
        m["noiseless"] = c.noise.model == NoiseModel::None || c.noise.level == 0.0;
    } else {
        m["noise"] = {{"model", to_string(experiment_spec(c).noise_model)}, {"levels", c.noise_levels}};
        m["noiseless"] = std::all_of(c.noise_levels.begin(), c.noise_levels.end(), [](double v) { return v == 0.0; });
    }
    m["files"] = json::array();
    for (const auto& f : files) m["files"].push_back({{"path", f}, {"config_hash", hash}, {"seed", std::to_string(c.seed)}});
    write_file_atomic(out / "manifest.json", m.dump(2) + "\n");
}

int run_extended(const RunConfig& c, const fs::path& out) {
    const GrayImage image = c.image.empty() ? desk_glyph() : read_pgm(c.image);
    const auto spec = extended_spec(c);
    auto result = extended_object_study(image, spec);
    result.config_hash = config_hash(c);
    const std::string hash = hex64(result.config_hash);
    std::ostringstream csv;
    write_extended_csv(csv, result);
    std::vector<std::string> files = {"extended.csv", "truth.pgm"};
    write_csv(out / "extended.csv", c, csv.str());
    const int side = c.grid_side;
    const CVector& x = result.scene.scene.values();
    const double top = x.size() ? x.cwiseAbs().maxCoeff() : 1.0;
    write_pgm(out / "truth.pgm", lattice_image(x, side), 0.0, top > 0 ? top : 1.0, provenance(c));
    for (std::size_t k = 0; k < result.trials.size(); ++k) {
        const std::string name = "reconstruction_" + std::to_string(k) + ".pgm";
        write_pgm(out / name, lattice_image(result.trials[k].estimate, side), 0.0, top > 0 ? top : 1.0, provenance(c));
        files.push_back(name);
    }
    KeyValueText kv;
    kv.add("median_relative_error", result.median_relative_error);
    kv.add("sparsity", result.scene.scene.sparsity());
    kv.add("l1_discretization_error", result.scene.l1_error);
    add_provenance(kv, c);
    write_file_atomic(out / "summary.txt", kv.text());
    files.push_back("summary.txt");
    write_manifest(out, c, hash, true, files);
    std::cout << "extended-object: median relative error " << format_double(result.median_relative_error) << " over "
              << result.trials.size() << " seeds\n";
    return 0;
}

int cmd_experiment(const CommonOptions& o, std::optional<Index> max_cells) {
    const RunConfig c = resolve_config(o);
    const fs::path out = o.out;
    fs::create_directories(out);
    if (c.study == Study::ExtendedObject) return run_extended(c, out);

    ExperimentSpec spec = experiment_spec(c);
    spec.max_new_cells = max_cells;
    const std::string hash = hex64(config_hash(c));
    const fs::path journal_path = out / "journal.jsonl";
    auto journal = load_journal(journal_path, hash);
    std::ofstream journal_out(journal_path, std::ios::app);
    CellStore store;
    store.load = [&](const std::string& key) -> std::optional<std::vector<CellResult>> {
        const auto it = journal.find(key);
        if (it == journal.end()) return std::nullopt;
        return it->second;
    };
    store.save = [&](const std::string& key, const std::vector<CellResult>& cells) {
        json line = {{"config_hash", hash}, {"seed", std::to_string(c.seed)}, {"key", key}, {"cells", cells_to_json(cells)}};
        journal_out << line.dump() << "\n";
        journal_out.flush();
    };

    ExperimentResult result;
    double max_gap = 0.0;
    switch (c.study) {
    case Study::SuccessCurve: result = success_curve(spec, store); break;
    case Study::RecoverableCount: result = recoverable_count_sweep(spec, store); break;
    case Study::Superresolution: result = superresolution_study(spec, store); break;
    case Study::NoiseRobustness: result = noise_robustness(spec, store); break;
    case Study::ModelMismatch: {
        const auto mm = model_mismatch_study(spec, store);
        result = mm.result;
        max_gap = mm.max_gap;
        break;
    }
    case Study::ExtendedObject: break;
    }
    // outputs carry the CLI config hash rather than the internal spec hash
    result.config_hash = config_hash(c);
    if (!result.complete) {
        write_manifest(out, c, hash, false, {"journal.jsonl"});
        std::cout << "stopped after " << *max_cells << " new cells; rerun to resume\n";
        return 0;
    }
    std::vector<std::string> files = {"cells.csv", "trials.csv", "counts.csv", "journal.jsonl"};
    write_csv(out / "cells.csv", c, csv_of(write_cells_csv, result));
    write_csv(out / "trials.csv", c, csv_of(write_trials_csv, result));
    write_csv(out / "counts.csv", c, csv_of(write_counts_csv, result));
    if (c.study == Study::ModelMismatch) {
        KeyValueText kv;
        kv.add("max_gap", max_gap);
        add_provenance(kv, c);
        write_file_atomic(out / "mismatch.txt", kv.text());
        files.push_back("mismatch.txt");
    }
    write_manifest(out, c, hash, true, files);
    std::cout << to_string(c.study) << ": " << result.cells.size() << " cells written to " << out.string() << "\n";
    for (const auto& rc : result.counts)
        if (c.study == Study::RecoverableCount)
            std::cout << "  " << setup_label(rc.setup) << " n=" << rc.setup.n << " p=" << rc.setup.p << " "
                      << to_string(rc.method) << " s*=" << rc.s_star << "\n";
    return 0;
}

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
    app->add_option("--preset", o.preset, "bundled preset (fig1-desk, fig4-desk, fig5-desk, fig6-desk, fig8-desk)");
    app->add_option("--seed", o.seed, "root seed (overrides run.seed)");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--threads", o.threads, "worker threads (overrides run.threads)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imaging with random illumination: sensing matrices, diagnostics, sparse recovery and Monte Carlo "
                 "studies.\n\n"
                 "Settings resolve as: schema defaults, then --preset, then --config, then command-line flags.\n\n"
                 "Seeds: every random draw derives from run.seed through child_seed(parent, k) = "
                 "splitmix64(parent + (k + 1) * 0x9e3779b97f4a7c15) with std::mt19937_64 generators. Streams off the root: sensors k=0, "
                 "illuminations k=1, scene k=2, noise k=3. In experiments each cell uses "
                 "child_seed(root, fnv1a64(\"n=<n>;p=<p>;s=<s>;noise=<level>\")) so every set-up and method sees "
                 "the same scenes, trial t uses child_seed(cell, t), and its four streams branch off that as above.\n\n" +
                 schema_help()};
    app.require_subcommand(1);
    CommonOptions opts;
    std::string matrix_path;
    std::optional<Index> max_cells;

    auto* build = app.add_subcommand("build", "build a sensing matrix and write it with its metadata");
    add_common(build, opts);
    auto* analyze = app.add_subcommand("analyze", "coherence diagnostics and theoretical predictions");
    add_common(analyze, opts);
    analyze->add_option("--matrix", matrix_path, "analyze a stored matrix instead of building one");
    auto* recover = app.add_subcommand("recover", "synthesize one scene and recover it");
    add_common(recover, opts);
    recover->add_option("--method", opts.method, "ost | omp | lasso | bpdn | sp");
    recover->add_option("--gamma", opts.gamma, "Lasso multiplier on sigma (default 2 sqrt(2 ln N))");
    recover->add_option("--sigma", opts.sigma, "noise standard deviation");
    recover->add_option("--epsilon", opts.epsilon, "noise-norm budget for OMP and BPDN");
    recover->add_option("--tau", opts.tau, "OST threshold: a number, auto, or half-xmin");
    recover->add_option("--max-iterations", opts.max_iterations, "iteration cap for iterative solvers");
    auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo study (resumable)");
    add_common(experiment, opts);
    experiment->add_option("--max-cells", max_cells, "stop after this many newly computed cells");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*build) return cmd_build(opts);
        if (*analyze) return cmd_analyze(opts, matrix_path);
        if (*recover) return cmd_recover(opts);
        if (*experiment) return cmd_experiment(opts, max_cells);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
