#include "rilab/config.hpp"

#include "rilab/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace rilab {

namespace {

struct Preset {
    const char* name;
    const char* text;
};

const Preset kPresets[] = {
#include "presets.inc"
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& expected) {
    throw ValidationError("invalid value '" + value + "' for " + key + " (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        bad(key, v, "a finite number");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, v, "an integer");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) bad(key, v, "an unsigned 64-bit integer");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, v, "true or false");
}

Index positive(const std::string& key, const std::string& v) {
    const long long x = to_int(key, v);
    if (x < 1) bad(key, v, "a positive integer");
    return static_cast<Index>(x);
}

Index non_negative(const std::string& key, const std::string& v) {
    const long long x = to_int(key, v);
    if (x < 0) bad(key, v, "a non-negative integer");
    return static_cast<Index>(x);
}

double positive_real(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (!(x > 0.0)) bad(key, v, "a positive number");
    return x;
}

double non_negative_real(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (!(x >= 0.0)) bad(key, v, "a non-negative number");
    return x;
}

template <typename E>
E pick(const std::string& key, const std::string& v, const std::vector<std::pair<const char*, E>>& options) {
    std::string names;
    for (const auto& [name, value] : options) {
        if (v == name) return value;
        names += (names.empty() ? "" : " | ") + std::string(name);
    }
    bad(key, v, names);
}

template <typename E>
std::string name_of(E value, const std::vector<std::pair<const char*, E>>& options) {
    for (const auto& [name, v] : options)
        if (v == value) return name;
    return "?";
}

const std::vector<std::pair<const char*, EnsembleKind>> kKinds = {{"ri", EnsembleKind::PointParaxial},
                                                                  {"ri-exact", EnsembleKind::PointExact},
                                                                  {"ri-extended", EnsembleKind::Extended},
                                                                  {"mr", EnsembleKind::Multistatic}};
const std::vector<std::pair<const char*, GreenKind>> kGreens = {{"paraxial", GreenKind::Paraxial},
                                                                {"exact", GreenKind::Exact}};
const std::vector<std::pair<const char*, ValueKind>> kValues = {{"positive-real", ValueKind::PositiveReal},
                                                                {"signed-real", ValueKind::SignedReal},
                                                                {"complex-phase", ValueKind::ComplexPhase}};
const std::vector<std::pair<const char*, PixelateMode>> kModes = {{"embed", PixelateMode::Embed},
                                                                  {"resample", PixelateMode::Resample}};
const std::vector<std::pair<const char*, NoiseModel>> kNoise = {{"none", NoiseModel::None},
                                                                {"complex-gaussian", NoiseModel::ComplexGaussian},
                                                                {"relative-gaussian", NoiseModel::RelativeGaussian},
                                                                {"uniform-percent", NoiseModel::UniformPercent}};
const std::vector<std::pair<const char*, Method>> kMethods = {{"ost", Method::OST},
                                                              {"omp", Method::OMP},
                                                              {"lasso", Method::Lasso},
                                                              {"bpdn", Method::BPDN},
                                                              {"sp", Method::SubspacePursuit}};
const std::vector<std::pair<const char*, Study>> kStudies = {{"success-curve", Study::SuccessCurve},
                                                             {"recoverable-count", Study::RecoverableCount},
                                                             {"superresolution", Study::Superresolution},
                                                             {"noise-robustness", Study::NoiseRobustness},
                                                             {"model-mismatch", Study::ModelMismatch},
                                                             {"extended-object", Study::ExtendedObject}};
const std::vector<std::pair<const char*, SuccessCriterion>> kCriteria = {
    {"exact-support", SuccessCriterion::ExactSupport}, {"within-one-cell", SuccessCriterion::WithinOneCell}};
const std::vector<std::pair<const char*, OstRule>> kOstRules = {
    {"half-xmin", OstRule::HalfXmin}, {"theory", OstRule::Theory}, {"fixed", OstRule::Fixed}};

std::vector<Index> parse_index_list(const std::string& key, const std::string& v) {
    std::vector<Index> out;
    for (const auto& item : split(v, ',')) {
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const Index lo = non_negative(key, trim(item.substr(0, dash)));
            const Index hi = non_negative(key, trim(item.substr(dash + 1)));
            if (hi < lo) bad(key, v, "ranges written low-high");
            for (Index s = lo; s <= hi; ++s) out.push_back(s);
        } else {
            out.push_back(non_negative(key, item));
        }
    }
    if (out.empty()) bad(key, v, "a non-empty list");
    return out;
}

std::string render_index_list(const std::vector<Index>& v) {
    std::string out;
    for (Index x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
    return out;
}

std::vector<Setup> parse_setups(const std::string& key, const std::string& v) {
    std::vector<Setup> out;
    for (const auto& item : split(v, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 3) bad(key, v, "entries kind:n[:p]");
        Setup s;
        s.kind = pick(key, parts[0], kKinds);
        s.n = positive(key, parts[1]);
        s.p = parts.size() == 3 ? positive(key, parts[2]) : 1;
        out.push_back(s);
    }
    return out;
}

std::string render_setups(const std::vector<Setup>& v) {
    std::string out;
    for (const auto& s : v)
        out += (out.empty() ? "" : ",") + name_of(s.kind, kKinds) + ":" + std::to_string(s.n) + ":" + std::to_string(s.p);
    return out;
}

struct Key {
    const char* section;
    const char* name;
    const char* type;
    const char* help;
    std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : "unset"; }

const std::vector<Key>& schema() {
    using C = RunConfig;
    using S = const std::string&;
    static const std::vector<Key> keys = {
        {"geometry", "wavelength", "real > 0", "wavelength lambda",
         [](C& c, S k, S v) { c.wavelength = positive_real(k, v); }, [](const C& c) { return format_double(c.wavelength); }},
        {"geometry", "z0", "real > 0", "distance from the object plane to the sensor plane",
         [](C& c, S k, S v) { c.z0 = positive_real(k, v); }, [](const C& c) { return format_double(c.z0); }},
        {"geometry", "aperture", "real > 0", "sensor aperture side A",
         [](C& c, S k, S v) { c.aperture = positive_real(k, v); }, [](const C& c) { return format_double(c.aperture); }},
        {"geometry", "grid_spacing", "real > 0", "lattice spacing",
         [](C& c, S k, S v) { c.grid_spacing = positive_real(k, v); },
         [](const C& c) { return format_double(c.grid_spacing); }},
        {"geometry", "grid_side", "int >= 1", "lattice side sqrt(N)",
         [](C& c, S k, S v) { c.grid_side = static_cast<int>(positive(k, v)); },
         [](const C& c) { return std::to_string(c.grid_side); }},
        {"geometry", "centered", "bool", "center lattice and aperture on the optical axis",
         [](C& c, S k, S v) { c.centered = to_bool(k, v); }, [](const C& c) { return std::string(c.centered ? "true" : "false"); }},

        {"ensemble", "kind", "ri | ri-exact | ri-extended | mr", "sensing model",
         [](C& c, S k, S v) { c.kind = pick(k, v, kKinds); }, [](const C& c) { return name_of(c.kind, kKinds); }},
        {"ensemble", "n", "int >= 1", "number of sensors (or transceivers)",
         [](C& c, S k, S v) { c.n = positive(k, v); }, [](const C& c) { return std::to_string(c.n); }},
        {"ensemble", "p", "int >= 1", "number of random illuminations",
         [](C& c, S k, S v) { c.p = positive(k, v); }, [](const C& c) { return std::to_string(c.p); }},
        {"ensemble", "forward_green", "paraxial | exact", "Green function used to synthesize data",
         [](C& c, S k, S v) { c.forward_green = pick(k, v, kGreens); },
         [](const C& c) { return name_of(c.forward_green, kGreens); }},

        {"scene", "s", "int >= 0", "number of point objects",
         [](C& c, S k, S v) { c.s = non_negative(k, v); }, [](const C& c) { return std::to_string(c.s); }},
        {"scene", "amplitude_lo", "real > 0", "smallest amplitude",
         [](C& c, S k, S v) { c.amplitudes.lo = positive_real(k, v); },
         [](const C& c) { return format_double(c.amplitudes.lo); }},
        {"scene", "amplitude_hi", "real > 0", "largest amplitude",
         [](C& c, S k, S v) { c.amplitudes.hi = positive_real(k, v); },
         [](const C& c) { return format_double(c.amplitudes.hi); }},
        {"scene", "value_kind", "positive-real | signed-real | complex-phase", "amplitude sign or phase",
         [](C& c, S k, S v) { c.value_kind = pick(k, v, kValues); }, [](const C& c) { return name_of(c.value_kind, kValues); }},
        {"scene", "normalize", "bool", "rescale the scene to unit norm",
         [](C& c, S k, S v) { c.normalize = to_bool(k, v); }, [](const C& c) { return std::string(c.normalize ? "true" : "false"); }},
        {"scene", "image", "path", "graymap for extended objects (empty: built-in glyph)",
         [](C& c, S, S v) { c.image = v; }, [](const C& c) { return c.image; }},
        {"scene", "pixelate", "embed | resample", "how the graymap maps onto the lattice",
         [](C& c, S k, S v) { c.pixelate = pick(k, v, kModes); }, [](const C& c) { return name_of(c.pixelate, kModes); }},

        {"noise", "model", "none | complex-gaussian | relative-gaussian | uniform-percent", "noise model",
         [](C& c, S k, S v) { c.noise.model = pick(k, v, kNoise); }, [](const C& c) { return name_of(c.noise.model, kNoise); }},
        {"noise", "level", "real >= 0", "sigma, or the fraction of ||Y|| for relative models",
         [](C& c, S k, S v) { c.noise.level = non_negative_real(k, v); },
         [](const C& c) { return format_double(c.noise.level); }},

        {"solver", "method", "ost | omp | lasso | bpdn | sp", "recovery method for `recover`",
         [](C& c, S k, S v) { c.method = pick(k, v, kMethods); }, [](const C& c) { return name_of(c.method, kMethods); }},
        {"solver", "max_iterations", "int >= 1", "Lasso iteration cap",
         [](C& c, S k, S v) { c.solver.max_iterations = static_cast<int>(positive(k, v)); },
         [](const C& c) { return std::to_string(c.solver.max_iterations); }},
        {"solver", "tolerance", "real > 0", "Lasso KKT tolerance",
         [](C& c, S k, S v) { c.solver.tolerance = positive_real(k, v); },
         [](const C& c) { return format_double(c.solver.tolerance); }},
        {"solver", "gamma", "real > 0 | unset", "Lasso multiplier (unset: 2 sqrt(2 ln N))",
         [](C& c, S k, S v) { c.solver.gamma = v == "unset" ? std::nullopt : std::optional<double>(positive_real(k, v)); },
         [](const C& c) { return opt_double(c.solver.gamma); }},
        {"solver", "sigma", "real >= 0 | unset", "noise level given to the Lasso and to tau = auto",
         [](C& c, S k, S v) { c.sigma = v == "unset" ? std::nullopt : std::optional<double>(non_negative_real(k, v)); },
         [](const C& c) { return opt_double(c.sigma); }},
        {"solver", "epsilon", "real >= 0 | unset", "BPDN budget and OMP stopping residual (unset: noise norm)",
         [](C& c, S k, S v) { c.solver.epsilon = v == "unset" ? std::nullopt : std::optional<double>(non_negative_real(k, v)); },
         [](const C& c) { return opt_double(c.solver.epsilon); }},
        {"solver", "tau", "real >= 0 | auto | half-xmin", "OST threshold",
         [](C& c, S k, S v) {
             if (v == "auto") c.tau_rule = TauRule::Auto;
             else if (v == "half-xmin") c.tau_rule = TauRule::HalfXmin;
             else {
                 c.tau_rule = TauRule::Value;
                 c.tau = non_negative_real(k, v);
             }
         },
         [](const C& c) {
             return c.tau_rule == TauRule::Auto ? std::string("auto")
                                                : c.tau_rule == TauRule::HalfXmin ? std::string("half-xmin") : format_double(c.tau);
         }},
        {"solver", "support_threshold", "real >= 0", "relative magnitude below which entries are zeroed",
         [](C& c, S k, S v) { c.solver.support_threshold = non_negative_real(k, v); },
         [](const C& c) { return format_double(c.solver.support_threshold); }},
        {"solver", "noiseless_lambda_ratio", "real > 0", "noiseless Lasso penalty as a fraction of ||Phi^* Y||_inf",
         [](C& c, S k, S v) { c.solver.noiseless_lambda_ratio = positive_real(k, v); },
         [](const C& c) { return format_double(c.solver.noiseless_lambda_ratio); }},
        {"solver", "bpdn_max_steps", "int >= 1", "BPDN bisection cap",
         [](C& c, S k, S v) { c.solver.bpdn_max_steps = static_cast<int>(positive(k, v)); },
         [](const C& c) { return std::to_string(c.solver.bpdn_max_steps); }},
        {"solver", "bpdn_rel_tol", "real > 0", "BPDN residual tolerance relative to ||Y||",
         [](C& c, S k, S v) { c.solver.bpdn_rel_tol = positive_real(k, v); },
         [](const C& c) { return format_double(c.solver.bpdn_rel_tol); }},
        {"solver", "real_only", "bool", "restrict Lasso/BPDN unknowns to real values",
         [](C& c, S k, S v) { c.solver.real_only = to_bool(k, v); },
         [](const C& c) { return std::string(c.solver.real_only ? "true" : "false"); }},
        {"solver", "sp_max_iterations", "int >= 1", "subspace pursuit iteration cap",
         [](C& c, S k, S v) { c.solver.sp_max_iterations = static_cast<int>(positive(k, v)); },
         [](const C& c) { return std::to_string(c.solver.sp_max_iterations); }},

        {"analysis", "delta", "real in (0,1)", "failure probability in the mesh condition",
         [](C& c, S k, S v) {
             c.delta = positive_real(k, v);
             if (c.delta >= 1.0) bad(k, v, "a number in (0, 1)");
         },
         [](const C& c) { return format_double(c.delta); }},
        {"analysis", "t", "real > 0 | unset", "deviation parameter of the OST guarantee",
         [](C& c, S k, S v) { c.t = v == "unset" ? std::nullopt : std::optional<double>(positive_real(k, v)); },
         [](const C& c) { return opt_double(c.t); }},
        {"analysis", "c0", "real > 0", "sparsity constant", [](C& c, S k, S v) { c.c0 = positive_real(k, v); },
         [](const C& c) { return format_double(c.c0); }},
        {"analysis", "a0", "real > 0", "coherence constant", [](C& c, S k, S v) { c.a0 = positive_real(k, v); },
         [](const C& c) { return format_double(c.a0); }},
        {"analysis", "c1", "real > 0", "OST coherence constant", [](C& c, S k, S v) { c.c1 = positive_real(k, v); },
         [](const C& c) { return format_double(c.c1); }},
        {"analysis", "bound_trials", "int >= 0", "Monte Carlo trials for the coherence bound check (0: skip)",
         [](C& c, S k, S v) { c.bound_trials = non_negative(k, v); },
         [](const C& c) { return std::to_string(c.bound_trials); }},

        {"experiment", "study",
         "success-curve | recoverable-count | superresolution | noise-robustness | model-mismatch | extended-object",
         "which study `experiment` runs", [](C& c, S k, S v) { c.study = pick(k, v, kStudies); },
         [](const C& c) { return name_of(c.study, kStudies); }},
        {"experiment", "setups", "list of kind:n[:p]", "set-ups (empty: fixed_product, quadratic_n, or the ensemble block)",
         [](C& c, S k, S v) { c.setups = parse_setups(k, v); }, [](const C& c) { return render_setups(c.setups); }},
        {"experiment", "fixed_product", "int >= 0", "all divisor pairs n p = value (0: off)",
         [](C& c, S k, S v) { c.fixed_product = non_negative(k, v); },
         [](const C& c) { return std::to_string(c.fixed_product); }},
        {"experiment", "quadratic_n", "list of odd ints", "set-ups (n, (n+1)/2)",
         [](C& c, S k, S v) { c.quadratic_n = v.empty() ? std::vector<Index>{} : parse_index_list(k, v); },
         [](const C& c) { return render_index_list(c.quadratic_n); }},
        {"experiment", "sparsities", "list of ints or ranges a-b", "sparsity axis",
         [](C& c, S k, S v) { c.sparsities = parse_index_list(k, v); },
         [](const C& c) { return render_index_list(c.sparsities); }},
        {"experiment", "noise_levels", "list of reals >= 0", "noise axis (level of the [noise] model)",
         [](C& c, S k, S v) {
             c.noise_levels.clear();
             for (const auto& item : split(v, ',')) c.noise_levels.push_back(non_negative_real(k, item));
             if (c.noise_levels.empty()) bad(k, v, "a non-empty list");
         },
         [](const C& c) {
             std::string out;
             for (double x : c.noise_levels) out += (out.empty() ? "" : ",") + format_double(x);
             return out;
         }},
        {"experiment", "methods", "list of ost | omp | lasso | bpdn | sp", "methods run on every trial",
         [](C& c, S k, S v) {
             c.methods.clear();
             for (const auto& item : split(v, ',')) c.methods.push_back(pick(k, item, kMethods));
             if (c.methods.empty()) bad(k, v, "a non-empty list");
         },
         [](const C& c) {
             std::string out;
             for (Method m : c.methods) out += (out.empty() ? "" : ",") + name_of(m, kMethods);
             return out;
         }},
        {"experiment", "trials", "int >= 1", "trials per cell",
         [](C& c, S k, S v) { c.trials = positive(k, v); }, [](const C& c) { return std::to_string(c.trials); }},
        {"experiment", "threshold", "real in (0,1]", "success rate defining s*",
         [](C& c, S k, S v) {
             c.threshold = positive_real(k, v);
             if (c.threshold > 1.0) bad(k, v, "a number in (0, 1]");
         },
         [](const C& c) { return format_double(c.threshold); }},
        {"experiment", "success", "exact-support | within-one-cell", "trial success criterion",
         [](C& c, S k, S v) { c.success = pick(k, v, kCriteria); }, [](const C& c) { return name_of(c.success, kCriteria); }},
        {"experiment", "ost_rule", "half-xmin | theory | fixed", "OST threshold in sweeps (fixed uses solver.tau)",
         [](C& c, S k, S v) { c.ost_rule = pick(k, v, kOstRules); }, [](const C& c) { return name_of(c.ost_rule, kOstRules); }},
        {"experiment", "scan_stop_after", "int >= 1", "consecutive below-threshold cells ending an s scan",
         [](C& c, S k, S v) { c.scan_stop_after = positive(k, v); },
         [](const C& c) { return std::to_string(c.scan_stop_after); }},
        {"experiment", "batch", "int >= 1", "trials between early-stop checks in s scans",
         [](C& c, S k, S v) { c.batch = positive(k, v); }, [](const C& c) { return std::to_string(c.batch); }},
        {"experiment", "seeds", "int >= 1", "independent reconstructions in the extended-object study",
         [](C& c, S k, S v) { c.seeds = positive(k, v); }, [](const C& c) { return std::to_string(c.seeds); }},

        {"run", "seed", "u64", "root seed", [](C& c, S k, S v) { c.seed = to_u64(k, v); },
         [](const C& c) { return std::to_string(c.seed); }},
        {"run", "threads", "int >= 0", "worker threads (0: hardware concurrency); does not affect results",
         [](C& c, S k, S v) { c.threads = static_cast<unsigned>(non_negative(k, v)); },
         [](const C& c) { return std::to_string(c.threads); }},
    };
    return keys;
}

} // namespace

std::string to_string(Study study) { return name_of(study, kStudies); }

ImagingGeometry RunConfig::geometry() const {
    return ImagingGeometry(wavelength, z0, aperture, grid_spacing, grid_side, centered);
}

RunConfig parse_config(const std::string& text, RunConfig config) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config syntax: ") + e.what());
    }
    std::map<std::string, const Key*> index;
    for (const auto& k : schema()) index[std::string(k.section) + "." + k.name] = &k;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ValidationError("config key '" + section + "' must sit inside a section");
        for (const auto& [name, value] : body) {
            const std::string full = section + "." + name;
            const auto it = index.find(full);
            if (it == index.end()) throw ValidationError("unknown config key '" + full + "'");
            it->second->set(config, full, trim(value.data()));
        }
    }
    if (config.amplitudes.hi < config.amplitudes.lo)
        throw ValidationError("scene.amplitude_hi must be >= scene.amplitude_lo");
    return config;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError&) {
        throw ValidationError("cannot read config file " + path.string());
    }
    return parse_config(text, base);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
}

std::string preset_text(const std::string& name) {
    for (const auto& p : kPresets)
        if (name == p.name) return p.text;
    std::string names;
    for (const auto& p : kPresets) names += (names.empty() ? "" : ", ") + std::string(p.name);
    throw ValidationError("unknown preset '" + name + "' (available: " + names + ")");
}

std::string canonical_text(const RunConfig& config) {
    std::string out;
    for (const auto& k : schema()) {
        if (std::string(k.section) == "run" && std::string(k.name) == "threads") continue;
        out += std::string(k.section) + "." + k.name + "=" + k.get(config) + "\n";
    }
    return out;
}

std::uint64_t config_hash(const RunConfig& config) { return fnv1a64(canonical_text(config)); }

std::string schema_help() {
    const RunConfig defaults;
    std::ostringstream out;
    out << "Config files are INI: [section] headers, key = value lines, ';' or '#' comments.\n"
           "Unknown sections or keys are errors (exit code 2).\n";
    std::string section;
    for (const auto& k : schema()) {
        if (section != k.section) {
            section = k.section;
            out << "\n[" << section << "]\n";
        }
        std::string def = k.get(defaults);
        if (def.empty()) def = "\"\"";
        out << "  " << k.name << " (" << k.type << ", default " << def << ")\n      " << k.help << "\n";
    }
    return out.str();
}

ExperimentSpec experiment_spec(const RunConfig& c) {
    ExperimentSpec spec;
    spec.geometry = c.geometry();
    if (!c.setups.empty()) spec.setups = c.setups;
    else if (c.fixed_product > 0) spec.setups = fixed_product_setups(c.fixed_product, c.kind);
    else if (!c.quadratic_n.empty()) spec.setups = quadratic_setups(c.quadratic_n, c.kind);
    else spec.setups = {{c.kind, c.n, c.p}};
    spec.sparsities = c.sparsities;
    spec.noise_levels = c.noise_levels;
    spec.noise_model = c.noise.model == NoiseModel::None ? NoiseModel::RelativeGaussian : c.noise.model;
    spec.methods = c.methods;
    spec.trials = c.trials;
    spec.success = c.success;
    spec.threshold = c.threshold;
    spec.value_kind = c.value_kind;
    spec.amplitudes = c.amplitudes;
    spec.normalize_scene = c.normalize;
    spec.solver = c.solver;
    spec.ost_rule = c.ost_rule;
    spec.ost_tau = c.tau;
    spec.forward_green = c.forward_green;
    spec.scan = c.study == Study::RecoverableCount;
    spec.scan_stop_after = c.scan_stop_after;
    spec.batch = c.batch;
    spec.seed = c.seed;
    spec.threads = c.threads;
    return spec;
}

ExtendedSpec extended_spec(const RunConfig& c) {
    ExtendedSpec spec;
    spec.geometry = c.geometry();
    spec.n = c.n;
    spec.p = c.p;
    spec.noise = c.noise;
    spec.mode = c.pixelate;
    spec.seeds = c.seeds;
    spec.seed = c.seed;
    spec.solver = c.solver;
    spec.threads = c.threads;
    return spec;
}

} // namespace rilab
