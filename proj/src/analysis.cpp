#include "rilab/analysis.hpp"

#include "rilab/parallel.hpp"
#include "rilab/random.hpp"
#include "rilab/sensing.hpp"

#include <cmath>
#include <sstream>

namespace rilab {

double welch_lower_bound(Index m, Index N) {
    if (N < 2 || m < 1 || m > N) throw ValidationError("welch bound needs 1 <= m <= N and N >= 2");
    return std::sqrt(static_cast<double>(N - m) / (static_cast<double>(m) * static_cast<double>(N - 1)));
}

RicBound ric_upper_from_mu(double mu, Index s) {
    if (s < 1) throw ValidationError("sparsity must be >= 1");
    const double b = mu * static_cast<double>(s - 1);
    return {std::min(b, 1.0), b >= 1.0};
}

double ost_threshold(Index N, double sigma, double mu) {
    if (N < 2) throw ValidationError("threshold needs N >= 2");
    return 4.0 * std::sqrt(std::log(static_cast<double>(N))) * std::max(sigma, 12.0 * std::sqrt(2.0) * mu);
}

std::string to_string(PredictMethod method) {
    switch (method) {
    case PredictMethod::OMP: return "omp";
    case PredictMethod::OST: return "ost";
    case PredictMethod::LassoRI: return "lasso-ri";
    case PredictMethod::LassoMR: return "lasso-mr";
    case PredictMethod::BPDN: return "bpdn";
    }
    return "unknown";
}

double mesh_constant_K(Index N, double delta) {
    if (N < 1 || !(delta > 0.0)) throw ValidationError("mesh constant needs N >= 1 and delta > 0");
    const double n2 = static_cast<double>(N) * static_cast<double>(N);
    return std::sqrt(2.0 * std::log(2.0 * n2 / delta));
}

double separation_expectation(const ImagingGeometry& g, int d) {
    const int side = g.grid_side();
    // xi = q A/side - offset; the offset only contributes a unimodular factor.
    const double phase = (g.aperture() / side) * g.wavenumber() * d * g.grid_spacing() / g.standoff();
    const double half = 0.5 * phase;
    const double denom = std::sin(half);
    if (std::abs(denom) < 1e-300) return 1.0;
    return std::abs(std::sin(side * half) / (side * denom));
}

double a_parameter(const ImagingGeometry& g) {
    const int side = g.grid_side();
    if (side == 1) return 0.0;
    std::vector<double> e(static_cast<std::size_t>(side));
    for (int d = 0; d < side; ++d) e[static_cast<std::size_t>(d)] = d == 0 ? 1.0 : separation_expectation(g, d);
    double a = 0.0;
    for (int dx = 0; dx < side; ++dx)
        for (int dy = 0; dy < side; ++dy) {
            if (dx == 0 && dy == 0) continue;
            a = std::max(a, e[static_cast<std::size_t>(dx)] * e[static_cast<std::size_t>(dy)]);
        }
    return a;
}

double density_bound_rho(const ImagingGeometry& g) { return 1.0 / rayleigh_ratio(g); }

BpdnConstants bpdn_error_constants(double d) {
    const double limit = std::sqrt(2.0) - 1.0;
    if (!(d >= 0.0) || d >= limit) throw ValidationError("delta_2s must lie in [0, sqrt2 - 1)");
    const double den = 1.0 - (1.0 + std::sqrt(2.0)) * d;
    return {2.0 * (1.0 - (1.0 - std::sqrt(2.0)) * d) / den, 4.0 * std::sqrt(1.0 + d) / den};
}

namespace {

template <typename T>
T need(const std::optional<T>& v, const char* symbol) {
    if (!v) throw MissingInputError(symbol);
    return *v;
}

/// Largest integer strictly below `bound`, floored at 0.
Index strict_cap(double bound) {
    if (!(bound > 0.0)) return 0;
    return std::max<Index>(0, static_cast<Index>(std::ceil(bound)) - 1);
}

Index floor_cap(double bound) { return bound > 0.0 ? static_cast<Index>(std::floor(bound)) : 0; }

double lasso_tail(double N, double s) {
    // 2 N^{-1} ((2 pi ln N)^{-1/2} + s N^{-1}); the O(N^{-2 ln 2}) remainder is not evaluated
    return 2.0 / N * (1.0 / std::sqrt(2.0 * kPi * std::log(N)) + s / N);
}

void finish(TheoryPrediction& p) {
    for (const auto& [name, ok] : p.conditions) p.premise_holds = p.premise_holds && ok;
    if (p.probability_lower_bound) p.vacuous = *p.probability_lower_bound <= 0.0;
}

TheoryPrediction predict_omp(const PredictionInputs& in) {
    TheoryPrediction out;
    out.method = PredictMethod::OMP;
    const double mu = need(in.mu, "mu");
    const double eps = need(in.epsilon, "epsilon");
    double bound = 0.5 * (1.0 + 1.0 / mu);
    if (eps > 0.0) bound -= eps / (mu * need(in.x_min, "x_min"));
    out.sparsity_cap = strict_cap(bound);
    out.parameters["sparsity_bound"] = bound;
    out.probability_lower_bound = 1.0;
    if (in.s) {
        const double s = static_cast<double>(*in.s);
        out.conditions["sparsity"] = s < bound;
        const double den = 1.0 - mu * (s - 1.0);
        out.parameters["error_bound_squared"] = den > 0.0 ? eps * eps / den : std::numeric_limits<double>::infinity();
    }
    out.formula = "s < (1 + 1/mu)/2 - eps/(mu X_min); ||X^ - X||^2 <= eps^2/(1 - mu(s-1))";
    return out;
}

TheoryPrediction predict_ost(const PredictionInputs& in) {
    TheoryPrediction out;
    out.method = PredictMethod::OST;
    const Index N = need(in.N, "N");
    const double mu = need(in.mu, "mu");
    const double sigma = need(in.sigma, "sigma");
    Index m = 0;
    if (in.m) m = *in.m;
    else m = need(in.n, "n") * need(in.p, "p");
    const double logN = std::log(static_cast<double>(N));
    const double tau = ost_threshold(N, sigma, mu);
    out.threshold = tau;
    out.x_min_requirement = 2.0 * tau;
    out.sparsity_cap = floor_cap(static_cast<double>(m) / (2.0 * logN));
    const double sqrt_m = std::sqrt(static_cast<double>(m));
    out.conditions["coherence"] = mu <= in.c1 / sqrt_m && in.c1 / sqrt_m <= 1.0 / std::sqrt(10.0 * logN);
    if (in.nu) out.conditions["average_coherence"] = *in.nu <= 12.0 * mu / sqrt_m;
    if (in.s) out.conditions["sparsity"] = *in.s <= out.sparsity_cap;
    if (in.x_min) out.conditions["signal_strength"] = *in.x_min > 2.0 * tau;
    if (in.t && in.delta && in.n && in.p) {
        const double t = *in.t, n = static_cast<double>(*in.n), p = static_cast<double>(*in.p);
        const double Nd = static_cast<double>(N);
        out.probability_lower_bound = 1.0 - 2.0 * *in.delta - 4.0 * t * std::sqrt(2.0 / kPi) - 4.0 / std::sqrt(p) -
                                      4.0 / std::sqrt(n) -
                                      8.0 * Nd * std::exp(-12.0 * t * t * std::sqrt((Nd - 1.0) / (n * p)));
        if (in.K) {
            out.conditions["mesh"] = Nd * Nd <= *in.delta / 2.0 * std::exp(*in.K * *in.K / 2.0);
            out.conditions["data_count"] = n * p >= 40.0 * std::pow(*in.K, 4) * logN;
        }
        out.formula = "diffraction-limited OST guarantee with threshold tau*";
    } else {
        out.probability_lower_bound = 1.0 - 9.0 / static_cast<double>(N);
        out.formula = "OST guarantee P(S^ != S) <= 9/N";
    }
    out.parameters["tau_star"] = tau;
    return out;
}

TheoryPrediction predict_lasso_ri(const PredictionInputs& in) {
    TheoryPrediction out;
    out.method = PredictMethod::LassoRI;
    const Index N = need(in.N, "N");
    const Index n = need(in.n, "n");
    const Index p = need(in.p, "p");
    const double K = need(in.K, "K");
    const double delta = need(in.delta, "delta");
    // a <= 1 always; a single sensor uses that bound directly
    const double a = n == 1 && !in.a ? 1.0 : need(in.a, "a");
    const double Nd = static_cast<double>(N), nd = static_cast<double>(n), pd = static_cast<double>(p);
    const double logN = std::log(Nd);
    const double coh = a * K * std::sqrt(2.0) / std::sqrt(pd) + 2.0 * K * K / std::sqrt(nd * pd);
    out.sparsity_cap = floor_cap(in.c0 * nd * pd / (2.0 * logN));
    out.conditions["mesh"] = Nd * Nd <= delta / 2.0 * std::exp(K * K / 2.0);
    out.conditions["coherence"] = coh <= in.a0 / logN;
    out.parameters["coherence_bound"] = coh;
    out.parameters["gamma"] = 2.0 * std::sqrt(2.0 * logN);
    out.parameters["a"] = a;
    if (in.sigma) out.x_min_requirement = 8.0 * *in.sigma * std::sqrt(2.0 * logN);
    if (in.x_min && out.x_min_requirement) out.conditions["signal_strength"] = *in.x_min > *out.x_min_requirement;
    if (in.spectral_norm) {
        const double norm2 = *in.spectral_norm * *in.spectral_norm;
        out.parameters["operator_norm_cap"] = std::floor(in.c0 * Nd / (norm2 * logN));
    }
    const double s = in.s ? static_cast<double>(*in.s) : static_cast<double>(out.sparsity_cap);
    if (in.s) out.conditions["sparsity"] = *in.s <= out.sparsity_cap;
    const double rho = n > 1 ? need(in.rho, "rho") : 0.0;
    const double np = nd * pd;
    out.probability_lower_bound = 1.0 - 2.0 * delta - rho * nd * (nd - 1.0) * kPi / 2.0 * std::sqrt((np - 1.0) / Nd) -
                                  2.0 * nd * nd * pd * (pd - 1.0) * std::exp(-Nd / ((np - 1.0) * (np - 1.0))) -
                                  lasso_tail(Nd, s);
    out.formula = n == 1 ? "single-sensor Lasso: s <= c0 p/(2 ln N), (K sqrt2 + 2K^2)/sqrt p <= a0/ln N"
                         : "random-illumination Lasso: s <= c0 np/(2 ln N)";
    return out;
}

TheoryPrediction predict_lasso_mr(const PredictionInputs& in) {
    TheoryPrediction out;
    out.method = PredictMethod::LassoMR;
    const Index N = need(in.N, "N");
    const Index n = need(in.n, "n");
    const double K = need(in.K, "K");
    const double delta = need(in.delta, "delta");
    const double rho = need(in.rho, "rho");
    const double Nd = static_cast<double>(N), nd = static_cast<double>(n);
    const double logN = std::log(Nd);
    const double m = nd * (nd + 1.0) / 2.0;
    out.sparsity_cap = floor_cap(in.c0 * nd * (nd + 1.0) / (4.0 * logN));
    out.conditions["transceiver_count"] = nd >= K * K * logN / in.a0;
    out.conditions["data_count"] = m >= 40.0 * std::pow(K, 4) * logN;
    out.parameters["gamma"] = 2.0 * std::sqrt(2.0 * logN);
    if (in.sigma) out.x_min_requirement = 8.0 * *in.sigma * std::sqrt(2.0 * logN);
    if (in.x_min && out.x_min_requirement) out.conditions["signal_strength"] = *in.x_min > *out.x_min_requirement;
    const double s = in.s ? static_cast<double>(*in.s) : static_cast<double>(out.sparsity_cap);
    if (in.s) out.conditions["sparsity"] = *in.s <= out.sparsity_cap;
    out.probability_lower_bound = 1.0 - 2.0 * std::sqrt(2.0 * delta) -
                                  rho * std::pow(nd, 2.5) * std::pow(nd + 1.0, 2.5) /
                                      (kPi * std::pow(2.0, 2.5) * std::sqrt(Nd)) -
                                  lasso_tail(Nd, s);
    out.formula = "multistatic Lasso: s <= c0 n(n+1)/(4 ln N)";
    return out;
}

TheoryPrediction predict_bpdn(const PredictionInputs& in) {
    TheoryPrediction out;
    out.method = PredictMethod::BPDN;
    const double delta = need(in.delta, "delta");
    const double K = need(in.K, "K");
    const Index n = need(in.n, "n");
    const Index p = need(in.p, "p");
    const double a = n == 1 && !in.a ? 1.0 : need(in.a, "a");
    const double nd = static_cast<double>(n), pd = static_cast<double>(p);
    const double coh = a * K * std::sqrt(2.0) / std::sqrt(pd) + 2.0 * K * K / std::sqrt(nd * pd);
    const double bound = 0.5 + (1.0 / std::sqrt(2.0) - 0.5) / coh;
    out.sparsity_cap = strict_cap(bound);
    out.parameters["sparsity_bound"] = bound;
    out.parameters["coherence_bound"] = coh;
    if (in.mu) {
        // delta_2s <= mu (2s - 1) < sqrt2 - 1
        const double mu_bound = 0.5 * (1.0 + (std::sqrt(2.0) - 1.0) / *in.mu);
        out.parameters["measured_mu_cap"] = static_cast<double>(strict_cap(mu_bound));
    }
    if (in.s) out.conditions["sparsity"] = static_cast<double>(*in.s) < bound;
    if (in.N) {
        const double Nd = static_cast<double>(*in.N);
        out.conditions["mesh"] = Nd * Nd <= delta / 2.0 * std::exp(K * K / 2.0);
    }
    out.probability_lower_bound = 1.0 - 2.0 * delta;
    out.formula = "delta_2s < sqrt2 - 1 via delta_s <= mu (s-1): s < 1/2 + (1/sqrt2 - 1/2)/coherence_bound";
    return out;
}

} // namespace

TheoryPrediction predict(PredictMethod method, const PredictionInputs& inputs) {
    TheoryPrediction out;
    switch (method) {
    case PredictMethod::OMP: out = predict_omp(inputs); break;
    case PredictMethod::OST: out = predict_ost(inputs); break;
    case PredictMethod::LassoRI: out = predict_lasso_ri(inputs); break;
    case PredictMethod::LassoMR: out = predict_lasso_mr(inputs); break;
    case PredictMethod::BPDN: out = predict_bpdn(inputs); break;
    }
    out.parameters["c0"] = inputs.c0;
    out.parameters["a0"] = inputs.a0;
    out.parameters["c1"] = inputs.c1;
    finish(out);
    return out;
}

CoherenceBoundCheck coherence_bound_check(const ImagingGeometry& g, Index n, Index p, double K, double delta,
                                          Index trials, std::uint64_t seed, double nu_constant, unsigned threads) {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    const double N = static_cast<double>(g.grid_size());
    const double np = static_cast<double>(n * p);
    CoherenceBoundCheck out;
    out.trials = trials;
    out.a = a_parameter(g);
    if (!(nu_constant > 0.0)) nu_constant = 2.0 * std::log(8.0 * N / delta) / std::sqrt((N - 1.0) / np);
    out.nu_constant = nu_constant;

    out.mu.threshold = out.a * K * std::sqrt(2.0) / std::sqrt(static_cast<double>(p)) + 2.0 * K * K / std::sqrt(np);
    out.mu.theoretical_failure = 2.0 * delta;
    out.nu.threshold = nu_constant / np;
    out.nu.theoretical_failure = 8.0 * N * std::exp(-nu_constant / 2.0 * std::sqrt((N - 1.0) / np));
    out.norm.threshold = 2.0 * N / np;
    const double nd = static_cast<double>(n), pd = static_cast<double>(p);
    out.norm.theoretical_failure = density_bound_rho(g) * nd * (nd - 1.0) * kPi * std::sqrt(np - 1.0) / (2.0 * std::sqrt(N)) +
                                   2.0 * nd * nd * pd * (pd - 1.0) * std::exp(-N / ((np - 1.0) * (np - 1.0)));

    struct Sample {
        double mu, nu, norm2;
    };
    std::vector<Sample> samples(static_cast<std::size_t>(trials));
    parallel_for(samples.size(), threads, [&](std::size_t t) {
        const auto ts = child_seed(seed, t);
        const auto sensors = sample_sensors(g, n, child_seed(ts, stream::sensors));
        const auto ill = sample_illuminations(g, p, child_seed(ts, stream::illuminations));
        const auto ens = build_point_matrix(g, sensors, ill, GreenKind::Paraxial);
        const double sn = spectral_norm(ens.matrix);
        samples[t] = {worst_case_coherence(ens.matrix).mu, average_coherence(ens.matrix), sn * sn};
    });
    for (const auto& s : samples) {
        out.mu.exceed += s.mu > out.mu.threshold;
        out.nu.exceed += s.nu > out.nu.threshold;
        out.norm.exceed += s.norm2 >= out.norm.threshold;
        out.mean_mu += s.mu;
        out.mean_norm_squared += s.norm2;
    }
    const double T = static_cast<double>(trials);
    for (auto* b : {&out.mu, &out.nu, &out.norm}) {
        b->frequency = static_cast<double>(b->exceed) / T;
        b->standard_error = std::sqrt(b->frequency * (1.0 - b->frequency) / T);
    }
    out.mean_mu /= T;
    out.mean_norm_squared /= T;
    return out;
}

} // namespace rilab
