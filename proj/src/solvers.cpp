#include "rilab/solvers.hpp"

#include <algorithm>
#include <iterator>

namespace rilab {

std::string to_string(Method method) {
    switch (method) {
    case Method::OST: return "ost";
    case Method::OMP: return "omp";
    case Method::Lasso: return "lasso";
    case Method::BPDN: return "bpdn";
    case Method::SubspacePursuit: return "sp";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "ost") return Method::OST;
    if (name == "omp") return Method::OMP;
    if (name == "lasso") return Method::Lasso;
    if (name == "bpdn") return Method::BPDN;
    if (name == "sp" || name == "subspace-pursuit") return Method::SubspacePursuit;
    throw ValidationError("unknown method '" + name + "' (expected ost, omp, lasso, bpdn or sp)");
}

double default_gamma(Index N) {
    if (N < 2) throw ValidationError("default gamma needs N >= 2");
    return 2.0 * std::sqrt(2.0 * std::log(static_cast<double>(N)));
}

SupportMetrics support_metrics(const Support& truth_support, const CVector& truth, const Support& estimate_support,
                               const CVector& estimate) {
    if (truth.size() != estimate.size()) throw ValidationError("truth and estimate lengths differ");
    Support t = truth_support, e = estimate_support;
    std::sort(t.begin(), t.end());
    std::sort(e.begin(), e.end());
    Support diff;
    std::set_difference(e.begin(), e.end(), t.begin(), t.end(), std::back_inserter(diff));
    SupportMetrics m;
    m.false_positives = static_cast<Index>(diff.size());
    diff.clear();
    std::set_difference(t.begin(), t.end(), e.begin(), e.end(), std::back_inserter(diff));
    m.false_negatives = static_cast<Index>(diff.size());
    m.exact = m.false_positives == 0 && m.false_negatives == 0;
    const double err = (estimate - truth).norm();
    const double tn = truth.norm();
    m.relative_l2_error = tn > 0.0 ? err / tn : err;
    m.per_pixel_error = t.empty() ? err : err / std::sqrt(static_cast<double>(t.size()));
    return m;
}

} // namespace rilab
