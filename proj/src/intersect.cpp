#include "fk/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fk {

namespace {

int sign_with_tol(double d, double scale, double zero_tol) {
    if (std::abs(d) <= zero_tol * scale) return 0;
    return d > 0.0 ? 1 : -1;
}

// Cyclic event scan of a sign sequence (period L). Events: strict sign flips
// between adjacent nonzero entries, and maximal zero-runs collapsed to one
// event at the bond entering the run.
void scan_cyclic(const std::vector<int>& sgn, IntersectionReport& rep) {
    const auto L = static_cast<std::int64_t>(sgn.size());
    std::int64_t start = -1;
    for (std::int64_t j = 0; j < L; ++j) {
        if (sgn[static_cast<std::size_t>(j)] != 0) {
            start = j;
            break;
        }
    }
    if (start < 0) {
        rep.identical = true;
        return;
    }
    int prev = sgn[static_cast<std::size_t>(start)];
    std::int64_t run_entry_bond = -1;  // bond before the current zero-run
    for (std::int64_t k = 1; k <= L; ++k) {
        const std::int64_t idx = (start + k) % L;
        const int cur = sgn[static_cast<std::size_t>(idx)];
        const std::int64_t bond = (start + k - 1) % L;
        if (cur == 0) {
            if (run_entry_bond < 0) run_entry_bond = bond;
            continue;
        }
        if (run_entry_bond >= 0) {
            rep.sites.push_back(run_entry_bond);
            rep.kinds.push_back(cur != prev ? CrossingKind::transversal
                                            : CrossingKind::nontransversal);
            run_entry_bond = -1;
        } else if (cur != prev) {
            rep.sites.push_back(bond);
            rep.kinds.push_back(CrossingKind::transversal);
        }
        prev = cur;
    }
    rep.count = static_cast<std::int64_t>(rep.sites.size());
}

// Windowed (non-cyclic) event scan used for pairs of unequal mean spacing.
// Zero-runs touching the window edges still count one event each.
std::int64_t scan_window(const std::vector<int>& sgn) {
    bool any_nonzero = false;
    for (const int s : sgn) any_nonzero |= (s != 0);
    if (!any_nonzero) return 0;
    std::int64_t count = 0;
    int prev = 0;
    bool run_open = false;
    for (const int cur : sgn) {
        if (cur == 0) {
            run_open = true;
            continue;
        }
        if (run_open) {
            ++count;
            run_open = false;
        } else if (prev != 0 && cur != prev) {
            ++count;
        }
        prev = cur;
    }
    if (run_open) ++count;
    return count;
}

void sort_report(IntersectionReport& rep) {
    std::vector<std::size_t> order(rep.sites.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rep.sites[a] < rep.sites[b]; });
    std::vector<std::int64_t> sites(rep.sites.size());
    std::vector<CrossingKind> kinds(rep.kinds.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sites[i] = rep.sites[order[i]];
        kinds[i] = rep.kinds[order[i]];
    }
    rep.sites.swap(sites);
    rep.kinds.swap(kinds);
}

}  // namespace

// The zero-detection scale is constant over the compared window (from the
// largest lift magnitudes in it). A per-site scale would let a smooth
// decaying tail straddle the varying threshold and split one touching event
// into several, making counts depend on the S_{m,n} labeling.
namespace {

double pair_scale(const PeriodicConfiguration& u, const PeriodicConfiguration& v,
                  std::int64_t window) {
    double umax = 0.0, vmax = 0.0;
    for (std::int64_t j = 0; j <= window; ++j) {
        umax = std::max(umax, std::abs(u.u(j)));
        vmax = std::max(vmax, std::abs(v.u(j)));
    }
    return 1.0 + umax + vmax;
}

}  // namespace

IntersectionReport count_intersections(const PeriodicConfiguration& u,
                                       const PeriodicConfiguration& v, std::int64_t n_span,
                                       double zero_tol) {
    const std::int64_t L = std::lcm(u.q(), v.q());
    IntersectionReport rep;
    const double scale = pair_scale(u, v, L);
    if (mean_spacing(u) == mean_spacing(v)) {
        std::vector<int> sgn(static_cast<std::size_t>(L));
        for (std::int64_t j = 0; j < L; ++j) {
            sgn[static_cast<std::size_t>(j)] = sign_with_tol(v.u(j) - u.u(j), scale, zero_tol);
        }
        scan_cyclic(sgn, rep);
        sort_report(rep);
        return rep;
    }
    // Unequal mean spacing: the difference drifts, so report windowed counts
    // of u against v + n summed over the requested offsets.
    for (std::int64_t n = -n_span; n <= n_span; ++n) {
        std::vector<int> sgn(static_cast<std::size_t>(L) + 1);
        for (std::int64_t j = 0; j <= L; ++j) {
            sgn[static_cast<std::size_t>(j)] =
                sign_with_tol(v.u(j) + static_cast<double>(n) - u.u(j), scale, zero_tol);
        }
        rep.count += scan_window(sgn);
    }
    return rep;
}

std::int64_t defect_count(const PeriodicConfiguration& u, double zero_tol) {
    const double rho = mean_spacing(u).value();
    const auto n_w = static_cast<std::int64_t>(std::ceil(2.0 * width_deviation(u))) + 1;
    std::int64_t worst = 0;
    for (std::int64_t m = 0; m < u.q(); ++m) {
        const auto center = static_cast<std::int64_t>(std::llround(static_cast<double>(m) * rho));
        for (std::int64_t n = center - n_w; n <= center + n_w; ++n) {
            const IntersectionReport rep = count_intersections(u, translate(u, m, n), 0, zero_tol);
            if (rep.identical) continue;
            worst = std::max(worst, rep.count);
        }
    }
    return worst;
}

EmpiricalEnsemble EmpiricalEnsemble::closed_under_shifts(
    const std::vector<PeriodicConfiguration>& base) {
    EmpiricalEnsemble e;
    for (const PeriodicConfiguration& u : base) {
        for (std::int64_t m = 0; m < u.q(); ++m) e.members.push_back(translate(u, m, 0));
    }
    return e;
}

namespace {

bool integer_translates(const PeriodicConfiguration& a, const PeriodicConfiguration& b,
                        std::int64_t n, double zero_tol) {
    if (a.q() != b.q() || a.winding != b.winding) return false;
    for (std::int64_t j = 0; j < a.q(); ++j) {
        const double da = a.u(j) + static_cast<double>(n) - b.u(j);
        if (std::abs(da) > zero_tol * (1.0 + std::abs(a.u(j)) + std::abs(b.u(j)))) return false;
    }
    return true;
}

}  // namespace

double lyapunov_estimate(const EmpiricalEnsemble& e, double zero_tol) {
    const std::size_t m = e.members.size();
    if (m == 0) return 0.0;
    double total = 0.0;
    for (const PeriodicConfiguration& u : e.members) {
        for (const PeriodicConfiguration& v : e.members) {
            const double d0 = v.u(0) - u.u(0);
            const double d1 = v.u(1) - u.u(1);
            const double lo = std::min(d0, d1), hi = std::max(d0, d1);
            const double s0 = 1.0 + std::abs(u.u(0)) + std::abs(v.u(0));
            const double s1 = 1.0 + std::abs(u.u(1)) + std::abs(v.u(1));
            const auto n_lo = static_cast<std::int64_t>(std::ceil(lo - zero_tol * s0 - 1.0));
            const auto n_hi = static_cast<std::int64_t>(std::floor(hi + zero_tol * s0 + 1.0));
            for (std::int64_t n = n_lo; n <= n_hi; ++n) {
                const int g0 = sign_with_tol(d0 - static_cast<double>(n), s0, zero_tol);
                const int g1 = sign_with_tol(d1 - static_cast<double>(n), s1, zero_tol);
                if (g0 * g1 > 0) continue;
                if (integer_translates(u, v, n, zero_tol)) continue;  // u+n == v everywhere
                total += 1.0;
            }
        }
    }
    return total / (static_cast<double>(m) * static_cast<double>(m));
}

std::vector<double> monotonicity_series(const EmpiricalEnsemble& e0, const ModelSpec& spec,
                                        const IntegratorSettings& s,
                                        const std::vector<double>& times) {
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw ModelError("monotonicity_series: times must increase");
    }
    std::vector<PeriodicConfiguration> evolved = e0.members;
    std::vector<double> series;
    series.reserve(times.size());
    double t = 0.0;
    for (const double target : times) {
        for (PeriodicConfiguration& c : evolved) {
            flow(c.base, c.winding, t, target, spec, s);
        }
        t = target;
        series.push_back(lyapunov_estimate(EmpiricalEnsemble::closed_under_shifts(evolved)));
    }
    return series;
}

}  // namespace fk
