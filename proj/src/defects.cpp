#include "fk/defects.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fk/equilibria.hpp"
#include "fk/intersect.hpp"

namespace fk {

// Undriven stable ground-state background: gradient relaxation from the
// uniform state (nudged off the hilltop saddle), polished by Newton. The
// counting step needs the background exactly stationary so that translates
// of the defected state coincide with it away from the defects.
PeriodicConfiguration relaxed_background(Rational rho, std::int64_t q_total,
                                         const ModelSpec& spec) {
    ModelSpec undriven = spec;
    undriven.forcing = Forcing{};
    PeriodicConfiguration c = make_uniform(rho, q_total);
    for (double& u : c.base) {
        u += 0.03 * std::sin(2.0 * std::numbers::pi * (u - 0.13));
    }
    IntegratorSettings s;
    flow(c.base, c.winding, 0.0, 400.0, undriven, s);
    if (auto polished = find_stationary_opt(undriven, c)) c = *polished;
    return c;
}

DefectedInitializer make_defected(Rational rho, const std::vector<Insertion>& insertions,
                                  std::int64_t q_total, const ModelSpec& spec) {
    if (q_total < 2) throw ModelError("q_total must be >= 2");
    for (std::size_t i = 0; i < insertions.size(); ++i) {
        const auto& ins = insertions[i];
        if (ins.site < 0 || ins.site >= q_total) {
            throw InsertionsTooDense("insertion site out of range [0, q_total)");
        }
        if (ins.extra != 1 && ins.extra != -1) {
            throw InsertionsTooDense("insertion winding must be +1 or -1");
        }
        for (std::size_t k = i + 1; k < insertions.size(); ++k) {
            if (std::abs(insertions[k].site - ins.site) < 2) {
                throw InsertionsTooDense("insertion sites must be separated by >= 2 sites");
            }
        }
    }

    DefectedInitializer out;
    out.background_rho = rho;
    out.insertions = insertions;

    PeriodicConfiguration c = relaxed_background(rho, q_total, spec);
    // Apply edits from the highest site down so earlier indices stay valid.
    std::vector<Insertion> ordered = insertions;
    std::sort(ordered.begin(), ordered.end(),
              [](const Insertion& a, const Insertion& b) { return a.site > b.site; });
    for (const Insertion& ins : ordered) {
        const auto at = static_cast<std::size_t>(ins.site);
        if (ins.extra == -1) {
            c.base.erase(c.base.begin() + static_cast<std::ptrdiff_t>(at));
        } else {
            const double next = (ins.site + 1 < c.q()) ? c.base[at + 1]
                                                       : c.base[0] + static_cast<double>(c.winding);
            c.base.insert(c.base.begin() + static_cast<std::ptrdiff_t>(at) + 1,
                          0.5 * (c.base[at] + next));
        }
    }
    if (c.q() < 2) throw InsertionsTooDense("removals left fewer than two particles");

    // Short undriven pre-flow smooths the seams. It must stay short: the
    // background away from the insertions still matches the stationary
    // lattice exactly, which is what makes the defects countable (full
    // relaxation would delocalize them into the ordered state of the new
    // type, whose defect count is legitimately zero).
    ModelSpec relax = spec;
    relax.forcing = Forcing{};
    IntegratorSettings s;
    s.error_tol = 1e-13;  // keep integrator noise on the untouched tail sites
                          // far below the zero-detection tolerance
    flow(c.base, c.winding, 0.0, 2.0, relax, s);

    out.configuration = c;
    out.defect_count_brute = defect_count(c);
    out.n_window = static_cast<std::int64_t>(std::ceil(2.0 * width_deviation(c))) + 1;
    return out;
}

namespace {

// Crossing count against a panel of translates; the panel covers every
// spatial rotation up to min(q, 8) with offsets near round(m rho).
std::int64_t translate_crossing_panel(const PeriodicConfiguration& c) {
    const double rho = mean_spacing(c).value();
    const std::int64_t m_max = std::min<std::int64_t>(c.q(), 8);
    std::int64_t worst = 0;
    for (std::int64_t m = 0; m <= m_max; ++m) {
        const auto center = static_cast<std::int64_t>(std::llround(static_cast<double>(m) * rho));
        for (std::int64_t n = center - 2; n <= center + 2; ++n) {
            const IntersectionReport rep = count_intersections(c, translate(c, m, n));
            if (rep.identical) continue;
            worst = std::max(worst, rep.count);
        }
    }
    return worst;
}

}  // namespace

RelaxReport defect_relaxation_test(const PeriodicConfiguration& c0, const ModelSpec& spec,
                                   const IntegratorSettings& s) {
    if (!spec.forcing.is_dc()) throw ModelError("defect relaxation test requires DC forcing");
    RelaxReport report;

    PeriodicConfiguration state = c0;
    double t = 0.0;
    const double trend_step = std::max(s.strobe_period, s.t_burn / 40.0);
    while (t < s.t_burn) {
        report.trend_times.push_back(t);
        report.crossing_trend.push_back(translate_crossing_panel(state));
        const double target = std::min(t + trend_step, s.t_burn);
        flow(state.base, state.winding, t, target, spec, s);
        t = target;
    }
    report.trend_times.push_back(t);
    report.crossing_trend.push_back(translate_crossing_panel(state));
    for (std::size_t i = 1; i < report.crossing_trend.size(); ++i) {
        if (report.crossing_trend[i] > report.crossing_trend[i - 1]) {
            report.trend_nonincreasing = false;
        }
    }

    // Sampled tail after burn-in.
    const std::int64_t tail_samples = 24;
    TrajectorySample tail = integrate(state, spec, s,
                                      static_cast<double>(tail_samples) * s.strobe_period);
    std::vector<SyncShift> shifts;
    const double rho = mean_spacing(state).value();
    for (std::int64_t m = 0; m < std::min<std::int64_t>(state.q(), 5); ++m) {
        const auto center = static_cast<std::int64_t>(std::llround(static_cast<double>(m) * rho));
        for (std::int64_t n = center - 2; n <= center + 2; ++n) {
            for (std::int64_t off = 0; off < 5; ++off) {
                if (m == 0 && n == 0 && off == 0) continue;
                shifts.push_back({m, n, off});
            }
        }
    }
    const SyncResult sync = synchronization_check(tail, shifts);
    report.outcome = sync.synchronized ? RelaxOutcome::synchronized : RelaxOutcome::unresolved;
    report.witnesses = sync.witnesses;
    return report;
}

}  // namespace fk
