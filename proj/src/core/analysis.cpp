#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace loschmidt {

namespace {
constexpr double kThreshold = 2.0 / 3.0;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.slope * x[i] - fit.intercept;
        rss += r * r;
    }
    fit.rms_residual = std::sqrt(rss / n);
    return fit;
}
} // namespace

std::optional<double> tau_phi(const LETrace& trace) {
    if (trace.m11.size() < 2) throw std::invalid_argument("tau_phi: trace too short");
    for (std::size_t k = 0; k + 1 < trace.m11.size(); ++k) {
        const double a = trace.m11[k];
        const double b = trace.m11[k + 1];
        if (a > kThreshold && b <= kThreshold) {
            const double f = (a - kThreshold) / (a - b);
            return trace.times[k] + f * (trace.times[k + 1] - trace.times[k]);
        }
    }
    return std::nullopt;
}

PlateauEstimate plateau(const LETrace& trace, double tail_fraction) {
    if (!(tail_fraction > 0.0) || tail_fraction > 0.5)
        throw std::invalid_argument("plateau: tail_fraction must be in (0, 0.5]");
    const std::size_t n = trace.m11.size();
    const std::size_t tail = std::size_t(std::floor(tail_fraction * double(n)));
    if (tail < 5) throw std::invalid_argument("plateau: tail window shorter than 5 samples");
    const std::size_t start = n - tail;

    PlateauEstimate est;
    est.n_samples = int(tail);
    double mean = 0.0;
    for (std::size_t i = start; i < n; ++i) mean += trace.m11[i];
    mean /= double(tail);
    double var = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        const double d = trace.m11[i] - mean;
        var += d * d;
    }
    var /= double(tail - 1);
    est.mean = mean;
    est.stderr_of_mean = std::sqrt(var / double(tail));

    std::vector<double> ts(trace.times.begin() + start, trace.times.end());
    std::vector<double> ys(trace.m11.begin() + start, trace.m11.end());
    const LineFit drift = least_squares(ts, ys);
    const double span = ts.back() - ts.front();
    est.flat = std::abs(drift.slope) * span < 2.0 * std::max(est.stderr_of_mean, 1e-300);
    if (est.stderr_of_mean == 0.0) est.flat = drift.slope == 0.0;
    return est;
}

const char* to_string(DecayModel model) {
    return model == DecayModel::gaussian ? "gaussian" : "exponential";
}

DecayFit classify_decay(const LETrace& trace, const FitWindow& window) {
    if (!(window.t_hi > window.t_lo)) throw std::invalid_argument("classify_decay: degenerate window");
    const PlateauEstimate base = plateau(trace);

    std::vector<double> t, t2, logy;
    int skipped = 0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double ti = trace.times[i];
        if (ti < window.t_lo || ti > window.t_hi) continue;
        const double y = trace.m11[i] - base.mean;
        if (y <= 0.0) {
            ++skipped;
            continue;
        }
        t.push_back(ti);
        t2.push_back(ti * ti);
        logy.push_back(std::log(y));
    }
    if (t.size() < 3)
        throw std::invalid_argument("classify_decay: fewer than 3 usable samples in window");

    const LineFit exp_fit = least_squares(t, logy);   // log y = c - t/tau
    const LineFit gauss_fit = least_squares(t2, logy); // log y = c - (t/tau)^2

    DecayFit fit;
    fit.skipped_points = skipped;
    fit.crossing_tau = tau_phi(trace);
    const bool pick_gauss = gauss_fit.rms_residual < exp_fit.rms_residual;
    const LineFit& sel = pick_gauss ? gauss_fit : exp_fit;
    const LineFit& alt = pick_gauss ? exp_fit : gauss_fit;
    fit.model = pick_gauss ? DecayModel::gaussian : DecayModel::exponential;
    fit.residual = sel.rms_residual;
    fit.residual_alt = alt.rms_residual;
    fit.amplitude = std::exp(sel.intercept);
    if (sel.slope >= 0.0) {
        fit.tau_phi = std::numeric_limits<double>::infinity();
    } else if (pick_gauss) {
        fit.tau_phi = 1.0 / std::sqrt(-sel.slope);
    } else {
        fit.tau_phi = -1.0 / sel.slope;
    }
    return fit;
}

FitWindow default_fit_window(const LETrace& trace) {
    const PlateauEstimate base = plateau(trace);
    const double floor_level = base.mean + 2.0 * base.stderr_of_mean;
    FitWindow w;
    bool started = false;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        if (!started && trace.m11[i] < 0.9) {
            w.t_lo = trace.times[i];
            started = true;
        }
        if (started && trace.m11[i] <= floor_level) {
            w.t_hi = trace.times[i];
            return w;
        }
    }
    if (!started) throw std::invalid_argument("default_fit_window: trace never drops below 0.9");
    w.t_hi = trace.times.back();
    return w;
}

RegimeFit fit_rate_scaling(std::vector<RatePoint> points, RateRegime regime) {
    if (points.size() < 4) throw std::invalid_argument("fit_rate_scaling: need at least 4 points");
    std::sort(points.begin(), points.end(),
              [](const RatePoint& a, const RatePoint& b) { return a.sigma_eff < b.sigma_eff; });
    for (const RatePoint& p : points)
        if (!(p.sigma_eff > 0.0) || !(p.rate > 0.0) || !std::isfinite(p.rate))
            throw std::invalid_argument("fit_rate_scaling: points must have positive sigma_eff and rate");

    RegimeFit fit;
    fit.regime = regime;
    fit.points = points;
    fit.window_lo = points.front().sigma_eff;
    fit.window_hi = points.back().sigma_eff;

    if (regime == RateRegime::perturbative) {
        std::vector<double> lx, ly;
        for (const RatePoint& p : points) {
            lx.push_back(std::log(p.sigma_eff));
            ly.push_back(std::log(p.rate));
        }
        const LineFit ll = least_squares(lx, ly);
        fit.exponent = ll.slope;
        fit.offset_rate = 0.0;
        fit.coefficient = std::exp(ll.intercept);
        fit.residual = ll.rms_residual;
        return fit;
    }

    // rate = offset + c sigma^2, linear least squares in (1, sigma^2)
    std::vector<double> s2, r;
    for (const RatePoint& p : points) {
        s2.push_back(p.sigma_eff * p.sigma_eff);
        r.push_back(p.rate);
    }
    const LineFit lin = least_squares(s2, r);
    double offset = lin.intercept;
    // the intercept is a rate; a small negative value from noise is clamped
    if (offset < 0.0) offset = 0.0;
    std::vector<double> lx, ly;
    for (const RatePoint& p : points) {
        const double y = p.rate - offset;
        if (y <= 0.0) continue;
        lx.push_back(std::log(p.sigma_eff));
        ly.push_back(std::log(y));
    }
    if (lx.size() < 3)
        throw std::invalid_argument("fit_rate_scaling: offset removal left fewer than 3 points");
    const LineFit ll = least_squares(lx, ly);
    fit.exponent = ll.slope;
    fit.offset_rate = offset;
    fit.coefficient = std::exp(ll.intercept);
    fit.residual = ll.rms_residual;
    return fit;
}

TwoBranchFit fit_two_branches(std::vector<RatePoint> points) {
    if (points.size() < 8)
        throw std::invalid_argument("fit_two_branches: need at least 8 points");
    std::sort(points.begin(), points.end(),
              [](const RatePoint& a, const RatePoint& b) { return a.sigma_eff < b.sigma_eff; });
    const std::size_t n = points.size();
    double best = std::numeric_limits<double>::infinity();
    TwoBranchFit out;
    bool found = false;
    for (std::size_t split = 4; split + 4 <= n; ++split) {
        std::vector<RatePoint> weak(points.begin(), points.begin() + split);
        std::vector<RatePoint> strong(points.begin() + split, points.end());
        try {
            RegimeFit f = fit_rate_scaling(weak, RateRegime::fgr);
            RegimeFit p = fit_rate_scaling(strong, RateRegime::perturbative);
            const double total = f.residual * f.residual * double(weak.size()) +
                                 p.residual * p.residual * double(strong.size());
            if (total < best) {
                best = total;
                out.fgr = f;
                out.perturbative = p;
                out.split_index = split;
                found = true;
            }
        } catch (const std::invalid_argument&) {
            continue;
        }
    }
    if (!found) throw std::invalid_argument("fit_two_branches: no admissible split");
    return out;
}

LdosPrediction LdosPrediction::make(SpinProjection nu, double omega1, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("LdosPrediction: variance must be > 0");
    LdosPrediction p;
    p.nu = nu;
    p.mean = nu.value() * omega1;
    p.variance = variance;
    return p;
}

double predicted_ldos(const LdosPrediction& p, double epsilon) {
    if (!(p.variance > 0.0)) throw std::invalid_argument("predicted_ldos: variance must be > 0");
    const double d = epsilon - p.mean;
    return std::exp(-d * d / (2.0 * p.variance)) / std::sqrt(2.0 * M_PI * p.variance);
}

} // namespace loschmidt
