// analysis.cpp

#include "qbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qbm/coefficients.hpp"

namespace qbm {

namespace {

void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || !std::isfinite(times[i])) {
            throw std::invalid_argument("coherence trace times must be positive and finite");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("coherence trace times must be strictly increasing");
        }
    }
}

// Bilinear interpolation of rho at (x, y). Returns false if (x, y) is outside the grid.
bool interpolate(const DensityGrid& rho, double x, double y, Complex& out) {
    const double dx = rho.spacing();
    const double last = static_cast<double>(rho.size() - 1);
    const double fx = (x - rho.lo()) / dx;
    const double fy = (y - rho.lo()) / dx;
    // snap values within rounding of a node so aligned grids read nodes exactly
    constexpr double snap = 1e-9;
    auto locate = [&](double f, std::size_t& i, double& w) {
        if (f < -snap || f > last + snap) {
            return false;
        }
        const double r = std::round(f);
        if (std::abs(f - r) < snap) {
            f = r;
        }
        f = std::clamp(f, 0.0, last);
        i = std::min(static_cast<std::size_t>(f), rho.size() - 2);
        w = f - static_cast<double>(i);
        return true;
    };
    std::size_t i = 0;
    std::size_t j = 0;
    double wx = 0.0;
    double wy = 0.0;
    if (!locate(fx, i, wx) || !locate(fy, j, wy)) {
        return false;
    }
    out = (1.0 - wx) * ((1.0 - wy) * rho(i, j) + wy * rho(i, j + 1)) +
          wx * ((1.0 - wy) * rho(i + 1, j) + wy * rho(i + 1, j + 1));
    return true;
}

struct Line {
    double slope{};
    double intercept{};
    double r_squared{};
    std::size_t n{};
};

// OLS on centred data.
Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] - mx;
        const double v = y[i] - my;
        sxx += u * u;
        sxy += u * v;
        syy += v * v;
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit window has no spread in the abscissa");
    }
    Line line;
    line.n = x.size();
    line.slope = sxy / sxx;
    line.intercept = my - line.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (line.intercept + line.slope * x[i]);
        ss_res += r * r;
    }
    line.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return line;
}

template <class Transform>
Line fit_window(const CoherenceTrace& trace, TimeWindow window, Transform abscissa) {
    if (!(window.hi >= window.lo)) {
        throw std::invalid_argument("fit window must satisfy lo <= hi");
    }
    // bounds are inclusive up to rounding so log-spaced grids keep their endpoints
    const double lo = window.lo * (1.0 - 1e-12);
    const double hi = window.hi * (1.0 + 1e-12);
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double t = trace.times[i];
        if (t >= lo && t <= hi) {
            if (!std::isfinite(trace.log_values[i])) {
                throw std::invalid_argument("coherence values in the fit window must be positive");
            }
            x.push_back(abscissa(t));
            y.push_back(trace.log_values[i]);
        }
    }
    if (x.size() < min_fit_points) {
        throw std::invalid_argument("fit window holds " + std::to_string(x.size()) +
                                    " samples; at least " + std::to_string(min_fit_points) +
                                    " are required");
    }
    return least_squares(x, y);
}

}  // namespace

double fringe_visibility(const DensityGrid& rho, const CatStateSpec& spec) {
    spec.validate();
    if (spec.separation == 0.0) {
        return 1.0;
    }
    const double xp = spec.center + 0.5 * spec.separation;
    const double xm = spec.center - 0.5 * spec.separation;
    Complex cross;
    Complex pp;
    Complex mm;
    if (!interpolate(rho, xp, xm, cross) || !interpolate(rho, xp, xp, pp) ||
        !interpolate(rho, xm, xm, mm)) {
        throw std::invalid_argument("packet centres lie outside the density grid");
    }
    const double diag = pp.real() + mm.real();
    if (!(diag > 0.0)) {
        throw std::runtime_error("nonpositive populations at the packet centres");
    }
    return 2.0 * std::abs(cross) / diag;
}

std::string to_string(MeasureKind k) {
    return k == MeasureKind::fringe_visibility ? "fringe_visibility" : "offdiag_factor";
}

double CoherenceTrace::value(std::size_t i) const {
    return std::exp(log_values.at(i));
}

CoherenceTrace CoherenceTrace::from_values(std::span<const double> times,
                                           std::span<const double> values, MeasureKind kind) {
    if (times.size() != values.size()) {
        throw std::invalid_argument("coherence trace times and values differ in length");
    }
    std::vector<double> logs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) {
            throw std::invalid_argument("coherence values must be positive");
        }
        logs[i] = std::log(values[i]);
    }
    return from_logs(times, logs, kind);
}

CoherenceTrace CoherenceTrace::from_logs(std::span<const double> times,
                                         std::span<const double> log_values, MeasureKind kind) {
    if (times.size() != log_values.size()) {
        throw std::invalid_argument("coherence trace times and values differ in length");
    }
    check_times(times);
    for (double v : log_values) {
        if (std::isnan(v) || v == infinity) {
            throw std::invalid_argument("coherence log-values must be finite or -inf");
        }
    }
    CoherenceTrace trace;
    trace.times.assign(times.begin(), times.end());
    trace.log_values.assign(log_values.begin(), log_values.end());
    trace.kind = kind;
    return trace;
}

PowerLawFit fit_power_law(const CoherenceTrace& trace, TimeWindow window) {
    const Line line = fit_window(trace, window, [](double t) { return std::log(t); });
    return {-line.slope, line.intercept, line.r_squared, window, line.n};
}

ExponentialFit fit_exponential(const CoherenceTrace& trace, TimeWindow window) {
    const Line line = fit_window(trace, window, [](double t) { return t; });
    return {-line.slope, line.intercept, line.r_squared, window, line.n};
}

std::string to_string(DecayModel m) {
    switch (m) {
    case DecayModel::power_law: return "power_law";
    case DecayModel::exponential: return "exponential";
    case DecayModel::undetermined: return "undetermined";
    }
    return "undetermined";
}

ModelSelection model_select(const CoherenceTrace& trace, TimeWindow window) {
    ModelSelection sel;
    sel.power_law = fit_power_law(trace, window);
    sel.exponential = fit_exponential(trace, window);
    sel.delta_r_squared = sel.power_law.r_squared - sel.exponential.r_squared;
    if (std::abs(sel.delta_r_squared) < model_margin) {
        sel.model = DecayModel::undetermined;
    } else {
        sel.model = sel.delta_r_squared > 0.0 ? DecayModel::power_law : DecayModel::exponential;
    }
    return sel;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw std::invalid_argument("log_spaced needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(a + step * static_cast<double>(i));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> log_spaced_per_decade(double lo, double hi, double per_decade) {
    if (!(per_decade > 0.0)) {
        throw std::invalid_argument("points per decade must be positive");
    }
    if (!(lo > 0.0) || !(hi > lo)) {
        throw std::invalid_argument("log_spaced needs 0 < lo < hi and n >= 2");
    }
    const double decades = std::log10(hi / lo);
    const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
    return log_spaced(lo, hi, std::max<std::size_t>(n, 2));
}

CoherenceTrace dephasing_trace(const SystemParams& sys, const BathParams& bath, double dx,
                               std::span<const double> times) {
    check_times(times);
    const auto exponent = exponent_trace(sys, bath, times);
    std::vector<double> logs(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        logs[i] = -dx * dx * exponent.theta[i] / sys.hbar;
    }
    return CoherenceTrace::from_logs(times, logs, MeasureKind::offdiag_factor);
}

}  // namespace qbm
