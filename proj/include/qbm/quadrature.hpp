// quadrature.hpp — adaptive Gauss-Kronrod panel quadrature for oscillatory integrands
//
// The interval is first cut into panels no wider than `max_panel` (callers pass a
// fraction of the oscillation period) and at every breakpoint; each panel gets a
// 7/15-point Gauss-Kronrod pair, and the panel with the largest error estimate is
// bisected until the global tolerance is met. Error estimates follow QUADPACK's
// qk15 scaling. Panels whose error sits at the roundoff floor are not refined.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace qbm::quad {

struct Tolerance {
    double abs{1e-10};
    double rel{1e-8};
    std::size_t max_intervals{std::size_t{1} << 23};
};

struct Result {
    double value{};
    double error{};
    std::size_t evaluations{};
    std::size_t intervals{};
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double achieved_error)
        : std::runtime_error(what), value_(value), achieved_error_(achieved_error) {}

    double value() const noexcept { return value_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double value_;
    double achieved_error_;
};

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_{0.0};
    double comp_{0.0};
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for nodes kronrod_nodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> gauss_weights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a{};
    double b{};
    double value{};
    double error{};
    double floor{};  // roundoff limit of this panel's estimate
};

inline bool refinable(const Panel& p) noexcept {
    const double mid = 0.5 * (p.a + p.b);
    const double eps = std::numeric_limits<double>::epsilon();
    return p.error > p.floor && (p.b - p.a) > 64.0 * eps * std::max(1.0, std::abs(mid));
}

template <class F>
Panel gauss_kronrod_15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> fv{};
    fv[7] = f(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }
    double kronrod = kronrod_weights[7] * fv[7];
    double gauss = gauss_weights[3] * fv[7];
    double abs_sum = kronrod_weights[7] * std::abs(fv[7]);
    for (int j = 0; j < 7; ++j) {
        const double pair = fv[j] + fv[14 - j];
        kronrod += kronrod_weights[j] * pair;
        abs_sum += kronrod_weights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1) {
            gauss += gauss_weights[j / 2] * pair;
        }
    }
    const double mean = 0.5 * kronrod;
    double asc = kronrod_weights[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j) {
        asc += kronrod_weights[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    }

    const double h = std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * h;
    const double resabs = abs_sum * h;
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    return {a, b, kronrod * half, std::max(err, floor), floor};
}

}  // namespace detail

// Integrates f over [a, b]. Breakpoints strictly inside (a, b) become panel edges.
template <class F>
Result integrate(const F& f, double a, double b, const Tolerance& tol = {},
                 double max_panel = std::numeric_limits<double>::infinity(),
                 std::span<const double> breakpoints = {}) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("quadrature limits must be finite");
    }
    if (a == b) {
        return {};
    }
    if (a > b) {
        Result r = integrate(f, b, a, tol, max_panel, breakpoints);
        r.value = -r.value;
        return r;
    }
    if (!(max_panel > 0.0)) {
        throw std::invalid_argument("quadrature panel width must be positive");
    }

    std::vector<double> edges{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            edges.push_back(p);
        }
    }
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<detail::Panel> panels;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double lo = edges[k];
        const double hi = edges[k + 1];
        const double count = std::ceil((hi - lo) / max_panel);
        if (count > static_cast<double>(tol.max_intervals)) {
            throw QuadratureError("oscillation panelling exceeds the interval budget", 0.0,
                                  std::numeric_limits<double>::infinity());
        }
        const auto n = static_cast<std::size_t>(std::max(1.0, count));
        const double width = (hi - lo) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double pa = lo + static_cast<double>(i) * width;
            const double pb = i + 1 == n ? hi : lo + static_cast<double>(i + 1) * width;
            panels.push_back(detail::gauss_kronrod_15(f, pa, pb));
        }
    }

    auto totals = [&panels]() {
        CompensatedSum value;
        CompensatedSum error;
        for (const auto& p : panels) {
            value.add(p.value);
            error.add(p.error);
        }
        return std::pair{value.value(), error.value()};
    };
    auto [value, error] = totals();
    std::size_t evaluations = 15 * panels.size();
    auto target = [&tol](double v) { return std::max(tol.abs, tol.rel * std::abs(v)); };

    if (error > target(value)) {
        auto by_error = [](const detail::Panel& x, const detail::Panel& y) {
            return x.error - x.floor < y.error - y.floor;
        };
        std::make_heap(panels.begin(), panels.end(), by_error);
        std::size_t since_resum = 0;
        while (error > target(value) && detail::refinable(panels.front())) {
            if (panels.size() >= tol.max_intervals) {
                std::tie(value, error) = totals();
                throw QuadratureError("quadrature did not converge within " +
                                          std::to_string(tol.max_intervals) +
                                          " intervals; achieved error " + std::to_string(error),
                                      value, error);
            }
            std::pop_heap(panels.begin(), panels.end(), by_error);
            const detail::Panel worst = panels.back();
            panels.pop_back();
            const double mid = 0.5 * (worst.a + worst.b);
            const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
            const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
            evaluations += 30;
            value += (left.value + right.value) - worst.value;
            error += (left.error + right.error) - worst.error;
            panels.push_back(left);
            std::push_heap(panels.begin(), panels.end(), by_error);
            panels.push_back(right);
            std::push_heap(panels.begin(), panels.end(), by_error);
            if (++since_resum == 256) {
                std::tie(value, error) = totals();
                since_resum = 0;
            }
        }
        std::tie(value, error) = totals();
    }
    return {value, error, evaluations, panels.size()};
}

}  // namespace qbm::quad
