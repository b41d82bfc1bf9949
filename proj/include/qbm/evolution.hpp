// evolution.hpp — reduced density matrix on an (x, x') grid: cat states, exact
// dephasing, and a method-of-lines solver for the full weak-coupling master equation

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "qbm/coefficients.hpp"
#include "qbm/params.hpp"

namespace qbm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t min_grid_points = 64;

// rho(x, x') sampled on n uniform nodes per axis spanning [lo, hi]; row index is x.
class DensityGrid {
public:
    DensityGrid(std::size_t n, double lo, double hi);

    std::size_t size() const noexcept { return n_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double spacing() const noexcept { return (hi_ - lo_) / static_cast<double>(n_ - 1); }
    double coordinate(std::size_t i) const noexcept { return lo_ + static_cast<double>(i) * spacing(); }

    double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }

    ComplexMatrix& values() noexcept { return values_; }
    const ComplexMatrix& values() const noexcept { return values_; }

    Complex& operator()(std::size_t i, std::size_t j) {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    Complex operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    std::size_t n_;
    double lo_;
    double hi_;
    double time_{0.0};
    ComplexMatrix values_;
};

// Two Gaussian packets of width sigma (position standard deviation of each) centred
// at center +- separation/2.
struct CatStateSpec {
    double separation{2.0};
    double width{0.25};
    double center{0.0};

    void validate() const;
};

// Pure state psi(x) psi*(x'), psi = N [G(x - x+) + G(x - x-)], normalised on the grid.
// The axis is [center - extent/2, center + extent/2]. Requires extent >= d + 12 sigma,
// at least 8 nodes per sigma, and n >= 64.
DensityGrid init_cat_state(const CatStateSpec& spec, std::size_t n, double extent);

// Smallest extent >= min_extent whose nodes fall exactly on both packet centres.
double aligned_extent(const CatStateSpec& spec, std::size_t n, double min_extent);

// Default extent: separation + 22 width, clamped to what init_cat_state accepts at n points,
// moved to the nearest admissible extent that puts both centres on nodes when one exists.
double automatic_extent(const CatStateSpec& spec, std::size_t n);

// exp(-dx^2 Theta_D(t) / hbar).
double dephasing_factor(const SystemParams& sys, const BathParams& bath, double dx, double t);

// Pure-dephasing solution: rho(x, x') scaled by exp(-(x - x')^2 [Theta_D(t) - Theta_D(t0)] / hbar),
// t0 the grid's current time.
DensityGrid evolve_dephasing(const DensityGrid& rho0, const SystemParams& sys,
                             const BathParams& bath, double t);

double grid_trace(const DensityGrid& rho);
double hermiticity_residual(const DensityGrid& rho);
double purity(const DensityGrid& rho);
// Smallest eigenvalue of the grid operator rho dx. Positivity is not guaranteed by the
// master equation; this is a diagnostic only.
double most_negative_eigenvalue(const DensityGrid& rho);

enum class Scheme { rk4_method_of_lines };
enum class Boundary { dirichlet_zero };

// Test hook: switch individual terms of the master equation on or off.
struct TermMask {
    bool kinetic{true};
    bool potential{true};
    bool freq_shift{true};
    bool dissipation{true};
    bool diffusion{true};
    bool anomalous{true};
};

struct EvolveConfig {
    double dt{};
    double t_end{};
    Scheme scheme{Scheme::rk4_method_of_lines};
    std::size_t record_every{1};   // scalar diagnostics every k steps
    std::size_t snapshot_every{0}; // full grids every k steps, 0 = never
    Boundary boundary{Boundary::dirichlet_zero};
    TermMask terms{};
};

// dt <= 0.25 M dx^2 / hbar for the explicit kinetic update.
double stability_limit(const SystemParams& sys, const DensityGrid& rho);
// 0.1 M dx^2 / hbar.
double default_time_step(const SystemParams& sys, const DensityGrid& rho);

struct Snapshot {
    std::size_t step{};
    double time{};
    double trace{};
    double herm_residual{};
    double purity{};
    double observable{};  // probe value, NaN without a probe
    std::optional<DensityGrid> grid;
};

using Probe = std::function<double(const DensityGrid&)>;

// Integrates
//   d rho/dt = (i hbar / 2M)(d_x^2 - d_x'^2) rho - (i / hbar)(M/2)(Omega^2 + dOmega(t)^2)(x^2 - x'^2) rho
//            - Gamma(t)(x - x')(d_x - d_x') rho - (D(t) / hbar)(x - x')^2 rho
//            - i A(t)(x - x')(d_x + d_x') rho
// with centred differences and zero Dirichlet data. Derivative terms advance by RK4; the
// pointwise diffusion and potential terms enter through an exact integrating factor.
// Throws std::invalid_argument if dt exceeds the stability limit, std::runtime_error on a
// non-finite state (message carries the step index).
std::vector<Snapshot> evolve_full(const DensityGrid& rho0, const SystemParams& sys,
                                  const BathParams& bath, const CoefficientSet& coeffs,
                                  const EvolveConfig& cfg, const Probe& probe = {});

// Binary snapshot: little-endian {u32 n, f64 lo, f64 hi, f64 time} then n^2 (re, im) f64
// pairs, row-major in x.
void write_snapshot(std::ostream& out, const DensityGrid& rho);
DensityGrid read_snapshot(std::istream& in);

}  // namespace qbm
