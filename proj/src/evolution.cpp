// evolution.cpp

#include "qbm/evolution.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace qbm {

namespace {

constexpr Complex I{0.0, 1.0};

// 5-point Gauss-Legendre on [a, b] for the coefficient integrals over one half step.
double gauss_legendre_5(const TimeFunction& f, double a, double b) {
    static constexpr std::array<double, 5> nodes{-0.906179845938663992797626878299393, -0.538469310105683091036314420700208, 0.0,
                                                 0.538469310105683091036314420700208, 0.906179845938663992797626878299393};
    static constexpr std::array<double, 5> weights{0.236926885056189087514264040719918, 0.478628670499366468041291514835638,
                                                   0.568888888888888888888888888888889, 0.478628670499366468041291514835638,
                                                   0.236926885056189087514264040719918};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        sum += weights[k] * f(c + h * nodes[k]);
    }
    return h * sum;
}

template <class T>
void put_le(std::ostream& out, T value) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (!in) {
        throw std::runtime_error("truncated grid snapshot");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    return std::bit_cast<T>(bytes);
}

// Advances the grid one step at a time. Buffers are allocated once per run.
class LawsonStepper {
public:
    LawsonStepper(const DensityGrid& grid, const SystemParams& sys, const CoefficientSet& coeffs,
                  const TermMask& terms)
        : n_(grid.size()), dx_(grid.spacing()), sys_(sys), coeffs_(coeffs), terms_(terms),
          x_(n_), zero_row_(n_, Complex{}), toeplitz_a_(2 * n_ - 1), toeplitz_b_(2 * n_ - 1),
          phase_a_(n_), phase_b_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            x_[i] = grid.coordinate(i);
        }
        const auto nn = static_cast<Eigen::Index>(n_);
        for (auto* m : {&k1_, &k2_, &k3_, &k4_, &stage_}) {
            m->resize(nn, nn);
        }
        derivative_terms_ = terms_.kinetic || terms_.dissipation || terms_.anomalous;
    }

    void step(ComplexMatrix& u, double t, double h) {
        const double t_half = t + 0.5 * h;
        const double t_full = t + h;
        build_factor(t, t_half, toeplitz_a_, phase_a_);
        build_factor(t_half, t_full, toeplitz_b_, phase_b_);

        if (!derivative_terms_) {
            apply_factor(u, u, Which::full);
            return;
        }
        // u2 = Ea (u + h/2 k1)
        rhs(u, t, k1_);
        stage_ = u + (0.5 * h) * k1_;
        apply_factor(stage_, stage_, Which::a);
        rhs(stage_, t_half, k2_);
        // u3 = Ea u + h/2 k2
        apply_factor(u, stage_, Which::a);
        stage_ += (0.5 * h) * k2_;
        rhs(stage_, t_half, k3_);
        // u4 = Eh u + h Eb k3
        apply_factor(k3_, stage_, Which::b);
        stage_ *= h;
        apply_factor(u, k4_, Which::full);
        stage_ += k4_;
        rhs(stage_, t_full, k4_);
        // u+ = Eh u + h/6 (Eh k1 + 2 Eb (k2 + k3) + k4)
        k2_ += k3_;
        apply_factor(k2_, k2_, Which::b);
        apply_factor(k1_, k1_, Which::full);
        apply_factor(u, u, Which::full);
        u += (h / 6.0) * (k1_ + 2.0 * k2_ + k4_);
    }

private:
    enum class Which { a, b, full };

    double diffusion_increment(double a, double b) {
        if (!terms_.diffusion || !coeffs_.diffusion) {
            return 0.0;
        }
        if (coeffs_.diffusion_integral) {
            return theta_at(b) - theta_at(a);
        }
        return gauss_legendre_5(coeffs_.diffusion, a, b);
    }

    // Memoises the last two Theta evaluations: each step reuses the end of the previous one.
    double theta_at(double t) {
        for (auto& [time, value] : theta_cache_) {
            if (time == t) {
                return value;
            }
        }
        const double value = coeffs_.diffusion_integral(t);
        theta_cache_[cache_slot_] = {t, value};
        cache_slot_ = (cache_slot_ + 1) % theta_cache_.size();
        return value;
    }

    double frequency_increment(double a, double b) const {
        double out = 0.0;
        if (terms_.potential) {
            out += sys_.frequency * sys_.frequency * (b - a);
        }
        if (terms_.freq_shift && coeffs_.freq_shift) {
            out += gauss_legendre_5(coeffs_.freq_shift, a, b);
        }
        return out;
    }

    // exp(P) with P = -(dTheta/hbar)(x - x')^2 - i (M / 2 hbar) dW (x^2 - x'^2), split into a
    // Toeplitz factor over i - j and a per-axis phase.
    void build_factor(double a, double b, std::vector<double>& toeplitz, std::vector<Complex>& phase) {
        const double dtheta = diffusion_increment(a, b);
        const double dw = frequency_increment(a, b);
        const double c = dtheta / sys_.hbar;
        for (std::size_t k = 0; k < toeplitz.size(); ++k) {
            const double r = (static_cast<double>(k) - static_cast<double>(n_ - 1)) * dx_;
            toeplitz[k] = std::exp(-c * r * r);
        }
        const double w = 0.5 * sys_.mass * dw / sys_.hbar;
        for (std::size_t i = 0; i < n_; ++i) {
            phase[i] = std::polar(1.0, -w * x_[i] * x_[i]);
        }
    }

    void apply_factor(const ComplexMatrix& in, ComplexMatrix& out, Which which) const {
        const auto nn = static_cast<Eigen::Index>(n_);
        if (&in != &out) {
            out.resize(nn, nn);
        }
        for (std::size_t i = 0; i < n_; ++i) {
            const Complex* src = in.data() + i * n_;
            Complex* dst = out.data() + i * n_;
            for (std::size_t j = 0; j < n_; ++j) {
                const std::size_t k = i + n_ - 1 - j;
                Complex e;
                if (which == Which::a) {
                    e = toeplitz_a_[k] * phase_a_[i] * std::conj(phase_a_[j]);
                } else if (which == Which::b) {
                    e = toeplitz_b_[k] * phase_b_[i] * std::conj(phase_b_[j]);
                } else {
                    e = toeplitz_a_[k] * toeplitz_b_[k] * (phase_a_[i] * phase_b_[i]) *
                        std::conj(phase_a_[j] * phase_b_[j]);
                }
                dst[j] = e * src[j];
            }
        }
    }

    // Derivative terms: kinetic, dissipation, anomalous diffusion.
    void rhs(const ComplexMatrix& u, double t, ComplexMatrix& out) const {
        const double kinetic = terms_.kinetic ? sys_.hbar / (2.0 * sys_.mass * dx_ * dx_) : 0.0;
        const double gamma_t = terms_.dissipation && coeffs_.dissipation ? coeffs_.dissipation(t) : 0.0;
        const double anomalous_t = terms_.anomalous && coeffs_.anomalous ? coeffs_.anomalous(t) : 0.0;
        const double inv_2dx = 1.0 / (2.0 * dx_);
        const Complex* data = u.data();
        for (std::size_t i = 0; i < n_; ++i) {
            const Complex* row = data + i * n_;
            const Complex* up = i + 1 < n_ ? row + n_ : zero_row_.data();
            const Complex* down = i > 0 ? row - n_ : zero_row_.data();
            Complex* dst = out.data() + i * n_;
            for (std::size_t j = 0; j < n_; ++j) {
                const Complex xp = up[j];
                const Complex xm = down[j];
                const Complex yp = j + 1 < n_ ? row[j + 1] : Complex{};
                const Complex ym = j > 0 ? row[j - 1] : Complex{};
                // (d_x^2 - d_x'^2) rho: the -2 rho_ij terms cancel
                Complex value = I * kinetic * ((xp + xm) - (yp + ym));
                if (gamma_t != 0.0 || anomalous_t != 0.0) {
                    const double r = (static_cast<double>(i) - static_cast<double>(j)) * dx_;
                    const Complex d_x = (xp - xm) * inv_2dx;
                    const Complex d_y = (yp - ym) * inv_2dx;
                    value -= gamma_t * r * (d_x - d_y);
                    value -= I * (anomalous_t * r) * (d_x + d_y);
                }
                dst[j] = value;
            }
        }
    }

    std::size_t n_;
    double dx_;
    SystemParams sys_;
    const CoefficientSet& coeffs_;
    TermMask terms_;
    bool derivative_terms_{};
    std::vector<double> x_;
    std::vector<Complex> zero_row_;
    std::vector<double> toeplitz_a_;
    std::vector<double> toeplitz_b_;
    std::vector<Complex> phase_a_;
    std::vector<Complex> phase_b_;
    std::array<std::pair<double, double>, 2> theta_cache_{
        {{std::numeric_limits<double>::quiet_NaN(), 0.0}, {std::numeric_limits<double>::quiet_NaN(), 0.0}}};
    std::size_t cache_slot_{0};
    ComplexMatrix k1_, k2_, k3_, k4_, stage_;
};

}  // namespace

DensityGrid::DensityGrid(std::size_t n, double lo, double hi) : n_(n), lo_(lo), hi_(hi) {
    if (n < 2) {
        throw std::invalid_argument("density grid needs at least two points per axis");
    }
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("density grid extent must be finite with hi > lo");
    }
    const auto nn = static_cast<Eigen::Index>(n);
    values_ = ComplexMatrix::Zero(nn, nn);
}

void CatStateSpec::validate() const {
    if (!(separation >= 0.0) || !std::isfinite(separation)) {
        throw std::invalid_argument("cat separation must be finite and nonnegative");
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw std::invalid_argument("cat packet width must be positive");
    }
    if (!std::isfinite(center)) {
        throw std::invalid_argument("cat centre must be finite");
    }
}

DensityGrid init_cat_state(const CatStateSpec& spec, std::size_t n, double extent) {
    spec.validate();
    if (n < min_grid_points) {
        throw std::invalid_argument("grid must have at least " + std::to_string(min_grid_points) +
                                    " points per axis");
    }
    if (!(extent >= spec.separation + 12.0 * spec.width)) {
        throw std::invalid_argument("under-resolved grid: extent must be at least separation + 12 width");
    }
    DensityGrid rho(n, spec.center - 0.5 * extent, spec.center + 0.5 * extent);
    if (spec.width / rho.spacing() < 8.0) {
        throw std::invalid_argument(
            "under-resolved grid: packet width must span at least 8 grid spacings");
    }

    const double two_var = 4.0 * spec.width * spec.width;
    std::vector<double> psi(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rho.coordinate(i) - spec.center;
        const double a = x - 0.5 * spec.separation;
        const double b = x + 0.5 * spec.separation;
        psi[i] = std::exp(-a * a / two_var) + std::exp(-b * b / two_var);
        norm += psi[i] * psi[i];
    }
    norm *= rho.spacing();
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& v : psi) {
        v *= scale;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            rho(i, j) = psi[i] * psi[j];
        }
    }
    return rho;
}

double aligned_extent(const CatStateSpec& spec, std::size_t n, double min_extent) {
    spec.validate();
    if (n < 2 || !(min_extent > 0.0)) {
        throw std::invalid_argument("aligned_extent needs n >= 2 and a positive minimum extent");
    }
    if (spec.separation == 0.0) {
        return min_extent;
    }
    // Centres sit on nodes iff separation / dx has the parity of n - 1.
    const auto parity = static_cast<long long>((n - 1) % 2);
    auto m = static_cast<long long>(std::floor(spec.separation * static_cast<double>(n - 1) / min_extent));
    if (m % 2 != parity) {
        --m;
    }
    if (m < 1) {
        return min_extent;
    }
    return static_cast<double>(n - 1) * spec.separation / static_cast<double>(m);
}

double automatic_extent(const CatStateSpec& spec, std::size_t n) {
    spec.validate();
    if (n < 2) {
        throw std::invalid_argument("automatic_extent needs n >= 2");
    }
    const double span = static_cast<double>(n - 1);
    const double lo = spec.separation + 12.0 * spec.width;
    const double hi = span * spec.width / 8.0;
    const double target = std::clamp(spec.separation + 22.0 * spec.width, lo, std::max(lo, hi));
    if (spec.separation == 0.0 || hi < lo) {
        return target;
    }
    // extents span d / m with m of the parity of n - 1
    const auto parity = static_cast<long long>((n - 1) % 2);
    const auto m_lo = static_cast<long long>(std::ceil(span * spec.separation / hi));
    const auto m_hi = static_cast<long long>(std::floor(span * spec.separation / lo));
    double best = target;
    double best_gap = INFINITY;
    for (long long m = std::max(1LL, m_lo); m <= m_hi; ++m) {
        if (m % 2 != parity) {
            continue;
        }
        const double e = span * spec.separation / static_cast<double>(m);
        if (e >= lo && e <= hi && std::abs(e - target) < best_gap) {
            best = e;
            best_gap = std::abs(e - target);
        }
    }
    return best;
}

double dephasing_factor(const SystemParams& sys, const BathParams& bath, double dx, double t) {
    if (dx == 0.0) {
        return 1.0;
    }
    return std::exp(-dx * dx * decoherence_exponent(sys, bath, t) / sys.hbar);
}

DensityGrid evolve_dephasing(const DensityGrid& rho0, const SystemParams& sys,
                             const BathParams& bath, double t) {
    if (!(t >= rho0.time())) {
        throw std::invalid_argument("dephasing target time precedes the grid time");
    }
    const double theta = decoherence_exponent(sys, bath, t) - decoherence_exponent(sys, bath, rho0.time());
    const std::size_t n = rho0.size();
    std::vector<double> factor(2 * n - 1);
    for (std::size_t k = 0; k < factor.size(); ++k) {
        const double r = (static_cast<double>(k) - static_cast<double>(n - 1)) * rho0.spacing();
        factor[k] = std::exp(-r * r * theta / sys.hbar);
    }
    DensityGrid out = rho0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) *= factor[i + n - 1 - j];
        }
    }
    out.set_time(t);
    return out;
}

double grid_trace(const DensityGrid& rho) {
    return rho.values().diagonal().real().sum() * rho.spacing();
}

double hermiticity_residual(const DensityGrid& rho) {
    return (rho.values() - rho.values().adjoint()).cwiseAbs().maxCoeff();
}

double purity(const DensityGrid& rho) {
    const double dx = rho.spacing();
    return rho.values().cwiseAbs2().sum() * dx * dx;
}

double most_negative_eigenvalue(const DensityGrid& rho) {
    const Eigen::MatrixXcd hermitian = 0.5 * (rho.values() + rho.values().adjoint()) * rho.spacing();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double stability_limit(const SystemParams& sys, const DensityGrid& rho) {
    const double dx = rho.spacing();
    return 0.25 * sys.mass * dx * dx / sys.hbar;
}

double default_time_step(const SystemParams& sys, const DensityGrid& rho) {
    const double dx = rho.spacing();
    return 0.1 * sys.mass * dx * dx / sys.hbar;
}

std::vector<Snapshot> evolve_full(const DensityGrid& rho0, const SystemParams& sys,
                                  const BathParams& bath, const CoefficientSet& coeffs,
                                  const EvolveConfig& cfg, const Probe& probe) {
    sys.validate();
    bath.validate();
    if (rho0.size() < min_grid_points) {
        throw std::invalid_argument("grid must have at least " + std::to_string(min_grid_points) +
                                    " points per axis");
    }
    if (!(cfg.dt > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    if (cfg.dt > stability_limit(sys, rho0)) {
        throw std::invalid_argument("time step " + std::to_string(cfg.dt) +
                                    " exceeds the stability limit 0.25 M dx^2 / hbar = " +
                                    std::to_string(stability_limit(sys, rho0)));
    }
    if (!(cfg.t_end >= rho0.time())) {
        throw std::invalid_argument("t_end precedes the initial grid time");
    }
    if (cfg.record_every == 0) {
        throw std::invalid_argument("record_every must be at least 1");
    }

    const double t0 = rho0.time();
    const double span = cfg.t_end - t0;
    const auto steps = static_cast<std::size_t>(std::ceil(span / cfg.dt * (1.0 - 1e-12)));
    const double h = steps == 0 ? 0.0 : span / static_cast<double>(steps);

    DensityGrid rho = rho0;
    std::vector<Snapshot> out;
    auto record = [&](std::size_t k) {
        Snapshot s;
        s.step = k;
        s.time = rho.time();
        s.trace = grid_trace(rho);
        s.herm_residual = hermiticity_residual(rho);
        s.purity = purity(rho);
        s.observable = probe ? probe(rho) : std::numeric_limits<double>::quiet_NaN();
        if (cfg.snapshot_every != 0 && (k % cfg.snapshot_every == 0 || k == steps)) {
            s.grid = rho;
        }
        out.push_back(std::move(s));
    };

    record(0);
    LawsonStepper stepper(rho, sys, coeffs, cfg.terms);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        stepper.step(rho.values(), t, h);
        rho.set_time(t0 + static_cast<double>(k + 1) * h);
        if (!rho.values().allFinite()) {
            throw std::runtime_error("non-finite density matrix at step " + std::to_string(k + 1));
        }
        if ((k + 1) % cfg.record_every == 0 || k + 1 == steps) {
            record(k + 1);
        }
    }
    return out;
}

void write_snapshot(std::ostream& out, const DensityGrid& rho) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(rho.size()));
    put_le<double>(out, rho.lo());
    put_le<double>(out, rho.hi());
    put_le<double>(out, rho.time());
    const std::size_t n = rho.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            put_le<double>(out, rho(i, j).real());
            put_le<double>(out, rho(i, j).imag());
        }
    }
    if (!out) {
        throw std::runtime_error("failed to write grid snapshot");
    }
}

DensityGrid read_snapshot(std::istream& in) {
    const auto n = get_le<std::uint32_t>(in);
    const double lo = get_le<double>(in);
    const double hi = get_le<double>(in);
    const double time = get_le<double>(in);
    DensityGrid rho(n, lo, hi);
    rho.set_time(time);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = get_le<double>(in);
            const double im = get_le<double>(in);
            rho(i, j) = {re, im};
        }
    }
    return rho;
}

}  // namespace qbm
