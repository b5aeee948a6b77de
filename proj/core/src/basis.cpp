#include "mscbf/basis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace mscbf {

namespace detail {

// FFTW planner calls are not thread-safe; executions on distinct arrays are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlans {
    int n = 0;
    fftw_complex* probe = nullptr;  // alignment-representative buffer
    fftw_plan forward = nullptr;    // e^{-ikx}
    fftw_plan backward = nullptr;   // e^{+ikx}

    explicit FftPlans(int grid) : n(grid) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        probe = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        forward = fftw_plan_dft_2d(n, n, probe, probe, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_2d(n, n, probe, probe, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(probe);
    }
};

// Per-thread scratch keyed by grid size, fftw_malloc'd so alignment matches
// the plan buffers.
struct Scratch {
    fftw_complex* a = nullptr;
    fftw_complex* b = nullptr;
    std::size_t n2 = 0;
    ~Scratch() {
        if (a) fftw_free(a);
        if (b) fftw_free(b);
    }
};

Scratch& thread_scratch(int grid) {
    thread_local std::unordered_map<int, Scratch> pool;
    Scratch& s = pool[grid];
    if (!s.a) {
        s.n2 = static_cast<std::size_t>(grid) * grid;
        s.a = fftw_alloc_complex(s.n2);
        s.b = fftw_alloc_complex(s.n2);
    }
    return s;
}

}  // namespace detail

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

int wrap_signed(int idx, int n) {
    return idx <= n / 2 ? idx : idx - n;
}
}  // namespace

StokesBasis::StokesBasis(int k_max, int grid) : k_max_(k_max), grid_(grid) {}

StokesBasis::~StokesBasis() = default;

BasisPtr StokesBasis::make(int k_max, int grid) {
    if (k_max < 1) throw std::invalid_argument("StokesBasis: k_max must be >= 1");
    if (grid < 3 * k_max) {
        throw std::invalid_argument(
            "StokesBasis: dealias violation, grid must be >= 3*k_max for order-2 products");
    }
    auto basis = std::shared_ptr<StokesBasis>(new StokesBasis(k_max, grid));

    const int side = 2 * k_max + 1;
    basis->mode_lookup_.assign(static_cast<std::size_t>(side) * side, -1);

    for (int kx = -k_max; kx <= k_max; ++kx) {
        for (int ky = -k_max; ky <= k_max; ++ky) {
            if (kx == 0 && ky == 0) continue;
            Mode m;
            m.kx = kx;
            m.ky = ky;
            m.lambda = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            basis->modes_.push_back(m);
        }
    }
    std::sort(basis->modes_.begin(), basis->modes_.end(), [](const Mode& a, const Mode& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.kx != b.kx) return a.kx < b.kx;
        return a.ky < b.ky;
    });

    for (std::size_t i = 0; i < basis->modes_.size(); ++i) {
        const Mode& m = basis->modes_[i];
        basis->mode_lookup_[static_cast<std::size_t>(m.kx + k_max) * side + (m.ky + k_max)] =
            static_cast<int>(i);
    }
    for (std::size_t i = 0; i < basis->modes_.size(); ++i) {
        Mode& m = basis->modes_[i];
        m.conj = basis->mode_index(-m.kx, -m.ky);
        m.representative = (m.kx > 0) || (m.kx == 0 && m.ky > 0);
        // polarization of the pair representative, shared by both partners
        const int rx = m.representative ? m.kx : -m.kx;
        const int ry = m.representative ? m.ky : -m.ky;
        m.pol_num_x = -ry;
        m.pol_num_y = rx;
        const double norm = std::sqrt(static_cast<double>(rx) * rx + static_cast<double>(ry) * ry);
        m.pol_x = -ry / norm;
        m.pol_y = rx / norm;
        if (m.representative) basis->representatives_.push_back(static_cast<int>(i));
    }

    basis->spectral_slot_.resize(basis->modes_.size());
    for (std::size_t i = 0; i < basis->modes_.size(); ++i) {
        const Mode& m = basis->modes_[i];
        const int ix = (m.kx % grid + grid) % grid;
        const int iy = (m.ky % grid + grid) % grid;
        basis->spectral_slot_[i] = ix * grid + iy;
    }

    basis->dealias_mask_.assign(static_cast<std::size_t>(grid) * grid, 0);
    for (int ix = 0; ix < grid; ++ix) {
        for (int iy = 0; iy < grid; ++iy) {
            const int kx = wrap_signed(ix, grid);
            const int ky = wrap_signed(iy, grid);
            if (std::abs(kx) <= k_max && std::abs(ky) <= k_max && !(kx == 0 && ky == 0)) {
                basis->dealias_mask_[static_cast<std::size_t>(ix) * grid + iy] = 1;
            }
        }
    }

    basis->fft_ = std::make_unique<detail::FftPlans>(grid);
    return basis;
}

BasisPtr build_basis(int k_max, int grid) { return StokesBasis::make(k_max, grid); }

int StokesBasis::mode_index(int kx, int ky) const {
    if (std::abs(kx) > k_max_ || std::abs(ky) > k_max_) return -1;
    if (kx == 0 && ky == 0) return -1;
    const int side = 2 * k_max_ + 1;
    return mode_lookup_[static_cast<std::size_t>(kx + k_max_) * side + (ky + k_max_)];
}

double StokesBasis::cell_area() const {
    const double h = kTwoPi / grid_;
    return h * h;
}

void StokesBasis::synthesize(std::span<const std::complex<double>> coeffs,
                             double* out_x, double* out_y) const {
    detail::Scratch& s = detail::thread_scratch(grid_);
    const double scale = 1.0 / kTwoPi;
    for (int component = 0; component < 2; ++component) {
        std::fill_n(reinterpret_cast<std::complex<double>*>(s.a), s.n2, std::complex<double>(0));
        auto* spec = reinterpret_cast<std::complex<double>*>(s.a);
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            const Mode& m = modes_[i];
            const double pol = component == 0 ? m.pol_x : m.pol_y;
            spec[spectral_slot_[i]] += coeffs[i] * (pol * scale);
        }
        fftw_execute_dft(fft_->backward, s.a, s.b);
        auto* vals = reinterpret_cast<std::complex<double>*>(s.b);
        double* out = component == 0 ? out_x : out_y;
        for (std::size_t p = 0; p < s.n2; ++p) out[p] = vals[p].real();
    }
}

void StokesBasis::synthesize_gradient(std::span<const std::complex<double>> coeffs,
                                      double* dx_vx, double* dy_vx,
                                      double* dx_vy, double* dy_vy) const {
    detail::Scratch& s = detail::thread_scratch(grid_);
    const double scale = 1.0 / kTwoPi;
    double* outs[4] = {dx_vx, dy_vx, dx_vy, dy_vy};
    for (int which = 0; which < 4; ++which) {
        const int deriv = which % 2;      // 0: d/dx, 1: d/dy
        const int component = which / 2;  // 0: v_x, 1: v_y
        std::fill_n(reinterpret_cast<std::complex<double>*>(s.a), s.n2, std::complex<double>(0));
        auto* spec = reinterpret_cast<std::complex<double>*>(s.a);
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            const Mode& m = modes_[i];
            const double pol = component == 0 ? m.pol_x : m.pol_y;
            const double k = deriv == 0 ? m.kx : m.ky;
            spec[spectral_slot_[i]] += coeffs[i] * std::complex<double>(0.0, k) * (pol * scale);
        }
        fftw_execute_dft(fft_->backward, s.a, s.b);
        auto* vals = reinterpret_cast<std::complex<double>*>(s.b);
        for (std::size_t p = 0; p < s.n2; ++p) outs[which][p] = vals[p].real();
    }
}

void StokesBasis::analyze_project(const double* in_x, const double* in_y,
                                  std::span<std::complex<double>> coeffs_out) const {
    detail::Scratch& s = detail::thread_scratch(grid_);
    const double norm = 1.0 / (static_cast<double>(grid_) * grid_);

    std::vector<std::complex<double>> cx(modes_.size());
    for (int component = 0; component < 2; ++component) {
        const double* in = component == 0 ? in_x : in_y;
        auto* buf = reinterpret_cast<std::complex<double>*>(s.a);
        for (std::size_t p = 0; p < s.n2; ++p) buf[p] = in[p];
        fftw_execute_dft(fft_->forward, s.a, s.b);
        auto* spec = reinterpret_cast<std::complex<double>*>(s.b);
        if (component == 0) {
            for (std::size_t i = 0; i < modes_.size(); ++i)
                cx[i] = spec[spectral_slot_[i]] * norm;
        } else {
            for (std::size_t i = 0; i < modes_.size(); ++i) {
                const Mode& m = modes_[i];
                const std::complex<double> cy = spec[spectral_slot_[i]] * norm;
                coeffs_out[i] = kTwoPi * (cx[i] * m.pol_x + cy * m.pol_y);
            }
        }
    }
}

}  // namespace mscbf
