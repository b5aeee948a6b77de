#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mscbf {

// One divergence-free Fourier mode of the 2pi-periodic torus.  The
// polarization is the unit vector k_perp/|k| of the pair representative,
// shared by k and -k so that real fields satisfy coeff(-k) = conj(coeff(k)).
struct Mode {
    int kx = 0;
    int ky = 0;
    double lambda = 0.0;  // Stokes eigenvalue |k|^2
    double pol_x = 0.0;
    double pol_y = 0.0;
    int pol_num_x = 0;  // integer numerators of the polarization: k . pol_num == 0 exactly
    int pol_num_y = 0;
    int conj = -1;                // index of the -k partner
    bool representative = false;  // exactly one of {k,-k}
};

namespace detail {
struct FftPlans;
}

/// Divergence-free spectral basis: all integer wave-vectors with
/// |k|_inf <= k_max, eigenvalues sorted nondecreasing, plus the collocation
/// grid used for pseudo-spectral products.
class StokesBasis {
public:
    // Rejects grids below the order-2 dealias rule grid >= 3*k_max.
    static std::shared_ptr<const StokesBasis> make(int k_max, int grid);

    int k_max() const { return k_max_; }
    int grid() const { return grid_; }
    std::size_t mode_count() const { return modes_.size(); }
    std::size_t pair_count() const { return representatives_.size(); }
    const std::vector<Mode>& modes() const { return modes_; }
    const Mode& mode(std::size_t i) const { return modes_[i]; }
    const std::vector<int>& representatives() const { return representatives_; }
    const std::vector<std::uint8_t>& dealias_mask() const { return dealias_mask_; }

    double lambda_min() const { return modes_.front().lambda; }
    double lambda_max() const { return modes_.back().lambda; }

    // Retained products of order q stay alias-free iff grid >= (q+1)*k_max.
    bool supports_product_order(int q) const { return grid_ >= (q + 1) * k_max_; }

    int mode_index(int kx, int ky) const;  // -1 when outside the retained set
    double cell_area() const;              // quadrature weight (2pi/M)^2

    // Evaluate coefficients on the grid (row-major, component arrays of M*M).
    void synthesize(std::span<const std::complex<double>> coeffs,
                    double* out_x, double* out_y) const;
    // All four partial derivatives d(v_j)/d(x_i) on the grid.
    void synthesize_gradient(std::span<const std::complex<double>> coeffs,
                             double* dx_vx, double* dy_vx,
                             double* dx_vy, double* dy_vy) const;
    // Leray projection of a grid vector field onto the retained modes.
    void analyze_project(const double* in_x, const double* in_y,
                         std::span<std::complex<double>> coeffs_out) const;

    ~StokesBasis();
    StokesBasis(const StokesBasis&) = delete;
    StokesBasis& operator=(const StokesBasis&) = delete;

private:
    StokesBasis(int k_max, int grid);

    int k_max_;
    int grid_;
    std::vector<Mode> modes_;
    std::vector<int> representatives_;
    std::vector<int> spectral_slot_;        // per mode: index into the MxM spectral array
    std::vector<int> mode_lookup_;          // (kx,ky) -> mode index
    std::vector<std::uint8_t> dealias_mask_;
    std::unique_ptr<detail::FftPlans> fft_;

    int lookup_slot(int kx, int ky) const;
};

using BasisPtr = std::shared_ptr<const StokesBasis>;

/// build_basis of the public surface; equivalent to StokesBasis::make.
BasisPtr build_basis(int k_max, int grid);

}  // namespace mscbf
