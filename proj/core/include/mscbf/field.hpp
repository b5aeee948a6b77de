#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mscbf/basis.hpp"

namespace mscbf {

/// Velocity field as complex amplitudes over a StokesBasis.  Real fields
/// keep the Hermitian symmetry coeff(-k) = conj(coeff(k)); every operation
/// here preserves it.  Parseval: h_norm^2 == sum of squared amplitudes.
class VelocityField {
public:
    VelocityField() = default;
    explicit VelocityField(BasisPtr basis)
        : basis_(std::move(basis)), coeffs_(basis_->mode_count()) {}

    static VelocityField zero(BasisPtr basis) { return VelocityField(std::move(basis)); }

    // Real H-orthonormal cosine mode supported on {k,-k}: coeff = 1/sqrt(2)
    // on both partners, so h_norm == 1 and A e_k == lambda_k e_k.
    static VelocityField unit_mode(const BasisPtr& basis, int kx, int ky);

    const BasisPtr& basis() const { return basis_; }
    std::size_t size() const { return coeffs_.size(); }
    std::complex<double>& operator[](std::size_t i) { return coeffs_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return coeffs_[i]; }
    std::span<const std::complex<double>> coeffs() const { return coeffs_; }
    std::span<std::complex<double>> coeffs() { return coeffs_; }

    VelocityField& operator+=(const VelocityField& o);
    VelocityField& operator-=(const VelocityField& o);
    VelocityField& operator*=(double s);
    // this += s * o
    void axpy(double s, const VelocityField& o);

    friend VelocityField operator+(VelocityField a, const VelocityField& b) { a += b; return a; }
    friend VelocityField operator-(VelocityField a, const VelocityField& b) { a -= b; return a; }
    friend VelocityField operator*(double s, VelocityField a) { a *= s; return a; }

    void set_zero();
    bool finite() const;

    // Re/Im of the pair-representative coefficient map onto the real
    // orthonormal (cos, sin) coordinates: cos = sqrt(2) Re, sin = -sqrt(2) Im.
    double cos_coord(int rep_index) const;
    double sin_coord(int rep_index) const;
    void set_pair_coords(int rep_index, double cos_c, double sin_c);

private:
    BasisPtr basis_;
    std::vector<std::complex<double>> coeffs_;
};

bool same_basis(const VelocityField& a, const VelocityField& b);

/// L2 inner product (real by Hermitian symmetry).
double inner_h(const VelocityField& a, const VelocityField& b);
double h_norm(const VelocityField& u);
double h_norm_sq(const VelocityField& u);
double v_norm(const VelocityField& u);
double v_norm_sq(const VelocityField& u);

}  // namespace mscbf
