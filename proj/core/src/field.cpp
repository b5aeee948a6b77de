#include "mscbf/field.hpp"

#include <cmath>
#include <stdexcept>

namespace mscbf {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
}

VelocityField VelocityField::unit_mode(const BasisPtr& basis, int kx, int ky) {
    VelocityField u(basis);
    const int i = basis->mode_index(kx, ky);
    if (i < 0) throw std::invalid_argument("unit_mode: wave-vector outside the basis");
    const int j = basis->mode(static_cast<std::size_t>(i)).conj;
    u.coeffs_[static_cast<std::size_t>(i)] = kInvSqrt2;
    u.coeffs_[static_cast<std::size_t>(j)] = kInvSqrt2;
    return u;
}

VelocityField& VelocityField::operator+=(const VelocityField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

VelocityField& VelocityField::operator-=(const VelocityField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

VelocityField& VelocityField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

void VelocityField::axpy(double s, const VelocityField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
}

void VelocityField::set_zero() {
    for (auto& c : coeffs_) c = 0.0;
}

bool VelocityField::finite() const {
    for (const auto& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

double VelocityField::cos_coord(int rep_index) const {
    const int i = basis_->representatives()[static_cast<std::size_t>(rep_index)];
    return std::sqrt(2.0) * coeffs_[static_cast<std::size_t>(i)].real();
}

double VelocityField::sin_coord(int rep_index) const {
    const int i = basis_->representatives()[static_cast<std::size_t>(rep_index)];
    return -std::sqrt(2.0) * coeffs_[static_cast<std::size_t>(i)].imag();
}

void VelocityField::set_pair_coords(int rep_index, double cos_c, double sin_c) {
    const int i = basis_->representatives()[static_cast<std::size_t>(rep_index)];
    const int j = basis_->mode(static_cast<std::size_t>(i)).conj;
    const std::complex<double> c(cos_c * kInvSqrt2, -sin_c * kInvSqrt2);
    coeffs_[static_cast<std::size_t>(i)] = c;
    coeffs_[static_cast<std::size_t>(j)] = std::conj(c);
}

bool same_basis(const VelocityField& a, const VelocityField& b) {
    return a.basis().get() == b.basis().get();
}

double inner_h(const VelocityField& a, const VelocityField& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    }
    return acc;
}

double h_norm_sq(const VelocityField& u) { return inner_h(u, u); }
double h_norm(const VelocityField& u) { return std::sqrt(h_norm_sq(u)); }

double v_norm_sq(const VelocityField& u) {
    double acc = 0.0;
    const auto& modes = u.basis()->modes();
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += modes[i].lambda * std::norm(u[i]);
    }
    return acc;
}

double v_norm(const VelocityField& u) { return std::sqrt(v_norm_sq(u)); }

}  // namespace mscbf
