#include "mscbf/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts are unsupported");

namespace mscbf {

namespace {

template <typename T>
void write_raw(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated stream");
    return v;
}

}  // namespace

void save_field(std::ostream& os, const VelocityField& u) {
    const StokesBasis& basis = *u.basis();
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(basis.k_max()));
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(basis.grid()));
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(basis.mode_count()));
    for (std::size_t i = 0; i < u.size(); ++i) {
        write_raw<double>(os, u[i].real());
        write_raw<double>(os, u[i].imag());
    }
    if (!os) throw std::runtime_error("checkpoint: write failed");
}

VelocityField load_field(std::istream& is, const BasisPtr& basis_hint) {
    const auto k_max = read_raw<std::uint32_t>(is);
    const auto grid = read_raw<std::uint32_t>(is);
    const auto count = read_raw<std::uint32_t>(is);
    BasisPtr basis = basis_hint;
    if (!basis || basis->k_max() != static_cast<int>(k_max) ||
        basis->grid() != static_cast<int>(grid)) {
        basis = build_basis(static_cast<int>(k_max), static_cast<int>(grid));
    }
    if (basis->mode_count() != count) {
        throw std::runtime_error("checkpoint: mode count does not match the header basis");
    }
    VelocityField u(basis);
    for (std::size_t i = 0; i < count; ++i) {
        const double re = read_raw<double>(is);
        const double im = read_raw<double>(is);
        u[i] = {re, im};
    }
    return u;
}

void save_field_file(const std::string& path, const VelocityField& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
    save_field(os, u);
}

VelocityField load_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    return load_field(is);
}

struct TrajectoryWriter::Impl {
    std::ofstream os;
};

TrajectoryWriter::TrajectoryWriter(const std::string& path, int stride)
    : impl_(new Impl), stride_(stride < 1 ? 1 : stride) {
    impl_->os.open(path, std::ios::binary);
    if (!impl_->os) {
        delete impl_;
        throw std::runtime_error("checkpoint: cannot open " + path);
    }
}

TrajectoryWriter::~TrajectoryWriter() { delete impl_; }

void TrajectoryWriter::record(const VelocityField& u, int step_index) {
    if (step_index % stride_ != 0) return;
    save_field(impl_->os, u);
    ++written_;
}

std::vector<VelocityField> load_trajectory(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    std::vector<VelocityField> out;
    BasisPtr hint;
    while (is.peek() != std::char_traits<char>::eof()) {
        VelocityField u = load_field(is, hint);
        hint = u.basis();
        out.push_back(std::move(u));
    }
    return out;
}

}  // namespace mscbf
