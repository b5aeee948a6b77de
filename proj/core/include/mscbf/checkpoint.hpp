#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mscbf/field.hpp"

namespace mscbf {

// Snapshot layout (little-endian):
//   u32 k_max, u32 grid_size, u32 mode_count,
//   mode_count x (f64 re, f64 im) in basis mode order.
// A trajectory file is a plain concatenation of snapshots.

void save_field(std::ostream& os, const VelocityField& u);
/// Reads one snapshot; reuses basis_hint when it matches the header.
VelocityField load_field(std::istream& is, const BasisPtr& basis_hint = nullptr);

void save_field_file(const std::string& path, const VelocityField& u);
VelocityField load_field_file(const std::string& path);

/// Strided trajectory recorder in the snapshot format.
class TrajectoryWriter {
public:
    TrajectoryWriter(const std::string& path, int stride = 1);
    ~TrajectoryWriter();
    /// Writes the field when step_index is a stride multiple.
    void record(const VelocityField& u, int step_index);
    int written() const { return written_; }

private:
    struct Impl;
    Impl* impl_;
    int stride_;
    int written_ = 0;
};

std::vector<VelocityField> load_trajectory(const std::string& path);

}  // namespace mscbf
