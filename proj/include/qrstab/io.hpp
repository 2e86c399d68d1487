// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_IO_HPP
#define QRSTAB_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrstab/certify.hpp"
#include "qrstab/focksim.hpp"
#include "qrstab/model.hpp"
#include "qrstab/opa.hpp"
#include "qrstab/perturbation.hpp"

namespace qrstab::io {

using nlohmann::json;

/// Malformed input document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complex entries are two-element arrays [re, im]; matrices are arrays of
/// rows. An empty array decodes to a 0 x `empty_cols` matrix.
json to_json(Complex c);
json to_json(const CMatrix& m);
json to_json(const CVector& v);
Complex complex_from_json(const json& j);
CMatrix matrix_from_json(const json& j, Eigen::Index empty_cols = 0);
CVector vector_from_json(const json& j);

json to_json(const LinearQuantumSystem& sys);
LinearQuantumSystem system_from_json(const json& j);

/// List of {i, j, k, l, re, im}.
json to_json(const PerturbationSeries& f);
PerturbationSeries series_from_json(const json& j, int channels);

json to_json(const SectorBounds& b);
SectorBounds bounds_from_json(const json& j);

/// Infinite norms encode as null.
json to_json(const StabilityCertificate& cert);
StabilityCertificate certificate_from_json(const json& j);

json to_json(const std::vector<Violation>& report);
json to_json(const fock::IdentityReport& report);

/// Shortest round-trip decimal.
std::string format_double(double v);

std::string region_mask_csv(const std::vector<RegionCell>& cells);
std::string region_curve_csv(const opa::RegionCurve& curve);
std::string trajectory_csv(const fock::FockTrajectory& traj, const std::vector<double>& slack);

/// Writes to a sibling temporary file then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

json read_json_file(const std::filesystem::path& path);

}  // namespace qrstab::io

#endif  // QRSTAB_IO_HPP
