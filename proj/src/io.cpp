// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace qrstab::io {

json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError("complex entry must be [re, im], got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix matrix_from_json(const json& j, Eigen::Index empty_cols) {
  if (!j.is_array()) throw FormatError("matrix must be an array of rows");
  if (j.empty()) return CMatrix::Zero(0, empty_cols);
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw FormatError("matrix rows must be arrays");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw FormatError("ragged matrix: row " + std::to_string(r) + " has wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

CVector vector_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("vector must be an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

json to_json(const LinearQuantumSystem& sys) {
  return {{"M1", to_json(sys.M1)}, {"M2", to_json(sys.M2)}, {"N1", to_json(sys.N1)},
          {"N2", to_json(sys.N2)}, {"E1", to_json(sys.E1)}, {"E2", to_json(sys.E2)}};
}

LinearQuantumSystem system_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("system must be an object");
  for (const char* key : {"M1", "N1", "E1"}) {
    if (!j.contains(key)) throw FormatError(std::string("system is missing ") + key);
  }
  LinearQuantumSystem s;
  s.M1 = matrix_from_json(j.at("M1"));
  const Eigen::Index n = s.M1.rows();
  s.M2 = j.contains("M2") ? matrix_from_json(j.at("M2"), n) : CMatrix::Zero(n, n);
  s.N1 = matrix_from_json(j.at("N1"), n);
  s.N2 = j.contains("N2") ? matrix_from_json(j.at("N2"), n) : CMatrix::Zero(s.N1.rows(), n);
  s.E1 = matrix_from_json(j.at("E1"), n);
  s.E2 = j.contains("E2") ? matrix_from_json(j.at("E2"), n) : CMatrix::Zero(s.E1.rows(), n);
  return s;
}

json to_json(const PerturbationSeries& f) {
  json out = json::array();
  for (const auto& [m, c] : f.terms()) {
    out.push_back({{"i", m.i}, {"j", m.j}, {"k", m.k}, {"l", m.l}, {"re", c.real()}, {"im", c.imag()}});
  }
  return out;
}

PerturbationSeries series_from_json(const json& j, int channels) {
  if (!j.is_array()) throw FormatError("series must be a list of {i, j, k, l, re, im}");
  PerturbationSeries f(channels);
  for (const json& t : j) {
    try {
      f.add({t.at("i").get<int>(), t.at("j").get<int>(), t.at("k").get<int>(), t.at("l").get<int>()},
            {t.value("re", 0.0), t.value("im", 0.0)});
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad series term: ") + e.what());
    }
  }
  return f;
}

json to_json(const SectorBounds& b) {
  return {{"gamma", b.gamma}, {"delta1", b.delta1}, {"delta2", b.delta2}};
}

SectorBounds bounds_from_json(const json& j) {
  SectorBounds b;
  b.gamma = j.value("gamma", b.gamma);
  b.delta1 = j.value("delta1", b.delta1);
  b.delta2 = j.value("delta2", b.delta2);
  return b;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

json to_json(const StabilityCertificate& cert) {
  json j;
  j["verdict"] = std::string(to_string(cert.verdict));
  j["F"] = to_json(cert.F);
  j["spectral_abscissa"] = cert.spectral_abscissa;
  j["hinf_primary"] = finite_or_null(cert.hinf_primary);
  j["hinf_reduced"] = finite_or_null(cert.hinf_reduced);
  j["P"] = cert.P ? to_json(*cert.P) : json(nullptr);
  j["mu"] = to_json(cert.mu);
  j["lambda_tilde"] = cert.lambda_tilde;
  j["lambda"] = cert.lambda;
  j["c"] = cert.c;
  j["c1"] = cert.c1;
  j["c2"] = cert.c2;
  j["c3"] = cert.c3;
  j["eps"] = cert.eps;
  j["qmi_max_eigenvalue"] = cert.qmi_max_eigenvalue;
  if (cert.invariant_level) j["invariant_level"] = finite_or_null(*cert.invariant_level);
  return j;
}

StabilityCertificate certificate_from_json(const json& j) {
  try {
    StabilityCertificate c;
    c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    c.F = matrix_from_json(j.at("F"));
    c.spectral_abscissa = j.at("spectral_abscissa").get<double>();
    c.hinf_primary = number_or_inf(j.at("hinf_primary"));
    c.hinf_reduced = number_or_inf(j.at("hinf_reduced"));
    if (!j.at("P").is_null()) c.P = matrix_from_json(j.at("P"));
    c.mu = vector_from_json(j.at("mu"));
    c.lambda_tilde = j.at("lambda_tilde").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.c = j.at("c").get<double>();
    c.c1 = j.at("c1").get<double>();
    c.c2 = j.at("c2").get<double>();
    c.c3 = j.at("c3").get<double>();
    c.eps = j.at("eps").get<double>();
    c.qmi_max_eigenvalue = j.at("qmi_max_eigenvalue").get<double>();
    if (j.contains("invariant_level")) c.invariant_level = number_or_inf(j.at("invariant_level"));
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad certificate: ") + e.what());
  }
}

json to_json(const std::vector<Violation>& report) {
  json out = json::array();
  for (const Violation& v : report) out.push_back({{"violation", v.what}, {"residual", v.residual}});
  return out;
}

json to_json(const fock::IdentityReport& report) {
  json r = json::object();
  for (const auto& [name, value] : report.residuals) r[name] = value;
  return {{"safe_cut", report.safe_cut}, {"residuals", r}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string region_mask_csv(const std::vector<RegionCell>& cells) {
  std::string out = "|z1|^2,|z2|^2,admissible,margin1,margin2\n";
  for (const RegionCell& c : cells) {
    out += format_double(c.z1sq) + ',' + format_double(c.z2sq) + ',' + (c.admissible ? '1' : '0') +
           ',' + format_double(c.worst.first) + ',' + format_double(c.worst.second) + '\n';
  }
  return out;
}

std::string region_curve_csv(const opa::RegionCurve& curve) {
  std::string out = "z1sq,z2sq_cap,active_constraint\n";
  for (const opa::RegionSample& s : curve.samples) {
    out += format_double(s.z1sq) + ',' + format_double(s.z2sq_max) + ',' +
           (s.active == opa::ActiveConstraint::First ? "d2" : "d3") + '\n';
  }
  return out;
}

std::string trajectory_csv(const fock::FockTrajectory& traj, const std::vector<double>& slack) {
  std::string out = "t,msq,bound,slack\n";
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    out += format_double(traj.times[s]) + ',' + format_double(traj.msq[s]) + ',' +
           (s < traj.bound.size() ? format_double(traj.bound[s]) : "") + ',' +
           (s < slack.size() ? format_double(slack[s]) : "") + '\n';
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace qrstab::io
