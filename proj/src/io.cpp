#include "semicircle/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace semicircle::io {

namespace {

Json sinkhorn_summary(SinkhornStatus status, DivergenceReason reason, int iterations, double final_ds,
                      double condition) {
  Json j;
  j["status"] = to_string(status);
  j["reason"] = to_string(reason);
  j["iterations"] = iterations;
  j["final_ds"] = final_ds;
  j["condition"] = condition;
  return j;
}

const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("pencil document: missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("matrix: expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j.front().is_array()) throw SchemaError("matrix: rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw SchemaError("matrix: ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& entry = row.at(static_cast<std::size_t>(k));
      if (entry.is_number()) {
        m(i, k) = Complex(entry.get<double>(), 0.0);
      } else if (entry.is_array() && entry.size() == 2 && entry[0].is_number() && entry[1].is_number()) {
        m(i, k) = Complex(entry[0].get<double>(), entry[1].get<double>());
      } else {
        throw SchemaError("matrix: entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

Json real_matrix_to_json(const RMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

PencilDocument parse_pencil(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("pencil document: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("pencil document: top level must be an object");
  const Json& jn = require(j, "n");
  const Json& jr = require(j, "r");
  const Json& jm = require(j, "matrices");
  if (!jn.is_number_integer() || !jr.is_number_integer()) throw SchemaError("pencil document: n and r must be integers");
  const auto n = jn.get<long long>();
  const auto r = jr.get<long long>();
  if (n < 1 || r < 1) throw SchemaError("pencil document: need n >= 1 and r >= 1");
  if (!jm.is_array() || static_cast<long long>(jm.size()) != r)
    throw SchemaError("pencil document: 'matrices' must hold r matrices");

  PencilDocument doc;
  doc.hermitian = j.value("hermitian", true);
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SchemaError("pencil document: name must be a string");
    doc.name = j["name"].get<std::string>();
  }
  if (!doc.hermitian) throw SchemaError("pencil document: only Hermitian pencils are supported");
  std::vector<CMatrix> coefficients;
  for (const Json& entry : jm) {
    CMatrix a = matrix_from_json(entry);
    if (a.rows() != n || a.cols() != n) throw SchemaError("pencil document: matrix is not n x n");
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw SchemaError("pencil document: matrix declared Hermitian is not Hermitian within 1e-10");
    coefficients.push_back(std::move(a));
  }
  try {
    doc.pencil = HermitianPencil(std::move(coefficients), 1e-10);
  } catch (const InvalidInput& e) {
    throw SchemaError(std::string("pencil document: ") + e.what());
  }
  return doc;
}

PencilDocument load_pencil(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open pencil file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pencil(ss.str());
}

Json pencil_to_json(const HermitianPencil& pencil, const std::string& name) {
  Json j;
  if (!name.empty()) j["name"] = name;
  j["n"] = pencil.dim();
  j["r"] = pencil.size();
  j["hermitian"] = true;
  Json mats = Json::array();
  for (const CMatrix& a : pencil.coefficients()) mats.push_back(matrix_to_json(a));
  j["matrices"] = std::move(mats);
  return j;
}

Json to_json(const Classification& c) {
  Json j;
  j["verdict"] = to_string(c.verdict);
  if (c.blocks) {
    j["blocks"] = c.blocks->sizes;
    j["L"] = matrix_to_json(c.blocks->left);
    j["R"] = matrix_to_json(c.blocks->right);
    j["block_residual"] = c.blocks->residual;
  } else {
    j["blocks"] = nullptr;
  }
  if (c.witness) {
    Json w;
    w["dim_right"] = c.witness->right.cols();
    w["dim_left"] = c.witness->left.cols();
    w["right"] = matrix_to_json(c.witness->right);
    w["left"] = c.witness->left.cols() > 0 ? matrix_to_json(c.witness->left) : Json::array();
    w["residual"] = c.witness->residual;
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  j["sinkhorn"] = sinkhorn_summary(c.sinkhorn.status, c.sinkhorn.reason, c.sinkhorn.iterations,
                                   c.sinkhorn.final_ds, c.sinkhorn.condition);
  return j;
}

Json to_json(const SinkhornResult& s) {
  Json j = sinkhorn_summary(s.status, s.reason, s.iterations, s.final_ds(), s.condition);
  j["c1"] = matrix_to_json(s.c1);
  j["c2"] = matrix_to_json(s.c2);
  return j;
}

Json to_json(const CapacityResult& c) {
  Json j;
  j["value"] = c.value;
  j["method"] = to_string(c.method);
  j["minimizer"] = c.minimizer ? matrix_to_json(*c.minimizer) : Json(nullptr);
  j["residual"] = c.residual;
  j["iterations"] = c.iterations;
  j["cross_check"] = c.cross_check;
  return j;
}

Json to_json(const ScalingCertificate& c) {
  Json j;
  j["C"] = matrix_to_json(c.c);
  j["residual"] = c.residual;
  j["kernel_dimension"] = c.kernel.dim();
  Json basis = Json::array();
  for (const CMatrix& y : c.kernel.basis) basis.push_back(matrix_to_json(y));
  j["kernel"] = std::move(basis);
  j["spectral_gap"] = std::isfinite(c.kernel.spectral_gap) ? Json(c.kernel.spectral_gap) : Json(nullptr);
  j["trace_minimal"] = c.trace_minimal;
  j["foc_residual"] = c.foc_residual;
  j["jacobian"] = real_matrix_to_json(c.jacobian);
  Json eigs = Json::array();
  if (c.jacobian.size() > 0) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (c.jacobian + c.jacobian.transpose()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) eigs.push_back(es.eigenvalues()(i));
  }
  j["jacobian_eigenvalues"] = std::move(eigs);
  return j;
}

Json to_json(const DensityTable& t) {
  Json j;
  j["xs"] = t.xs;
  j["fs"] = t.fs;
  Json status = Json::array();
  for (PointStatus s : t.status) status.push_back(to_string(s));
  j["status"] = std::move(status);
  j["eps_path"] = t.eps_path;
  j["extrapolation_order"] = t.extrapolation_order;
  return j;
}

void write_csv(std::ostream& os, const DensityTable& t) {
  os << "x,f,status\n";
  for (std::size_t i = 0; i < t.xs.size(); ++i)
    os << format_double(t.xs[i]) << ',' << format_double(t.fs[i]) << ',' << to_string(t.status[i]) << '\n';
}

}  // namespace semicircle::io
