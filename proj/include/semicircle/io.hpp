#pragma once

// Pencil documents and JSON / CSV emitters. Matrices are nested arrays of
// [re, im] pairs, row-major.

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "semicircle/pencil.hpp"
#include "semicircle/scaling.hpp"
#include "semicircle/spectra.hpp"

namespace semicircle::io {

using Json = nlohmann::ordered_json;

/// Raised for documents that do not follow the pencil schema.
class SchemaError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct PencilDocument {
  std::string name;
  bool hermitian = true;
  HermitianPencil pencil;
};

/// Parses {"n", "r", "hermitian", "matrices", "name"?}. Hermitian matrices
/// must agree with their adjoints within 1e-10.
PencilDocument parse_pencil(const std::string& text);
PencilDocument load_pencil(const std::string& path);
Json pencil_to_json(const HermitianPencil& pencil, const std::string& name = "");

Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);
Json real_matrix_to_json(const RMatrix& m);

Json to_json(const Classification& c);
Json to_json(const SinkhornResult& s);
Json to_json(const CapacityResult& c);
Json to_json(const ScalingCertificate& c);
Json to_json(const DensityTable& t);

/// `x,f,status` with 17 significant digits.
void write_csv(std::ostream& os, const DensityTable& t);

/// %.17g formatting.
std::string format_double(double v);

}  // namespace semicircle::io
