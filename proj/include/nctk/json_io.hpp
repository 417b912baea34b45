#pragma once

#include <string>

#include <json.hpp>

#include "nctk/types.hpp"

namespace nctk {

using json = nlohmann::json;

/// Complex numbers are written as [re, im]; plain numbers are accepted on read.
json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

json real_vector_to_json(const RealVector& v);
RealVector real_vector_from_json(const json& j);
/// Row-major array of arrays.
json real_matrix_to_json(const RealMatrix& m);
RealMatrix real_matrix_from_json(const json& j);

json complex_vector_to_json(const ComplexVector& v);
ComplexVector complex_vector_from_json(const json& j);
json complex_matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const json& j);

/// Reads and parses a JSON file; ParseError on I/O or syntax failure.
json read_json_file(const std::string& path);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace nctk
