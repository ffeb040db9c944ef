#pragma once

#include <filesystem>
#include <iosfwd>

#include "ofrr/csr_matrix.hpp"

namespace ofrr {

/// Reads a `coordinate real symmetric` Matrix Market file into a fully
/// expanded FP64 CSR matrix. Duplicate entries are summed. Throws ParseError
/// (carrying the 1-based line number) on malformed input, and std::runtime_error
/// if the file cannot be opened.
CsrMatrix read_matrix_market(const std::filesystem::path& path);
CsrMatrix read_matrix_market(std::istream& in);

}  // namespace ofrr
