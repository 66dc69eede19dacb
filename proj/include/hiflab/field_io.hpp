#pragma once

#include <optional>
#include <string>

#include "hiflab/field.hpp"

namespace hiflab {

// "HIF1" field files: 20-byte header (magic "HIF1", u32 version=1, u32 nx,
// u32 ny, u32 payload kind), then IEEE-754 LE doubles, row-major (y outer).
// Kind 0 = scalar (nx*ny doubles); kind 1 = symmetric 2x2, three planes
// a11, a12, a22 concatenated (3*nx*ny doubles).
enum class PayloadKind : std::uint32_t { scalar = 0, sym2x2 = 1 };

struct FieldFile {
  PayloadKind kind;
  std::optional<ScalarField> scalar;
  std::optional<MatrixField> matrix;
};

void write_field(const ScalarField& field, const std::string& path);
void write_field(const MatrixField& field, const std::string& path);

FieldFile read_field_file(const std::string& path);
ScalarField read_scalar_field(const std::string& path);
MatrixField read_matrix_field(const std::string& path);

}  // namespace hiflab
