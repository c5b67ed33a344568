#pragma once

// Reader and writer for the `.lvt` tensor interchange format.
//
// Layout, all integers little-endian:
//
//   offset  size       field
//   0       4          magic "LVT1"
//   4       4          version (u32, currently 1)
//   8       4          rank (u32, 1 or 2)
//   12      8*rank     dims (u64 each, every dim >= 1)
//   ..      4          dtype_code (u32: 0 = binary64, 1 = binary32)
//   ..      4          meta_len (u32)
//   ..      meta_len   UTF-8 JSON object
//   ..      rest       row-major payload, exactly prod(dims) * width bytes
//
// Metadata keys written by this toolkit: "model", "layer", "prompt_set", "role".
// Numeric code never reads anything else from the metadata.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "l2v/matrix.hpp"

namespace l2v::store {

inline constexpr std::string_view kMagic = "LVT1";
inline constexpr std::uint32_t kVersion = 1;

enum class DType : std::uint32_t { f64 = 0, f32 = 1 };

std::size_t dtype_width(DType dtype);

enum class Role { positive, negative, direction, pattern };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

/// Final-token hidden states of one (model, layer) pair, one sample per row.
struct ActivationMatrix {
    Matrix values;
    Role role = Role::positive;
    int layer = 0;
    std::string source_tag;
    std::string prompt_set;

    std::size_t n() const noexcept { return values.rows(); }
    std::size_t d() const noexcept { return values.cols(); }
};

/// Raw decoded file: header fields plus payload upconverted to binary64.
struct TensorFile {
    std::vector<std::uint64_t> dims;
    DType dtype = DType::f64;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<double> values;

    std::uint32_t rank() const noexcept { return static_cast<std::uint32_t>(dims.size()); }
};

std::vector<std::uint8_t> encode(const TensorFile& file);
TensorFile decode(std::span<const std::uint8_t> bytes);

TensorFile read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const TensorFile& file);

/// Throws format error naming (row, col) of the first non-finite entry.
void require_finite(const Matrix& m, std::string_view what);

TensorFile to_file(const ActivationMatrix& matrix, DType precision);
ActivationMatrix from_file(const TensorFile& file);

void write_tensor(const std::filesystem::path& path, const ActivationMatrix& matrix,
                  DType precision = DType::f64);
ActivationMatrix read_tensor(const std::filesystem::path& path);

}  // namespace l2v::store
