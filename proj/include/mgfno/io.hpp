/// @file io.hpp
/// @brief Binary containers: the MGFD dataset format and a named-tensor archive
/// used for model checkpoints.
///
/// MGFD layout (all little-endian):
///   "MGFD" | u32 version=1 | u32 ndim | u64 extents[ndim] | u64 N |
///   f64 inputs[N * prod(extents)] | f64 outputs[N * prod(extents)] |
///   u64 metadata_length | metadata (UTF-8 JSON)
///
/// MGFT layout:
///   "MGFT" | u32 version=1 | u32 count | count entries of
///   u32 name_length | name | u8 kind (0 real, 1 complex) | u32 ndim |
///   u64 extents[ndim] | f64 values (real plane, then imaginary plane)
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgfno/tape.hpp"
#include "mgfno/tensor.hpp"

namespace mgfno {

/// Paired samples on a common grid: inputs and outputs are [N, grid...].
struct Dataset {
  Tensor inputs;
  Tensor outputs;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t count() const { return inputs.extent(0); }
  Shape grid() const;
  Tensor input(std::size_t i) const;
  Tensor output(std::size_t i) const;

  /// Samples [begin, end) as a new dataset sharing the metadata.
  Dataset slice(std::size_t begin, std::size_t end) const;
};

/// Stack equally shaped samples along a new leading axis.
Tensor stack(const std::vector<Tensor>& samples);

std::vector<std::uint8_t> dataset_bytes(const Dataset& ds);
Dataset dataset_from_bytes(const std::vector<std::uint8_t>& bytes);

void dataset_write(const Dataset& ds, const std::filesystem::path& path);
Dataset dataset_read(const std::filesystem::path& path);

struct NamedTensor {
  std::string name;
  NodeData value;
};

void archive_write(const std::vector<NamedTensor>& entries, const std::filesystem::path& path);
std::vector<NamedTensor> archive_read(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a byte buffer or a file.
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace mgfno
