#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "wfpl/kernel.hpp"

namespace wfpl {

inline constexpr std::uint32_t kKernelFormatVersion = 1;

/// Writes the kernel as a binary blob (magic, version, spec hash, faces,
/// weights) and a JSON sidecar `<path>.json` with spec hash, cell count,
/// quadrature order, kernel order and truncation_error_bound.
void save_kernel(const KernelMatrix& K, const std::filesystem::path& path);

/// Reads a blob written by save_kernel. Throws ConfigError when the file is
/// missing or malformed, or when the spec hash or cell faces differ from grid.
KernelMatrix load_kernel(const std::filesystem::path& path, const GridPtr& grid);

/// Loads path when it matches grid and options, otherwise assembles and saves.
KernelMatrix cached_kernel(const std::filesystem::path& path, const GridPtr& grid, const KernelOptions& options = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace wfpl
