#pragma once

#include <filesystem>
#include <variant>

#include "jflow/grid.hpp"

namespace jflow {

/** JFLD field snapshots. Layout, all little-endian:
 *    "JFLD" | u32 version (=1) | u32 n1..n4 | u32 components | f64 samples
 *  components is 1 for a ScalarField and 4 for a FormField, whose samples are
 *  interleaved per point as (a11, a22, Re a12, Im a12). Points follow the
 *  GridShape layout (x4 fastest). */
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const ScalarField& f);
void write_snapshot(const std::filesystem::path& path, const FormField& f);

using Snapshot = std::variant<ScalarField, FormField>;

/// Throws UsageError on a missing file, bad magic, version or truncated data.
Snapshot read_snapshot(const std::filesystem::path& path);
ScalarField read_scalar_snapshot(const std::filesystem::path& path);
FormField read_form_snapshot(const std::filesystem::path& path);

}  // namespace jflow
