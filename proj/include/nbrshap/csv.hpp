#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nbrshap/types.hpp"

namespace nbrshap {

// RFC-4180-style CSV with a header row, '.' decimal separator, numeric
// cells written as %.17g (doubles round-trip exactly). A sidecar schema
// file lists `name:kind` per line (kind = continuous|categorical); without
// one every feature is continuous.

Dataset read_dataset_csv(const std::filesystem::path& csv,
                         const std::optional<std::filesystem::path>& schema = std::nullopt);

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& csv);
void write_schema_file(const Dataset& ds, const std::filesystem::path& schema);

std::vector<std::pair<std::string, FeatureKind>> read_schema_file(
    const std::filesystem::path& schema);

std::string format_g17(double v);

}  // namespace nbrshap
