#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "phasecon/model.hpp"

namespace phasecon {

inline constexpr const char* kSchemaVersion = "phasecon-v1";

// Design provenance stored alongside a constellation.
struct ConstellationMeta {
    std::string objective = "AMI";  // "AMI" or "PAMI"
    double snr_db = 0.0;
    double pnsd_deg = 0.0;
    std::uint64_t seed = 0;
};

struct ConstellationFile {
    Constellation constellation;
    std::optional<ConstellationMeta> meta;
};

// Canonical text: 17 significant digits, fixed key order, no whitespace
// variation. Byte-identical for equal inputs.
std::string to_json(const Constellation& c,
                    const std::optional<ConstellationMeta>& meta = std::nullopt);

// Throws Error(format_error) on malformed documents and propagates the
// validation errors of make_constellation.
ConstellationFile from_json(const std::string& text);

ConstellationFile read_constellation(const std::filesystem::path& path);
void write_constellation(const std::filesystem::path& path, const Constellation& c,
                         const std::optional<ConstellationMeta>& meta = std::nullopt);

// 64-bit FNV-1a over the canonical serialization of points and labels,
// as 16 hex digits.
std::string fingerprint(const Constellation& c);

// printf("%.17g")
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace phasecon
