#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dws/halfspace.hpp"

namespace dws::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline constexpr const char* kCodeVersion = "0.3.0";
inline constexpr std::uint32_t kFormatVersion = 1;

// malformed, truncated or tampered input files
struct FormatError : DomainError {
  using DomainError::DomainError;
};

// "DWSF" | version u32 | nx u32 | nz u32 | Lx f64 | Lz f64 | real u8 | values, z-major,
// f64 (real) or (re, im) f64 pairs, little-endian
std::string encode_field(const SpectralField& f);
SpectralField decode_field(const std::string& bytes);
void write_field(const fs::path& p, const SpectralField& f);
SpectralField read_field(const fs::path& p);

// the field format followed by ny u32, the y nodes, and the u layers top-down
// (always real). Only u is stored; read_halfspace returns uy = 0.
void write_halfspace(const fs::path& p, const HalfSpaceField& u);
HalfSpaceField read_halfspace(const fs::path& p);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t h);
std::string read_file(const fs::path& p);
// fnv1a of the file contents as 16 hex digits
std::string file_checksum(const fs::path& p);

// Sidecar next to every output: <file>.json with checksum, config hash, code version
// and caller-supplied fields under "data".
fs::path sidecar_path(const fs::path& file);
void write_sidecar(const fs::path& file, const std::string& config_hash, const json& data);
// reads the sidecar and compares its checksum with the file; FormatError on mismatch
json verify_sidecar(const fs::path& file);

void write_json(const fs::path& p, const json& j);
json read_json(const fs::path& p);
json report_json(const SolverReport& r);

// RFC 4180: fields with comma, quote, CR or LF are quoted, quotes doubled; CRLF line ends
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);
// shortest round-trip decimal
std::string num(double v);

}  // namespace dws::io
