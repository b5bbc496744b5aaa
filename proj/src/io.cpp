#include "dws/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dws::io {

static_assert(std::endian::native == std::endian::little, "the field format is little-endian");

namespace {

constexpr char kMagic[4] = {'D', 'W', 'S', 'F'};

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

struct Reader {
  const std::string& s;
  size_t pos = 0;

  template <class T>
  T get(const char* what) {
    if (pos + sizeof(T) > s.size()) throw FormatError(std::string("field file truncated while reading ") + what);
    T v;
    std::memcpy(&v, s.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
};

void put_header(std::string& out, const Grid2D& g, bool real) {
  out.append(kMagic, 4);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, std::uint32_t(g.nx));
  put<std::uint32_t>(out, std::uint32_t(g.nz));
  put<double>(out, g.Lx);
  put<double>(out, g.Lz);
  put<std::uint8_t>(out, real ? 1 : 0);
}

void put_values(std::string& out, const CArray& v, bool real) {
  for (long i = 0; i < v.size(); ++i) {
    put<double>(out, v.data()[i].real());
    if (!real) put<double>(out, v.data()[i].imag());
  }
}

std::pair<Grid2D, bool> get_header(Reader& r) {
  if (r.s.size() < 4 || std::memcmp(r.s.data(), kMagic, 4) != 0) throw FormatError("not a DWSF field file (bad magic)");
  r.pos = 4;
  const auto version = r.get<std::uint32_t>("version");
  if (version != kFormatVersion)
    throw FormatError("unsupported field format version " + std::to_string(version));
  const auto nx = r.get<std::uint32_t>("nx"), nz = r.get<std::uint32_t>("nz");
  const double Lx = r.get<double>("Lx"), Lz = r.get<double>("Lz");
  const auto real = r.get<std::uint8_t>("realness");
  if (real > 1) throw FormatError("bad realness byte");
  if (nx == 0 || nz == 0 || nx > (1u << 16) || nz > (1u << 16) || !(Lx > 0) || !(Lz > 0))
    throw FormatError("implausible grid in field header");
  try {
    return {Grid2D(int(nx), int(nz), Lx, Lz), real == 1};
  } catch (const DomainError& e) {
    throw FormatError(std::string("bad grid in field header: ") + e.what());
  }
}

CArray get_values(Reader& r, const Grid2D& g, bool real) {
  CArray v(g.nz, g.nx);
  for (long i = 0; i < v.size(); ++i) {
    const double re = r.get<double>("values");
    const double im = real ? 0.0 : r.get<double>("values");
    if (!std::isfinite(re) || !std::isfinite(im)) throw FormatError("non-finite value in field payload");
    v.data()[i] = cplx(re, im);
  }
  return v;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw DomainError("cannot open " + p.string() + " for writing");
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw DomainError("write failed: " + p.string());
}

}  // namespace

std::string encode_field(const SpectralField& f) {
  std::string out;
  put_header(out, f.grid(), f.is_real());
  put_values(out, f.values(), f.is_real());
  return out;
}

SpectralField decode_field(const std::string& bytes) {
  Reader r{bytes};
  const auto [g, real] = get_header(r);
  CArray v = get_values(r, g, real);
  if (r.pos != bytes.size()) throw FormatError("trailing bytes after field payload");
  return SpectralField::from_values(g, std::move(v), real);
}

void write_field(const fs::path& p, const SpectralField& f) { write_bytes(p, encode_field(f)); }

SpectralField read_field(const fs::path& p) { return decode_field(read_file(p)); }

void write_halfspace(const fs::path& p, const HalfSpaceField& u) {
  if (!u.ygrid) throw DomainError("write_halfspace: no y-grid");
  std::string out;
  put_header(out, u.grid, true);
  put<std::uint32_t>(out, std::uint32_t(u.ny()));
  for (double y : u.ygrid->y) put<double>(out, y);
  for (int j = 0; j < u.ny(); ++j) put_values(out, u.layer(j).values(), true);
  write_bytes(p, out);
}

HalfSpaceField read_halfspace(const fs::path& p) {
  const std::string bytes = read_file(p);
  Reader r{bytes};
  const auto [g, real] = get_header(r);
  if (!real) throw FormatError("half-space dump must be real");
  const auto ny = r.get<std::uint32_t>("ny");
  if (ny < 8 || ny > 100000) throw FormatError("implausible ny in half-space dump");
  std::vector<double> y(ny);
  for (auto& v : y) v = r.get<double>("y nodes");
  if (y[0] != 0 || !(y[1] < 0)) throw FormatError("y nodes must start at 0 and go down");
  // the grid is rebuilt from its parameters and must reproduce the stored nodes
  auto yg = YGrid::geometric(-y.back(), int(ny), -y[1]);
  for (std::uint32_t j = 0; j < ny; ++j)
    if (std::abs(yg->y[j] - y[j]) > 1e-12 * (1 + std::abs(y[j])))
      throw FormatError("stored y nodes are not a geometric grid this code can rebuild");
  HalfSpaceField u(g, yg);
  for (std::uint32_t j = 0; j < ny; ++j) u.u[j] = to_half(SpectralField::from_values(g, get_values(r, g, true), true));
  if (r.pos != bytes.size()) throw FormatError("trailing bytes after half-space payload");
  return u;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char b[17];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw DomainError("cannot open " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string file_checksum(const fs::path& p) { return hex64(fnv1a(read_file(p))); }

fs::path sidecar_path(const fs::path& file) { return fs::path(file.string() + ".json"); }

void write_sidecar(const fs::path& file, const std::string& config_hash, const json& data) {
  json j;
  j["file"] = file.filename().string();
  j["checksum_fnv1a64"] = file_checksum(file);
  j["config_hash"] = config_hash;
  j["code_version"] = kCodeVersion;
  j["data"] = data;
  write_json(sidecar_path(file), j);
}

json verify_sidecar(const fs::path& file) {
  const fs::path sc = sidecar_path(file);
  if (!fs::exists(sc)) throw FormatError("missing sidecar " + sc.string());
  const json j = read_json(sc);
  if (!j.contains("checksum_fnv1a64")) throw FormatError("sidecar without checksum: " + sc.string());
  const std::string want = j["checksum_fnv1a64"].get<std::string>();
  const std::string got = file_checksum(file);
  if (want != got) throw FormatError("checksum mismatch for " + file.string() + ": sidecar " + want + ", file " + got);
  return j;
}

void write_json(const fs::path& p, const json& j) { write_bytes(p, j.dump(2) + "\n"); }

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw FormatError("bad JSON in " + p.string() + ": " + e.what());
  }
}

json report_json(const SolverReport& r) {
  json j;
  j["solver"] = r.solver;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["message"] = r.message;
  j["residuals"] = r.residuals;
  j["contraction"] = r.contraction;
  json v = json::object();
  for (const auto& [k, x] : r.values) v[k] = std::isfinite(x) ? json(x) : json(nullptr);
  j["values"] = v;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\r\n";
}

std::string num(double v) {
  char b[32];
  const auto res = std::to_chars(b, b + sizeof b, v);
  return std::string(b, res.ptr);
}

}  // namespace dws::io
