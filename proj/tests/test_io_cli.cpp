#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "dws/cli.hpp"
#include "dws/dno.hpp"
#include "dws/io.hpp"
#include "test_util.hpp"

using namespace dws;
using dws::testing::random_band_limited;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dws_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dws");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void flip_byte(const fs::path& p, size_t at) {
  std::string b = io::read_file(p);
  b[at] ^= 0x5a;
  std::ofstream(p, std::ios::binary | std::ios::trunc) << b;
}

// independent RFC 4180 reader
std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows(1);
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') cur += '"', ++i;
      else if (c == '"') quoted = false;
      else cur += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().push_back(cur), cur.clear();
    } else if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
      rows.back().push_back(cur), cur.clear();
      rows.emplace_back();
      ++i;
    } else {
      cur += c;
    }
  }
  if (rows.back().empty() && cur.empty()) rows.pop_back();
  return rows;
}

}  // namespace

TEST(FieldFile, RealAndComplexRoundTripBitExact) {
  Grid2D g(32, 16, 3.0, 2.0);
  const SpectralField r = random_band_limited(g, 6, 4, 3);
  const SpectralField c = SpectralField::from_coeffs(g, r.coeffs() * cplx(0.3, 1.1), false);
  for (const SpectralField* f : {&r, &c}) {
    const SpectralField back = io::decode_field(io::encode_field(*f));
    EXPECT_EQ(back.is_real(), f->is_real());
    EXPECT_EQ(back.grid().nx, 32);
    EXPECT_EQ(back.grid().Lz, 2.0);
    EXPECT_TRUE((back.values() == f->values()).all());
  }
  EXPECT_EQ(io::encode_field(r).size(), 4 + 4 * 3 + 16 + 1 + 8 * 32 * 16u);
}

TEST(FieldFile, RejectsMalformedInput) {
  Grid2D g(16, 16, 1.0, 1.0);
  const std::string good = io::encode_field(random_band_limited(g, 3, 3, 1));
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(io::decode_field(bad), io::FormatError);
  EXPECT_THROW(io::decode_field(good.substr(0, good.size() - 3)), io::FormatError);
  EXPECT_THROW(io::decode_field(good.substr(0, 10)), io::FormatError);
  EXPECT_THROW(io::decode_field(good + "x"), io::FormatError);
  bad = good;
  bad[4] = 9;  // version
  EXPECT_THROW(io::decode_field(bad), io::FormatError);
  bad = good;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(bad.data() + 33 + 8 * 5, &nan, 8);  // sixth value
  EXPECT_THROW(io::decode_field(bad), io::FormatError);
  EXPECT_THROW(io::decode_field(""), io::FormatError);
}

TEST(FieldFile, HalfSpaceRoundTrip) {
  Grid2D g(32, 16, 4.0, 4.0);
  const SpectralField eta = 0.05 * random_band_limited(g, 3, 2, 5);
  const SpectralField xi = random_band_limited(g, 3, 2, 6);
  const DnSolution s = solve_dn(eta, xi, DnoConfig{});
  const fs::path d = scratch("halfspace");
  io::write_halfspace(d / "u.dwsh", s.u);
  const HalfSpaceField back = io::read_halfspace(d / "u.dwsh");
  ASSERT_EQ(back.ny(), s.u.ny());
  for (int j = 0; j < back.ny(); ++j) {
    EXPECT_EQ(back.ygrid->y[j], s.u.ygrid->y[j]);
    EXPECT_LE((back.layer(j) - s.u.layer(j)).sup_norm(), 1e-15 * (1 + s.u.layer(j).sup_norm()));
  }
  flip_byte(d / "u.dwsh", 41 + 8 * 3);  // a y node
  EXPECT_THROW(io::read_halfspace(d / "u.dwsh"), io::FormatError);
  fs::remove_all(d);
}

TEST(Sidecar, DetectsTamperingAndAbsence) {
  const fs::path d = scratch("sidecar");
  const fs::path f = d / "a.dwsf";
  io::write_field(f, random_band_limited(Grid2D(16, 16, 1, 1), 2, 2, 4));
  EXPECT_THROW(io::verify_sidecar(f), io::FormatError);
  io::write_sidecar(f, "abc", io::json{{"k", 1}});
  const io::json j = io::verify_sidecar(f);
  EXPECT_EQ(j["config_hash"], "abc");
  EXPECT_EQ(j["data"]["k"], 1);
  flip_byte(f, 100);
  EXPECT_THROW(io::verify_sidecar(f), io::FormatError);
  fs::remove_all(d);
}

TEST(Checksum, Fnv1aKnownValues) {
  EXPECT_EQ(io::hex64(io::fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(io::hex64(io::fnv1a("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(io::hex64(io::fnv1a("foobar")), "85944171f73967e8");
}

TEST(Csv, QuotingSurvivesIndependentParser) {
  const std::vector<std::vector<std::string>> rows{
      {"plain", "with,comma", "say \"hi\"", ""},
      {"line\nbreak", "cr\r\nlf", "\"", "x"},
  };
  std::string text;
  for (const auto& r : rows) text += io::csv_row(r);
  EXPECT_EQ(io::csv_row({"a", "b"}), "a,b\r\n");
  EXPECT_EQ(io::csv_field("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(parse_csv(text), rows);
}

TEST(Csv, NumbersRoundTrip) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng) * std::pow(10.0, int(u(rng) * 20));
    EXPECT_EQ(std::stod(io::num(x)), x);
  }
  EXPECT_EQ(io::num(0.05), "0.05");
}

TEST(Config, ParsesSectionsAndReportsLines) {
  const auto m = parse_config_text("# c\n[grid]\nnx = 64  # trailing\n\n[wave]\neps = 0.1, 0.05\n");
  EXPECT_EQ(m.at("grid.nx"), "64");
  EXPECT_EQ(m.at("wave.eps"), "0.1, 0.05");
  try {
    parse_config_text("[grid]\nnx = 64\nnz\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse_config_text("nx = 3\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[grid\nnx = 3\n"), ConfigError);
  RunConfig c;
  EXPECT_THROW(c.set("grid.ny", "3"), ConfigError);
  EXPECT_THROW(c.set("grid.nx", "64x"), ConfigError);
  EXPECT_THROW(c.set("wave.branch", "up"), ConfigError);
  EXPECT_THROW(c.set("solver.cheap_dn", "maybe"), ConfigError);
  c.set("solver.fdnls_tol", "0");
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, HashTracksComputationalSettingsOnly) {
  RunConfig a, b;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.out = "elsewhere";
  b.force = true;
  b.threads = 4;
  EXPECT_EQ(a.hash(), b.hash());
  b.delta = 0.16;
  EXPECT_NE(a.hash(), b.hash());
  const fs::path d = scratch("config");
  std::ofstream(d / "x.cfg") << "[wave]\ndelta = 0.16\n[output]\nthreads = 2\n";
  EXPECT_EQ(load_config(d / "x.cfg").hash(), b.hash());
  std::ofstream(d / "y.cfg") << "[output]\nthreads = 2\n[wave]\ndelta = 0.16\n";
  EXPECT_EQ(load_config(d / "y.cfg").hash(), b.hash());
  fs::remove_all(d);
}

TEST(Config, CommensurateEnvelopeAndSurfaceGrid) {
  const double pi = 3.14159265358979323846;
  for (double e : {0.1, 0.05, 0.025}) {
    const Grid2D env = commensurate_envelope(Grid2D(128, 128, 12, 12), e);
    const double m = env.Lx / (e * pi);
    EXPECT_NEAR(m, std::round(m), 1e-9);
    EXPECT_LE(std::abs(env.Lx - 12), e * pi / 2);
    const Grid2D s = surface_for_envelope(env, e);
    EXPECT_NEAR(s.Lx, env.Lx / e, 1e-9);
    EXPECT_GE(pi * s.nx / s.Lx / 2, 8.0);  // |k1| <= 8 resolved
    EXPECT_GE(pi * s.nz / s.Lz / 2, 1.0);
  }
}

TEST(Cli, ArgumentAndConfigErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitInput);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(cli({"solve", "--bogus"}).code, kExitInput);
  EXPECT_EQ(cli({"solve", "--eps", "0"}).code, kExitInput);
  EXPECT_EQ(cli({"solve", "--eps", "abc"}).code, kExitInput);
  EXPECT_EQ(cli({"solve", "--grid", "64", "64", "12"}).code, kExitInput);
  EXPECT_EQ(cli({"solve", "--grid", "63", "64", "12", "12"}).code, kExitInput);
  EXPECT_EQ(cli({"solve", "--branch", "sideways"}).code, kExitInput);
  EXPECT_EQ(cli({"solve", "--config", "/nonexistent/x.cfg"}).code, kExitInput);
  const fs::path d = scratch("tol");
  std::ofstream(d / "t.cfg") << "[solver]\nfdnls_tol = 0\n";
  const CliRun r = cli({"solve", "--config", (d / "t.cfg").string(), "--out", (d / "o").string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("tolerances"), std::string::npos);
  EXPECT_FALSE(fs::exists(d / "o"));
  fs::remove_all(d);
}

TEST(Cli, GroundStateWritesVerifiedOutputAndRefusesOverwrite) {
  const fs::path d = scratch("gs");
  const std::vector<std::string> args{"ground-state", "--grid", "64", "64", "12", "12", "--out", d.string()};
  CliRun r = cli(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const fs::path f = d / "ground_state.dwsf";
  const io::json sc = io::verify_sidecar(f);
  EXPECT_LT(sc["data"]["residual_h1"].get<double>(), 1e-10);
  const SpectralField z = io::read_field(f);
  EXPECT_EQ(z.grid().nx, 64);
  EXPECT_NEAR(z.sup_norm(), sc["data"]["peak"].get<double>(), 1e-12);
  const std::string before = io::read_file(f);
  r = cli(args);
  EXPECT_EQ(r.code, kExitRefused);
  EXPECT_EQ(io::read_file(f), before);
  auto forced = args;
  forced.push_back("--force");
  EXPECT_EQ(cli(forced).code, kExitOk);
  EXPECT_EQ(io::read_file(f), before);
  fs::remove_all(d);
}

TEST(Cli, SolveIsDeterministicAcrossThreadCounts) {
  const fs::path d1 = scratch("solve1"), d2 = scratch("solve2");
  const std::vector<std::string> base{"solve", "--eps", "0.05,0.1", "--grid", "64", "64", "12", "12"};
  auto a1 = base, a2 = base;
  a1.insert(a1.end(), {"--out", d1.string(), "--threads", "1"});
  a2.insert(a2.end(), {"--out", d2.string(), "--threads", "2"});
  const CliRun r1 = cli(a1), r2 = cli(a2);
  ASSERT_EQ(r1.code, kExitOk) << r1.err;
  ASSERT_EQ(r2.code, kExitOk) << r2.err;
  for (const char* f : {"summary.csv", "zeta_eps0.05_plus.dwsf", "zeta_eps0.1_minus.dwsf", "ground_eps0.05.dwsf"})
    EXPECT_EQ(io::read_file(d1 / "solve" / f), io::read_file(d2 / "solve" / f)) << f;
  const auto rows = parse_csv(io::read_file(d1 / "solve" / "summary.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1][0], "0.05");
  EXPECT_EQ(rows[1][2], "true");
  const SpectralField zp = io::read_field(d1 / "solve" / "zeta_eps0.05_plus.dwsf");
  const SpectralField zm = io::read_field(d1 / "solve" / "zeta_eps0.05_minus.dwsf");
  EXPECT_LE((zp + zm).sup_norm(), 1e-10 * zp.sup_norm());  // zeta_- = -zeta_+
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Cli, DownstreamStagesRejectMissingOrCorruptInputs) {
  const fs::path d = scratch("chain");
  const std::vector<std::string> grid{"--grid", "64", "64", "12", "12", "--out", d.string()};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), grid.begin(), grid.end());
    return cli(a);
  };
  EXPECT_EQ(with({"reconstruct", "--eps", "0.05"}).code, kExitInput);
  EXPECT_EQ(with({"validate", "--eps", "0.05"}).code, kExitInput);
  ASSERT_EQ(with({"solve", "--eps", "0.05", "--branch", "+"}).code, kExitOk);
  flip_byte(d / "solve" / "zeta_eps0.05_plus.dwsf", 200);
  const CliRun r = with({"reconstruct", "--eps", "0.05", "--branch", "+"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("checksum"), std::string::npos);
  EXPECT_FALSE(fs::exists(d / "reconstruct"));
  fs::remove_all(d);
}
