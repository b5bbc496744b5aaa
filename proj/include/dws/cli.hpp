#pragma once

#include <ostream>

#include "dws/config.hpp"

namespace dws {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInput = 2, kExitRefused = 3 };

// dws ground-state|solve|reconstruct|validate [--config FILE] [--eps LIST] [--branch +|-|both]
//     [--grid NX NZ LX LZ] [--out DIR] [--force] [--threads N] [--cheap-dn] [--remainder]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Output layout under cfg.out:
//   ground_state.dwsf
//   solve/ground_eps<e>.dwsf, solve/zeta_eps<e>_<plus|minus>.dwsf, solve/summary.csv
//   reconstruct/eps<e>_<branch>/{eta,eta1,F,eta3}.dwsf, report.json, profile_z0.csv; reconstruct/summary.csv
//   validate/validate.json
// Every field and CSV has a <file>.json sidecar with checksum, config hash and code version.
int cmd_ground_state(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_reconstruct(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace dws
