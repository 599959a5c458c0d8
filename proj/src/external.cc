#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdpgame/compiler.h"
#include "sdpgame/solver.h"

namespace sdpgame {

namespace {
std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}
}  // namespace

SolverResult solve_external(const SdpInstance& inst, const ExternalSolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  SolverResult res;
  auto finish = [&]() {
    res.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  };
  if (config.command.empty()) {
    res.message = "no external solver command configured";
    return finish();
  }
  namespace fs = std::filesystem;
  const fs::path dir(config.work_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path input = dir / (config.stem + ".dat-s");
  const fs::path output = dir / (config.stem + ".out");
  {
    std::ofstream os(input);
    os << emit_sdpa(inst, config.digits);
    if (!os) {
      res.message = "cannot write " + input.string();
      return finish();
    }
  }
  fs::remove(output, ec);
  std::string cmd = replace_all(config.command, "{input}", input.string());
  cmd = replace_all(cmd, "{output}", output.string());
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    res.message = "external solver exited with status " + std::to_string(rc);
    return finish();
  }
  std::ifstream is(output);
  if (!is) {
    res.message = "external solver produced no result file " + output.string();
    return finish();
  }
  std::stringstream buf;
  buf << is.rdbuf();
  try {
    res = parse_external_output(buf.str());
  } catch (const FormatError& e) {
    res = SolverResult{};
    res.message = e.what();
    return finish();
  }
  if (res.primal_blocks.size() == inst.blocks.size()) {
    try {
      const auto rep = verify_certificate(inst, res);
      res.equality_residual = rep.equality_residual;
      res.psd_residual = rep.psd_residual;
    } catch (const std::invalid_argument& e) {
      res.primal_blocks.clear();
      res.message += std::string("; ") + e.what();
    }
  } else {
    res.primal_blocks.clear();
    res.equality_residual = std::numeric_limits<double>::quiet_NaN();
    res.psd_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return finish();
}

}  // namespace sdpgame
