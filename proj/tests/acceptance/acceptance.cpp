// Acceptance table: one PASS/FAIL line per criterion.
//   acceptance            all criteria
//   acceptance --only ID  a single criterion (exit 0 iff it passes)

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "thermalscatter_cli/criteria.hpp"
#include "thermalscatter_cli/run_config.hpp"

namespace {

namespace fs = std::filesystem;
using ts::cli::CriterionResult;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs `report` twice at threads = 1 with the same config and seed and compares the bytes.
CriterionResult reproducibility() {
  CriterionResult r;
  r.id = "10";
  r.title = "report twice at threads = 1 gives byte-identical JSON";
  const fs::path dir = fs::temp_directory_path() / ("thermalscatter_repro_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string exe = THERMALSCATTER_EXE;
  std::string outputs[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / ("run" + std::to_string(k) + ".json");
    const std::string cmd = "\"" + exe + "\" report --threads 1 --seed 0 --output-dir \"" + dir.string() + "\" > \"" +
                            out.string() + "\"";
    codes[k] = std::system(cmd.c_str());
    outputs[k] = slurp(out);
  }
  fs::remove_all(dir);
  const bool identical = outputs[0] == outputs[1];
  r.measured = {{"bytes", outputs[0].size()}, {"identical", identical}, {"exit_codes", {codes[0], codes[1]}}};
  r.pass = identical && !outputs[0].empty();
  return r;
}

void print(const CriterionResult& r) {
  std::printf("%s %-3s %s", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str());
  if (r.expected_failure && !r.pass) std::printf(" [known gap]");
  std::printf("\n    %s\n", r.measured.dump().c_str());
  if (!r.detail.empty()) std::printf("    %s\n", r.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> ids = ts::cli::criterion_ids();
  ids.push_back("10");
  if (argc == 3 && std::string(argv[1]) == "--only") {
    ids = {argv[2]};
  } else if (argc != 1) {
    std::fprintf(stderr, "usage: acceptance [--only ID]\n");
    return 2;
  }
  const ts::cli::RunConfig config;
  bool all = true;
  for (const auto& id : ids) {
    CriterionResult r;
    try {
      r = id == "10" ? reproducibility() : ts::cli::evaluate_criterion(id, config);
    } catch (const std::exception& e) {
      r.id = id;
      r.title = "evaluation raised";
      r.detail = e.what();
    }
    print(r);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
