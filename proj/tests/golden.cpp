// Regression check of a fixture summary against configs/golden_hashes.json.
//
// Usage: golden <fixture> [--out DIR] [--reuse] [--update]
//   --reuse   hash DIR/<fixture>/summary.json if present instead of running again
//   --update  store the current hash

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shocklab/experiment.hpp"

using namespace shocklab;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: golden <fixture> [--out DIR] [--reuse] [--update]\n";
    return 2;
  }
  const std::string name = argv[1];
  fs::path out = "golden_runs";
  bool reuse = false, update = false;
  for (int k = 2; k < argc; ++k) {
    if (!std::strcmp(argv[k], "--out") && k + 1 < argc)
      out = argv[++k];
    else if (!std::strcmp(argv[k], "--reuse"))
      reuse = true;
    else if (!std::strcmp(argv[k], "--update"))
      update = true;
  }
  const fs::path configs = fs::path(SHOCKLAB_SOURCE_DIR) / "configs";
  const fs::path summary = out / name / "summary.json";
  const fs::path manifest = out / name / "manifest.json";
  bool have = false;
  if (reuse && fs::exists(summary) && fs::exists(manifest)) {
    std::ifstream in(manifest);
    have = nlohmann::json::parse(in).value("status", "") == "completed";
  }
  if (!have) {
    RunOptions o;
    o.out_root = out;
    std::ostringstream log;
    const int code = cmd_run(configs / (name + ".ini"), o, log, std::cerr);
    if (code != kExitOk) {
      std::cerr << log.str() << name << ": run exited with " << code << '\n';
      return 1;
    }
  }

  const std::string hash = sha256_file(summary);
  const fs::path store = configs / "golden_hashes.json";
  nlohmann::json hashes = nlohmann::json::object();
  if (fs::exists(store)) {
    std::ifstream in(store);
    hashes = nlohmann::json::parse(in);
  }
  if (update) {
    hashes[name] = hash;
    std::ofstream(store) << hashes.dump(2) << '\n';
    std::cout << name << ": stored " << hash << '\n';
    return 0;
  }
  if (!hashes.contains(name)) {
    std::cerr << name << ": no stored hash (run with --update)\n";
    return 1;
  }
  const bool same = hashes[name] == hash;
  std::cout << name << ": " << (same ? "match " : "MISMATCH ") << hash << '\n';
  if (!same) std::cerr << "expected " << hashes[name].get<std::string>() << '\n';
  return same ? 0 : 1;
}
