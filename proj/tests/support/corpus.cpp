#include "corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "charon/cfg.hpp"
#include "charon/frontend.hpp"
#include "charon/passes.hpp"

namespace corpus {

std::string source_dir() { return TESTS_SOURCE_DIR; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Program> load(const std::string& dir) {
  std::vector<Program> out;
  for (const auto& entry : std::filesystem::directory_iterator(source_dir() + "/" + dir)) {
    if (entry.path().extension() != ".mirl") continue;
    out.push_back(Program{entry.path().stem().string(), entry.path().string(), read_file(entry.path().string())});
  }
  std::sort(out.begin(), out.end(), [](const Program& a, const Program& b) { return a.name < b.name; });
  return out;
}

charon::TranslatedCrate translate(const std::string& text, bool structured) {
  auto crate = charon::parse_crate(text);
  charon::run_pipeline(crate);
  if (structured) charon::restructure_crate(crate);
  return crate;
}

}  // namespace corpus
