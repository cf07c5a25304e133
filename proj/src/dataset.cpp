#include "symbsel/dataset.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace symbsel {

std::uint64_t hash_instance_ids(const std::vector<std::string>& ids) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& id : ids) {
    for (const char c : id) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= static_cast<unsigned char>('\n');
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ExprError("cannot open dataset for writing: " + path);
  std::fprintf(f, "# symbsel-dataset v1\n");
  std::fprintf(f, "# mode pair\n");
  std::fprintf(f, "# split %s\n", data.split.c_str());
  std::fprintf(f, "# instances %016llx\n",
               static_cast<unsigned long long>(data.instance_list_hash));
  std::fprintf(f, "# features");
  for (const auto& name : data.feature_names) {
    std::fprintf(f, " %s", name.c_str());
  }
  std::fprintf(f, "\n# samples %zu\n", data.samples.size());
  for (const auto& s : data.samples) {
    std::fprintf(f, "%d", s.decision);
    for (const double v : s.features) std::fprintf(f, ",%.17g", v);
    std::fputc('\n', f);
  }
  if (std::ferror(f)) {
    std::fclose(f);
    throw ExprError("dataset write failed: " + path);
  }
  std::fclose(f);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ExprError("cannot open dataset: " + path);
  Dataset data;
  std::string line;
  bool saw_magic = false;
  size_t declared = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "symbsel-dataset") {
        std::string version;
        hs >> version;
        if (version != "v1") {
          throw ExprError("unsupported dataset version in " + path);
        }
        saw_magic = true;
      } else if (key == "mode") {
        std::string mode;
        hs >> mode;
        if (mode != "pair") {
          throw ExprError("unsupported dataset mode: " + mode);
        }
      } else if (key == "split") {
        hs >> data.split;
      } else if (key == "instances") {
        std::string hex;
        hs >> hex;
        data.instance_list_hash = std::stoull(hex, nullptr, 16);
      } else if (key == "features") {
        std::string name;
        while (hs >> name) data.feature_names.push_back(name);
      } else if (key == "samples") {
        hs >> declared;
      }
      continue;
    }
    if (!saw_magic) {
      throw ExprError("dataset missing header block: " + path);
    }
    BehaviorSample s;
    s.features.reserve(Dataset::kFeatureWidth);
    const char* p = line.c_str();
    char* end = nullptr;
    s.decision = static_cast<int>(std::strtol(p, &end, 10));
    if (s.decision != kPreferNode1 && s.decision != kPreferNode2) {
      throw ExprError("dataset decision must be -1 or 1 in " + path);
    }
    p = end;
    while (*p == ',') {
      ++p;
      s.features.push_back(std::strtod(p, &end));
      if (end == p) throw ExprError("malformed dataset record in " + path);
      p = end;
    }
    if (static_cast<int>(s.features.size()) != Dataset::kFeatureWidth) {
      throw ExprError("dataset record has wrong feature width in " + path);
    }
    data.samples.push_back(std::move(s));
  }
  if (!saw_magic) throw ExprError("dataset missing header block: " + path);
  if (declared != 0 && declared != data.samples.size()) {
    throw ExprError("dataset sample count disagrees with header in " + path);
  }
  return data;
}

}  // namespace symbsel
