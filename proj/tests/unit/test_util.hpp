#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "segcor/corpus_sim.hpp"
#include "segcor/label_model.hpp"

namespace segcor::test {

inline PhoneSet tiny_phoneset() {
  return PhoneSet::parse(
      "sil\tsilence\n"
      "a\tvowel\n"
      "o\tvowel\n"
      "i1\tvowel\tstressed\n"
      "o1\tvowel\tstressed\n"
      "u1\tvowel\tstressed\n"
      "n\tconsonant\n"
      "p\tconsonant\n"
      "t\tconsonant\n"
      "d\tconsonant\n");
}

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Alignment with microsecond-grid times, so label files round-trip exactly.
inline Alignment random_alignment(std::mt19937_64& rng, const PhoneSet& ps,
                                  const std::string& id = "u") {
  const auto symbols = ps.symbols();
  const int n = rand_int(rng, 1, 40);
  std::vector<Segment> segments;
  std::int64_t t_us = rand_int(rng, 0, 1) ? 0 : rand_int(rng, 0, 1000000);
  for (int i = 0; i < n; ++i) {
    const std::int64_t dur_us = rand_int(rng, 1, 500000);
    Segment s;
    s.phone = symbols[rng() % symbols.size()];
    s.start = static_cast<double>(t_us) / 1e6;
    t_us += dur_us;
    s.end = static_cast<double>(t_us) / 1e6;
    segments.push_back(std::move(s));
  }
  return Alignment(id, std::move(segments));
}

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("segcor_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace segcor::test
