// Copyright 2026 The Clozekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLOZEKIT_TESTS_TEST_UTIL_H_
#define CLOZEKIT_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "clozekit/clozegen.h"
#include "clozekit/random.h"
#include "clozekit/tensor.h"

namespace clozekit::testing {

inline std::filesystem::path TestDataDir() { return CLOZEKIT_TEST_DATA_DIR; }

inline Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                           double scale = 1.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.Gaussian();
  return m;
}

inline RowVector RandomRow(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
  return RandomMatrix(1, n, seed, scale);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("clozekit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A small valid example: `window` one-token-plus-filler sentences that
// mention ten candidate names, the first of which is the answer.
inline ClozeExample MakeToyExample(std::size_t window = kDefaultWindow,
                                   const std::string& prefix = "Name") {
  ClozeExample ex;
  std::vector<std::string> names;
  for (int i = 0; i < 10; ++i) names.push_back(prefix + std::to_string(i));
  for (std::size_t s = 0; s < window; ++s) {
    ex.context.push_back({"then", names[s % names.size()], "spoke", "."});
  }
  ex.question = {"and", std::string(kGapTag), "left", "."};
  ex.answer = names[0];
  ex.candidates = names;
  ex.word_type = WordType::kNamedEntity;
  ex.source = {"toy", window};
  return ex;
}

}  // namespace clozekit::testing

#endif  // CLOZEKIT_TESTS_TEST_UTIL_H_
