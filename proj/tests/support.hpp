#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>

#include "qualsim/data.hpp"
#include "qualsim/model.hpp"

namespace qualsim::test {

inline std::filesystem::path data_dir() { return QUALSIM_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return QUALSIM_TEST_DIR "/fixtures"; }

inline const Dataset& shipped() {
  static const Dataset dataset = data::load_fixtures(data_dir() / "fixtures").dataset;
  return dataset;
}

inline const FormatSpec& old_format() {
  static const FormatSpec f = load_format((data_dir() / "formats" / "pre2018.fmt").string());
  return f;
}

inline const FormatSpec& new_format() {
  static const FormatSpec f = load_format((data_dir() / "formats" / "post2018.fmt").string());
  return f;
}

inline int assoc(const std::string& name) { return shipped().index_of(name); }

// A fresh directory under the system temp path, removed on destruction.
struct ScratchDir {
  std::filesystem::path path;
  explicit ScratchDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("qualsim_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace qualsim::test
