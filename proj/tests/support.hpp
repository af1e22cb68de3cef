#pragma once

#include <filesystem>
#include <string>

#include "distopt/error.hpp"

// Scratch directory under the system temp dir, wiped on construction and
// destruction.
struct ScratchDir {
  std::filesystem::path path;
  explicit ScratchDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("distopt_test_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

#define CHECK_ERROR_CODE(expr, expected)                      \
  do {                                                        \
    bool thrown_ = false;                                     \
    try {                                                     \
      (void)(expr);                                           \
    } catch (const distopt::Error& e_) {                      \
      thrown_ = true;                                         \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());      \
    }                                                         \
    CHECK_MESSAGE(thrown_, "expected " #expected);            \
  } while (0)
