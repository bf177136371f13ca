#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "fdlab/errors.hpp"

// Scratch directory removed when the test case ends.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("fdlab_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Asserts that expr throws fdlab::Error carrying the given code.
#define CHECK_ERROR_CODE(expr, expected)                                  \
  do {                                                                    \
    bool caught_ = false;                                                 \
    try {                                                                 \
      (void)(expr);                                                       \
    } catch (const fdlab::Error& e_) {                                    \
      caught_ = true;                                                     \
      CHECK_MESSAGE(e_.code == fdlab::ErrorCode::expected, e_.what());    \
    }                                                                     \
    CHECK_MESSAGE(caught_, "expected " #expected " from " #expr);         \
  } while (0)
