#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>

#include "expgap/curves.hpp"
#include "expgap/error.hpp"

namespace expgap::testing {

inline bool same_bits(double a, double b) {
  std::uint64_t x, y;
  std::memcpy(&x, &a, sizeof(x));
  std::memcpy(&y, &b, sizeof(y));
  return x == y;
}

inline bool same_bits(const CurveRow& a, const CurveRow& b) {
  return a.global_step == b.global_step && a.seed == b.seed && same_bits(a.v_learned, b.v_learned) &&
         same_bits(a.v_learned_greedy, b.v_learned_greedy) && same_bits(a.v_best_single, b.v_best_single) &&
         same_bits(a.v_top5_ever, b.v_top5_ever) && same_bits(a.v_top5_recent, b.v_top5_recent) &&
         same_bits(a.v_initial, b.v_initial) && same_bits(a.gap_ever, b.gap_ever) &&
         same_bits(a.gap_recent, b.gap_recent);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (name + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

template <typename Fn>
ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected an expgap::Error");
}

}  // namespace expgap::testing
