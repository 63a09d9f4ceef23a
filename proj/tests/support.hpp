#ifndef RLFI_TESTS_SUPPORT_HPP_
#define RLFI_TESTS_SUPPORT_HPP_

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "rlfi/workflow_graph.hpp"

namespace rlfi::testing {

// 0 -a0-> 1 (terminal), reward carried by the variant.
inline WorkflowGraph two_state_graph() {
  return WorkflowGraph(2, 1, {{{0, 0}, {{1.0, 1, kDefaultStepReward, true}}}}, {1});
}

// 0 -> 1 -> 2 (terminal) on every action of a 2-action graph.
inline WorkflowGraph chain_graph() {
  std::map<EdgeKey, std::vector<Transition>> t;
  for (ActionId a = 0; a < 2; ++a) {
    t[{0, a}] = {{1.0, 1, kDefaultStepReward, false}};
    t[{1, a}] = {{1.0, 2, kDefaultStepReward, true}};
  }
  return WorkflowGraph(3, 2, std::move(t), {2});
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rlfi_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
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

}  // namespace rlfi::testing

#endif  // RLFI_TESTS_SUPPORT_HPP_
