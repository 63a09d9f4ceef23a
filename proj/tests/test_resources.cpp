#include <gtest/gtest.h>

#include "rlfi/command_plan.hpp"
#include "rlfi/files.hpp"
#include "rlfi/policy_eval.hpp"
#include "rlfi/reporting.hpp"

namespace rlfi {
namespace {

std::string resource(const char* name) {
  return read_text_file(std::filesystem::path(RLFI_RESOURCE_DIR) / name);
}

TEST(Resources, GraphMatchesEmbedded) {
  EXPECT_EQ(load_graph(resource("default_graph.json")), default_graph());
  EXPECT_EQ(resource("default_graph.json"), serialize_graph(default_graph()));
}

TEST(Resources, IdealMatchesEmbedded) {
  EXPECT_EQ(load_ideal(resource("default_ideal.json")), default_ideal());
}

TEST(Resources, MenuMatchesEmbedded) {
  EXPECT_EQ(load_menu(resource("default_menu.json")), default_menu());
}

TEST(Resources, TimingFixtureLoads) {
  EXPECT_EQ(load_timings(resource("timings_fixture.csv")).records.size(), 72u);
}

}  // namespace
}  // namespace rlfi
