#include <cstdlib>

#include "rlfi/command_plan.hpp"

#ifdef RLFI_WITH_VIRUSTOTAL
#include <httplib.h>

#include "json_util.hpp"
#endif

namespace rlfi {

#ifdef RLFI_WITH_VIRUSTOTAL

namespace {

class VirusTotalClient : public HashLookupClient {
 public:
  explicit VirusTotalClient(std::string key) : key_(std::move(key)) {}

  HashVerdict lookup(const std::string& digest) override {
    httplib::SSLClient client("www.virustotal.com");
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    auto res = client.Get("/api/v3/files/" + digest, {{"x-apikey", key_}});
    if (!res) return {digest, std::nullopt, "virustotal: transport error"};
    if (res->status == 404) return {digest, std::nullopt, "virustotal: not found"};
    if (res->status != 200) {
      return {digest, std::nullopt, "virustotal: http " + std::to_string(res->status)};
    }
    try {
      const auto doc = detail::json::parse(res->body);
      const auto& stats = doc.at("data").at("attributes").at("last_analysis_stats");
      const int hits = stats.value("malicious", 0) + stats.value("suspicious", 0);
      return {digest, hits > 0, "virustotal: " + std::to_string(hits) + " engines"};
    } catch (const std::exception&) {
      return {digest, std::nullopt, "virustotal: unreadable response"};
    }
  }

 private:
  std::string key_;
};

}  // namespace

std::unique_ptr<HashLookupClient> make_virustotal_client() {
  const char* key = std::getenv("VT_API_KEY");
  if (!key || !*key) return nullptr;
  return std::make_unique<VirusTotalClient>(key);
}

#else

std::unique_ptr<HashLookupClient> make_virustotal_client() { return nullptr; }

#endif

}  // namespace rlfi
