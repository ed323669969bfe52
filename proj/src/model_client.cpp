#include "tarepair/model_client.hpp"

#include <cstdlib>
#include <filesystem>
#include <httplib.h>
#include <json.hpp>

#include "tarepair/text.hpp"

namespace tarepair::synth {

namespace fs = std::filesystem;

std::string prompt_key(const std::string& prompt) { return text::fnv1a_hex(prompt); }

HttpModelClient::HttpModelClient(std::string url, std::string key, std::string model)
    : url_(std::move(url)), key_(std::move(key)), model_(std::move(model)) {}

std::unique_ptr<HttpModelClient> HttpModelClient::from_env() {
  const char* url = std::getenv("TAREPAIR_MODEL_URL");
  if (!url || !*url) throw ConfigError("external resolver needs TAREPAIR_MODEL_URL");
  const char* key = std::getenv("TAREPAIR_MODEL_KEY");
  const char* model = std::getenv("TAREPAIR_MODEL");
  return std::make_unique<HttpModelClient>(url, key ? key : "", model && *model ? model : "gpt-4.1-mini");
}

std::string HttpModelClient::complete(const std::string& prompt) {
  auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed model URL " + url_);
  auto path_begin = url_.find('/', scheme_end + 3);
  std::string origin = url_.substr(0, path_begin);
  std::string path = path_begin == std::string::npos ? "/" : url_.substr(path_begin);

  nlohmann::json body = {{"model", model_},
                         {"temperature", 0},
                         {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  httplib::Client cli(origin);
  cli.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);
  auto res = cli.Post(path, headers, body.dump(), "application/json");
  if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("model endpoint returned HTTP " + std::to_string(res->status));
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected model response: ") + e.what());
  }
}

ReplayClient::ReplayClient(std::string dir, bool dump_prompts) : dir_(std::move(dir)), dump_(dump_prompts) {}

std::string ReplayClient::complete(const std::string& prompt) {
  std::string key = prompt_key(prompt);
  fs::path reply = fs::path(dir_) / (key + ".reply");
  if (fs::exists(reply)) return text::read_file(reply.string());
  if (dump_) {
    fs::create_directories(dir_);
    text::write_file((fs::path(dir_) / (key + ".prompt")).string(), prompt);
  }
  throw TransportError("no replay fixture " + reply.string());
}

RecordingClient::RecordingClient(ModelClient& inner, std::string dir) : inner_(inner), dir_(std::move(dir)) {}

std::string RecordingClient::complete(const std::string& prompt) {
  std::string reply = inner_.complete(prompt);
  std::string key = prompt_key(prompt);
  fs::create_directories(dir_);
  text::write_file((fs::path(dir_) / (key + ".prompt")).string(), prompt);
  text::write_file((fs::path(dir_) / (key + ".reply")).string(), reply);
  return reply;
}

}  // namespace tarepair::synth
