#pragma once

// Language-model clients: live HTTP, fixture replay, and recording.

#include <memory>
#include <string>

#include "tarepair/error.hpp"

namespace tarepair::synth {

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message) : Error("TransportError", message) {}
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  // Reply text for one prompt. Throws TransportError.
  virtual std::string complete(const std::string& prompt) = 0;
};

// Fixture key of a prompt.
std::string prompt_key(const std::string& prompt);

// OpenAI-compatible chat-completions endpoint.
// Environment: TAREPAIR_MODEL_URL (required), TAREPAIR_MODEL_KEY, TAREPAIR_MODEL.
class HttpModelClient : public ModelClient {
 public:
  HttpModelClient(std::string url, std::string key, std::string model);
  // Throws ConfigError when TAREPAIR_MODEL_URL is unset.
  static std::unique_ptr<HttpModelClient> from_env();
  std::string complete(const std::string& prompt) override;

 private:
  std::string url_, key_, model_;
};

// Serves `<dir>/<prompt_key>.reply`. With `dump_prompts`, a miss also writes
// `<dir>/<prompt_key>.prompt` so fixtures can be authored.
class ReplayClient : public ModelClient {
 public:
  explicit ReplayClient(std::string dir, bool dump_prompts = false);
  std::string complete(const std::string& prompt) override;

 private:
  std::string dir_;
  bool dump_;
};

// Forwards to another client and stores each exchange as a replay fixture.
class RecordingClient : public ModelClient {
 public:
  RecordingClient(ModelClient& inner, std::string dir);
  std::string complete(const std::string& prompt) override;

 private:
  ModelClient& inner_;
  std::string dir_;
};

}  // namespace tarepair::synth
