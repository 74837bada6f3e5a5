#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "sentgrid/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

#include "sentgrid/digest.hpp"
#include "sentgrid/labels.hpp"

namespace sentgrid::gen {

using nlohmann::json;

MockBackend::MockBackend(std::string id, const std::string& script_path) : id_(std::move(id)) {
  std::ifstream in(script_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mock script: " + script_path);
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw std::runtime_error("mock script " + script_path + ": malformed record at line " +
                               std::to_string(row));
    }
    if (rec.contains("derive_unscripted")) {
      derive_unscripted_ = rec["derive_unscripted"].get<bool>();
      salt_ = rec.value("salt", "");
    } else if (rec.contains("context_limit")) {
      context_limit_ = rec["context_limit"].get<long>();
    } else if (rec.contains("prompt_digest")) {
      Entry entry;
      entry.completion = rec.at("completion").get<std::string>();
      entry.fail_times = rec.value("fail_times", 0);
      exact_[{rec.at("prompt_digest").get<std::string>(), rec.at("sample_index").get<int>()}] =
          std::move(entry);
    } else {
      throw std::runtime_error("mock script " + script_path + ": unrecognized record at line " +
                               std::to_string(row));
    }
  }
}

std::string MockBackend::derived_completion(const std::string& prompt_digest, int sample_index,
                                            const std::string& salt) {
  const std::string h =
      sha256_hex(salt + "|" + prompt_digest + "|" + std::to_string(sample_index));
  const unsigned long v = std::stoul(h.substr(0, 8), nullptr, 16);
  const SentimentLabel label = kAllLabels[v % 3];
  const std::string tone = to_lower(to_string(label));
  if (v % 37 == 0) {
    return "The framing shifts between sections and no single stance toward the subject "
           "can be established from the text alone.";
  }
  switch ((v / 3) % 3) {
    case 0:
      return "The article concentrates on how the entity is characterized and keeps that "
             "framing throughout the piece.\nSentiment: " +
             std::string(to_string(label));
    case 1:
      return "Taken as a whole, the coverage reads " + tone + " toward the target entity.";
    default: {
      const SentimentLabel other = kAllLabels[(v % 3 + ((v / 9) % 2 ? 1 : 2)) % 3];
      return "Parts of the piece could be read as " + to_lower(to_string(other)) +
             ", but overall the coverage is " + tone + ".";
    }
  }
}

Completion MockBackend::complete(const std::string& prompt, const SamplingConfig&,
                                 int sample_index) {
  if (context_limit_ > 0 && static_cast<long>(prompt.size()) > context_limit_) {
    throw ContextLengthError("prompt of " + std::to_string(prompt.size()) +
                             " characters exceeds mock context limit of " +
                             std::to_string(context_limit_));
  }
  const std::string digest = sha256_hex(prompt);
  const std::pair<std::string, int> key{digest, sample_index};
  auto it = exact_.find(key);
  if (it != exact_.end()) {
    if (it->second.fail_times > 0) {
      std::lock_guard lock(mu_);
      if (failures_seen_[key] < it->second.fail_times) {
        ++failures_seen_[key];
        throw TransportError("mock transient failure " + std::to_string(failures_seen_[key]) +
                             "/" + std::to_string(it->second.fail_times));
      }
    }
    ++calls_;
    return {it->second.completion, 0};
  }
  if (!derive_unscripted_) {
    throw EndpointError(404, "mock backend " + id_ + " has no completion for digest " + digest +
                                 " index " + std::to_string(sample_index));
  }
  ++calls_;
  return {derived_completion(digest, sample_index, salt_), 0};
}

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool mentions_context_overflow(const std::string& body) {
  const std::string lower = to_lower(body);
  return lower.find("context length") != std::string::npos ||
         lower.find("context_length") != std::string::npos ||
         lower.find("maximum context") != std::string::npos ||
         lower.find("too many tokens") != std::string::npos;
}

}  // namespace

HttpBackend::HttpBackend(std::string id, Options options)
    : id_(std::move(id)), options_(std::move(options)) {
  if (options_.endpoint.empty()) throw std::invalid_argument("http backend needs an endpoint");
  if (options_.model.empty()) throw std::invalid_argument("http backend needs a model name");
}

Completion HttpBackend::complete(const std::string& prompt, const SamplingConfig& sampling,
                                 int sample_index) {
  const SplitUrl url = split_url(options_.endpoint);
  httplib::Client client(url.base);
  client.set_connection_timeout(options_.timeout_s, 0);
  client.set_read_timeout(options_.timeout_s, 0);

  httplib::Headers headers;
  if (!options_.auth_env.empty()) {
    if (const char* token = std::getenv(options_.auth_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  json body = {
      {"model", options_.model},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
      {"max_tokens", sampling.max_new_tokens},
  };
  if (sampling.mode == DecodeMode::Greedy) {
    body["temperature"] = 0.0;
  } else {
    body["temperature"] = sampling.temperature;
    body["top_p"] = sampling.top_p;
    body["top_k"] = sampling.top_k;
    body["seed"] = sampling.seed + static_cast<std::uint64_t>(sample_index);
  }

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  if (!res) {
    throw TransportError("no response from " + options_.endpoint + ": " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    if (mentions_context_overflow(res->body)) {
      throw ContextLengthError("endpoint rejected prompt as too long: " + res->body);
    }
    throw EndpointError(res->status, "endpoint returned status " + std::to_string(res->status) +
                                         ": " + res->body);
  }
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
    throw EndpointError(200, "endpoint returned an unparseable completion body");
  }
  const json& choice = parsed["choices"][0];
  std::string text;
  if (choice.contains("message")) {
    text = choice["message"].value("content", "");
  } else {
    text = choice.value("text", "");
  }
  return {text, static_cast<long>(elapsed)};
}

}  // namespace sentgrid::gen
