#include "recall/http_provider.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace recall {

using nlohmann::json;

namespace {

struct SplitUrl {
    std::string host;    // scheme://host[:port]
    std::string prefix;  // path prefix, no trailing slash
};

SplitUrl split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    std::size_t path_start = base_url.find(
        '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

std::string api_key_or_throw(const std::string& env_name) {
    const char* key = std::getenv(env_name.c_str());
    if (!key || !*key)
        throw ProviderError("API key environment variable not set: " + env_name);
    return key;
}

json post_json(const HttpProviderConfig& config, const std::string& path, const json& body) {
    SplitUrl url = split_base_url(config.base_url);
    std::string key = api_key_or_throw(config.api_key_env);

    std::string error;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
        httplib::Client client(url.host);
        client.set_connection_timeout(config.timeout_sec);
        client.set_read_timeout(config.timeout_sec);
        httplib::Headers headers = {{"Authorization", "Bearer " + key}};
        auto res = client.Post(url.prefix + path, headers, body.dump(), "application/json");
        if (!res) {
            error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
            continue;
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
            error = "non-JSON response body";
            continue;
        }
        return parsed;
    }
    throw ProviderError("request to " + path + " failed: " + error);
}

}  // namespace

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {}

LLMResponse HttpChatProvider::chat(const LLMRequest& request, CallRole role) {
    validate(request);
    std::string model = !request.model_tag.empty() ? request.model_tag
                        : role == CallRole::Answer ? config_.model_answer
                                                   : config_.model_light;
    json messages = json::array();
    if (!request.system.empty())
        messages.push_back({{"role", "system"}, {"content", request.system}});
    messages.push_back({{"role", "user"}, {"content", request.user}});
    json body = {{"model", model},
                 {"temperature", request.temperature},
                 {"messages", std::move(messages)}};

    auto start = std::chrono::steady_clock::now();
    json resp = post_json(config_, "/chat/completions", body);
    auto latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);

    if (!resp.contains("choices") || resp["choices"].empty() ||
        !resp["choices"][0].contains("message"))
        throw ProviderError("chat response missing choices[0].message");
    std::string text = resp["choices"][0]["message"].value("content", "");
    return LLMResponse{std::move(text), latency, role};
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config)
    : config_(std::move(config)) {
    if (config_.embedding_dim == 0)
        throw std::invalid_argument("embedding dimension must be positive");
}

std::vector<double> HttpEmbeddingProvider::embed(std::string_view text) {
    json body = {{"model", config_.embedding_model}, {"input", std::string(text)}};
    json resp = post_json(config_, "/embeddings", body);
    if (!resp.contains("data") || resp["data"].empty() ||
        !resp["data"][0].contains("embedding"))
        throw ProviderError("embedding response missing data[0].embedding");
    auto vec = resp["data"][0]["embedding"].get<std::vector<double>>();
    if (vec.size() != config_.embedding_dim)
        throw ProviderError("embedding dimension mismatch: got " + std::to_string(vec.size()) +
                            ", configured " + std::to_string(config_.embedding_dim));
    return vec;
}

}  // namespace recall
