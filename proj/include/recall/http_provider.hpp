#pragma once
// Chat-completion and embedding clients for JSON-over-HTTP endpoints in the
// common /chat/completions and /embeddings shape. Provider-agnostic: the
// base URL, model tags, and key env var are all configuration.

#include <string>

#include "recall/providers.hpp"

namespace recall {

struct HttpProviderConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key_env = "RECALL_API_KEY";
    std::string model_light = "gpt-4o-mini";   // all roles except ANSWER
    std::string model_answer = "gpt-4o";       // full-scale model
    std::string embedding_model = "text-embedding-3-small";
    std::size_t embedding_dim = 1536;
    double temperature = 0.3;
    int timeout_sec = 60;
    int retries = 1;  // extra attempts after the first failure
};

class HttpChatProvider final : public LLMProvider {
public:
    explicit HttpChatProvider(HttpProviderConfig config);
    LLMResponse chat(const LLMRequest& request, CallRole role) override;

private:
    HttpProviderConfig config_;
};

class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpProviderConfig config);
    std::vector<double> embed(std::string_view text) override;
    std::size_t dimension() const override { return config_.embedding_dim; }

private:
    HttpProviderConfig config_;
};

}  // namespace recall
