#pragma once
// Provider abstractions for LLM chat completion and text embedding, plus the
// deterministic offline implementations used by tests and mock-mode runs.

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "recall/types.hpp"

namespace recall {

struct LLMRequest {
    std::string system;
    std::string user;
    double temperature = 0.3;
    std::string model_tag;
};

struct LLMResponse {
    std::string text;
    std::chrono::microseconds latency{0};
    CallRole role = CallRole::Answer;
};

class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LLMProvider {
public:
    virtual ~LLMProvider() = default;

    // Throws ProviderError on failure; callers degrade per their contracts.
    virtual LLMResponse chat(const LLMRequest& request, CallRole role) = 0;

protected:
    // Shared request validation: temperature in [0,2], non-empty user text.
    static void validate(const LLMRequest& request);
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(std::string_view text) = 0;
    virtual std::size_t dimension() const = 0;
};

// Cosine similarity with the zero-vector convention: any zero operand
// yields similarity 0 rather than NaN.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Deterministic bag-of-words embedder: each token is FNV-hashed onto a
// signed coordinate of the output vector, then the vector is unit-normalized.
// Identical text always maps to the identical vector, and shared tokens give
// genuinely similar vectors, so retrieval tests exercise real ranking.
class HashEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(std::size_t dimension = 256);
    std::vector<double> embed(std::string_view text) override;
    std::size_t dimension() const override { return dim_; }

    static std::uint64_t fnv1a(std::string_view token);

private:
    std::size_t dim_;
};

// Scripted chat provider for offline traces. Entries are consumed in order;
// an entry matches when its role (if set) equals the request role and its
// pattern (if non-empty) is a substring of the request's user text. In
// strict mode an unmatched request throws instead of silently defaulting.
class ScriptedProvider final : public LLMProvider {
public:
    struct Entry {
        std::optional<CallRole> role;
        std::string pattern;
        std::string response;
    };

    ScriptedProvider(std::vector<Entry> script, bool strict = true);

    LLMResponse chat(const LLMRequest& request, CallRole role) override;

    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::vector<Entry> script_;
    std::vector<bool> used_;
    bool strict_;
};

}  // namespace recall
