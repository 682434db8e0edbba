#include "recall/providers.hpp"

#include <cmath>

#include "recall/text.hpp"

namespace recall {

const char* tier_name(Tier t) {
    switch (t) {
        case Tier::Exact: return "EXACT";
        case Tier::Inferrable: return "INFERRABLE";
        case Tier::Partial: return "PARTIAL";
        case Tier::None: return "NONE";
    }
    return "?";
}

const char* call_role_name(CallRole r) {
    switch (r) {
        case CallRole::Extract: return "EXTRACT";
        case CallRole::Sufficiency: return "SUFFICIENCY";
        case CallRole::Refine: return "REFINE";
        case CallRole::Reason: return "REASON";
        case CallRole::Answer: return "ANSWER";
        case CallRole::Judge: return "JUDGE";
    }
    return "?";
}

void LLMProvider::validate(const LLMRequest& request) {
    if (request.temperature < 0.0 || request.temperature > 2.0)
        throw ProviderError("temperature out of range [0,2]");
    if (request.user.empty()) throw ProviderError("empty user message");
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += double(a[i]) * double(b[i]);
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dimension) : dim_(dimension) {
    if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::uint64_t HashEmbeddingProvider::fnv1a(std::string_view token) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : token) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<double> HashEmbeddingProvider::embed(std::string_view text) {
    std::vector<double> acc(dim_, 0.0);
    for (const auto& tok : tokenize(text)) {
        std::uint64_t h = fnv1a(tok);
        std::size_t idx = h % dim_;
        double sign = (h >> 63) ? -1.0 : 1.0;
        acc[idx] += sign;
    }
    double norm2 = 0.0;
    for (double v : acc) norm2 += v * v;
    std::vector<double> out(dim_, 0.0);
    if (norm2 > 0.0) {
        double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < dim_; ++i) out[i] = acc[i] * inv;
    }
    return out;
}

ScriptedProvider::ScriptedProvider(std::vector<Entry> script, bool strict)
    : script_(std::move(script)), used_(script_.size(), false), strict_(strict) {}

LLMResponse ScriptedProvider::chat(const LLMRequest& request, CallRole role) {
    validate(request);
    std::lock_guard<std::mutex> lock(mutex_);
    for (std::size_t i = 0; i < script_.size(); ++i) {
        if (used_[i]) continue;
        const Entry& e = script_[i];
        if (e.role && *e.role != role) continue;
        if (!e.pattern.empty() && request.user.find(e.pattern) == std::string::npos) continue;
        used_[i] = true;
        return LLMResponse{e.response, std::chrono::microseconds{0}, role};
    }
    if (strict_)
        throw ProviderError(std::string("scripted provider: no entry for role ") +
                            call_role_name(role) + " request: " + request.user.substr(0, 120));
    return LLMResponse{"", std::chrono::microseconds{0}, role};
}

std::size_t ScriptedProvider::remaining() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (bool u : used_)
        if (!u) ++n;
    return n;
}

}  // namespace recall
