#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dxtrust {

// --- chat -------------------------------------------------------------------

struct ChatMessage {
    std::string role;  // "user" | "assistant"
    std::string text;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string system_text;
    std::vector<ChatMessage> messages;
    std::string model;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::uint64_t seed = 0;
};

/// Throws DomainError when messages are empty or temperature is negative.
void validate(const ChatRequest& request);

/// Script key: hash of (system_text, messages, seed). Model, temperature and
/// max_tokens do not participate.
std::string request_key(const ChatRequest& request);

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string identity() const = 0;
};

/// Replays scripted responses keyed by request_key(). Unknown keys raise
/// ScriptMiss. Immutable after construction.
class StubChatProvider final : public ChatProvider {
public:
    StubChatProvider() = default;
    explicit StubChatProvider(std::unordered_map<std::string, std::string> script)
        : script_(std::move(script)) {}

    /// Line records {key_hash, response_text}. Throws ParseError.
    static StubChatProvider from_file(const std::filesystem::path& path);

    std::string complete(const ChatRequest& request) override;
    std::string identity() const override { return "stub"; }
    std::size_t size() const noexcept { return script_.size(); }

private:
    std::unordered_map<std::string, std::string> script_;
};

/// Answers through a callback and records every (key, response) pair; used
/// to author stub scripts and to introspect prompts in tests.
class RecordingChatProvider final : public ChatProvider {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    explicit RecordingChatProvider(Responder responder, std::string identity = "recording")
        : responder_(std::move(responder)), identity_(std::move(identity)) {}

    std::string complete(const ChatRequest& request) override;
    std::string identity() const override { return identity_; }

    std::vector<ChatRequest> requests() const;
    std::map<std::string, std::string> script() const;

private:
    Responder responder_;
    std::string identity_;
    mutable std::mutex mu_;
    std::vector<ChatRequest> requests_;
    std::map<std::string, std::string> script_;
};

/// Serializes a script map as line records sorted by key.
std::string serialize_script(const std::map<std::string, std::string>& script);

// --- transport --------------------------------------------------------------

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;  // lowercase names
    bool network_error = false;
    std::string error;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const std::string& path, const std::string& body,
                              const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

/// cpp-httplib backed transport; `base_url` is "scheme://host[:port][/prefix]".
std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::seconds timeout = std::chrono::seconds(60));

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{500};
    std::chrono::milliseconds max_delay{30000};
    double multiplier = 2.0;
};

/// Caps in-flight remote requests across every provider sharing it.
class ConcurrencyLimiter {
public:
    explicit ConcurrencyLimiter(int max_in_flight) : slots_(max_in_flight < 1 ? 1 : max_in_flight) {}

    class Permit {
    public:
        explicit Permit(ConcurrencyLimiter& l) : limiter_(&l) { limiter_->slots_.acquire(); }
        ~Permit() { limiter_->slots_.release(); }
        Permit(const Permit&) = delete;
        Permit& operator=(const Permit&) = delete;

    private:
        ConcurrencyLimiter* limiter_;
    };

private:
    std::counting_semaphore<1024> slots_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Posts with retry on network errors, 408, 429 and 5xx. Delays grow
/// geometrically from base_delay, honour a Retry-After header when present,
/// and never decrease. Throws ProviderFailure carrying the attempt count.
class RetryingPoster {
public:
    RetryingPoster(HttpTransport& transport, RetryPolicy policy, Sleeper sleeper = {},
                   ConcurrencyLimiter* limiter = nullptr);

    HttpResponse post(const std::string& path, const std::string& body,
                      const std::vector<std::pair<std::string, std::string>>& headers);

private:
    HttpTransport& transport_;
    RetryPolicy policy_;
    Sleeper sleeper_;
    ConcurrencyLimiter* limiter_;
};

/// Chat-completions wire shape: {model, messages[], temperature, max_tokens,
/// seed} in, choices[0].message.content out.
class RemoteChatProvider final : public ChatProvider {
public:
    RemoteChatProvider(std::unique_ptr<HttpTransport> transport, std::string api_key, RetryPolicy policy = {},
                       Sleeper sleeper = {}, ConcurrencyLimiter* limiter = nullptr);

    std::string complete(const ChatRequest& request) override;
    std::string identity() const override { return "remote"; }

    static std::string request_body(const ChatRequest& request);

private:
    std::unique_ptr<HttpTransport> transport_;
    std::string api_key_;
    RetryingPoster poster_;
};

struct ProviderEnvironment {
    std::string api_key;
    std::string base_url;
    std::optional<std::string> embed_base_url;
};

/// Reads LLM_API_KEY, LLM_BASE_URL and EMBED_BASE_URL.
ProviderEnvironment provider_environment();

// --- embeddings -------------------------------------------------------------

struct EmbeddingVector {
    std::vector<double> values;
    std::uint64_t text_hash = 0;

    double norm() const;
};

/// 0 when either vector has zero norm.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Contract: referentially transparent (same text, same vector) and safe
/// for concurrent calls.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string identity() const = 0;
};

/// Hashed bag of normalized tokens, L2-normalized. A deterministic test
/// double, not a semantic encoder.
class LocalHashEmbedder final : public Embedder {
public:
    explicit LocalHashEmbedder(std::size_t dimension = 256) : dimension_(dimension) {}

    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dimension() const override { return dimension_; }
    std::string identity() const override { return "local-hash-" + std::to_string(dimension_); }

    std::size_t bucket(std::string_view token) const;

private:
    std::size_t dimension_;
};

/// Embeddings endpoint ({model, input} in, data[0].embedding out).
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(std::unique_ptr<HttpTransport> transport, std::string api_key, std::string model,
                   RetryPolicy policy = {}, Sleeper sleeper = {}, ConcurrencyLimiter* limiter = nullptr);

    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dimension() const override;
    std::string identity() const override { return "remote:" + model_; }

private:
    std::unique_ptr<HttpTransport> transport_;
    std::string api_key_;
    std::string model_;
    mutable RetryingPoster poster_;
    mutable std::mutex mu_;
    mutable std::size_t dimension_ = 0;
};

/// Memoizes another embedder; thread-safe.
class CachingEmbedder final : public Embedder {
public:
    explicit CachingEmbedder(const Embedder& inner) : inner_(inner) {}

    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dimension() const override { return inner_.dimension(); }
    std::string identity() const override { return inner_.identity(); }

private:
    const Embedder& inner_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, EmbeddingVector> cache_;
};

inline EmbeddingVector embed_text(const Embedder& embedder, std::string_view text)
{
    return embedder.embed(text);
}

}  // namespace dxtrust
