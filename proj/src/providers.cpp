#include "dxtrust/providers.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"
#include "dxtrust/text.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace dxtrust {

// --- chat -------------------------------------------------------------------

void validate(const ChatRequest& request)
{
    if (request.messages.empty())
        throw DomainError("chat request has no messages");
    if (!(request.temperature >= 0.0))
        throw DomainError("chat request temperature must be >= 0");
}

std::string request_key(const ChatRequest& request)
{
    // Unit/record separators keep field boundaries unambiguous.
    std::string canon = request.system_text;
    canon += '\x1f';
    for (const auto& m : request.messages) {
        canon += m.role;
        canon += '\x1e';
        canon += m.text;
        canon += '\x1f';
    }
    canon += std::to_string(request.seed);
    return hex64(fnv1a64(canon));
}

StubChatProvider StubChatProvider::from_file(const std::filesystem::path& path)
{
    auto records =
        read_jsonl_file(path, [](std::size_t line, const std::string& msg) { throw ParseError(line, msg); });
    std::unordered_map<std::string, std::string> script;
    for (const auto& [line, rec] : records) {
        auto key = rec.find("key_hash");
        auto text = rec.find("response_text");
        if (key == rec.end() || !key->is_string() || text == rec.end() || !text->is_string())
            throw ParseError(line, "script record needs string fields key_hash and response_text");
        auto [it, inserted] = script.emplace(key->get<std::string>(), text->get<std::string>());
        if (!inserted && it->second != text->get<std::string>())
            throw ParseError(line, "conflicting responses for key " + it->first);
    }
    return StubChatProvider(std::move(script));
}

std::string StubChatProvider::complete(const ChatRequest& request)
{
    validate(request);
    std::string key = request_key(request);
    auto it = script_.find(key);
    if (it == script_.end())
        throw ScriptMiss(key);
    return it->second;
}

std::string RecordingChatProvider::complete(const ChatRequest& request)
{
    validate(request);
    std::string response = responder_(request);
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    script_[request_key(request)] = response;
    return response;
}

std::vector<ChatRequest> RecordingChatProvider::requests() const
{
    std::lock_guard lock(mu_);
    return requests_;
}

std::map<std::string, std::string> RecordingChatProvider::script() const
{
    std::lock_guard lock(mu_);
    return script_;
}

std::string serialize_script(const std::map<std::string, std::string>& script)
{
    std::vector<json> records;
    records.reserve(script.size());
    for (const auto& [key, text] : script)
        records.push_back(json{{"key_hash", key}, {"response_text", text}});
    return to_jsonl(records);
}

// --- transport --------------------------------------------------------------

namespace {

class HttplibTransport final : public HttpTransport {
public:
    HttplibTransport(std::string origin, std::string prefix, std::chrono::seconds timeout)
        : origin_(std::move(origin)), prefix_(std::move(prefix)), timeout_(timeout) {}

    HttpResponse post(const std::string& path, const std::string& body,
                      const std::vector<std::pair<std::string, std::string>>& headers) override
    {
        // One client per call: httplib clients are not meant to be shared
        // across threads.
        httplib::Client client(origin_);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);
        httplib::Headers h;
        for (const auto& [k, v] : headers)
            h.emplace(k, v);
        HttpResponse out;
        auto res = client.Post(prefix_ + path, h, body, "application/json");
        if (!res) {
            out.network_error = true;
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        out.body = res->body;
        for (const auto& [k, v] : res->headers)
            out.headers[to_lower_ascii(k)] = v;
        return out;
    }

private:
    std::string origin_;
    std::string prefix_;
    std::chrono::seconds timeout_;
};

bool retryable(const HttpResponse& r)
{
    return r.network_error || r.status == 408 || r.status == 429 || (r.status >= 500 && r.status <= 599);
}

std::optional<std::chrono::milliseconds> retry_after(const HttpResponse& r)
{
    auto it = r.headers.find("retry-after");
    if (it == r.headers.end())
        return std::nullopt;
    char* end = nullptr;
    double seconds = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || !(seconds >= 0))
        return std::nullopt;
    return std::chrono::milliseconds(static_cast<long long>(std::llround(seconds * 1000.0)));
}

std::string describe_failure(const HttpResponse& r)
{
    if (r.network_error)
        return "network error: " + r.error;
    std::string body = r.body.substr(0, 200);
    return "HTTP " + std::to_string(r.status) + (body.empty() ? "" : ": " + body);
}

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url, std::chrono::seconds timeout)
{
    auto scheme_end = base_url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = base_url.find('/', host_start);
    std::string origin = path_start == std::string::npos ? base_url : base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/')
        prefix.pop_back();
    return std::make_unique<HttplibTransport>(std::move(origin), std::move(prefix), timeout);
}

RetryingPoster::RetryingPoster(HttpTransport& transport, RetryPolicy policy, Sleeper sleeper,
                               ConcurrencyLimiter* limiter)
    : transport_(transport), policy_(policy), sleeper_(std::move(sleeper)), limiter_(limiter)
{
    if (!sleeper_)
        sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpResponse RetryingPoster::post(const std::string& path, const std::string& body,
                                  const std::vector<std::pair<std::string, std::string>>& headers)
{
    std::chrono::milliseconds previous{0};
    const int max_attempts = 1 + std::max(0, policy_.max_retries);
    for (int attempt = 1;; ++attempt) {
        HttpResponse r;
        {
            std::optional<ConcurrencyLimiter::Permit> permit;
            if (limiter_)
                permit.emplace(*limiter_);
            r = transport_.post(path, body, headers);
        }
        if (!r.network_error && r.status >= 200 && r.status < 300)
            return r;
        if (!retryable(r) || attempt >= max_attempts)
            throw ProviderFailure(attempt, describe_failure(r));

        double scaled = static_cast<double>(policy_.base_delay.count()) *
                        std::pow(policy_.multiplier, static_cast<double>(attempt - 1));
        auto delay = std::chrono::milliseconds(static_cast<long long>(
            std::min(scaled, static_cast<double>(policy_.max_delay.count()))));
        if (r.status == 429)
            if (auto advertised = retry_after(r))
                delay = *advertised;
        delay = std::max(delay, previous);
        previous = delay;
        sleeper_(delay);
    }
}

RemoteChatProvider::RemoteChatProvider(std::unique_ptr<HttpTransport> transport, std::string api_key,
                                       RetryPolicy policy, Sleeper sleeper, ConcurrencyLimiter* limiter)
    : transport_(std::move(transport)), api_key_(std::move(api_key)),
      poster_(*transport_, policy, std::move(sleeper), limiter)
{
}

std::string RemoteChatProvider::request_body(const ChatRequest& request)
{
    json messages = json::array();
    if (!request.system_text.empty())
        messages.push_back(json{{"role", "system"}, {"content", request.system_text}});
    for (const auto& m : request.messages)
        messages.push_back(json{{"role", m.role}, {"content", m.text}});
    json body{{"model", request.model},
              {"messages", messages},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens},
              {"seed", request.seed}};
    return body.dump();
}

std::string RemoteChatProvider::complete(const ChatRequest& request)
{
    validate(request);
    std::vector<std::pair<std::string, std::string>> headers;
    if (!api_key_.empty())
        headers.emplace_back("Authorization", "Bearer " + api_key_);
    HttpResponse r = poster_.post("/chat/completions", request_body(request), headers);
    json body = json::parse(r.body, nullptr, false);
    if (body.is_discarded())
        throw ProviderFailure(1, "response is not JSON");
    try {
        const json& content = body.at("choices").at(0).at("message").at("content");
        if (!content.is_string())
            throw ProviderFailure(1, "completion content is not a string");
        return content.get<std::string>();
    } catch (const json::exception&) {
        throw ProviderFailure(1, "response lacks choices[0].message.content");
    }
}

ProviderEnvironment provider_environment()
{
    auto get = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (!v || !*v)
            return std::nullopt;
        return std::string(v);
    };
    ProviderEnvironment env;
    env.api_key = get("LLM_API_KEY").value_or("");
    env.base_url = get("LLM_BASE_URL").value_or("https://api.openai.com/v1");
    env.embed_base_url = get("EMBED_BASE_URL");
    return env;
}

// --- embeddings -------------------------------------------------------------

double EmbeddingVector::norm() const
{
    double s = 0.0;
    for (double v : values)
        s += v * v;
    return std::sqrt(s);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b)
{
    if (a.values.size() != b.values.size())
        throw DomainError("embedding dimensions differ");
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        dot += a.values[i] * b.values[i];
    return dot / (na * nb);
}

std::size_t LocalHashEmbedder::bucket(std::string_view token) const
{
    return static_cast<std::size_t>(fnv1a64(token) % dimension_);
}

EmbeddingVector LocalHashEmbedder::embed(std::string_view text) const
{
    EmbeddingVector v;
    v.values.assign(dimension_, 0.0);
    std::string normalized = normalize(text);
    v.text_hash = fnv1a64(normalized);
    for (const auto& tok : tokenize_normalized(normalized))
        v.values[bucket(tok)] += 1.0;
    double n = v.norm();
    if (n > 0.0)
        for (double& x : v.values)
            x /= n;
    return v;
}

RemoteEmbedder::RemoteEmbedder(std::unique_ptr<HttpTransport> transport, std::string api_key, std::string model,
                               RetryPolicy policy, Sleeper sleeper, ConcurrencyLimiter* limiter)
    : transport_(std::move(transport)), api_key_(std::move(api_key)), model_(std::move(model)),
      poster_(*transport_, policy, std::move(sleeper), limiter)
{
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const
{
    std::vector<std::pair<std::string, std::string>> headers;
    if (!api_key_.empty())
        headers.emplace_back("Authorization", "Bearer " + api_key_);
    json req{{"model", model_}, {"input", std::string(text)}};
    HttpResponse r = poster_.post("/embeddings", req.dump(), headers);
    json body = json::parse(r.body, nullptr, false);
    EmbeddingVector v;
    v.text_hash = fnv1a64(text);
    try {
        for (const auto& x : body.at("data").at(0).at("embedding"))
            v.values.push_back(x.get<double>());
    } catch (const json::exception&) {
        throw ProviderFailure(1, "response lacks data[0].embedding");
    }
    std::lock_guard lock(mu_);
    if (dimension_ == 0)
        dimension_ = v.values.size();
    else if (dimension_ != v.values.size())
        throw ProviderFailure(1, "embedding dimension changed between calls");
    return v;
}

std::size_t RemoteEmbedder::dimension() const
{
    std::lock_guard lock(mu_);
    return dimension_;
}

EmbeddingVector CachingEmbedder::embed(std::string_view text) const
{
    std::string key(text);
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;
    }
    EmbeddingVector v = inner_.embed(text);
    std::lock_guard lock(mu_);
    return cache_.emplace(std::move(key), std::move(v)).first->second;
}

}  // namespace dxtrust
