#include "codeshot/gateway.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "codeshot/errors.hpp"
#include "codeshot/hash.hpp"

namespace codeshot {

using nlohmann::ordered_json;

std::string_view to_string(Sampling sampling) {
    return sampling == Sampling::greedy ? "greedy" : "sampled";
}

std::optional<Sampling> parse_sampling(std::string_view text) {
    if (text == "greedy") return Sampling::greedy;
    if (text == "sampled") return Sampling::sampled;
    return std::nullopt;
}

std::string_view to_string(TemplateFamily family) {
    return family == TemplateFamily::inst_wrapped ? "inst-wrapped"
                                                  : "human-assistant";
}

std::optional<TemplateFamily> parse_template_family(std::string_view text) {
    if (text == "inst-wrapped") return TemplateFamily::inst_wrapped;
    if (text == "human-assistant") return TemplateFamily::human_assistant;
    return std::nullopt;
}

namespace {

// Cache key: prompt content hash plus everything that changes the reply.
std::string cache_key(const std::string& prompt, const ModelTarget& target,
                      const GenerationParams& params) {
    std::string key = content_hash(prompt);
    key += '|';
    key += target.name;
    key += '|';
    key += std::to_string(params.max_new_tokens);
    key += '|';
    key += to_string(params.sampling);
    key += '|';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", params.temperature);
    key += buf;
    return key;
}

bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

} // namespace

struct LlmGateway::Impl {
    std::mutex mu;
    std::unordered_map<std::string, std::string> cache;
    std::ofstream cache_out;
    std::atomic<std::size_t> cache_hits{0};
    std::atomic<std::size_t> network_calls{0};
    std::unique_ptr<std::counting_semaphore<256>> slots;

    void load_cache(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                auto obj = ordered_json::parse(line);
                cache[obj.at("key").get<std::string>()] =
                    obj.at("text").get<std::string>();
            } catch (const std::exception&) {
                // tolerate a torn final line from an interrupted run
            }
        }
    }
};

LlmGateway::LlmGateway(GatewayConfig config)
    : impl_(std::make_unique<Impl>()), config_(std::move(config)) {
    if (config_.max_attempts < 1)
        throw ValidationError("gateway needs at least one attempt");
    if (config_.max_in_flight < 1 || config_.max_in_flight > 256)
        throw ValidationError("gateway in-flight limit must be in [1, 256]");
    impl_->slots = std::make_unique<std::counting_semaphore<256>>(
        config_.max_in_flight);
    if (!config_.cache_path.empty()) {
        impl_->load_cache(config_.cache_path);
        impl_->cache_out.open(config_.cache_path, std::ios::app);
    }
}

LlmGateway::~LlmGateway() = default;

std::size_t LlmGateway::cache_hits() const { return impl_->cache_hits.load(); }
std::size_t LlmGateway::network_calls() const {
    return impl_->network_calls.load();
}

std::string LlmGateway::generate(const std::string& prompt,
                                 const ModelTarget& target,
                                 const GenerationParams& params) {
    if (prompt.empty()) throw ValidationError("empty prompt");
    if (target.endpoint.empty()) throw ValidationError("empty endpoint URL");

    const bool cacheable =
        params.sampling == Sampling::greedy && !config_.cache_path.empty();
    const std::string key = cache_key(prompt, target, params);
    if (cacheable) {
        std::lock_guard<std::mutex> lock(impl_->mu);
        auto it = impl_->cache.find(key);
        if (it != impl_->cache.end()) {
            impl_->cache_hits.fetch_add(1);
            return it->second;
        }
    }

    ordered_json body;
    body["model"] = target.name;
    body["messages"] = ordered_json::array(
        {ordered_json{{"role", "user"}, {"content", prompt}}});
    body["max_tokens"] = params.max_new_tokens;
    // Greedy decoding is requested as temperature 0; the configured
    // temperature only applies when sampling.
    body["temperature"] =
        params.sampling == Sampling::greedy ? 0.0 : params.temperature;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* api_key = std::getenv(config_.api_key_env.c_str());
        api_key != nullptr && *api_key != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + api_key);

    std::string failure;
    int last_status = 0;
    bool timed_out = false;

    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(
                static_cast<long>(config_.backoff_base_ms) * (1L << (attempt - 1)));
            std::this_thread::sleep_for(delay);
        }

        impl_->slots->acquire();
        impl_->network_calls.fetch_add(1);
        httplib::Client client(target.endpoint);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        auto res = client.Post(config_.completion_route, headers, payload,
                               "application/json");
        impl_->slots->release();

        if (!res) {
            timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                        res.error() == httplib::Error::Read;
            failure = httplib::to_string(res.error());
            last_status = 0;
            continue; // connection-level problems are always retryable
        }
        if (res->status != 200) {
            last_status = res->status;
            failure = res->body.substr(0, 200);
            timed_out = false;
            if (transient_status(res->status)) continue;
            throw EndpointError(res->status, failure);
        }

        std::string text;
        try {
            auto obj = ordered_json::parse(res->body);
            const auto& choice = obj.at("choices").at(0);
            if (choice.contains("message"))
                text = choice["message"].at("content").get<std::string>();
            else
                text = choice.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw EndpointError(200, std::string("unparseable reply: ") +
                                         e.what());
        }

        if (cacheable) {
            std::lock_guard<std::mutex> lock(impl_->mu);
            if (impl_->cache.emplace(key, text).second && impl_->cache_out) {
                ordered_json record;
                record["key"] = key;
                record["model"] = target.name;
                record["text"] = text;
                impl_->cache_out << record.dump() << '\n';
                impl_->cache_out.flush();
            }
        }
        return text;
    }

    if (last_status == 429) throw RateLimited(failure);
    if (last_status != 0) throw EndpointError(last_status, failure);
    if (timed_out) throw Timeout(failure);
    throw EndpointError(0, "cannot reach " + target.endpoint + ": " + failure);
}

} // namespace codeshot
