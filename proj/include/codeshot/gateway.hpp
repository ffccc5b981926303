#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace codeshot {

enum class Sampling { greedy, sampled };

std::string_view to_string(Sampling sampling);
std::optional<Sampling> parse_sampling(std::string_view text);

struct GenerationParams {
    int max_new_tokens = 32;
    Sampling sampling = Sampling::greedy;
    // Recorded in cache keys and logs; only sent to the endpoint when
    // sampling is enabled. Greedy requests go out with temperature 0.
    double temperature = 0.7;
};

// Which prompt wrapping a model expects. inst_wrapped is the [INST]-style
// instruction block; human_assistant is the #Human/#Assistant dialogue style.
enum class TemplateFamily { inst_wrapped, human_assistant };

std::string_view to_string(TemplateFamily family);
std::optional<TemplateFamily> parse_template_family(std::string_view text);

struct ModelTarget {
    std::string name;       // model identifier sent in the request body
    std::string endpoint;   // base URL, e.g. http://127.0.0.1:8089
    TemplateFamily family = TemplateFamily::inst_wrapped;
};

struct GatewayConfig {
    // Completion cache location; empty disables caching.
    std::filesystem::path cache_path;
    std::string api_key_env = "CODESHOT_API_KEY";
    std::string completion_route = "/v1/chat/completions";
    int max_attempts = 3;
    int backoff_base_ms = 250;
    int timeout_seconds = 60;
    int max_in_flight = 4;
};

// Client for OpenAI-style chat-completion endpoints. Responses to greedy
// requests are cached on disk keyed by (prompt hash, model, params); sampled
// requests always go to the network. Transient failures (connect errors,
// timeouts, 429, 5xx) are retried with exponential backoff up to
// max_attempts total tries.
class LlmGateway {
public:
    explicit LlmGateway(GatewayConfig config);
    ~LlmGateway();

    LlmGateway(const LlmGateway&) = delete;
    LlmGateway& operator=(const LlmGateway&) = delete;

    std::string generate(const std::string& prompt, const ModelTarget& target,
                         const GenerationParams& params);

    // Requests answered from the completion cache since construction.
    std::size_t cache_hits() const;
    // Requests that actually reached the endpoint.
    std::size_t network_calls() const;

    const GatewayConfig& config() const { return config_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    GatewayConfig config_;
};

} // namespace codeshot
