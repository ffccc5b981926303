#include <doctest.h>

#include <json.hpp>

#include "codeshot/errors.hpp"
#include "codeshot/gateway.hpp"
#include "codeshot/stub_llm.hpp"
#include "support/fixtures.hpp"

using namespace codeshot;

namespace {

GatewayConfig fast_config(std::filesystem::path cache = {}) {
    GatewayConfig config;
    config.cache_path = std::move(cache);
    config.backoff_base_ms = 1;
    return config;
}

ModelTarget target_for(const std::string& endpoint) {
    return {"stub-model", endpoint, TemplateFamily::inst_wrapped};
}

} // namespace

TEST_CASE("greedy completions are cached across calls and instances") {
    StubLlmServer stub;
    stub.reply_fixed("a canned answer");
    const std::string endpoint = stub.start();

    fixtures::TempDir dir;
    const auto cache = dir.file("completions.jsonl");
    const GenerationParams greedy{32, Sampling::greedy, 0.7};

    {
        LlmGateway gateway(fast_config(cache));
        CHECK(gateway.generate("prompt one", target_for(endpoint), greedy) ==
              "a canned answer");
        CHECK(gateway.network_calls() == 1);
        CHECK(gateway.cache_hits() == 0);

        CHECK(gateway.generate("prompt one", target_for(endpoint), greedy) ==
              "a canned answer");
        CHECK(gateway.network_calls() == 1);
        CHECK(gateway.cache_hits() == 1);
        CHECK(stub.request_count() == 1);

        // A different prompt or different params miss the cache.
        gateway.generate("prompt two", target_for(endpoint), greedy);
        CHECK(gateway.network_calls() == 2);
        GenerationParams longer = greedy;
        longer.max_new_tokens = 64;
        gateway.generate("prompt one", target_for(endpoint), longer);
        CHECK(gateway.network_calls() == 3);
    }

    // A fresh gateway reads the same cache file.
    LlmGateway reopened(fast_config(cache));
    CHECK(reopened.generate("prompt one", target_for(endpoint), greedy) ==
          "a canned answer");
    CHECK(reopened.network_calls() == 0);
    CHECK(reopened.cache_hits() == 1);
}

TEST_CASE("sampled completions bypass the cache") {
    StubLlmServer stub;
    stub.reply_fixed("fresh every time");
    const std::string endpoint = stub.start();

    fixtures::TempDir dir;
    LlmGateway gateway(fast_config(dir.file("completions.jsonl")));
    const GenerationParams sampled{32, Sampling::sampled, 0.9};

    gateway.generate("same prompt", target_for(endpoint), sampled);
    gateway.generate("same prompt", target_for(endpoint), sampled);
    CHECK(gateway.network_calls() == 2);
    CHECK(gateway.cache_hits() == 0);
    CHECK(stub.request_count() == 2);
}

TEST_CASE("request bodies carry the model, prompt and temperature") {
    StubLlmServer stub;
    nlohmann::json seen;
    stub.reply_custom([&seen](const std::string&, const std::string& body,
                              int&) {
        seen = nlohmann::json::parse(body);
        return "ok";
    });
    const std::string endpoint = stub.start();
    LlmGateway gateway(fast_config());

    gateway.generate("describe this", target_for(endpoint),
                     {48, Sampling::greedy, 0.7});
    CHECK(seen["model"] == "stub-model");
    CHECK(seen["max_tokens"] == 48);
    // Greedy decoding is requested as temperature zero regardless of the
    // configured sampling temperature.
    CHECK(seen["temperature"] == 0.0);
    CHECK(seen["messages"][0]["role"] == "user");
    CHECK(seen["messages"][0]["content"] == "describe this");

    gateway.generate("describe this", target_for(endpoint),
                     {48, Sampling::sampled, 0.9});
    CHECK(seen["temperature"] == doctest::Approx(0.9));
}

TEST_CASE("transient failures are retried with backoff") {
    StubLlmServer stub;
    stub.reply_fixed("recovered");
    const std::string endpoint = stub.start();

    LlmGateway gateway(fast_config());

    SUBCASE("two failures within three attempts succeed") {
        stub.fail_next(2, 500);
        CHECK(gateway.generate("p", target_for(endpoint), {}) == "recovered");
        CHECK(stub.request_count() == 3);
    }
    SUBCASE("persistent server errors surface with their status") {
        stub.fail_next(5, 502);
        try {
            gateway.generate("p", target_for(endpoint), {});
            FAIL("expected EndpointError");
        } catch (const EndpointError& e) {
            CHECK(e.status == 502);
            CHECK(e.category() == ErrorCategory::upstream);
        }
        CHECK(stub.request_count() == 3); // three tries, no more
    }
    SUBCASE("rate limiting gets its own error") {
        stub.fail_next(5, 429);
        CHECK_THROWS_AS(gateway.generate("p", target_for(endpoint), {}),
                        RateLimited);
    }
    SUBCASE("client errors are not retried") {
        stub.fail_next(1, 400);
        CHECK_THROWS_AS(gateway.generate("p", target_for(endpoint), {}),
                        EndpointError);
        CHECK(stub.request_count() == 1);
    }
}

TEST_CASE("an unreachable endpoint raises an upstream error") {
    LlmGateway gateway(fast_config());
    // Nothing listens on this port.
    CHECK_THROWS_AS(
        gateway.generate("p", target_for("http://127.0.0.1:9"), {}),
        UpstreamError);
}
