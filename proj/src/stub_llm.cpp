#include "codeshot/stub_llm.hpp"

#include <algorithm>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "codeshot/errors.hpp"

namespace codeshot {

using nlohmann::ordered_json;

struct StubLlmServer::Impl {
    httplib::Server server;
    std::thread worker;
    int port = 0;
    std::atomic<std::size_t> requests{0};
    std::atomic<int> fail_remaining{0};
    std::atomic<int> fail_status{500};

    std::mutex mu;
    Handler handler;

    Impl() {
        server.Post(kRoute, [this](const httplib::Request& req,
                                   httplib::Response& res) {
            requests.fetch_add(1);
            if (fail_remaining.load() > 0) {
                fail_remaining.fetch_sub(1);
                res.status = fail_status.load();
                res.set_content("{\"error\":\"injected failure\"}",
                                "application/json");
                return;
            }

            std::string prompt;
            try {
                auto body = ordered_json::parse(req.body);
                if (body.contains("messages") && !body["messages"].empty())
                    prompt = body["messages"].back()
                                 .at("content")
                                 .get<std::string>();
                else if (body.contains("prompt"))
                    prompt = body["prompt"].get<std::string>();
            } catch (const std::exception&) {
                res.status = 400;
                res.set_content("{\"error\":\"bad request body\"}",
                                "application/json");
                return;
            }

            Handler h;
            {
                std::lock_guard<std::mutex> lock(mu);
                h = handler;
            }
            int status = 200;
            std::string text = h ? h(prompt, req.body, status) : "ok";
            if (status != 200) {
                res.status = status;
                res.set_content(text, "application/json");
                return;
            }
            ordered_json reply;
            reply["choices"] = ordered_json::array(
                {ordered_json{{"message", ordered_json{{"role", "assistant"},
                                                       {"content", text}}}}});
            res.set_content(reply.dump(), "application/json");
        });
    }
};

StubLlmServer::StubLlmServer() : impl_(std::make_unique<Impl>()) {}

StubLlmServer::~StubLlmServer() { stop(); }

void StubLlmServer::reply_fixed(std::string text) {
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->handler = [text = std::move(text)](const std::string&,
                                              const std::string&,
                                              int&) { return text; };
}

void StubLlmServer::reply_echo_reference(const Corpus& corpus,
                                         std::string fallback) {
    // Copy out (code, explanation) pairs; longest code first so nested
    // snippets cannot shadow the sample that actually sits in the prompt.
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& s : corpus.samples())
        pairs.emplace_back(s.code, s.explanation);
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return a.first.size() > b.first.size();
    });

    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->handler = [pairs = std::move(pairs),
                      fallback = std::move(fallback)](
                         const std::string& prompt, const std::string&,
                         int&) {
        for (const auto& [code, explanation] : pairs)
            if (prompt.find(code) != std::string::npos) return explanation;
        return fallback;
    };
}

void StubLlmServer::reply_custom(Handler handler) {
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->handler = std::move(handler);
}

void StubLlmServer::fail_next(int n, int status) {
    impl_->fail_status.store(status);
    impl_->fail_remaining.store(n);
}

std::string StubLlmServer::start() {
    if (impl_->port != 0) return endpoint();
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0)
        throw ValidationError("stub server cannot bind a local port");
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return endpoint();
}

void StubLlmServer::stop() {
    if (impl_->port == 0) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
    impl_->port = 0;
}

std::string StubLlmServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

int StubLlmServer::port() const { return impl_->port; }

std::size_t StubLlmServer::request_count() const {
    return impl_->requests.load();
}

} // namespace codeshot
