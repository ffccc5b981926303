#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>

#include "codeshot/corpus.hpp"

namespace codeshot {

// Small chat-completions endpoint for offline runs and tests. It binds to
// 127.0.0.1 on an OS-assigned port and answers POSTs on the completion
// route with a canned or computed reply.
//
// Reply modes:
//   fixed            always the same text
//   echo_reference   finds the corpus sample whose code occurs verbatim in
//                    the prompt and replies with its explanation (longest
//                    code match wins); no match -> the fallback text
//   custom           caller-provided (prompt, request body) -> reply hook
class StubLlmServer {
public:
    StubLlmServer();
    ~StubLlmServer();

    StubLlmServer(const StubLlmServer&) = delete;
    StubLlmServer& operator=(const StubLlmServer&) = delete;

    void reply_fixed(std::string text);
    void reply_echo_reference(const Corpus& corpus, std::string fallback = "no match");
    // Hook returns the reply text; set status to deviate from 200.
    using Handler = std::function<std::string(const std::string& prompt,
                                              const std::string& body,
                                              int& status)>;
    void reply_custom(Handler handler);

    // Fail the next n requests with the given status before answering
    // normally. Used to exercise retry paths.
    void fail_next(int n, int status = 500);

    // Starts serving on 127.0.0.1; returns the endpoint base URL.
    std::string start();
    void stop();

    std::string endpoint() const;
    int port() const;
    std::size_t request_count() const;

    static constexpr const char* kRoute = "/v1/chat/completions";

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace codeshot
