// Offline chat-completions endpoint for demos and smoke tests. Serves either
// a fixed reply or, given a corpus, the reference explanation of whichever
// sample's code appears in the prompt.

#include <csignal>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "codeshot/corpus.hpp"
#include "codeshot/errors.hpp"
#include "codeshot/stub_llm.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stub chat-completions endpoint"};
    std::string corpus_path, fixed_reply = "stub reply";
    app.add_option("--corpus", corpus_path,
                   "echo reference explanations from this corpus")
        ->check(CLI::ExistingFile);
    app.add_option("--reply", fixed_reply,
                   "fixed reply when no corpus is given");
    CLI11_PARSE(app, argc, argv);

    try {
        codeshot::StubLlmServer server;
        if (!corpus_path.empty())
            server.reply_echo_reference(codeshot::read_corpus(corpus_path));
        else
            server.reply_fixed(fixed_reply);

        const std::string endpoint = server.start();
        std::printf("%s\n", endpoint.c_str());
        std::fflush(stdout);

        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (g_stop == 0) {
            struct timespec ts {0, 100 * 1000 * 1000};
            nanosleep(&ts, nullptr);
        }
        server.stop();
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
