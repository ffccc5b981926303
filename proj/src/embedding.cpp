#include "codeshot/embedding.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "codeshot/errors.hpp"
#include "codeshot/hash.hpp"

namespace codeshot {

using nlohmann::ordered_json;

namespace {

// Values are normalized to 9 significant digits before they are stored, so
// writing what was read back produces the same bytes.
double round9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

void validate_vector(const EmbeddingVector& vec, const std::string& who) {
    if (vec.values.empty())
        throw ValidationError("empty embedding vector for " + who);
    for (double v : vec.values)
        if (v != 0.0) return;
    throw ZeroVector(who);
}

} // namespace

// ---- precomputed provider ---------------------------------------------------

PrecomputedProvider::PrecomputedProvider(const std::filesystem::path& path) {
    auto records = read_embedding_cache(path);
    if (records.empty())
        throw ValidationError("no embedding records in " + path.string());
    provider_id_ = "precomputed:" + records.front().provider_id;
    for (auto& rec : records)
        vectors_[rec.id] = std::move(rec.vector);
}

EmbeddingVector PrecomputedProvider::embed(std::string_view id,
                                           std::string_view) const {
    auto it = vectors_.find(std::string(id));
    if (it == vectors_.end())
        throw ProviderUnavailable("no precomputed vector for sample " +
                                  std::string(id));
    return it->second;
}

// ---- remote provider --------------------------------------------------------

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string endpoint,
                                                 std::string model,
                                                 std::string api_key_env,
                                                 int timeout_seconds)
    : endpoint_(std::move(endpoint)), model_(std::move(model)),
      api_key_env_(std::move(api_key_env)), timeout_seconds_(timeout_seconds) {}

EmbeddingVector RemoteEmbeddingProvider::embed(std::string_view id,
                                               std::string_view code) const {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(api_key_env_.c_str());
        key != nullptr && *key != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + key);

    ordered_json body;
    body["model"] = model_;
    body["input"] = std::string(code);

    auto res = client.Post("/v1/embeddings", headers, body.dump(),
                           "application/json");
    if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout ||
            res.error() == httplib::Error::Read)
            throw Timeout("embedding request for " + std::string(id));
        throw ProviderUnavailable("cannot reach " + endpoint_ + ": " +
                                  httplib::to_string(res.error()));
    }
    if (res->status != 200)
        throw EndpointError(res->status, "embedding request for " +
                                             std::string(id));

    EmbeddingVector vec;
    vec.provider_id = this->id();
    try {
        auto obj = ordered_json::parse(res->body);
        const ordered_json* values = nullptr;
        if (obj.contains("embedding")) {
            values = &obj["embedding"];
        } else if (obj.contains("data") && obj["data"].is_array() &&
                   !obj["data"].empty()) {
            values = &obj["data"][0]["embedding"];
        }
        if (values == nullptr || !values->is_array())
            throw ValidationError("no embedding array in reply");
        for (const auto& v : *values)
            vec.values.push_back(round9(v.get<double>()));
    } catch (const nlohmann::json::exception& e) {
        throw ProviderUnavailable("bad embedding reply for " +
                                  std::string(id) + ": " + e.what());
    }
    validate_vector(vec, std::string(id));
    return vec;
}

std::string RemoteEmbeddingProvider::id() const {
    return "remote:" + model_;
}

// ---- cache ------------------------------------------------------------------

std::vector<EmbeddingCacheRecord> read_embedding_cache(
    const std::filesystem::path& path) {
    std::vector<EmbeddingCacheRecord> records;
    std::ifstream in(path);
    if (!in) return records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto obj = ordered_json::parse(line);
            EmbeddingCacheRecord rec;
            rec.id = obj.at("id").get<std::string>();
            rec.code_hash = obj.at("code_hash").get<std::string>();
            rec.provider_id = obj.at("provider_id").get<std::string>();
            rec.vector.provider_id = rec.provider_id;
            const auto dim = obj.at("dim").get<std::size_t>();
            for (const auto& v : obj.at("values"))
                rec.vector.values.push_back(round9(v.get<double>()));
            if (rec.vector.values.size() != dim)
                throw ValidationError("dim field disagrees with values");
            validate_vector(rec.vector, rec.id);
            records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            std::fprintf(stderr,
                         "warning: skipping embedding cache line %zu (%s)\n",
                         line_no, e.what());
        }
    }
    return records;
}

void write_embedding_cache(const std::vector<EmbeddingCacheRecord>& records,
                           const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw ValidationError("cannot write embedding cache: " +
                                  path.string());
        for (const auto& rec : records) {
            ordered_json obj;
            obj["id"] = rec.id;
            obj["code_hash"] = rec.code_hash;
            obj["provider_id"] = rec.provider_id;
            obj["dim"] = rec.vector.values.size();
            ordered_json values = ordered_json::array();
            for (double v : rec.vector.values) values.push_back(round9(v));
            obj["values"] = std::move(values);
            out << obj.dump() << '\n';
        }
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---- batch ------------------------------------------------------------------

EmbeddingBatch embed_corpus(const Corpus& corpus,
                            const EmbeddingProvider& provider,
                            const std::filesystem::path& cache_path) {
    std::unordered_map<std::string, const EmbeddingCacheRecord*> cached;
    std::vector<EmbeddingCacheRecord> old_records;
    if (!cache_path.empty()) {
        old_records = read_embedding_cache(cache_path);
        for (const auto& rec : old_records) cached[rec.id] = &rec;
    }

    const std::string provider_id = provider.id();
    const auto& samples = corpus.samples();

    EmbeddingBatch batch;
    std::vector<const CodeSample*> todo;
    for (const auto& s : samples) {
        auto it = cached.find(s.id);
        if (it != cached.end() && it->second->provider_id == provider_id &&
            it->second->code_hash == content_hash(s.code)) {
            batch.vectors.emplace(s.id, it->second->vector);
            ++batch.cache_hits;
        } else {
            todo.push_back(&s);
        }
    }

    struct Failure {
        std::size_t ordinal;
        std::string id;
        std::string message;
        ErrorCategory category;
    };
    std::vector<std::optional<EmbeddingVector>> results(todo.size());
    std::vector<Failure> failures;
    std::mutex failures_mu;

    const int workers = std::max(
        1, std::min<int>(provider.max_in_flight(),
                         static_cast<int>(todo.size())));
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            const std::size_t j = cursor.fetch_add(1);
            if (j >= todo.size()) return;
            const CodeSample& s = *todo[j];
            try {
                auto vec = provider.embed(s.id, s.code);
                for (auto& v : vec.values) v = round9(v);
                vec.provider_id = provider_id;
                validate_vector(vec, s.id);
                results[j] = std::move(vec);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(failures_mu);
                failures.push_back({s.ordinal, s.id, e.what(), e.category()});
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failures_mu);
                failures.push_back(
                    {s.ordinal, s.id, e.what(), ErrorCategory::internal});
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (std::size_t j = 0; j < todo.size(); ++j) {
        if (results[j]) {
            batch.vectors.emplace(todo[j]->id, std::move(*results[j]));
            ++batch.computed;
        }
    }

    if (!cache_path.empty()) {
        std::vector<EmbeddingCacheRecord> records;
        records.reserve(batch.vectors.size());
        for (const auto& s : samples) {
            auto it = batch.vectors.find(s.id);
            if (it == batch.vectors.end()) continue;
            records.push_back(
                {s.id, content_hash(s.code), provider_id, it->second});
        }
        write_embedding_cache(records, cache_path);
    }

    if (!failures.empty()) {
        auto first = std::min_element(
            failures.begin(), failures.end(),
            [](const Failure& a, const Failure& b) { return a.ordinal < b.ordinal; });
        if (first->category == ErrorCategory::upstream)
            throw ProviderUnavailable("sample " + first->id + ": " +
                                      first->message);
        throw ValidationError("embedding failed for sample " + first->id +
                              ": " + first->message);
    }

    // One corpus, one dimension: anything else poisons cosine comparisons.
    const EmbeddingVector* first_vec = nullptr;
    const CodeSample* first_sample = nullptr;
    for (const auto& s : samples) {
        auto it = batch.vectors.find(s.id);
        if (it == batch.vectors.end()) continue;
        if (first_vec == nullptr) {
            first_vec = &it->second;
            first_sample = &s;
        } else if (it->second.dim() != first_vec->dim()) {
            throw DimensionDrift(
                "sample " + s.id + " has dim " +
                std::to_string(it->second.dim()) + " but sample " +
                first_sample->id + " has dim " +
                std::to_string(first_vec->dim()));
        }
    }
    return batch;
}

} // namespace codeshot
