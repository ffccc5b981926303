#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace codeshot {

// Failure categories; the CLI maps them to exit codes (validation -> 2,
// upstream -> 3, anything else -> 1).
enum class ErrorCategory { validation, upstream, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorCategory::validation, message) {}
};

class UpstreamError : public Error {
public:
    explicit UpstreamError(const std::string& message)
        : Error(ErrorCategory::upstream, message) {}
};

// ---- corpus -------------------------------------------------------------

class MalformedRecord : public ValidationError {
public:
    MalformedRecord(std::size_t line, const std::string& reason)
        : ValidationError("malformed record at line " + std::to_string(line) +
                          ": " + reason),
          line(line) {}
    std::size_t line;
};

class DuplicateId : public ValidationError {
public:
    explicit DuplicateId(const std::string& id)
        : ValidationError("duplicate sample id: " + id), id(id) {}
    std::string id;
};

class MixedLanguageCorpus : public ValidationError {
public:
    explicit MixedLanguageCorpus(const std::string& detail)
        : ValidationError("corpus mixes languages: " + detail) {}
};

class UnlabelledIntent : public ValidationError {
public:
    explicit UnlabelledIntent(const std::string& detail)
        : ValidationError("intent labels are partial: " + detail) {}
};

class UnsupportedLanguage : public ValidationError {
public:
    explicit UnsupportedLanguage(const std::string& detail)
        : ValidationError("unsupported language: " + detail) {}
};

// ---- selection ----------------------------------------------------------

class LanguageMismatch : public ValidationError {
public:
    LanguageMismatch(const std::string& lhs, const std::string& rhs)
        : ValidationError("language mismatch: " + lhs + " vs " + rhs) {}
};

class DimensionMismatch : public ValidationError {
public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs)
        : ValidationError("embedding dimension mismatch: " +
                          std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

class ZeroVector : public ValidationError {
public:
    explicit ZeroVector(const std::string& detail)
        : ValidationError("zero embedding vector: " + detail) {}
};

class DimensionDrift : public ValidationError {
public:
    explicit DimensionDrift(const std::string& detail)
        : ValidationError("embedding dimensions drift across corpus: " + detail) {}
};

class EmptyTrainSplit : public ValidationError {
public:
    EmptyTrainSplit() : ValidationError("corpus has no train samples") {}
};

class MissingEmbedding : public ValidationError {
public:
    explicit MissingEmbedding(const std::string& id)
        : ValidationError("no embedding cached for sample: " + id), id(id) {}
    std::string id;
};

class MissingEntitySet : public ValidationError {
public:
    explicit MissingEntitySet(const std::string& id)
        : ValidationError("no entity set cached for sample: " + id), id(id) {}
    std::string id;
};

class UnknownEntityType : public ValidationError {
public:
    explicit UnknownEntityType(const std::string& name)
        : ValidationError("unknown entity type: " + name) {}
};

// ---- metrics / reports --------------------------------------------------

class EmptyReference : public ValidationError {
public:
    EmptyReference() : ValidationError("reference token sequence is empty") {}
};

class EmptyInput : public ValidationError {
public:
    explicit EmptyInput(const std::string& detail)
        : ValidationError("empty input: " + detail) {}
};

class SampleSetMismatch : public ValidationError {
public:
    explicit SampleSetMismatch(const std::string& detail)
        : ValidationError("reports cover different sample sets: " + detail) {}
};

// ---- prompting ----------------------------------------------------------

class UnknownPlaceholder : public ValidationError {
public:
    explicit UnknownPlaceholder(const std::string& name)
        : ValidationError("unknown template placeholder: {" + name + "}") {}
};

class EmptyGeneration : public ValidationError {
public:
    EmptyGeneration() : ValidationError("model output is empty after cleanup") {}
};

// ---- endpoints ----------------------------------------------------------

class EndpointError : public UpstreamError {
public:
    EndpointError(int status, const std::string& detail)
        : UpstreamError("endpoint returned status " + std::to_string(status) +
                        ": " + detail),
          status(status) {}
    int status;
};

class Timeout : public UpstreamError {
public:
    explicit Timeout(const std::string& detail)
        : UpstreamError("request timed out: " + detail) {}
};

class RateLimited : public UpstreamError {
public:
    explicit RateLimited(const std::string& detail)
        : UpstreamError("rate limited by endpoint: " + detail) {}
};

class RemoteBackendError : public UpstreamError {
public:
    RemoteBackendError(const std::string& id, const std::string& detail)
        : UpstreamError("remote extraction failed for sample " + id + ": " +
                        detail),
          id(id) {}
    std::string id;
};

class ProviderUnavailable : public UpstreamError {
public:
    explicit ProviderUnavailable(const std::string& detail)
        : UpstreamError("embedding provider cannot serve request: " + detail) {}
};

} // namespace codeshot
