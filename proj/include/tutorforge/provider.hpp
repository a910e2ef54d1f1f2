#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tutorforge {

enum class RoleTag { Planner, Instantiator, Judge, AuthorDoc, AuthorVideo, Classifier };

std::string to_string(RoleTag tag);
RoleTag role_tag_from_string(const std::string& s);

struct Decoding {
    double temperature = 0.01;
    double top_p = 0.95;
    int max_tokens = 4096;
};

struct ProviderRequest {
    RoleTag role_tag = RoleTag::Planner;
    std::string prompt;
    std::vector<std::string> images;  // file paths; attached as data URIs over HTTP
    Decoding decoding;
};

struct Usage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct ProviderResponse {
    std::string text;
    Usage usage;
    double latency_seconds = 0.0;
};

struct TranscriptEntry {
    ProviderRequest request;
    ProviderResponse response;
};

/// Backend abstraction: scripted for tests and reproducible runs, HTTP for
/// live models.
class Backend {
public:
    virtual ~Backend() = default;
    virtual ProviderResponse complete(const ProviderRequest& request) = 0;
    virtual std::string model_name() const = 0;
};

/// Replays canned responses keyed by (role_tag, monotone call index within that
/// role). Token usage counts whitespace-delimited tokens. Thread-safe.
class ScriptedBackend : public Backend {
public:
    /// Script file format: JSON array of {role_tag, index, response_text}.
    static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& file);
    static std::shared_ptr<ScriptedBackend> from_json(const nlohmann::json& doc);

    void add(RoleTag role, int index, std::string response_text);
    ProviderResponse complete(const ProviderRequest& request) override;
    std::string model_name() const override { return "scripted"; }

private:
    std::mutex mutex_;
    std::map<RoleTag, std::map<int, std::string>> entries_;
    std::map<RoleTag, int> cursor_;
};

/// OpenAI-compatible chat-completions client. Retries up to 3 attempts with
/// exponential backoff before throwing BackendUnavailable.
class HttpBackend : public Backend {
public:
    struct Options {
        std::string base_url;   // e.g. "http://localhost:8000"
        std::string model;
        std::string api_key;
        int max_tries = 3;
        int backoff_ms = 250;   // doubled per retry
    };

    /// Reads TUTORFORGE_API_BASE, TUTORFORGE_MODEL, TUTORFORGE_API_KEY.
    static Options options_from_env();

    explicit HttpBackend(Options options);
    ProviderResponse complete(const ProviderRequest& request) override;
    std::string model_name() const override { return options_.model; }

private:
    Options options_;
};

/// Records every exchange; one gateway per run keeps transcripts isolated.
class ProviderGateway {
public:
    ProviderGateway(std::shared_ptr<Backend> backend, std::string run_id);

    ProviderResponse complete(const ProviderRequest& request);
    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
    const std::string& run_id() const { return run_id_; }
    std::string model_name() const { return backend_->model_name(); }

    /// Serialized transcript; wall-clock latency is intentionally omitted so
    /// artifact trees stay byte-reproducible (timing lives in the ledger).
    nlohmann::json transcript_json() const;

private:
    std::shared_ptr<Backend> backend_;
    std::string run_id_;
    mutable std::mutex mutex_;
    std::vector<TranscriptEntry> transcript_;
};

/// Extracts the first balanced JSON object embedded in provider output,
/// tolerating prose before and after. Throws NoJsonFound.
nlohmann::json extract_first_json(const std::string& text);

/// Extracts and validates against a registered schema. Throws SchemaViolation
/// naming the offending field, or NoJsonFound.
nlohmann::json parse_structured(const std::string& text, const std::string& schema_id);

long count_tokens(const std::string& text);

}  // namespace tutorforge
