#include "tutorforge/provider.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "tutorforge/errors.hpp"

namespace tutorforge {

using nlohmann::json;

std::string to_string(RoleTag tag) {
    switch (tag) {
        case RoleTag::Planner: return "planner";
        case RoleTag::Instantiator: return "instantiator";
        case RoleTag::Judge: return "judge";
        case RoleTag::AuthorDoc: return "author_doc";
        case RoleTag::AuthorVideo: return "author_video";
        case RoleTag::Classifier: return "classifier";
    }
    return "planner";
}

RoleTag role_tag_from_string(const std::string& s) {
    if (s == "planner") return RoleTag::Planner;
    if (s == "instantiator") return RoleTag::Instantiator;
    if (s == "judge") return RoleTag::Judge;
    if (s == "author_doc") return RoleTag::AuthorDoc;
    if (s == "author_video") return RoleTag::AuthorVideo;
    if (s == "classifier") return RoleTag::Classifier;
    throw ConfigError("unknown role tag \"" + s + "\"");
}

long count_tokens(const std::string& text) {
    long count = 0;
    bool in_token = false;
    for (char c : text) {
        const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

// --- ScriptedBackend ---------------------------------------------------------

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open script file " + file.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("script file " + file.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const json& doc) {
    if (!doc.is_array()) throw ConfigError("script must be a JSON array");
    auto backend = std::make_shared<ScriptedBackend>();
    for (const auto& entry : doc) {
        backend->add(role_tag_from_string(entry.at("role_tag").get<std::string>()),
                     entry.at("index").get<int>(),
                     entry.at("response_text").get<std::string>());
    }
    return backend;
}

void ScriptedBackend::add(RoleTag role, int index, std::string response_text) {
    std::lock_guard lock(mutex_);
    entries_[role][index] = std::move(response_text);
}

ProviderResponse ScriptedBackend::complete(const ProviderRequest& request) {
    std::lock_guard lock(mutex_);
    const int index = cursor_[request.role_tag]++;
    auto role_it = entries_.find(request.role_tag);
    if (role_it == entries_.end() || !role_it->second.count(index)) {
        --cursor_[request.role_tag];
        throw ScriptExhausted("no scripted entry for (" + to_string(request.role_tag) + ", " +
                              std::to_string(index) + ")");
    }
    ProviderResponse resp;
    resp.text = role_it->second.at(index);
    resp.usage.prompt_tokens = count_tokens(request.prompt);
    resp.usage.completion_tokens = count_tokens(resp.text);
    resp.latency_seconds = 0.0;
    return resp;
}

// --- HttpBackend ---------------------------------------------------------------

namespace {

std::string base64_encode(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 2 < bytes.size()) {
        const uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) |
                           (static_cast<uint8_t>(bytes[i + 1]) << 8) |
                           static_cast<uint8_t>(bytes[i + 2]);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back(alphabet[v & 63]);
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        const uint32_t v = static_cast<uint8_t>(bytes[i]) << 16;
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) |
                           (static_cast<uint8_t>(bytes[i + 1]) << 8);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out += "=";
    }
    return out;
}

std::string read_file_bytes(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw MissingAsset(file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

}  // namespace

HttpBackend::Options HttpBackend::options_from_env() {
    Options opts;
    opts.base_url = env_or("TUTORFORGE_API_BASE", "");
    opts.model = env_or("TUTORFORGE_MODEL", "gpt-4.1");
    opts.api_key = env_or("TUTORFORGE_API_KEY", "");
    return opts;
}

HttpBackend::HttpBackend(Options options) : options_(std::move(options)) {
    if (options_.base_url.empty())
        throw ConfigError("HTTP backend requires a base URL (TUTORFORGE_API_BASE)");
}

ProviderResponse HttpBackend::complete(const ProviderRequest& request) {
    json content;
    if (request.images.empty()) {
        content = request.prompt;
    } else {
        content = json::array();
        content.push_back({{"type", "text"}, {"text", request.prompt}});
        for (const std::string& image : request.images) {
            content.push_back(
                {{"type", "image_url"},
                 {"image_url",
                  {{"url", "data:image/png;base64," + base64_encode(read_file_bytes(image))}}}});
        }
    }
    const json body = {
        {"model", options_.model},
        {"temperature", request.decoding.temperature},
        {"top_p", request.decoding.top_p},
        {"max_tokens", request.decoding.max_tokens},
        {"messages", json::array({{{"role", "user"}, {"content", content}}})},
    };

    httplib::Client client(options_.base_url);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt < options_.max_tries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(options_.backoff_ms << (attempt - 1)));
        const auto start = std::chrono::steady_clock::now();
        auto result = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
        if (!result) {
            last_error = "transport error " + httplib::to_string(result.error());
            continue;
        }
        if (result->status != 200) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        try {
            const json doc = json::parse(result->body);
            ProviderResponse resp;
            resp.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
            if (doc.contains("usage")) {
                resp.usage.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
                resp.usage.completion_tokens = doc["usage"].value("completion_tokens", 0);
            }
            resp.latency_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return resp;
        } catch (const json::exception& e) {
            last_error = std::string("malformed response: ") + e.what();
        }
    }
    throw BackendUnavailable(std::to_string(options_.max_tries) + " attempts failed; last: " +
                             last_error);
}

// --- ProviderGateway -----------------------------------------------------------

ProviderGateway::ProviderGateway(std::shared_ptr<Backend> backend, std::string run_id)
    : backend_(std::move(backend)), run_id_(std::move(run_id)) {}

ProviderResponse ProviderGateway::complete(const ProviderRequest& request) {
    if (request.prompt.empty()) throw SchemaViolation("prompt must be non-empty");
    ProviderResponse response = backend_->complete(request);
    {
        std::lock_guard lock(mutex_);
        transcript_.push_back({request, response});
    }
    return response;
}

json ProviderGateway::transcript_json() const {
    std::lock_guard lock(mutex_);
    json entries = json::array();
    for (const TranscriptEntry& e : transcript_) {
        entries.push_back({{"role_tag", to_string(e.request.role_tag)},
                           {"prompt", e.request.prompt},
                           {"images", e.request.images},
                           {"response_text", e.response.text},
                           {"prompt_tokens", e.response.usage.prompt_tokens},
                           {"completion_tokens", e.response.usage.completion_tokens}});
    }
    return json{{"run_id", run_id_}, {"entries", entries}};
}

// --- Structured output ------------------------------------------------------------

json extract_first_json(const std::string& text) {
    for (size_t start = text.find('{'); start != std::string::npos;
         start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        for (size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    try {
                        return json::parse(text.substr(start, i - start + 1));
                    } catch (const json::exception&) {
                        break;  // not valid JSON; scan for the next '{'
                    }
                }
            }
        }
    }
    throw NoJsonFound("no JSON object in provider output");
}

namespace {

enum class FieldKind { String, Integer, Boolean, Array, Object };

struct FieldSpec {
    const char* name;
    FieldKind kind;
};

const std::map<std::string, std::vector<FieldSpec>>& schema_registry() {
    static const std::map<std::string, std::vector<FieldSpec>> registry = {
        {"task_labels",
         {{"operation", FieldKind::String},
          {"object", FieldKind::String},
          {"level", FieldKind::String}}},
        {"template_scores", {{"scores", FieldKind::Array}}},
        {"task_rewrite",
         {{"instruction", FieldKind::String}, {"required_objects", FieldKind::Array}}},
        {"agent_action", {{"action", FieldKind::String}}},
        {"verdict", {{"success", FieldKind::Boolean}, {"rationale", FieldKind::String}}},
        {"tutorial_doc",
         {{"task_title", FieldKind::String},
          {"task_description", FieldKind::String},
          {"step_titles", FieldKind::Array},
          {"step_descriptions", FieldKind::Array}}},
        {"tutorial_video", {{"narrations", FieldKind::Array}}},
        {"rubric_scores", {{"scores", FieldKind::Array}}},
    };
    return registry;
}

bool kind_matches(const json& value, FieldKind kind) {
    switch (kind) {
        case FieldKind::String: return value.is_string();
        case FieldKind::Integer: return value.is_number_integer();
        case FieldKind::Boolean: return value.is_boolean();
        case FieldKind::Array: return value.is_array();
        case FieldKind::Object: return value.is_object();
    }
    return false;
}

const char* kind_name(FieldKind kind) {
    switch (kind) {
        case FieldKind::String: return "string";
        case FieldKind::Integer: return "integer";
        case FieldKind::Boolean: return "boolean";
        case FieldKind::Array: return "array";
        case FieldKind::Object: return "object";
    }
    return "?";
}

}  // namespace

json parse_structured(const std::string& text, const std::string& schema_id) {
    auto it = schema_registry().find(schema_id);
    if (it == schema_registry().end())
        throw SchemaViolation("schema \"" + schema_id + "\" is not registered");
    const json doc = extract_first_json(text);
    for (const FieldSpec& field : it->second) {
        if (!doc.contains(field.name))
            throw SchemaViolation("missing field \"" + std::string(field.name) + "\" (schema " +
                                  schema_id + ")");
        if (!kind_matches(doc.at(field.name), field.kind))
            throw SchemaViolation("field \"" + std::string(field.name) + "\" must be a " +
                                  kind_name(field.kind) + " (schema " + schema_id + ")");
    }
    return doc;
}

}  // namespace tutorforge
