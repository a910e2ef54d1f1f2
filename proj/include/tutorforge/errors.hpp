#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tutorforge {

/// Base class for all recoverable failures. `code()` is the stable,
/// machine-readable identifier; what() additionally carries detail text.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(detail.empty() ? code : code + ": " + detail),
          code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define TUTORFORGE_DEFINE_ERROR(Name)                                \
    class Name final : public Error {                                \
    public:                                                          \
        explicit Name(const std::string& detail = "")                \
            : Error(#Name, detail) {}                                \
    }

// sheet-env
TUTORFORGE_DEFINE_ERROR(MalformedRange);
TUTORFORGE_DEFINE_ERROR(EmptyRange);
TUTORFORGE_DEFINE_ERROR(NonRectangularData);
TUTORFORGE_DEFINE_ERROR(OutOfBounds);
TUTORFORGE_DEFINE_ERROR(IncompatibleRanges);
TUTORFORGE_DEFINE_ERROR(InvalidPermutation);
TUTORFORGE_DEFINE_ERROR(UnknownNode);
TUTORFORGE_DEFINE_ERROR(DisabledTarget);
TUTORFORGE_DEFINE_ERROR(NoFocusForTyping);
TUTORFORGE_DEFINE_ERROR(InvalidTemplate);

// provider-gateway
TUTORFORGE_DEFINE_ERROR(BackendUnavailable);
TUTORFORGE_DEFINE_ERROR(ScriptExhausted);
TUTORFORGE_DEFINE_ERROR(SchemaViolation);
TUTORFORGE_DEFINE_ERROR(NoJsonFound);

// task-instantiation
TUTORFORGE_DEFINE_ERROR(NoCompatibleTemplate);

// exe-agent
TUTORFORGE_DEFINE_ERROR(UnparseableAction);

// judge-eval
TUTORFORGE_DEFINE_ERROR(DegenerateInput);
TUTORFORGE_DEFINE_ERROR(MissingMetric);

// tutorial-gen
TUTORFORGE_DEFINE_ERROR(EmptyAfterFilter);
TUTORFORGE_DEFINE_ERROR(BboxOutOfCanvas);
TUTORFORGE_DEFINE_ERROR(MissingAsset);
TUTORFORGE_DEFINE_ERROR(EncoderFailed);

// orchestrator
TUTORFORGE_DEFINE_ERROR(UnknownModelPrice);
TUTORFORGE_DEFINE_ERROR(ConfigError);

#undef TUTORFORGE_DEFINE_ERROR

}  // namespace tutorforge
