#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace girit {

/// Process exit codes used by the command-line driver.
enum class ExitCode : int {
    ok = 0,
    validation = 1,
    data = 2,
    internal = 3,
};

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual auto exit_code() const noexcept -> ExitCode { return ExitCode::internal; }
};

/// Invalid configuration, arguments or paths; detected before any work is done.
class ValidationError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto exit_code() const noexcept -> ExitCode override { return ExitCode::validation; }
};

/// Malformed input data. `location` is a human-readable position such as
/// "topics.txt:12" or "byte 4711".
class FormatError : public Error {
public:
    FormatError(std::string const& message, std::string location = {});
    [[nodiscard]] auto exit_code() const noexcept -> ExitCode override { return ExitCode::data; }
    [[nodiscard]] auto location() const noexcept -> std::string const& { return location_; }

private:
    std::string location_;
};

/// Input bytes are not well-formed UTF-8.
class Utf8Error : public FormatError {
public:
    explicit Utf8Error(std::uint64_t byte_offset);
    [[nodiscard]] auto byte_offset() const noexcept -> std::uint64_t { return offset_; }

private:
    std::uint64_t offset_;
};

/// A persisted index failed verification (bad magic, version, checksum, truncation).
class CorruptIndexError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Index and query were produced with different analyzer configurations.
class AnalyzerMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A scoring formula was evaluated outside its mathematical domain.
///
/// Context fields are filled in as the error propagates: the model raises it
/// with a message, retrieval attaches term, query and document.
class ScoringDomainError : public Error {
public:
    ScoringDomainError(std::string model, std::string detail);

    [[nodiscard]] auto exit_code() const noexcept -> ExitCode override { return ExitCode::data; }
    [[nodiscard]] auto model() const noexcept -> std::string const& { return model_; }
    [[nodiscard]] auto detail() const noexcept -> std::string const& { return detail_; }
    [[nodiscard]] auto term() const noexcept -> std::string const& { return term_; }
    [[nodiscard]] auto qid() const noexcept -> std::string const& { return qid_; }
    [[nodiscard]] auto docid() const noexcept -> std::string const& { return docid_; }

    /// Returns a copy carrying additional context.
    [[nodiscard]] auto with_context(std::string term, std::string qid, std::string docid) const
        -> ScoringDomainError;

    [[nodiscard]] auto what() const noexcept -> char const* override { return message_.c_str(); }

private:
    void rebuild_message();

    std::string model_;
    std::string detail_;
    std::string term_;
    std::string qid_;
    std::string docid_;
    std::string message_;
};

}  // namespace girit
