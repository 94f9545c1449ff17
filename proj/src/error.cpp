#include "girit/error.hpp"

namespace girit {

namespace {

auto located(std::string const& message, std::string const& location) -> std::string
{
    return location.empty() ? message : location + ": " + message;
}

}  // namespace

FormatError::FormatError(std::string const& message, std::string location)
    : Error(located(message, location)), location_(std::move(location))
{}

Utf8Error::Utf8Error(std::uint64_t byte_offset)
    : FormatError("invalid UTF-8 sequence", "byte " + std::to_string(byte_offset)),
      offset_(byte_offset)
{}

ScoringDomainError::ScoringDomainError(std::string model, std::string detail)
    : Error("scoring domain error"), model_(std::move(model)), detail_(std::move(detail))
{
    rebuild_message();
}

auto ScoringDomainError::with_context(std::string term, std::string qid, std::string docid) const
    -> ScoringDomainError
{
    ScoringDomainError copy = *this;
    if (!term.empty()) { copy.term_ = std::move(term); }
    if (!qid.empty()) { copy.qid_ = std::move(qid); }
    if (!docid.empty()) { copy.docid_ = std::move(docid); }
    copy.rebuild_message();
    return copy;
}

void ScoringDomainError::rebuild_message()
{
    message_ = "scoring domain error in " + model_ + ": " + detail_;
    if (!term_.empty()) { message_ += " [term=" + term_ + "]"; }
    if (!qid_.empty()) { message_ += " [qid=" + qid_ + "]"; }
    if (!docid_.empty()) { message_ += " [docid=" + docid_ + "]"; }
}

}  // namespace girit
