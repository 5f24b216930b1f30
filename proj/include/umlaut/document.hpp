#ifndef UMLAUT_DOCUMENT_HPP
#define UMLAUT_DOCUMENT_HPP

#include <optional>
#include <string>

#include "umlaut/gaussian.hpp"
#include "umlaut/umlaut_channel.hpp"

namespace umlaut {

/// Schema violation in an input document (exit code 2); numeric invariant
/// violations keep throwing InvariantError (exit code 3).
struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(2, what) {}
};

struct DocumentEnvelope {
    std::string schema_version;
    std::string kind;  // state | channel | cq_channel | gaussian
    std::optional<BipartiteState> state;
    std::optional<Channel> channel;
    std::vector<DensityOperator> cq_states;
    std::optional<GaussianState> gaussian;
};

DocumentEnvelope parse_document(const std::string& text);

std::string serialize_document(const DocumentEnvelope& doc, bool pretty = false);

}  // namespace umlaut

#endif
