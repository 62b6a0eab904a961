#pragma once

#include <string>
#include <utility>
#include <vector>

#include "detkit/fsa.hpp"

namespace detkit {

class ParseError : public ModelError {
  public:
    ParseError(int line, const std::string& what)
        : ModelError("line " + std::to_string(line) + ": " + what), line(line) {}
    int line = 0;
};

struct ParsedModel {
    Fsa fsa;
    std::vector<std::string> warnings;
};

/// Line-oriented model format; `#` starts a comment, `eps` is the reserved
/// spelling of the empty label.
ParsedModel parse_model_text(const std::string& text);

/// JSON equivalent with the same field names (states, initial, events,
/// controllable, faulty, trans, alphabet).
ParsedModel parse_model_json(const std::string& text);

/// Dispatches on the `.json` extension, otherwise reads the text format.
ParsedModel parse_model_file(const std::string& path);

std::string serialize_model(const Fsa& a);
std::string serialize_model_json(const Fsa& a);

/// States as nodes, transitions labeled `event(label)`, initial states marked
/// with an incoming arrowless edge.
std::string to_dot(const Fsa& a);

/// Specification file: one `x y` state pair per line, `#` comments.
std::vector<std::pair<std::string, std::string>> parse_spec_pairs(const std::string& text);

}  // namespace detkit
