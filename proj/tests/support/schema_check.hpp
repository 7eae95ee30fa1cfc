#pragma once
// Structural validator for the draft-07 subset the bundled schemas use:
// type, properties, required, items, enum, minItems, minimum,
// exclusiveMinimum, oneOf, and $ref into #/definitions.

#include <string>

namespace schema_check {

// Empty string when `document` conforms to `schema`; otherwise the first
// violation, prefixed with its JSON path.
std::string validate(const std::string& document, const std::string& schema);

}  // namespace schema_check
