#pragma once

#include <string>
#include <vector>

namespace fbpr {

/// Surface-form variants of a phrase: the case and leading-space rewritings
/// that make token-based corpus counting case- and position-agnostic.
struct VariantSet {
    std::string source;
    std::vector<std::string> variants; // distinct, first-emission order
};

/// Expand a phrase into its surface-form variants, in a fixed emission order:
/// original, " "+original, lowercase, " "+lowercase, capitalized, " "+capitalized,
/// deduplicated preserving first occurrence. Capitalization uppercases the first
/// character of the lowercased form (a no-op when it is not a letter).
///
/// Throws Error{EmptyInput} for an empty source; the source must carry no
/// leading or trailing whitespace.
VariantSet expand_variants(const std::string& source);

// ASCII case transforms; bytes outside [A-Za-z] pass through unchanged.
std::string ascii_lower(const std::string& text);
std::string capitalize_first(const std::string& lowercased);

} // namespace fbpr
