#include "fbpr/surface_forms.hpp"

#include "fbpr/error.hpp"

#include <cctype>

namespace fbpr {

std::string ascii_lower(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string capitalize_first(const std::string& lowercased) {
    std::string out = lowercased;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    }
    return out;
}

VariantSet expand_variants(const std::string& source) {
    if (source.empty()) {
        throw Error(Errc::EmptyInput, "cannot expand variants of an empty phrase");
    }
    if (std::isspace(static_cast<unsigned char>(source.front())) ||
        std::isspace(static_cast<unsigned char>(source.back()))) {
        throw Error(Errc::EmptyInput, "phrase must not carry leading/trailing whitespace: '" + source + "'");
    }

    const std::string lower = ascii_lower(source);
    const std::string capitalized = capitalize_first(lower);

    VariantSet set;
    set.source = source;
    auto emit = [&set](const std::string& v) {
        for (const std::string& existing : set.variants) {
            if (existing == v) return;
        }
        set.variants.push_back(v);
    };
    emit(source);
    emit(" " + source);
    emit(lower);
    emit(" " + lower);
    emit(capitalized);
    emit(" " + capitalized);
    return set;
}

} // namespace fbpr
