#pragma once

// Minimal XML reader for SVG input: elements, attributes, comments, CDATA,
// processing instructions and a DOCTYPE prolog. Character data is dropped.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vecdraw::detail {

struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlElement> children;
    std::size_t offset = 0;

    const std::string* attribute(std::string_view key) const;
};

/// Throws Error(MalformedMarkup) with the byte offset of the first problem.
XmlElement parse_xml(std::string_view text);

}  // namespace vecdraw::detail
