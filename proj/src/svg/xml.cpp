#include "xml.hpp"

#include <cstdint>

#include "vecdraw/error.hpp"

namespace vecdraw::detail {

const std::string* XmlElement::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

bool is_name_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Reader {
public:
    explicit Reader(std::string_view text) : s_(text) {}

    XmlElement document() {
        if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        skip_misc(true);
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected root element");
        XmlElement root = element();
        skip_misc(false);
        if (pos_ != s_.size()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::MalformedMarkup, what, pos_);
    }

    bool starts_with(std::string_view lit) const { return s_.substr(pos_, lit.size()) == lit; }

    void skip_ws() {
        while (pos_ < s_.size() && is_ws(s_[pos_])) ++pos_;
    }

    void skip_past(std::string_view terminator, const char* what) {
        const auto end = s_.find(terminator, pos_);
        if (end == std::string_view::npos) {
            pos_ = s_.size();
            fail(std::string("unterminated ") + what);
        }
        pos_ = end + terminator.size();
    }

    // Comments, PIs, whitespace, and (in the prolog) a DOCTYPE.
    void skip_misc(bool prolog) {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                skip_past("-->", "comment");
            } else if (starts_with("<?")) {
                skip_past("?>", "processing instruction");
            } else if (prolog && starts_with("<!DOCTYPE")) {
                skip_doctype();
            } else {
                return;
            }
        }
    }

    void skip_doctype() {
        int depth = 0;
        while (pos_ < s_.size()) {
            const char c = s_[pos_++];
            if (c == '[') ++depth;
            else if (c == ']') --depth;
            else if (c == '>' && depth <= 0) return;
        }
        fail("unterminated DOCTYPE");
    }

    std::string name() {
        if (pos_ >= s_.size() || !is_name_start(s_[pos_])) fail("expected name");
        const auto start = pos_;
        while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string attribute_value() {
        if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail("expected quoted attribute value");
        const char quote = s_[pos_++];
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != quote) {
            const char c = s_[pos_];
            if (c == '<') fail("'<' in attribute value");
            if (c == '&') {
                decode_entity(out);
            } else {
                out += c;
                ++pos_;
            }
        }
        if (pos_ >= s_.size()) fail("unterminated attribute value");
        ++pos_;
        return out;
    }

    void decode_entity(std::string& out) {
        const auto semi = s_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 10) fail("bad entity reference");
        const auto body = s_.substr(pos_ + 1, semi - pos_ - 1);
        if (body == "amp") out += '&';
        else if (body == "lt") out += '<';
        else if (body == "gt") out += '>';
        else if (body == "quot") out += '"';
        else if (body == "apos") out += '\'';
        else if (body.size() > 1 && body[0] == '#') {
            std::uint32_t cp = 0;
            const bool hex = body[1] == 'x' || body[1] == 'X';
            const auto digits = body.substr(hex ? 2 : 1);
            if (digits.empty()) fail("bad character reference");
            for (char c : digits) {
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else fail("bad character reference");
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
                if (cp > 0x10FFFF) fail("character reference out of range");
            }
            append_utf8(out, cp);
        } else {
            fail("unknown entity '" + std::string(body) + "'");
        }
        pos_ = semi + 1;
    }

    XmlElement element() {
        XmlElement el;
        el.offset = pos_;
        ++pos_;  // '<'
        el.name = name();
        for (;;) {
            const auto before = pos_;
            skip_ws();
            if (pos_ >= s_.size()) fail("unterminated start tag");
            if (starts_with("/>")) {
                pos_ += 2;
                return el;
            }
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (before == pos_) fail("expected whitespace before attribute");
            std::string key = name();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected '=' after attribute name");
            ++pos_;
            skip_ws();
            std::string value = attribute_value();
            if (el.attribute(key)) fail("duplicate attribute '" + key + "'");
            el.attributes.emplace_back(std::move(key), std::move(value));
        }
        content(el);
        return el;
    }

    void content(XmlElement& parent) {
        for (;;) {
            const auto lt = s_.find('<', pos_);
            if (lt == std::string_view::npos) {
                pos_ = s_.size();
                fail("missing end tag for <" + parent.name + ">");
            }
            pos_ = lt;
            if (starts_with("</")) {
                pos_ += 2;
                const auto close_at = pos_;
                const std::string closing = name();
                if (closing != parent.name) {
                    pos_ = close_at;
                    fail("mismatched end tag </" + closing + "> for <" + parent.name + ">");
                }
                skip_ws();
                if (pos_ >= s_.size() || s_[pos_] != '>') fail("unterminated end tag");
                ++pos_;
                return;
            }
            if (starts_with("<!--")) {
                skip_past("-->", "comment");
            } else if (starts_with("<![CDATA[")) {
                skip_past("]]>", "CDATA section");
            } else if (starts_with("<?")) {
                skip_past("?>", "processing instruction");
            } else {
                parent.children.push_back(element());
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

XmlElement parse_xml(std::string_view text) { return Reader(text).document(); }

}  // namespace vecdraw::detail
