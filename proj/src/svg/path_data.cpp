#include <string>

#include "number_scan.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/svg.hpp"

namespace vecdraw {

int command_arity(char letter) {
    switch (letter) {
    case 'M': case 'm': case 'L': case 'l': case 'T': case 't': return 2;
    case 'H': case 'h': case 'V': case 'v': return 1;
    case 'C': case 'c': return 6;
    case 'S': case 's': case 'Q': case 'q': return 4;
    case 'A': case 'a': return 7;
    case 'Z': case 'z': return 0;
    default: return -1;
    }
}

namespace {

bool starts_number(std::string_view s, std::size_t pos) {
    if (pos >= s.size()) return false;
    const char c = s[pos];
    return detail::is_digit(c) || c == '-' || c == '+' || c == '.';
}

double read_flag(std::string_view s, std::size_t& pos) {
    if (pos >= s.size() || (command_arity(s[pos]) >= 0 && !detail::is_digit(s[pos]))) {
        throw Error(ErrorCode::MissingCoordinate, "expected arc flag", pos);
    }
    const char c = s[pos];
    if (c != '0' && c != '1') throw Error(ErrorCode::BadArcFlag, std::string("arc flag must be 0 or 1"), pos);
    ++pos;
    return c == '1' ? 1.0 : 0.0;
}

double read_coordinate(std::string_view s, std::size_t& pos) {
    auto v = detail::scan_number(s, pos);
    if (!v) throw Error(ErrorCode::MissingCoordinate, "expected number", pos);
    return *v;
}

}  // namespace

std::vector<RawCommand> parse_path_data(std::string_view s) {
    std::vector<RawCommand> out;
    std::size_t pos = 0;
    detail::skip_space(s, pos);
    while (pos < s.size()) {
        const char letter = s[pos];
        const int arity = command_arity(letter);
        if (arity < 0) {
            throw Error(ErrorCode::UnknownLetter, std::string("unexpected character '") + letter + "'", pos);
        }
        ++pos;
        RawCommand command{letter, {}};
        if (arity > 0) {
            const bool is_arc = letter == 'A' || letter == 'a';
            detail::skip_space(s, pos);
            for (;;) {
                for (int k = 0; k < arity; ++k) {
                    if (k > 0) detail::skip_comma_space(s, pos);
                    const bool flag = is_arc && (k == 3 || k == 4);
                    command.args.push_back(flag ? read_flag(s, pos) : read_coordinate(s, pos));
                }
                detail::skip_comma_space(s, pos);
                if (!starts_number(s, pos)) break;
            }
        } else {
            detail::skip_space(s, pos);
        }
        out.push_back(std::move(command));
    }
    return out;
}

}  // namespace vecdraw
