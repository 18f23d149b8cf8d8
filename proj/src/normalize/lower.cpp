#include <cctype>
#include <cmath>
#include <optional>
#include <string>

#include "vecdraw/error.hpp"
#include "vecdraw/normalize.hpp"

namespace vecdraw {

namespace {

class Lowerer {
public:
    std::vector<PathCommand> run(const std::vector<RawCommand>& raw) {
        if (raw.empty()) return {};
        if (raw.front().letter != 'M' && raw.front().letter != 'm') {
            throw Error(ErrorCode::StartsWithoutMove, std::string("path begins with '") + raw.front().letter + "'");
        }
        for (const auto& c : raw) lower(c);
        return std::move(out_);
    }

private:
    Point at(bool relative, double x, double y) const {
        return relative ? Point{cur_.x + x, cur_.y + y} : Point{x, y};
    }

    void emit_drawing(PathCommand c, const Point& end) {
        if (!out_.empty() && std::holds_alternative<cmd::Close>(out_.back())) out_.push_back(cmd::Move{start_});
        out_.push_back(std::move(c));
        cur_ = end;
    }

    void lower(const RawCommand& c) {
        const int arity = command_arity(c.letter);
        if (arity < 0) throw Error(ErrorCode::UnknownLetter, std::string("letter '") + c.letter + "'");
        if (arity == 0) {
            if (!c.args.empty()) throw Error(ErrorCode::UnknownLetter, "Z takes no arguments");
            if (!out_.empty() && !std::holds_alternative<cmd::Close>(out_.back())) out_.push_back(cmd::Close{});
            cur_ = start_;
            last_cubic_.reset();
            last_quad_.reset();
            return;
        }
        if (c.args.empty() || c.args.size() % static_cast<std::size_t>(arity) != 0) {
            throw Error(ErrorCode::MissingCoordinate,
                        std::string("'") + c.letter + "' needs a multiple of " + std::to_string(arity) + " arguments");
        }
        const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c.letter)));
        const bool rel = c.letter != upper;
        for (std::size_t g = 0; g < c.args.size(); g += static_cast<std::size_t>(arity)) {
            const double* a = c.args.data() + g;
            std::optional<Point> cubic_ctrl;
            std::optional<Point> quad_ctrl;
            switch (upper) {
            case 'M': {
                const Point p = at(rel, a[0], a[1]);
                if (g == 0) {
                    out_.push_back(cmd::Move{p});
                    cur_ = start_ = p;
                } else {
                    emit_drawing(cmd::Line{p}, p);
                }
                break;
            }
            case 'L': {
                const Point p = at(rel, a[0], a[1]);
                emit_drawing(cmd::Line{p}, p);
                break;
            }
            case 'H': {
                const Point p{rel ? cur_.x + a[0] : a[0], cur_.y};
                emit_drawing(cmd::Line{p}, p);
                break;
            }
            case 'V': {
                const Point p{cur_.x, rel ? cur_.y + a[0] : a[0]};
                emit_drawing(cmd::Line{p}, p);
                break;
            }
            case 'C': {
                const cmd::Cubic cu{at(rel, a[0], a[1]), at(rel, a[2], a[3]), at(rel, a[4], a[5])};
                cubic_ctrl = cu.c2;
                emit_drawing(cu, cu.to);
                break;
            }
            case 'S': {
                const Point c1 = last_cubic_ ? Point{2 * cur_.x - last_cubic_->x, 2 * cur_.y - last_cubic_->y} : cur_;
                const cmd::Cubic cu{c1, at(rel, a[0], a[1]), at(rel, a[2], a[3])};
                cubic_ctrl = cu.c2;
                emit_drawing(cu, cu.to);
                break;
            }
            case 'Q': {
                const cmd::Quad q{at(rel, a[0], a[1]), at(rel, a[2], a[3])};
                quad_ctrl = q.c;
                emit_drawing(q, q.to);
                break;
            }
            case 'T': {
                const Point ctrl = last_quad_ ? Point{2 * cur_.x - last_quad_->x, 2 * cur_.y - last_quad_->y} : cur_;
                const cmd::Quad q{ctrl, at(rel, a[0], a[1])};
                quad_ctrl = q.c;
                emit_drawing(q, q.to);
                break;
            }
            case 'A': {
                if ((a[3] != 0.0 && a[3] != 1.0) || (a[4] != 0.0 && a[4] != 1.0)) {
                    throw Error(ErrorCode::BadArcFlag, "arc flags must be 0 or 1");
                }
                const cmd::Arc arc{std::fabs(a[0]), std::fabs(a[1]), a[2], a[3] == 1.0, a[4] == 1.0,
                                   at(rel, a[5], a[6])};
                emit_drawing(arc, arc.to);
                break;
            }
            default:
                break;
            }
            last_cubic_ = cubic_ctrl;
            last_quad_ = quad_ctrl;
        }
    }

    std::vector<PathCommand> out_;
    Point cur_{};
    Point start_{};
    std::optional<Point> last_cubic_;
    std::optional<Point> last_quad_;
};

}  // namespace

std::vector<PathCommand> lower_commands(const std::vector<RawCommand>& raw) { return Lowerer{}.run(raw); }

SvgDocument lower_document(const RawDocument& raw) {
    SvgDocument doc;
    doc.viewbox = raw.viewbox;
    doc.paths.reserve(raw.paths.size());
    for (const auto& p : raw.paths) {
        auto commands = lower_commands(p.commands);
        if (commands.empty()) continue;
        doc.paths.push_back(SvgPath{std::move(commands), p.style});
    }
    return doc;
}

}  // namespace vecdraw
