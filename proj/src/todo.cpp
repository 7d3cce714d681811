#include "sagents/todo.hpp"

#include <cctype>
#include <regex>
#include <sstream>
#include <vector>

#include "sagents/text.hpp"

namespace sagents {

std::string to_string(Verb v) {
    switch (v) {
        case Verb::Mine: return "mine";
        case Verb::Craft: return "craft";
        case Verb::Smelt: return "smelt";
        case Verb::Kill: return "kill";
        case Verb::Cook: return "cook";
        case Verb::Equip: return "equip";
        case Verb::Build: return "build";
        case Verb::Give: return "give";
        case Verb::MoveTo: return "move to";
    }
    return "?";
}

AgentAction AgentAction::inner() const {
    AgentAction a = *this;
    a.kind = Kind::Direct;
    a.target.reset();
    return a;
}

nlohmann::json AgentAction::to_json() const {
    nlohmann::json j;
    j["kind"] = is_delegate() ? "delegate" : "direct";
    j["verb"] = to_string(verb);
    if (target) j["target"] = target->name();
    if (quantity) j["quantity"] = *quantity;
    if (item) j["item"] = *item;
    if (position) j["position"] = {position->x, position->y, position->z};
    if (recipient) j["recipient"] = recipient->name();
    return j;
}

std::string singular_item(std::string_view item) {
    std::string s = to_lower(text::trim(item));
    if (s.size() > 2 && s.back() == 's' && s[s.size() - 2] != 's') s.pop_back();
    return s;
}

namespace {

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

std::string join(const std::vector<std::string>& w, std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t i = from; i < to && i < w.size(); ++i) {
        if (!s.empty()) s += ' ';
        s += w[i];
    }
    return s;
}

std::optional<Verb> verb_of(const std::string& raw) {
    static const std::vector<std::pair<Verb, std::vector<std::string>>> forms{
        {Verb::Mine, {"mine", "mines", "mined", "mining", "dig", "digs", "gather", "gathers", "collect", "collects"}},
        {Verb::Craft, {"craft", "crafts", "crafted", "crafting", "make", "makes"}},
        {Verb::Smelt, {"smelt", "smelts", "smelted", "smelting"}},
        {Verb::Kill, {"kill", "kills", "killed"}},
        {Verb::Cook, {"cook", "cooks", "cooked"}},
        {Verb::Equip, {"equip", "equips", "equipped"}},
        {Verb::Build, {"build", "builds", "built"}},
        {Verb::Give, {"give", "gives", "gave"}},
    };
    const std::string w = to_lower(raw);
    for (const auto& [v, fs] : forms)
        for (const auto& f : fs)
            if (w == f) return v;
    return std::nullopt;
}

std::optional<int> quantity_of(const std::string& w) {
    const std::string l = to_lower(w);
    if (l == "a" || l == "an" || l == "one") return 1;
    if (l.empty() || l.size() > 9) return std::nullopt;
    for (char c : l)
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    return std::stoi(l);
}

const std::regex& position_re() {
    static const std::regex re(R"(\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
    return re;
}

// Strips a trailing "(use 48 planks)"-style note that is not a coordinate.
std::string strip_notes(std::string s) {
    static const std::regex note(R"(\s*\(([^()]*)\)\s*$)");
    std::smatch m;
    while (std::regex_search(s, m, note)) {
        std::smatch pm;
        const std::string whole = m.str(0);
        if (std::regex_search(whole, pm, position_re())) break;
        s = s.substr(0, static_cast<std::size_t>(m.position(0)));
    }
    return s;
}

AgentAction parse_direct(std::string s) {
    AgentAction a;
    std::smatch m;
    static const std::regex at_pos(R"(\s+(?:at|to|on)?\s*(\(\s*-?\d+\s*,\s*-?\d+\s*,\s*-?\d+\s*\)))",
                                   std::regex::icase);
    if (std::regex_search(s, m, at_pos)) {
        std::smatch pm;
        const std::string p = m.str(1);
        std::regex_search(p, pm, position_re());
        a.position = Position{std::stoi(pm.str(1)), std::stoi(pm.str(2)), std::stoi(pm.str(3))};
        s = s.substr(0, static_cast<std::size_t>(m.position(0))) + s.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
    }
    auto w = words(s);
    if (w.empty()) throw Error(ErrorCode::MalformedTodo, "empty todo");
    std::size_t i = 0;
    const std::string first = to_lower(w[0]);
    // The position match may already have consumed the "to".
    if ((first == "move" || first == "moves" || first == "go" || first == "goes") &&
        (w.size() == 1 || to_lower(w[1]) == "to")) {
        a.verb = Verb::MoveTo;
        if (!a.position) throw Error(ErrorCode::MissingPosition, "move to needs a position");
        if (w.size() > 2) throw Error(ErrorCode::MalformedTodo, s);
        return a;
    }
    auto v = verb_of(w[0]);
    if (!v) throw Error(ErrorCode::UnknownVerb, w[0]);
    a.verb = *v;
    ++i;
    auto skip_filler = [&] {
        while (i < w.size()) {
            const std::string l = to_lower(w[i]);
            if (l == "the" || l == "remaining" || l == "more" || l == "another" || l == "additional") ++i;
            else break;
        }
    };
    skip_filler();
    if (i < w.size()) {
        if (auto q = quantity_of(w[i])) {
            if (*q <= 0) throw Error(ErrorCode::MalformedTodo, "non-positive quantity");
            a.quantity = *q;
            ++i;
            skip_filler();
        }
    }
    std::size_t end = w.size();
    if (a.verb == Verb::Give) {
        std::size_t to = w.size();
        for (std::size_t k = w.size(); k-- > i;)
            if (to_lower(w[k]) == "to") {
                to = k;
                break;
            }
        if (to == w.size() || to + 2 != w.size()) throw Error(ErrorCode::MalformedTodo, "give needs 'to <player>'");
        std::string who = w[to + 1];
        while (!who.empty() && (who.back() == '.' || who.back() == ',')) who.pop_back();
        a.recipient = AgentId(who);
        end = to;
    }
    std::string item = join(w, i, end);
    while (!item.empty() && (item.back() == '.' || item.back() == ',')) item.pop_back();
    if (!item.empty()) a.item = a.quantity ? singular_item(item) : to_lower(text::trim(item));
    if (!a.item && a.verb != Verb::Build) throw Error(ErrorCode::MalformedTodo, "missing item: " + s);
    if (a.verb == Verb::Build && !a.position) throw Error(ErrorCode::MissingPosition, "build needs a position");
    return a;
}

}  // namespace

std::optional<Verb> verb_from_word(std::string_view word) { return verb_of(std::string(word)); }

AgentAction parse_todo(std::string_view todo) {
    std::string s = text::trim(todo);
    while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.pop_back();
    s = strip_notes(text::trim(s));
    if (s.empty()) throw Error(ErrorCode::MalformedTodo, "empty todo");
    auto w = words(s);
    if (to_lower(w[0]) == "inform" || to_lower(w[0]) == "instruct" || to_lower(w[0]) == "tell") {
        if (w.size() < 3) throw Error(ErrorCode::MalformedTodo, s);
        std::string who = w[1];
        while (!who.empty() && (who.back() == ',' || who.back() == ':')) who.pop_back();
        std::size_t from = 2;
        if (to_lower(w[2]) == "to") from = 3;
        // Rebuild the remainder from the original text to keep the position intact.
        std::string rest = join(w, from, w.size());
        AgentAction inner = parse_direct(rest);
        inner.kind = AgentAction::Kind::Delegate;
        inner.target = AgentId(who);
        return inner;
    }
    return parse_direct(s);
}

std::string render(const AgentAction& a) {
    std::string s;
    if (a.is_delegate() && a.target) s = "inform " + a.target->name() + " to ";
    if (a.verb == Verb::MoveTo) {
        s += "move to";
    } else {
        s += to_string(a.verb);
        if (a.quantity) s += " " + std::to_string(*a.quantity);
        if (a.item) s += " " + *a.item;
        if (a.verb == Verb::Give && a.recipient) s += " to " + a.recipient->name();
    }
    if (a.position) {
        const auto& p = *a.position;
        s += (a.verb == Verb::MoveTo ? " (" : " at (") + std::to_string(p.x) + "," + std::to_string(p.y) + "," +
             std::to_string(p.z) + ")";
    }
    return s;
}

}  // namespace sagents
