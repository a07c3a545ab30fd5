#include "maxpot/query.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "text_util.hpp"

namespace maxpot {

NodeSet outcome_nodes(const Admg& g, const World& w) {
    NodeSet s(g.size());
    for (auto [v, x] : w.outcomes) s.insert(v);
    return s;
}

NodeSet intervention_nodes(const Admg& g, const World& w) {
    NodeSet s(g.size());
    for (auto [v, x] : w.interventions) s.insert(v);
    return s;
}

void validate(const Admg& g, const Statement& s, bool allow_family) {
    if (s.worlds.empty()) throw InputError("statement has no worlds");
    const auto n = static_cast<NodeId>(g.size());
    for (const auto& w : s.worlds) {
        if (w.outcomes.empty()) throw InputError("world has an empty outcome set");
        NodeSet seen_do(g.size()), seen_out(g.size());
        auto check = [&](const Assignment& a, NodeSet& seen, const char* what) {
            for (auto [v, x] : a) {
                if (v < 0 || v >= n) throw InputError("node index out of range");
                if (seen.contains(v))
                    throw InputError("node '" + g.name(v) + "' repeated among " + what);
                seen.insert(v);
                if (x == kAllValues) {
                    if (!allow_family)
                        throw InputError("node '" + g.name(v) + "' needs a concrete value here");
                } else if (x < 0 || x >= g.cardinality(v)) {
                    throw InputError("value " + std::to_string(x) + " outside the support of '" +
                                     g.name(v) + "'");
                }
            }
        };
        check(w.interventions, seen_do, "interventions");
        check(w.outcomes, seen_out, "outcomes");
        if (seen_do.intersects(seen_out))
            throw InputError("a world intervenes on one of its own outcomes");
    }
}

void validate(const Admg& g, const Query& q) {
    if (q.terms.empty()) throw InputError("query has no terms");
    for (const auto& t : q.terms) validate(g, t.statement, false);
}

Statement canonical(Statement s) {
    for (auto& w : s.worlds) {
        std::sort(w.interventions.begin(), w.interventions.end());
        std::sort(w.outcomes.begin(), w.outcomes.end());
    }
    return s;
}

std::vector<OutcomeCell> expand(const Admg& g, const Experiment& e) {
    // slots[i] = (world, is_outcome, position within assignment)
    struct Slot {
        std::size_t world;
        bool outcome;
        std::size_t pos;
        int card;
    };
    std::vector<Slot> slots;
    for (std::size_t w = 0; w < e.statement.worlds.size(); ++w) {
        const auto& a = e.statement.worlds[w].interventions;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].second == kAllValues) slots.push_back({w, false, i, g.cardinality(a[i].first)});
    }
    const std::size_t n_do = slots.size();
    for (std::size_t w = 0; w < e.statement.worlds.size(); ++w) {
        const auto& a = e.statement.worlds[w].outcomes;
        if (a.empty()) throw InputError("experiment '" + e.label + "' has an empty outcome set");
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].second == kAllValues) slots.push_back({w, true, i, g.cardinality(a[i].first)});
    }
    std::vector<OutcomeCell> cells;
    std::vector<int> digits(slots.size(), 0);
    while (true) {
        OutcomeCell c;
        c.statement = e.statement;
        c.experiment = e.id;
        int group = 0;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            auto& world = c.statement.worlds[slots[i].world];
            auto& a = slots[i].outcome ? world.outcomes : world.interventions;
            a[slots[i].pos].second = digits[i];
            if (i < n_do) group = group * slots[i].card + digits[i];
        }
        c.group = group;
        cells.push_back(std::move(c));
        std::size_t i = slots.size();
        while (i > 0) {
            --i;
            if (++digits[i] < slots[i].card) break;
            digits[i] = 0;
            if (i == 0) return cells;
        }
        if (slots.empty()) return cells;
    }
}

std::vector<OutcomeCell> expand(const Admg& g, const std::vector<Experiment>& subset) {
    std::vector<OutcomeCell> out;
    for (const auto& e : subset) {
        auto cells = expand(g, e);
        out.insert(out.end(), cells.begin(), cells.end());
    }
    return out;
}

namespace {

class Parser {
public:
    Parser(const Admg& g, std::string_view text, int line) : g_(g), s_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, static_cast<int>(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }
    std::size_t pos() const { return pos_; }
    void set_pos(std::size_t p) { pos_ = p; }

    std::string identifier() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '\''))
            ++pos_;
        if (start == pos_) fail("expected a node name");
        return std::string(s_.substr(start, pos_ - start));
    }

    double number() {
        skip_ws();
        const std::string rest(s_.substr(pos_));
        char* end = nullptr;
        double x = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) fail("expected a number");
        pos_ += static_cast<std::size_t>(end - rest.c_str());
        return x;
    }

    int value_for(NodeId v) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an integer value");
        int x = std::atoi(std::string(s_.substr(start, pos_ - start)).c_str());
        if (x >= g_.cardinality(v)) {
            pos_ = start;
            fail("value " + std::to_string(x) + " outside the support of '" + g_.name(v) + "'");
        }
        return x;
    }

    NodeId node() {
        skip_ws();
        std::size_t start = pos_;
        auto name = identifier();
        auto v = g_.find(name);
        if (!v) {
            pos_ = start;
            fail("unknown node '" + name + "'");
        }
        return *v;
    }

    Assignment assignments(bool allow_family) {
        Assignment a;
        do {
            NodeId v = node();
            int x = kAllValues;
            if (accept("="))
                x = value_for(v);
            else if (!allow_family)
                fail("node '" + g_.name(v) + "' needs a value");
            a.emplace_back(v, x);
        } while (accept(","));
        return a;
    }

    World world(bool allow_family) {
        World w;
        w.outcomes = assignments(allow_family);
        if (accept("|")) {
            if (!accept("do")) fail("conditional statements are not supported; use do(...)");
            expect("(");
            w.interventions = assignments(allow_family);
            expect(")");
            if (peek() == ',') fail("conditioning on observations is not supported");
        }
        return w;
    }

    Statement statement(bool allow_family) {
        Statement st;
        if (accept("CF")) {
            expect("{");
            do {
                st.worlds.push_back(world(allow_family));
            } while (accept(";"));
            expect("}");
        } else if (accept("P")) {
            expect("(");
            st.worlds.push_back(world(allow_family));
            expect(")");
        } else {
            fail("expected 'P(' or 'CF{'");
        }
        return st;
    }

private:
    const Admg& g_;
    std::string_view s_;
    int line_;
    std::size_t pos_ = 0;
};

Statement checked(const Admg& g, Statement s, bool allow_family, int line) {
    try {
        validate(g, s, allow_family);
    } catch (const ParseError&) {
        throw;
    } catch (const InputError& e) {
        throw ParseError(e.what(), line, 1);
    }
    return canonical(std::move(s));
}

std::string format_value(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // prefer the short form when it round-trips
    char shortbuf[64];
    std::snprintf(shortbuf, sizeof shortbuf, "%g", x);
    return std::strtod(shortbuf, nullptr) == x ? shortbuf : buf;
}

}  // namespace

Statement parse_statement(const Admg& g, std::string_view text, bool allow_family) {
    Parser p(g, text, 1);
    auto s = p.statement(allow_family);
    if (!p.at_end()) p.fail("trailing characters");
    return checked(g, std::move(s), allow_family, 1);
}

Query parse_query(const Admg& g, std::string_view text) {
    Parser p(g, text, 1);
    Query q;
    bool first = true;
    while (!p.at_end()) {
        double sign = 1;
        if (p.accept("+")) {
        } else if (p.accept("-")) {
            sign = -1;
        } else if (!first) {
            p.fail("expected '+' or '-' between terms");
        }
        double coef = 1;
        char c = p.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            coef = p.number();
            p.expect("*");
        }
        Term t;
        t.coefficient = sign * coef;
        t.statement = checked(g, p.statement(false), false, 1);
        q.terms.push_back(std::move(t));
        first = false;
    }
    if (q.terms.empty()) throw ParseError("empty query", 1, 1);
    return q;
}

std::vector<Experiment> parse_experiments(const Admg& g, std::string_view text) {
    std::vector<Experiment> out;
    int line_no = 0;
    for (auto raw : detail::split_lines(text)) {
        ++line_no;
        auto hash = raw.find('#');
        auto line = raw.substr(0, hash);
        Parser p(g, line, line_no);
        if (p.at_end()) continue;
        Experiment e;
        e.id = static_cast<int>(out.size());
        // optional "label:" prefix
        const auto save = p.pos();
        {
            auto word = p.identifier();
            if (p.accept(":"))
                e.label = word;
            else
                p.set_pos(save);
        }
        if (e.label.empty()) e.label = "a" + std::to_string(out.size() + 1);
        e.statement = checked(g, p.statement(true), true, line_no);
        while (!p.at_end()) {
            if (p.accept("cost")) {
                p.expect("=");
                if (p.accept("inf"))
                    e.cost = INFINITY;
                else
                    e.cost = p.number();
                if (e.cost < 0) p.fail("cost must be non-negative");
            } else {
                p.fail("unexpected text after statement");
            }
        }
        for (const auto& prev : out)
            if (prev.label == e.label) throw ParseError("duplicate label '" + e.label + "'", line_no, 1);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Experiment> read_experiments(const Admg& g, const std::string& path) {
    return parse_experiments(g, detail::read_file(path));
}

Query read_query(const Admg& g, const std::string& text_or_path) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(text_or_path, ec)) {
        std::string text = detail::read_file(text_or_path);
        std::string joined;
        for (auto line : detail::split_lines(text)) {
            auto l = line.substr(0, line.find('#'));
            joined += std::string(l) + " ";
        }
        return parse_query(g, joined);
    }
    return parse_query(g, text_or_path);
}

namespace {

std::string format_assignment(const Admg& g, const Assignment& a) {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += g.name(a[i].first);
        if (a[i].second != kAllValues) out += "=" + std::to_string(a[i].second);
    }
    return out;
}

std::string format_world(const Admg& g, const World& w) {
    std::string out = format_assignment(g, w.outcomes);
    if (!w.interventions.empty()) out += " | do(" + format_assignment(g, w.interventions) + ")";
    return out;
}

}  // namespace

std::string format_statement(const Admg& g, const Statement& s) {
    if (s.worlds.size() == 1) return "P(" + format_world(g, s.worlds[0]) + ")";
    std::string out = "CF{";
    for (std::size_t i = 0; i < s.worlds.size(); ++i) {
        if (i) out += "; ";
        out += format_world(g, s.worlds[i]);
    }
    return out + "}";
}

std::string format_query(const Admg& g, const Query& q) {
    std::string out;
    for (std::size_t i = 0; i < q.terms.size(); ++i) {
        double c = q.terms[i].coefficient;
        if (i) out += c < 0 ? " - " : " + ";
        else if (c < 0) out += "-";
        double a = std::abs(c);
        if (a != 1.0) out += format_value(a) + "*";
        out += format_statement(g, q.terms[i].statement);
    }
    return out;
}

std::string format_experiments(const Admg& g, const std::vector<Experiment>& e) {
    std::string out;
    for (const auto& x : e) {
        out += x.label + ": " + format_statement(g, x.statement);
        out += " cost=" + (std::isinf(x.cost) ? std::string("inf") : format_value(x.cost)) + "\n";
    }
    return out;
}

std::optional<Query> sample_query(const Admg& g, Rng& rng) {
    const auto n = g.size();
    std::vector<NodeId> outcomes;
    for (std::size_t v = 0; v < n; ++v)
        if (!g.parents(static_cast<NodeId>(v)).empty()) outcomes.push_back(static_cast<NodeId>(v));
    if (outcomes.empty()) return std::nullopt;
    const NodeId y1 = rng.pick(outcomes);
    auto anc = ancestors(g, NodeSet(n, {y1}));
    anc.erase(y1);
    const NodeId x = rng.pick(anc.to_vector());
    std::vector<NodeId> second;
    const auto desc = descendants(g, NodeSet(n, {x}));
    for (NodeId v : desc.to_vector())
        if (v != x) second.push_back(v);
    const NodeId y2 = rng.pick(second);
    Statement s;
    s.worlds.push_back({{{x, 1}}, {{y1, 1}}});
    s.worlds.push_back({{{x, 0}}, {{y2, 0}}});
    return Query{{Term{1.0, s}}};
}

std::optional<Query> sample_query(const Admg& g, std::uint64_t seed) {
    Rng rng(seed);
    return sample_query(g, rng);
}

namespace {

constexpr int kAttempts = 64;

std::vector<NodeId> all_nodes(const Admg& g) {
    std::vector<NodeId> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = static_cast<NodeId>(i);
    return v;
}

// anc(W)\W for a node set given as ids
NodeSet proper_ancestors(const Admg& g, const std::vector<NodeId>& w) {
    auto s = NodeSet::from(g.size(), w);
    return ancestors(g, s) - s;
}

World family_world(const std::vector<NodeId>& w, const std::vector<NodeId>& z) {
    World out;
    for (NodeId v : z) out.interventions.emplace_back(v, kAllValues);
    for (NodeId v : w) out.outcomes.emplace_back(v, kAllValues);
    std::sort(out.interventions.begin(), out.interventions.end());
    std::sort(out.outcomes.begin(), out.outcomes.end());
    return out;
}

}  // namespace

std::optional<Experiment> sample_experiment(const Admg& g, Rng& rng, double cf_fraction) {
    const auto nodes = all_nodes(g);
    const bool two_world = rng.bernoulli(cf_fraction);
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        const int nw = rng.range(1, 3);
        const int nz = rng.range(1, 3);
        auto w1 = rng.sample(nodes, static_cast<std::size_t>(nw));
        auto pool1 = proper_ancestors(g, w1).to_vector();
        if (pool1.empty()) continue;
        auto z1 = rng.sample(pool1, static_cast<std::size_t>(nz));
        Experiment e;
        e.label = "e";
        e.statement.worlds.push_back(family_world(w1, z1));
        if (!two_world) return e;

        const NodeId w = rng.pick(w1);
        bool done = false;
        for (int inner = 0; inner < kAttempts && !done; ++inner) {
            const int nw2 = rng.range(1, 3);
            const int nz2 = rng.range(1, 3);
            std::vector<NodeId> rest;
            for (NodeId v : nodes)
                if (v != w) rest.push_back(v);
            auto w2 = rng.sample(rest, static_cast<std::size_t>(nw2 - 1));
            w2.insert(w2.begin(), w);
            auto pool2 = proper_ancestors(g, w2);
            auto shared = (NodeSet::from(g.size(), z1) & pool2).to_vector();
            if (shared.empty()) continue;
            const NodeId z = rng.pick(shared);
            pool2.erase(z);
            auto z2 = rng.sample(pool2.to_vector(), static_cast<std::size_t>(nz2 - 1));
            z2.insert(z2.begin(), z);
            e.statement.worlds.push_back(family_world(w2, z2));
            done = true;
        }
        if (done) return e;
    }
    return std::nullopt;
}

std::optional<Experiment> sample_experiment(const Admg& g, std::uint64_t seed, double cf_fraction) {
    Rng rng(seed);
    return sample_experiment(g, rng, cf_fraction);
}

}  // namespace maxpot
