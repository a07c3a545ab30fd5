#include <charconv>
#include <fstream>
#include <sstream>

#include "maxpot/admg.hpp"
#include "text_util.hpp"

namespace maxpot {

namespace detail {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
}

}  // namespace detail

namespace {

struct PendingEdge {
    detail::Token a, b;
    bool bidirected;
    int line;
};

int parse_cardinality(const detail::Token& t, int line) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
        throw ParseError("expected integer cardinality, got '" + t.text + "'", line, t.column);
    if (value < 2) throw ParseError("cardinality must be at least 2", line, t.column);
    return value;
}

}  // namespace

Admg parse_graph(std::string_view text) {
    Admg::Builder b;
    std::vector<PendingEdge> edges;
    int line_no = 0;
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        auto toks = detail::tokenize_line(line);
        if (toks.empty()) continue;
        const auto& kw = toks[0].text;
        if (kw == "node") {
            if (toks.size() < 2 || toks.size() > 3)
                throw ParseError("expected 'node <name> [<cardinality>]'", line_no, toks[0].column);
            int card = toks.size() == 3 ? parse_cardinality(toks[2], line_no) : 2;
            if (b.find(toks[1].text))
                throw ParseError("duplicate node '" + toks[1].text + "'", line_no, toks[1].column);
            b.add_node(toks[1].text, card);
        } else if (kw == "edge" || kw == "conf") {
            const bool bi = kw == "conf";
            const char* arrow = bi ? "<->" : "->";
            if (toks.size() != 4 || toks[2].text != arrow)
                throw ParseError(std::string("expected '") + kw + " <a> " + arrow + " <b>'", line_no,
                                 toks.size() > 2 ? toks[2].column : toks[0].column);
            edges.push_back({toks[1], toks[3], bi, line_no});
        } else if (kw == "latent") {
            if (toks.size() < 4)
                throw ParseError(
                    "latent declarations need at least two observed children (non-canonical latents "
                    "with fewer children are not accepted)",
                    line_no, toks[0].column);
            for (std::size_t i = 2; i < toks.size(); ++i)
                for (std::size_t j = i + 1; j < toks.size(); ++j)
                    edges.push_back({toks[i], toks[j], true, line_no});
        } else {
            throw ParseError("unknown directive '" + kw + "'", line_no, toks[0].column);
        }
    }
    for (const auto& e : edges) {
        auto a = b.find(e.a.text);
        if (!a) throw ParseError("unknown node '" + e.a.text + "'", e.line, e.a.column);
        auto c = b.find(e.b.text);
        if (!c) throw ParseError("unknown node '" + e.b.text + "'", e.line, e.b.column);
        try {
            if (e.bidirected)
                b.add_confounder(*a, *c);
            else
                b.add_edge(*a, *c);
        } catch (const CycleError&) {
            throw;
        } catch (const InputError& err) {
            throw ParseError(err.what(), e.line, e.a.column);
        }
    }
    return std::move(b).build();
}

Admg read_graph(const std::string& path) { return parse_graph(detail::read_file(path)); }

std::string format_graph(const Admg& g) {
    std::string out;
    for (const auto& v : g.nodes()) out += "node " + v.name + " " + std::to_string(v.cardinality) + "\n";
    for (auto [a, b] : g.directed_edges()) out += "edge " + g.name(a) + " -> " + g.name(b) + "\n";
    for (auto [a, b] : g.bidirected_edges()) out += "conf " + g.name(a) + " <-> " + g.name(b) + "\n";
    return out;
}

void write_graph(const Admg& g, const std::string& path) { detail::write_file(path, format_graph(g)); }

}  // namespace maxpot
