#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace maxpot::detail {

struct Token {
    std::string text;
    int column;  // 1-based
};

// Whitespace tokenization of one line with '#' comments stripped.
inline std::vector<Token> tokenize_line(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
               line[j] != '#')
            ++j;
        out.push_back({std::string(line.substr(i, j - i)), static_cast<int>(i + 1)});
        i = j;
    }
    return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace maxpot::detail
