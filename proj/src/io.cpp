#include "gecrb/io.hpp"

#include <fstream>
#include <sstream>

#include "gecrb/errors.hpp"

namespace gecrb {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

std::vector<TokenSeq> read_token_lines(const std::string& text) {
  std::vector<TokenSeq> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    TokenSeq tokens = tokenize(line);
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  return lines;
}

}  // namespace gecrb
