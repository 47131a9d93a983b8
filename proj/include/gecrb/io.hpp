#pragma once

#include <string>
#include <vector>

#include "gecrb/corpus.hpp"

namespace gecrb {

// Whole-file read; ConfigError when the file cannot be opened.
std::string read_text_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

// One tokenized sentence per nonempty line.
std::vector<TokenSeq> read_token_lines(const std::string& text);

}  // namespace gecrb
