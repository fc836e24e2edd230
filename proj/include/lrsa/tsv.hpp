#pragma once

// Tab-separated text helpers. All files handled by the library are UTF-8,
// tab-delimited, LF-terminated; decimals are written with 6 significant
// digits so load -> serialize round-trips are stable.

#include <cstdio>
#include <string>
#include <vector>

#include "lrsa/error.hpp"

namespace lrsa {

std::vector<std::string> split_tabs(const std::string& line);

// Whole-token numeric parse; fails on "NA", empty cells, or trailing junk.
// `where` names the cell for the error message.
double parse_number(const std::string& token, const std::string& where);

long parse_integer(const std::string& token, const std::string& where);

// Reads a text file into lines, dropping a trailing '\r' if present.
std::vector<std::string> read_lines(const std::string& path);

// 6-significant-digit rendering used for every matrix/report value.
std::string format_value(double v);

void write_text_file(const std::string& path, const std::string& content);

}
