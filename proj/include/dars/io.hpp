#pragma once

#include <string>
#include <vector>

namespace dars {

// All numeric text output goes through these so downstream tolerance checks see a
// stable 9-significant-digit representation.
std::string format_g9(double value);
double round_g9(double value);

// Splits one CSV line on commas and trims surrounding whitespace/CR per field.
std::vector<std::string> split_csv_line(const std::string& line);

bool parse_int(const std::string& text, long long& out);
bool parse_double(const std::string& text, double& out);

}  // namespace dars
