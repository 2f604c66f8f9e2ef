#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cpg/mdp.hpp"
#include "cpg/policy.hpp"

namespace cpg {

// MDP text format, one directive per line, '#' starts a comment:
//
//   mdp 1                          format version, must come first
//   gamma <float>                  in [0, 1]
//   horizon <int>                  >= 1
//   states <int>
//   absorbing <int>
//   actions <state> <int>          one line per state
//   start <state> <float>          omitted states get 0
//   trans <s> <a> <s'> <float>     every (s, a) needs at least one line
//   reward <s> <a> <float>         omitted pairs get 0
//
// Parameter text holds `theta <state> <action> <float>` lines; omitted
// entries are 0.

/// Throws ParseError (with the offending line) on malformed input.
TabularMdp parse_mdp(std::string_view text);

/// Canonical text. parse_mdp(serialize_mdp(m)) == m bit for bit.
std::string serialize_mdp(const TabularMdp& mdp);

PolicyParams parse_theta(std::string_view text, const ActionLayout& layout);
std::string serialize_theta(const PolicyParams& theta);

/// Reads a whole file; throws cpg::Error if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

TabularMdp load_mdp(const std::filesystem::path& path);

}  // namespace cpg
