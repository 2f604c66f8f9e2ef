#include "cpg/mdp_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "cpg/errors.hpp"
#include "cpg/format.hpp"

namespace cpg {
namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    Line parsed{number, {}};
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (end > pos) parsed.tokens.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (!parsed.tokens.empty()) lines.push_back(std::move(parsed));
  }
  return lines;
}

double to_real(const Line& line, std::size_t k) {
  const auto tok = line.tokens[k];
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line.number, "expected a number, got '" + std::string(tok) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line.number, "non-finite value '" + std::string(tok) + "'");
  }
  return value;
}

long long to_integer(const Line& line, std::size_t k) {
  const auto tok = line.tokens[k];
  long long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line.number, "expected an integer, got '" + std::string(tok) + "'");
  }
  return value;
}

std::size_t to_index(const Line& line, std::size_t k, std::size_t bound, const char* what) {
  const long long value = to_integer(line, k);
  if (value < 0 || static_cast<unsigned long long>(value) >= bound) {
    throw ParseError(line.number, std::string(what) + " index " + std::to_string(value) +
                                      " out of range");
  }
  return static_cast<std::size_t>(value);
}

void expect_arity(const Line& line, std::size_t count) {
  if (line.tokens.size() != count) {
    throw ParseError(line.number, "'" + std::string(line.tokens[0]) + "' takes " +
                                      std::to_string(count - 1) + " argument(s), got " +
                                      std::to_string(line.tokens.size() - 1));
  }
}

struct Header {
  std::optional<double> gamma;
  std::optional<long long> horizon;
  std::optional<long long> states;
  std::optional<long long> absorbing;
};

template <typename T>
void set_once(std::optional<T>& slot, T value, const Line& line) {
  if (slot) throw ParseError(line.number, "duplicate '" + std::string(line.tokens[0]) + "' directive");
  slot = value;
}

}  // namespace

TabularMdp parse_mdp(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(0, "empty document");
  const Line& first = lines.front();
  if (first.tokens[0] != "mdp") throw ParseError(first.number, "first directive must be 'mdp 1'");
  expect_arity(first, 2);
  if (to_integer(first, 1) != 1) {
    throw ParseError(first.number, "unsupported format version '" + std::string(first.tokens[1]) + "'");
  }

  // Pass 1: scalar header fields; everything else is deferred until the
  // state count is known.
  Header header;
  std::vector<const Line*> body;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    const auto directive = line.tokens[0];
    if (directive == "gamma") {
      expect_arity(line, 2);
      const double gamma = to_real(line, 1);
      if (gamma < 0.0 || gamma > 1.0) {
        throw ParseError(line.number, "gamma " + format_double(gamma) + " outside [0,1]");
      }
      set_once(header.gamma, gamma, line);
    } else if (directive == "horizon") {
      expect_arity(line, 2);
      const long long h = to_integer(line, 1);
      if (h < 1) throw ParseError(line.number, "horizon must be at least 1");
      if (h > 1'000'000) throw ParseError(line.number, "horizon too large");
      set_once(header.horizon, h, line);
    } else if (directive == "states") {
      expect_arity(line, 2);
      const long long n = to_integer(line, 1);
      if (n < 1) throw ParseError(line.number, "states must be at least 1");
      set_once(header.states, n, line);
    } else if (directive == "absorbing") {
      expect_arity(line, 2);
      set_once(header.absorbing, to_integer(line, 1), line);
    } else if (directive == "actions" || directive == "start" || directive == "trans" ||
               directive == "reward") {
      body.push_back(&line);
    } else if (directive == "mdp") {
      throw ParseError(line.number, "duplicate 'mdp' directive");
    } else {
      throw ParseError(line.number, "unknown directive '" + std::string(directive) + "'");
    }
  }
  if (!header.gamma) throw ParseError(0, "missing 'gamma' directive");
  if (!header.horizon) throw ParseError(0, "missing 'horizon' directive");
  if (!header.states) throw ParseError(0, "missing 'states' directive");
  if (!header.absorbing) throw ParseError(0, "missing 'absorbing' directive");
  const auto num_states = static_cast<std::size_t>(*header.states);
  if (*header.absorbing < 0 || static_cast<std::size_t>(*header.absorbing) >= num_states) {
    throw ParseError(0, "absorbing state " + std::to_string(*header.absorbing) + " out of range");
  }

  // Pass 2: action counts.
  std::vector<std::size_t> counts(num_states, 0);
  for (const Line* line : body) {
    if (line->tokens[0] != "actions") continue;
    expect_arity(*line, 3);
    const State s = to_index(*line, 1, num_states, "state");
    if (counts[s] != 0) throw ParseError(line->number, "duplicate 'actions' line for state " + std::to_string(s));
    const long long n = to_integer(*line, 2);
    if (n < 1) throw ParseError(line->number, "state " + std::to_string(s) + " needs at least one action");
    counts[s] = static_cast<std::size_t>(n);
  }
  for (State s = 0; s < num_states; ++s) {
    if (counts[s] == 0) throw ParseError(0, "missing 'actions' line for state " + std::to_string(s));
  }

  TabularMdp mdp(ActionLayout(counts), static_cast<State>(*header.absorbing),
                 static_cast<int>(*header.horizon), *header.gamma);

  // Pass 3: distributions and rewards.
  std::set<State> seen_start;
  std::set<std::pair<State, Action>> seen_reward;
  std::set<std::pair<State, Action>> seen_row;
  std::set<std::tuple<State, Action, State>> seen_trans;
  for (const Line* line : body) {
    const auto directive = line->tokens[0];
    if (directive == "start") {
      expect_arity(*line, 3);
      const State s = to_index(*line, 1, num_states, "state");
      if (!seen_start.insert(s).second) throw ParseError(line->number, "duplicate 'start' line for state " + std::to_string(s));
      mdp.start()[s] = to_real(*line, 2);
    } else if (directive == "trans") {
      expect_arity(*line, 5);
      const State s = to_index(*line, 1, num_states, "state");
      const Action a = to_index(*line, 2, counts[s], "action");
      const State next = to_index(*line, 3, num_states, "state");
      if (!seen_trans.insert({s, a, next}).second) {
        throw ParseError(line->number, "duplicate transition (" + std::to_string(s) + "," +
                                           std::to_string(a) + "," + std::to_string(next) + ")");
      }
      seen_row.insert({s, a});
      mdp.transition(s, a)[next] = to_real(*line, 4);
    } else if (directive == "reward") {
      expect_arity(*line, 4);
      const State s = to_index(*line, 1, num_states, "state");
      const Action a = to_index(*line, 2, counts[s], "action");
      if (!seen_reward.insert({s, a}).second) {
        throw ParseError(line->number, "duplicate reward (" + std::to_string(s) + "," + std::to_string(a) + ")");
      }
      mdp.reward(s, a) = to_real(*line, 3);
    }
  }
  for (State s = 0; s < num_states; ++s) {
    for (Action a = 0; a < counts[s]; ++a) {
      if (!seen_row.count({s, a})) {
        throw ParseError(0, "no 'trans' line for (" + std::to_string(s) + "," + std::to_string(a) + ")");
      }
    }
  }
  return mdp;
}

namespace {

// Zero entries are implied by omission; negative zero must still be written.
bool explicit_entry(double value) { return value != 0.0 || std::signbit(value); }

}  // namespace

std::string serialize_mdp(const TabularMdp& mdp) {
  std::ostringstream out;
  out << "mdp 1\n"
      << "gamma " << format_double(mdp.gamma()) << "\n"
      << "horizon " << mdp.horizon() << "\n"
      << "states " << mdp.num_states() << "\n"
      << "absorbing " << mdp.absorbing() << "\n";
  for (State s = 0; s < mdp.num_states(); ++s) out << "actions " << s << " " << mdp.num_actions(s) << "\n";
  for (State s = 0; s < mdp.num_states(); ++s) {
    if (explicit_entry(mdp.start()[s])) out << "start " << s << " " << format_double(mdp.start()[s]) << "\n";
  }
  for (State s = 0; s < mdp.num_states(); ++s) {
    for (Action a = 0; a < mdp.num_actions(s); ++a) {
      const auto row = mdp.transition(s, a);
      bool wrote = false;
      for (State next = 0; next < row.size(); ++next) {
        if (!explicit_entry(row[next])) continue;
        out << "trans " << s << " " << a << " " << next << " " << format_double(row[next]) << "\n";
        wrote = true;
      }
      if (!wrote) out << "trans " << s << " " << a << " 0 0\n";
    }
  }
  for (State s = 0; s < mdp.num_states(); ++s) {
    for (Action a = 0; a < mdp.num_actions(s); ++a) {
      if (explicit_entry(mdp.reward(s, a))) {
        out << "reward " << s << " " << a << " " << format_double(mdp.reward(s, a)) << "\n";
      }
    }
  }
  return out.str();
}

PolicyParams parse_theta(std::string_view text, const ActionLayout& layout) {
  PolicyParams theta(layout);
  std::set<std::pair<State, Action>> seen;
  for (const Line& line : tokenize(text)) {
    if (line.tokens[0] != "theta") {
      throw ParseError(line.number, "unknown directive '" + std::string(line.tokens[0]) + "'");
    }
    expect_arity(line, 4);
    const State s = to_index(line, 1, layout.num_states(), "state");
    const Action a = to_index(line, 2, layout.num_actions(s), "action");
    if (!seen.insert({s, a}).second) {
      throw ParseError(line.number, "duplicate theta (" + std::to_string(s) + "," + std::to_string(a) + ")");
    }
    theta(s, a) = to_real(line, 3);
  }
  return theta;
}

std::string serialize_theta(const PolicyParams& theta) {
  std::ostringstream out;
  const auto& layout = theta.layout();
  for (State s = 0; s < layout.num_states(); ++s) {
    for (Action a = 0; a < layout.num_actions(s); ++a) {
      out << "theta " << s << " " << a << " " << format_double(theta(s, a)) << "\n";
    }
  }
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TabularMdp load_mdp(const std::filesystem::path& path) { return parse_mdp(read_text_file(path)); }

}  // namespace cpg
