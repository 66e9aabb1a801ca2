#include "delaynet/network.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace delaynet {

std::optional<std::size_t> DelayedNetwork::species_index(std::string_view name) const {
  for (std::size_t j = 0; j < species.size(); ++j) {
    if (species[j] == name) {
      return j;
    }
  }
  return std::nullopt;
}

bool ConjugacyWitness::is_identity() const {
  return std::all_of(L.begin(), L.end(), [](const Rational& l) { return l == 1; });
}

ParseError::ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " +
                         message),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Single-line scanner; columns are 1-based.
class Cursor {
 public:
  Cursor(std::string_view line, std::size_t line_no) : text_(line), line_no_(line_no) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  std::size_t column() const { return pos_ + 1; }
  std::size_t line() const { return line_no_; }

  bool consume(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view token) {
    if (!consume(token)) {
      fail(ParseError::Kind::syntax, "expected '" + std::string(token) + "'");
    }
  }
  std::string_view word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }
  std::string_view name() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) {
      fail(ParseError::Kind::syntax, "expected species name");
    }
    while (pos_ < text_.size() && is_name_char(text_[pos_])) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }
  std::string_view digits() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }
  // Text up to (not including) the first occurrence of any stop string.
  std::string_view until(std::initializer_list<std::string_view> stops) {
    skip_space();
    std::size_t end = text_.size();
    for (auto stop : stops) {
      end = std::min(end, text_.find(stop, pos_));
    }
    const std::size_t start = pos_;
    pos_ = end;
    return text_.substr(start, end - start);
  }
  void rewind_to(std::size_t column) { pos_ = column - 1; }

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& message) const {
    throw ParseError(kind, line_no_, pos_ + 1, message);
  }
  [[noreturn]] void fail_at(std::size_t column, ParseError::Kind kind, const std::string& message) const {
    throw ParseError(kind, line_no_, column, message);
  }

 private:
  std::string_view text_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

Complex parse_complex_at(Cursor& cur, const std::vector<std::string>& species) {
  Complex y(species.size(), 0);
  if (cur.peek() == '0') {
    const std::size_t col = cur.column();
    const auto d = cur.digits();
    if (d == "0" && !is_name_start(cur.peek())) {
      return y;
    }
    cur.rewind_to(col);
  }
  for (;;) {
    int coeff = 1;
    const std::size_t term_col = cur.column();
    const auto d = cur.digits();
    if (!d.empty()) {
      if (d.size() > 6) {
        cur.fail_at(term_col, ParseError::Kind::syntax, "stoichiometric coefficient too large");
      }
      coeff = std::stoi(std::string(d));
      if (coeff == 0) {
        cur.fail_at(term_col, ParseError::Kind::syntax, "zero coefficient in complex");
      }
    }
    const std::size_t name_col = cur.column();
    const auto nm = cur.name();
    const auto it = std::find(species.begin(), species.end(), nm);
    if (it == species.end()) {
      cur.fail_at(name_col, ParseError::Kind::unknown_species, "unknown species '" + std::string(nm) + "'");
    }
    y[static_cast<std::size_t>(it - species.begin())] += coeff;
    if (!cur.consume("+")) {
      return y;
    }
  }
}

Rational parse_number_at(Cursor& cur, std::string_view token, std::size_t column) {
  try {
    return parse_rational(token);
  } catch (const std::invalid_argument&) {
    cur.fail_at(column, ParseError::Kind::syntax, "malformed number '" + std::string(token) + "'");
  }
}

struct LineSource {
  std::vector<std::pair<std::size_t, std::string>> lines;  // (1-based number, content without comment)
};

LineSource split_lines(std::string_view text, std::size_t first_line = 1) {
  LineSource src;
  std::size_t line_no = first_line;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string line(text.substr(start, end - start));
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    src.lines.emplace_back(line_no, std::move(line));
    ++line_no;
    if (end == text.size()) {
      break;
    }
    start = end + 1;
  }
  return src;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

void parse_species_line(Cursor& cur, DelayedNetwork& net) {
  while (!cur.at_end()) {
    const std::size_t col = cur.column();
    const auto nm = cur.name();
    if (net.species_index(nm)) {
      cur.fail_at(col, ParseError::Kind::duplicate_species, "duplicate species '" + std::string(nm) + "'");
    }
    net.species.emplace_back(nm);
    // Species grew: widen already-parsed complexes.
    for (auto& rx : net.reactions) {
      rx.reactant.resize(net.species.size(), 0);
      rx.product.resize(net.species.size(), 0);
    }
  }
}

Reaction parse_reaction_line(Cursor& cur, const DelayedNetwork& net) {
  Reaction rx;
  rx.reactant = parse_complex_at(cur, net.species);
  cur.expect("->");
  rx.product = parse_complex_at(cur, net.species);
  cur.expect(":");
  bool have_k = false;
  bool have_tau = false;
  rx.delay = 0;
  while (!cur.at_end()) {
    const std::size_t col = cur.column();
    const auto token = cur.word();
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      cur.fail_at(col, ParseError::Kind::syntax, "expected key=value, got '" + std::string(token) + "'");
    }
    const auto key = token.substr(0, eq);
    const auto value_col = col + eq + 1;
    const Rational value = parse_number_at(cur, token.substr(eq + 1), value_col);
    if (key == "k") {
      if (have_k) {
        cur.fail_at(col, ParseError::Kind::syntax, "duplicate rate");
      }
      if (value <= 0) {
        cur.fail_at(value_col, ParseError::Kind::nonpositive_rate, "nonpositive rate");
      }
      rx.rate = value;
      have_k = true;
    } else if (key == "tau") {
      if (have_tau) {
        cur.fail_at(col, ParseError::Kind::syntax, "duplicate delay");
      }
      if (value < 0) {
        cur.fail_at(value_col, ParseError::Kind::negative_delay, "negative delay");
      }
      rx.delay = value;
      have_tau = true;
    } else {
      cur.fail_at(col, ParseError::Kind::syntax, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_k) {
    cur.fail(ParseError::Kind::syntax, "missing rate k=");
  }
  return rx;
}

DelayedNetwork parse_lines(const LineSource& src, std::size_t begin, std::size_t end,
                           const std::vector<std::string>* inherited_species) {
  DelayedNetwork net;
  bool saw_species = false;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& [line_no, line] = src.lines[i];
    if (blank(line)) {
      continue;
    }
    Cursor cur(line, line_no);
    const std::size_t col = cur.column();
    const auto keyword = cur.name();
    if (keyword == "species") {
      parse_species_line(cur, net);
      saw_species = true;
    } else if (keyword == "reaction") {
      if (!saw_species && inherited_species != nullptr && net.species.empty()) {
        net.species = *inherited_species;
        saw_species = true;
      }
      net.reactions.push_back(parse_reaction_line(cur, net));
    } else {
      cur.fail_at(col, ParseError::Kind::syntax, "unknown directive '" + std::string(keyword) + "'");
    }
  }
  if (!saw_species && inherited_species != nullptr) {
    net.species = *inherited_species;
  }
  return net;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Complex parse_complex(std::string_view text, const std::vector<std::string>& species) {
  Cursor cur(text, 1);
  Complex y = parse_complex_at(cur, species);
  if (!cur.at_end()) {
    cur.fail(ParseError::Kind::syntax, "trailing characters after complex");
  }
  return y;
}

DelayedNetwork parse_network(std::string_view text) {
  const LineSource src = split_lines(text);
  return parse_lines(src, 0, src.lines.size(), nullptr);
}

DelayedNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

ConjugacyWitness parse_witness(std::string_view text, const DelayedNetwork& source) {
  const LineSource src = split_lines(text);
  ConjugacyWitness w;
  std::size_t target_begin = src.lines.size();
  bool found_target = false;
  for (std::size_t i = 0; i < src.lines.size(); ++i) {
    const auto& [line_no, line] = src.lines[i];
    if (blank(line)) {
      continue;
    }
    Cursor cur(line, line_no);
    if (cur.consume("target:")) {
      if (!cur.at_end()) {
        cur.fail(ParseError::Kind::syntax, "unexpected text after 'target:'");
      }
      target_begin = i + 1;
      found_target = true;
      break;
    }
    const std::size_t col = cur.column();
    const auto keyword = cur.name();
    if (keyword != "L") {
      cur.fail_at(col, ParseError::Kind::syntax, "expected 'L' or 'target:'");
    }
    if (!w.L.empty()) {
      cur.fail_at(col, ParseError::Kind::syntax, "duplicate L line");
    }
    while (!cur.at_end()) {
      const std::size_t value_col = cur.column();
      const auto token = cur.word();
      const Rational value = parse_number_at(cur, token, value_col);
      if (value <= 0) {
        cur.fail_at(value_col, ParseError::Kind::syntax, "L entries must be positive");
      }
      w.L.push_back(value);
    }
    if (w.L.size() != source.n()) {
      cur.fail(ParseError::Kind::syntax, "L has " + std::to_string(w.L.size()) + " entries, expected " +
                                             std::to_string(source.n()));
    }
  }
  if (!found_target) {
    throw ParseError(ParseError::Kind::syntax, src.lines.empty() ? 1 : src.lines.back().first, 1,
                     "witness has no 'target:' block");
  }
  w.target = parse_lines(src, target_begin, src.lines.size(), &source.species);
  if (w.L.empty()) {
    w.L.assign(source.n(), Rational(1));
  }
  return w;
}

ConjugacyWitness load_witness(const std::string& path, const DelayedNetwork& source) {
  return parse_witness(read_file(path), source);
}

ConjugacyWitness identity_witness(const DelayedNetwork& target) {
  return ConjugacyWitness{target, RationalVector(target.n(), Rational(1))};
}

std::string format_complex(const std::vector<std::string>& species, const Complex& y) {
  std::string out;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] == 0) {
      continue;
    }
    if (!out.empty()) {
      out += " + ";
    }
    if (y[j] != 1) {
      out += std::to_string(y[j]);
    }
    out += j < species.size() ? species[j] : "?" + std::to_string(j);
  }
  return out.empty() ? "0" : out;
}

std::string serialize_network(const DelayedNetwork& net) {
  std::string out = "species";
  for (const auto& s : net.species) {
    out += " " + s;
  }
  out += "\n";
  for (const auto& rx : net.reactions) {
    out += "reaction " + format_complex(net.species, rx.reactant) + " -> " +
           format_complex(net.species, rx.product) + " : k=" + format_rational(rx.rate) +
           " tau=" + format_rational(rx.delay) + "\n";
  }
  return out;
}

std::string serialize_witness(const ConjugacyWitness& witness) {
  std::string out = "L";
  for (const auto& l : witness.L) {
    out += " " + format_rational(l);
  }
  out += "\ntarget:\n";
  out += serialize_network(witness.target);
  return out;
}

std::vector<Diagnostic> validate_network(const DelayedNetwork& net) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (const auto& s : net.species) {
    if (!seen.insert(s).second) {
      out.push_back({std::nullopt, "duplicate species '" + s + "'"});
    }
  }
  const auto check_complex = [&](std::size_t i, const Complex& y, const char* which) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] < 0) {
        out.push_back({i, std::string("negative coefficient in ") + which});
        return;
      }
      if (j >= net.n() && y[j] != 0) {
        out.push_back({i, std::string(which) + " references undeclared species"});
        return;
      }
    }
  };
  for (std::size_t i = 0; i < net.r(); ++i) {
    const auto& rx = net.reactions[i];
    if (rx.rate <= 0) {
      out.push_back({i, "nonpositive rate"});
    }
    if (rx.delay < 0) {
      out.push_back({i, "negative delay"});
    }
    check_complex(i, rx.reactant, "reactant");
    check_complex(i, rx.product, "product");
  }
  return out;
}

std::vector<Diagnostic> validate_witness(const ConjugacyWitness& witness, const DelayedNetwork& source) {
  std::vector<Diagnostic> out = validate_network(witness.target);
  if (witness.target.species != source.species) {
    out.push_back({std::nullopt, "target species differ from source species"});
  }
  if (witness.L.size() != source.n()) {
    out.push_back({std::nullopt, "L has wrong length"});
  }
  for (const auto& l : witness.L) {
    if (l <= 0) {
      out.push_back({std::nullopt, "nonpositive L entry"});
      break;
    }
  }
  return out;
}

DelayedNetwork strip_delays(const DelayedNetwork& net) {
  DelayedNetwork out = net;
  for (auto& rx : out.reactions) {
    rx.delay = 0;
  }
  return out;
}

std::map<Complex, std::vector<std::size_t>> reactant_groups(const DelayedNetwork& net) {
  std::map<Complex, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < net.r(); ++i) {
    groups[net.reactions[i].reactant].push_back(i);
  }
  return groups;
}

std::vector<Complex> complexes(const DelayedNetwork& net) {
  std::vector<Complex> out;
  std::set<Complex> seen;
  for (const auto& rx : net.reactions) {
    for (const Complex* y : {&rx.reactant, &rx.product}) {
      if (seen.insert(*y).second) {
        out.push_back(*y);
      }
    }
  }
  return out;
}

std::vector<Rational> distinct_delays(const DelayedNetwork& net) {
  std::set<Rational> delays;
  for (const auto& rx : net.reactions) {
    delays.insert(rx.delay);
  }
  return {delays.begin(), delays.end()};
}

RationalVector to_rational(const Complex& y) {
  RationalVector out;
  out.reserve(y.size());
  for (int c : y) {
    out.emplace_back(c);
  }
  return out;
}

RationalVector reaction_vector(const Reaction& reaction) {
  const std::size_t n = std::max(reaction.reactant.size(), reaction.product.size());
  RationalVector v(n, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    const int a = j < reaction.reactant.size() ? reaction.reactant[j] : 0;
    const int b = j < reaction.product.size() ? reaction.product[j] : 0;
    v[j] = b - a;
  }
  return v;
}

Complex zero_complex(std::size_t n) { return Complex(n, 0); }

bool is_zero_complex(const Complex& y) {
  return std::all_of(y.begin(), y.end(), [](int c) { return c == 0; });
}

}  // namespace delaynet
