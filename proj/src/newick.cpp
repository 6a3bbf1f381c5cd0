#include "deepdist/newick.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "deepdist/errors.hpp"

namespace deepdist {

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

double parse_real(std::string_view token) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw FormatError("not a number: '" + std::string(token) + "'");
  }
  return value;
}

namespace {

void write_subtree(const Phylogeny& tree, VertexId v,
                   const std::vector<int>& min_label, std::string& out) {
  if (tree.is_leaf(v)) {
    out += std::to_string(tree.leaf_label(v));
  } else {
    auto kids = std::vector<VertexId>(tree.children(v).begin(), tree.children(v).end());
    std::sort(kids.begin(), kids.end(),
              [&](VertexId a, VertexId b) { return min_label[a] < min_label[b]; });
    out += '(';
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out += ',';
      write_subtree(tree, kids[i], min_label, out);
    }
    out += ')';
  }
  if (v != tree.root()) {
    out += ':';
    out += format_real(tree.branch_length(v));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  void parse() {
    skip_ws();
    node(no_vertex);
    skip_ws();
    if (!eat(';')) fail("expected ';'");
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
  }

  std::vector<VertexId> parent;
  std::vector<double> length;
  std::vector<int> label;

 private:
  VertexId node(VertexId up) {
    const VertexId self = static_cast<VertexId>(parent.size());
    parent.push_back(up);
    length.push_back(0.0);
    label.push_back(-1);
    skip_ws();
    if (eat('(')) {
      do {
        node(self);
        skip_ws();
      } while (eat(','));
      if (!eat(')')) fail("expected ')'");
      name();  // internal names are ignored
    } else {
      const std::string leaf = name();
      if (leaf.empty()) fail("missing leaf label");
      int value = 0;
      auto [ptr, ec] = std::from_chars(leaf.data(), leaf.data() + leaf.size(), value);
      if (ec != std::errc{} || ptr != leaf.data() + leaf.size() || value < 0) {
        fail("leaf label is not a nonnegative integer: '" + leaf + "'");
      }
      label[self] = value;
    }
    skip_ws();
    if (eat(':')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '.' || text_[pos_] == '-' ||
                                     text_[pos_] == '+')) {
        ++pos_;
      }
      length[self] = parse_real(text_.substr(start, pos_ - start));
    }
    return self;
  }

  std::string name() {
    skip_ws();
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c))) {
        break;
      }
      out += c;
      ++pos_;
    }
    return out;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("newick: " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_newick(const Phylogeny& tree) {
  std::vector<int> min_label(tree.vertex_count(), std::numeric_limits<int>::max());
  const auto& order = tree.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    if (tree.is_leaf(v)) min_label[v] = tree.leaf_label(v);
    for (VertexId c : tree.children(v)) min_label[v] = std::min(min_label[v], min_label[c]);
  }
  std::string out;
  write_subtree(tree, tree.root(), min_label, out);
  out += ';';
  return out;
}

Phylogeny parse_newick(std::string_view text, ZeroLengthEdges zero_edges) {
  Parser p(text);
  p.parse();
  try {
    return Phylogeny(std::move(p.parent), std::move(p.length), std::move(p.label),
                     zero_edges);
  } catch (const InputError& e) {
    throw FormatError(std::string("newick: ") + e.what());
  }
}

}  // namespace deepdist
