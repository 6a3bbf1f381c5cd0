#include "deepdist/seq_sim.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "deepdist/errors.hpp"
#include "deepdist/rng.hpp"

namespace deepdist {

namespace {

// Cumulative transition rows per vertex (the edge into it); the root uses pi.
struct Sampler {
  int phi;
  std::vector<std::vector<double>> cumulative;  // vertex -> phi*phi or phi (root)
  std::vector<bool> copy;                       // zero-length edge

  Sampler(const Phylogeny& tree, const RateMatrix& model)
      : phi(model.phi()), cumulative(tree.vertex_count()), copy(tree.vertex_count(), false) {
    if (phi > 256) throw InputError("sample: at most 256 states supported");
    for (VertexId v = 0; v < tree.vertex_count(); ++v) {
      if (v == tree.root()) {
        auto& row = cumulative[v];
        double acc = 0.0;
        for (int j = 0; j < phi; ++j) row.push_back(acc += model.pi()(j));
        row.back() = 1.0;
        continue;
      }
      const double t = tree.branch_length(v);
      if (t == 0.0) {
        copy[v] = true;
        continue;
      }
      const Eigen::MatrixXd m = model.transition_matrix(t);
      auto& rows = cumulative[v];
      rows.reserve(phi * phi);
      for (int i = 0; i < phi; ++i) {
        double acc = 0.0;
        for (int j = 0; j < phi; ++j) rows.push_back(acc += m(i, j));
        rows.back() = 1.0;
      }
    }
  }

  State draw(const double* row, double u) const {
    int j = 0;
    while (j + 1 < phi && u >= row[j]) ++j;
    return static_cast<State>(j);
  }

  void fill(const Phylogeny& tree, const SiteStream& stream, std::vector<State>& states) const {
    for (VertexId v : tree.preorder()) {
      if (v == tree.root()) {
        states[v] = draw(cumulative[v].data(), stream.uniform(v));
      } else if (copy[v]) {
        states[v] = states[tree.parent(v)];
      } else {
        const State up = states[tree.parent(v)];
        states[v] = draw(cumulative[v].data() + up * phi, stream.uniform(v));
      }
    }
  }
};

}  // namespace

Alignment::Alignment(int n, int k, int phi) : n_(n), k_(k), phi_(phi) {
  if (n < 1 || k < 1) throw InputError("alignment: need n >= 1 and k >= 1");
  if (phi < 2 || phi > 256) throw InputError("alignment: phi must be in [2, 256]");
  leaf_states_.assign(static_cast<std::size_t>(n) * k, 0);
}

std::span<const State> Alignment::leaf(int label) const {
  if (label < 0 || label >= n_) throw InputError("alignment: leaf label out of range");
  return {leaf_states_.data() + static_cast<std::size_t>(label) * k_,
          static_cast<std::size_t>(k_)};
}

void Alignment::set(int label, int site, State s) {
  if (label < 0 || label >= n_ || site < 0 || site >= k_) {
    throw InputError("alignment: index out of range");
  }
  if (s >= phi_) throw InputError("alignment: state out of range");
  leaf_states_[static_cast<std::size_t>(label) * k_ + site] = s;
}

std::span<const State> Alignment::vertex(VertexId v) const {
  if (vertex_states_.empty()) throw InputError("alignment: internal states were not kept");
  const auto count = vertex_states_.size() / k_;
  if (v < 0 || static_cast<std::size_t>(v) >= count) throw InputError("alignment: bad vertex");
  return {vertex_states_.data() + static_cast<std::size_t>(v) * k_,
          static_cast<std::size_t>(k_)};
}

SiteSample sample_site(const Phylogeny& tree, const RateMatrix& model, std::uint64_t seed,
                       std::uint64_t site) {
  const Sampler sampler(tree, model);
  SiteSample out;
  out.states.assign(tree.vertex_count(), 0);
  sampler.fill(tree, SiteStream(seed, site), out.states);
  return out;
}

Alignment sample_alignment(const Phylogeny& tree, const RateMatrix& model, int k,
                           std::uint64_t seed, bool keep_internal) {
  if (k < 1) throw InputError("sample_alignment: k must be at least 1");
  const Sampler sampler(tree, model);
  Alignment out(tree.leaf_count(), k, model.phi());
  const int nv = tree.vertex_count();
  if (keep_internal) out.vertex_states_.assign(static_cast<std::size_t>(nv) * k, 0);
  std::vector<State> states(nv);
  for (int i = 0; i < k; ++i) {
    sampler.fill(tree, SiteStream(seed, static_cast<std::uint64_t>(i)), states);
    for (VertexId v = 0; v < nv; ++v) {
      if (tree.is_leaf(v)) {
        out.leaf_states_[static_cast<std::size_t>(tree.leaf_label(v)) * k + i] = states[v];
      }
      if (keep_internal) out.vertex_states_[static_cast<std::size_t>(v) * k + i] = states[v];
    }
  }
  return out;
}

void write_alignment(std::ostream& out, const Alignment& a) {
  out << "#deepdist-alignment v1\n";
  out << a.leaf_count() << ' ' << a.site_count() << ' ' << a.phi() << '\n';
  std::string line;
  for (int i = 0; i < a.site_count(); ++i) {
    line.clear();
    for (int x = 0; x < a.leaf_count(); ++x) {
      if (x) line += ' ';
      line += std::to_string(a.at(x, i));
    }
    line += '\n';
    out << line;
  }
}

Alignment read_alignment(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("#deepdist-alignment v1", 0) != 0) {
    throw FormatError("alignment: missing '#deepdist-alignment v1' header");
  }
  long long n = 0, k = 0, phi = 0;
  if (!(in >> n >> k >> phi) || n < 1 || k < 1 || phi < 2 || phi > 256) {
    throw FormatError("alignment: bad dimension line");
  }
  Alignment out(static_cast<int>(n), static_cast<int>(k), static_cast<int>(phi));
  for (long long i = 0; i < k; ++i) {
    for (long long x = 0; x < n; ++x) {
      long long s = -1;
      if (!(in >> s) || s < 0 || s >= phi) {
        throw FormatError("alignment: bad state at site " + std::to_string(i));
      }
      out.set(static_cast<int>(x), static_cast<int>(i), static_cast<State>(s));
    }
  }
  std::string rest;
  if (in >> rest) throw FormatError("alignment: trailing data");
  return out;
}

void save_alignment(const std::string& path, const Alignment& alignment) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_alignment(out, alignment);
}

Alignment load_alignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_alignment(in);
}

void write_fasta(std::ostream& out, const Alignment& a) {
  static constexpr char alphabet[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  if (a.phi() > 36) throw UnsupportedError("fasta: at most 36 states");
  for (int x = 0; x < a.leaf_count(); ++x) {
    out << ">leaf" << x << '\n';
    std::string row;
    row.reserve(a.site_count());
    for (State s : a.leaf(x)) row += alphabet[s];
    for (std::size_t p = 0; p < row.size(); p += 80) out << row.substr(p, 80) << '\n';
  }
}

}  // namespace deepdist
