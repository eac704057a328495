#include "hetero/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hetero {

namespace {

constexpr const char* kMagic = "hetero-factors";
constexpr int kVersion = 1;

struct Bundle {
  std::string stage;
  std::size_t n = 0;
  std::size_t k = 0;
  double reg_weight = 0.0;
  std::vector<std::pair<std::string, DenseMatrix>> matrices;
  std::vector<std::pair<std::string, std::vector<double>>> vectors;

  const DenseMatrix& matrix(const std::string& name) const {
    for (const auto& [key, m] : matrices)
      if (key == name) return m;
    throw std::runtime_error("factor file: missing matrix '" + name + "'");
  }
  const std::vector<double>& vector(const std::string& name) const {
    for (const auto& [key, v] : vectors)
      if (key == name) return v;
    throw std::runtime_error("factor file: missing vector '" + name + "'");
  }
};

void write_header(std::ostream& out, const std::string& stage, std::size_t n, std::size_t k) {
  out << kMagic << ' ' << kVersion << '\n'
      << "stage " << stage << '\n'
      << "n " << n << '\n'
      << "k " << k << '\n';
}

void write_matrix(std::ostream& out, const std::string& name, const DenseMatrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? " " : "") << r[j];
    out << '\n';
  }
}

void write_vector(std::ostream& out, const std::string& name, const std::vector<double>& v) {
  out << "vector " << name << ' ' << v.size() << '\n' << std::setprecision(17);
  for (std::size_t j = 0; j < v.size(); ++j) out << (j ? " " : "") << v[j];
  out << '\n';
}

double read_value(std::istream& in, const std::string& context) {
  std::string token;
  if (!(in >> token)) throw std::runtime_error("factor file: truncated " + context);
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("factor file: bad number '" + token + "' in " + context);
  }
}

Bundle read_bundle(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw std::runtime_error("factor file: missing '" + std::string(kMagic) + "' header");
  }
  if (version != kVersion) throw std::runtime_error("factor file: unsupported version");
  Bundle b;
  std::string key;
  while (in >> key) {
    if (key == "end") return b;
    if (key == "stage") {
      in >> b.stage;
    } else if (key == "n") {
      in >> b.n;
    } else if (key == "k") {
      in >> b.k;
    } else if (key == "reg_weight") {
      b.reg_weight = read_value(in, "reg_weight");
    } else if (key == "matrix") {
      std::string name;
      std::size_t rows = 0, cols = 0;
      if (!(in >> name >> rows >> cols)) throw std::runtime_error("factor file: bad matrix header");
      DenseMatrix m(rows, cols);
      for (double& v : m.values()) v = read_value(in, "matrix " + name);
      b.matrices.emplace_back(name, std::move(m));
    } else if (key == "vector") {
      std::string name;
      std::size_t len = 0;
      if (!(in >> name >> len)) throw std::runtime_error("factor file: bad vector header");
      std::vector<double> v(len);
      for (double& e : v) e = read_value(in, "vector " + name);
      b.vectors.emplace_back(name, std::move(v));
    } else {
      throw std::runtime_error("factor file: unexpected key '" + key + "'");
    }
    if (!in) throw std::runtime_error("factor file: malformed field '" + key + "'");
  }
  throw std::runtime_error("factor file: missing 'end'");
}

// Zero-column matrices are written with their row count, so n is preserved.
DenseMatrix with_rows(DenseMatrix m, std::size_t n) {
  if (m.cols() == 0 && m.rows() != n) return DenseMatrix(n, 0);
  return m;
}

}  // namespace

void save_lpca(std::ostream& out, const LpcaFactors& f) {
  write_header(out, "lpca", f.x.rows(), f.x.cols());
  out << "reg_weight " << std::setprecision(17) << f.reg_weight_used << '\n';
  write_matrix(out, "X", f.x);
  write_matrix(out, "Y", f.y);
  out << "end\n";
}

LpcaFactors load_lpca(std::istream& in) {
  Bundle b = read_bundle(in);
  if (b.stage != "lpca") throw std::runtime_error("factor file: expected stage lpca, got " + b.stage);
  LpcaFactors f{b.matrix("X"), b.matrix("Y"), b.reg_weight};
  if (f.x.rows() != f.y.rows() || f.x.cols() != f.y.cols()) {
    throw std::runtime_error("factor file: X and Y differ in shape");
  }
  return f;
}

void save_nonneg(std::ostream& out, const NonnegFactors& f, const std::string& stage) {
  write_header(out, stage, f.b.rows(), f.width());
  write_matrix(out, "B", f.b);
  write_matrix(out, "C", with_rows(f.c, f.b.rows()));
  out << "end\n";
}

NonnegFactors load_nonneg(std::istream& in) {
  Bundle b = read_bundle(in);
  if (b.stage.rfind("nonneg", 0) != 0) {
    throw std::runtime_error("factor file: expected a nonneg stage, got " + b.stage);
  }
  NonnegFactors f{with_rows(b.matrix("B"), b.n), with_rows(b.matrix("C"), b.n)};
  for (const DenseMatrix* m : {&f.b, &f.c})
    for (double v : m->values())
      if (!(v >= 0.0)) throw std::runtime_error("factor file: negative entry in nonneg factors");
  return f;
}

void save_model(std::ostream& out, const CommunityModel& m) {
  write_header(out, "model", m.num_nodes(), m.k());
  write_matrix(out, "V", m.v);
  write_vector(out, "w", m.w);
  out << "end\n";
}

CommunityModel load_model(std::istream& in) {
  Bundle b = read_bundle(in);
  if (b.stage != "model") throw std::runtime_error("factor file: expected stage model, got " + b.stage);
  CommunityModel m{with_rows(b.matrix("V"), b.n), b.vector("w")};
  if (m.v.cols() != m.w.size()) throw std::runtime_error("factor file: V and w disagree on k");
  for (double v : m.v.values())
    if (!(v >= 0.0 && v <= 1.0)) throw std::runtime_error("factor file: membership outside [0, 1]");
  return m;
}

void save_dense(std::ostream& out, const DenseMatrix& m, const std::string& stage) {
  write_header(out, stage, m.rows(), m.cols());
  write_matrix(out, "M", m);
  out << "end\n";
}

DenseMatrix load_dense(std::istream& in) { return read_bundle(in).matrix("M"); }

void write_community_report(std::ostream& out, const CommunityModel& m, double tau,
                            std::size_t top) {
  out << "communities: " << m.k() << "  nodes: " << m.num_nodes() << "  tau: " << tau << '\n';
  std::vector<std::size_t> order(m.k());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(m.w[a]) > std::abs(m.w[b]); });
  for (std::size_t c : order) {
    const double w = m.w[c];
    std::vector<std::size_t> nodes(m.num_nodes());
    std::iota(nodes.begin(), nodes.end(), 0);
    std::stable_sort(nodes.begin(), nodes.end(),
                     [&](std::size_t a, std::size_t b) { return m.v(a, c) > m.v(b, c); });
    std::size_t size = 0;
    for (std::size_t i = 0; i < m.num_nodes(); ++i) size += m.v(i, c) >= tau;
    out << "community " << c << ' ' << (w >= 0.0 ? "homophilous" : "heterophilous")
        << std::setprecision(6) << " weight " << w << " odds_multiplier " << std::exp(w)
        << " size " << size << "\n  top:";
    for (std::size_t r = 0; r < std::min(top, nodes.size()); ++r) {
      const std::size_t i = nodes[r];
      if (m.v(i, c) <= 0.0) break;
      out << ' ' << i << ':' << std::setprecision(3) << m.v(i, c);
    }
    out << '\n';
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

}  // namespace hetero
