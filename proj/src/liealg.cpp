#include "wedge/liealg.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace wedge {

namespace {

IntMatrix identity2(int n) {
  IntMatrix a(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) a[i][i] = 2;
  return a;
}

void link(IntMatrix& a, int i, int j, int aij = -1, int aji = -1) {
  a[i][j] = aij;
  a[j][i] = aji;
}

std::vector<std::vector<mpq_class>> invert(const IntMatrix& a) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(2 * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = a[i][j];
    m[i][n + i] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (m[p][c] == 0) ++p;
    std::swap(m[p], m[c]);
    mpq_class piv = m[c][c];
    for (auto& x : m[c]) x /= piv;
    for (int r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      mpq_class f = m[r][c];
      for (int k = 0; k < 2 * n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<std::vector<mpq_class>> inv(n, std::vector<mpq_class>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i][j] = m[i][n + j];
  return inv;
}

}  // namespace

RootSystem RootSystem::make(char family, int n) {
  RootSystem rs;
  rs.family_ = family;
  rs.rank_ = n;
  rs.name_ = std::string(1, family) + std::to_string(n);
  IntMatrix a = identity2(n);
  switch (family) {
    case 'A':
      if (n < 1) throw std::invalid_argument("A_n needs n >= 1");
      for (int i = 0; i + 1 < n; ++i) link(a, i, i + 1);
      break;
    case 'B':
      if (n < 2) throw std::invalid_argument("B_n needs n >= 2");
      for (int i = 0; i + 2 < n; ++i) link(a, i, i + 1);
      link(a, n - 2, n - 1, -2, -1);
      break;
    case 'C':
      if (n < 2) throw std::invalid_argument("C_n needs n >= 2");
      for (int i = 0; i + 2 < n; ++i) link(a, i, i + 1);
      link(a, n - 2, n - 1, -1, -2);
      break;
    case 'D':
      if (n < 3) throw std::invalid_argument("D_n needs n >= 3");
      for (int i = 0; i + 3 < n; ++i) link(a, i, i + 1);
      link(a, n - 3, n - 2);
      link(a, n - 3, n - 1);
      break;
    case 'E':
      if (n == 6 || n == 7) {
        link(a, 0, 2);
        link(a, 1, 3);
        for (int i = 2; i + 1 < n; ++i) link(a, i, i + 1);
      } else if (n == 8) {
        for (int i = 0; i < 6; ++i) link(a, i, i + 1);
        link(a, 2, 7);
      } else {
        throw std::invalid_argument("E_n needs n in {6,7,8}");
      }
      break;
    case 'F':
      if (n != 4) throw std::invalid_argument("F_n needs n = 4");
      link(a, 0, 1);
      link(a, 1, 2, -2, -1);
      link(a, 2, 3);
      break;
    case 'G':
      if (n != 2) throw std::invalid_argument("G_n needs n = 2");
      link(a, 0, 1, -1, -3);
      break;
    default:
      throw std::invalid_argument(std::string("unknown Cartan type ") + family);
  }
  rs.cartan_ = a;
  rs.finish();
  return rs;
}

RootSystem RootSystem::parse(const std::string& name) {
  if (name.size() < 2) throw std::invalid_argument("bad group name: " + name);
  char f = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  int n = std::stoi(name.substr(1));
  return make(f, n);
}

void RootSystem::finish() {
  const int n = rank_;
  // symmetriser: (alpha_i, alpha_j) = A_ij d_j
  d_.assign(n, 0);
  d_[0] = 1;
  std::deque<int> todo{0};
  std::vector<bool> seen(n, false);
  seen[0] = true;
  while (!todo.empty()) {
    int i = todo.front();
    todo.pop_front();
    for (int j = 0; j < n; ++j) {
      if (seen[j] || cartan_[i][j] == 0) continue;
      d_[j] = mpq_class(cartan_[j][i]) * d_[i] / cartan_[i][j];
      seen[j] = true;
      todo.push_back(j);
    }
  }
  mpq_class mn = *std::min_element(d_.begin(), d_.end());
  for (auto& x : d_) x /= mn;

  inv_ = invert(cartan_);
  mpz_class den = 1;
  for (auto& row : inv_)
    for (auto& x : row) den = lcm(den, x.get_den());
  det_ = static_cast<int>(den.get_si());

  gram_.assign(n, std::vector<mpq_class>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram_[i][j] = inv_[j][i] * d_[i];

  // positive roots by increasing height via alpha-strings
  std::set<std::vector<int>> pos;
  std::vector<std::vector<int>> layer;
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    pos.insert(e);
    layer.push_back(e);
  }
  std::vector<std::vector<int>> all = layer;
  while (!layer.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& b : layer) {
      for (int i = 0; i < n; ++i) {
        int label = 0;
        for (int k = 0; k < n; ++k) label += b[k] * cartan_[k][i];
        int q = 0;
        std::vector<int> c = b;
        while (true) {
          c[i] -= 1;
          if (pos.count(c)) ++q;
          else break;
        }
        if (q - label > 0) {
          std::vector<int> nb = b;
          nb[i] += 1;
          if (pos.insert(nb).second) {
            next.push_back(nb);
            all.push_back(nb);
          }
        }
      }
    }
    layer = std::move(next);
  }
  pos_alpha_ = all;
  pos_omega_.clear();
  for (const auto& a : pos_alpha_) pos_omega_.push_back(from_alpha(a));
}

Weight RootSystem::highest_root() const {
  size_t best = 0;
  int best_h = -1;
  for (size_t i = 0; i < pos_alpha_.size(); ++i) {
    int h = 0;
    for (int x : pos_alpha_[i]) h += x;
    if (h > best_h) {
      best_h = h;
      best = i;
    }
  }
  return pos_omega_[best];
}

Weight RootSystem::fundamental(int i) const {
  Weight w(rank_, 0);
  w.at(i - 1) = 1;
  return w;
}

Weight RootSystem::simple_root(int i) const { return cartan_.at(i - 1); }

std::vector<mpq_class> RootSystem::to_alpha(const Weight& w) const {
  std::vector<mpq_class> a(rank_, 0);
  for (int i = 0; i < rank_; ++i) {
    if (w[i] == 0) continue;
    for (int j = 0; j < rank_; ++j) a[j] += w[i] * inv_[i][j];
  }
  return a;
}

Weight RootSystem::from_alpha(const std::vector<int>& a) const {
  Weight w(rank_, 0);
  for (int i = 0; i < rank_; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < rank_; ++j) w[j] += a[i] * cartan_[i][j];
  }
  return w;
}

std::vector<mpq_class> RootSystem::rho_alpha() const { return to_alpha(rho()); }

std::vector<mpq_class> RootSystem::rho_coroot() const {
  // A c = 1 with A_{ji} c_i: <alpha_j, rho^vee> = sum_i c_i A_ji
  std::vector<mpq_class> c(rank_, 0);
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) c[i] += inv_[i][j];
  // inv_ is A^{-1}; A c = 1 gives c = A^{-1} 1
  return c;
}

mpq_class RootSystem::inner(const Weight& a, const Weight& b) const {
  mpq_class s = 0;
  for (int i = 0; i < rank_; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < rank_; ++j)
      if (b[j] != 0) s += a[i] * b[j] * gram_[i][j];
  }
  return s;
}

bool RootSystem::is_dominant(const Weight& w) const {
  return std::all_of(w.begin(), w.end(), [](int x) { return x >= 0; });
}

bool RootSystem::dominance_leq(const Weight& mu, const Weight& lambda) const {
  Weight d(rank_);
  for (int i = 0; i < rank_; ++i) d[i] = lambda[i] - mu[i];
  for (const auto& x : to_alpha(d))
    if (x < 0 || x.get_den() != 1) return false;
  return true;
}

bool RootSystem::in_root_lattice(const Weight& w) const {
  for (const auto& x : to_alpha(w))
    if (x.get_den() != 1) return false;
  return true;
}

Weight RootSystem::reflect(const Weight& w, int i) const {
  Weight r = w;
  int c = w[i];
  if (c == 0) return r;
  for (int j = 0; j < rank_; ++j) r[j] -= c * cartan_[i][j];
  return r;
}

Weight RootSystem::dominant_conjugate(const Weight& w) const {
  Weight r = w;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < rank_; ++i) {
      if (r[i] < 0) {
        r = reflect(r, i);
        changed = true;
      }
    }
  }
  return r;
}

mpz_class RootSystem::weyl_dimension(const Weight& lambda) const {
  Weight lr(rank_), r = rho();
  for (int i = 0; i < rank_; ++i) lr[i] = lambda[i] + 1;
  mpq_class num = 1, den = 1;
  for (const auto& a : pos_omega_) {
    num *= inner(lr, a);
    den *= inner(r, a);
  }
  mpq_class q = num / den;
  if (q.get_den() != 1) throw std::logic_error("non-integral Weyl dimension");
  return q.get_num();
}

int64_t WeightSystem::dim() const {
  int64_t s = 0;
  for (auto m : mult) s += m;
  return s;
}

std::map<Weight, int64_t> dominant_multiplicities(const RootSystem& rs, const Weight& highest) {
  if (!rs.is_dominant(highest)) throw std::invalid_argument("highest weight must be dominant");
  const int n = rs.rank();
  // dominant weights below the highest weight, reachable by subtracting positive roots
  std::set<Weight> dom{highest};
  std::deque<Weight> todo{highest};
  while (!todo.empty()) {
    Weight mu = todo.front();
    todo.pop_front();
    for (const auto& b : rs.positive_roots()) {
      Weight nu(n);
      for (int i = 0; i < n; ++i) nu[i] = mu[i] - b[i];
      if (rs.is_dominant(nu) && dom.insert(nu).second) todo.push_back(nu);
    }
  }
  // order by increasing depth below the highest weight
  auto depth = [&](const Weight& mu) {
    Weight d(n);
    for (int i = 0; i < n; ++i) d[i] = highest[i] - mu[i];
    mpq_class h = 0;
    for (const auto& x : rs.to_alpha(d)) h += x;
    return h;
  };
  std::vector<std::pair<mpq_class, Weight>> order;
  for (const auto& mu : dom) order.emplace_back(depth(mu), mu);
  std::sort(order.begin(), order.end());

  Weight lr(n), r = rs.rho();
  for (int i = 0; i < n; ++i) lr[i] = highest[i] + 1;
  const mpq_class top = rs.inner(lr, lr);
  std::map<Weight, int64_t> mult;
  mult[highest] = 1;
  for (size_t idx = 1; idx < order.size(); ++idx) {
    const Weight& mu = order[idx].second;
    mpq_class acc = 0;
    for (const auto& b : rs.positive_roots()) {
      Weight v = mu;
      for (int k = 1;; ++k) {
        for (int i = 0; i < n; ++i) v[i] += b[i];
        Weight dv = rs.dominant_conjugate(v);
        auto it = mult.find(dv);
        if (it == mult.end()) {
          if (!dom.count(dv)) break;
          throw std::logic_error("Freudenthal order violated");
        }
        acc += rs.inner(v, b) * it->second;
      }
    }
    Weight mr(n);
    for (int i = 0; i < n; ++i) mr[i] = mu[i] + 1;
    mpq_class m = 2 * acc / (top - rs.inner(mr, mr));
    if (m.get_den() != 1) throw std::logic_error("non-integral Freudenthal multiplicity");
    mult[mu] = m.get_num().get_si();
  }
  return mult;
}

std::vector<Weight> weyl_orbit(const RootSystem& rs, const Weight& dominant) {
  std::set<Weight> seen{dominant};
  std::vector<Weight> out{dominant};
  for (size_t h = 0; h < out.size(); ++h) {
    Weight w = out[h];
    for (int i = 0; i < rs.rank(); ++i) {
      if (w[i] <= 0) continue;
      Weight s = rs.reflect(w, i);
      if (seen.insert(s).second) out.push_back(s);
    }
  }
  return out;
}

namespace {

WeightSystem finish_system(const RootSystem& rs, const Weight& highest,
                           std::map<Weight, int64_t> all) {
  const int n = rs.rank();
  std::vector<std::pair<mpq_class, Weight>> order;
  for (const auto& [w, m] : all) {
    Weight d(n);
    for (int i = 0; i < n; ++i) d[i] = highest[i] - w[i];
    mpq_class h = 0;
    for (const auto& x : rs.to_alpha(d)) h += x;
    order.emplace_back(h, w);
  }
  std::sort(order.begin(), order.end());
  WeightSystem ws;
  ws.highest = highest;
  std::map<Weight, int> index;
  for (const auto& [h, w] : order) {
    int id = static_cast<int>(ws.weights.size());
    ws.weights.push_back(w);
    ws.mult.push_back(all.at(w));
    index[w] = id;
    int par = -1, stp = -1;
    for (int i = 0; i < n && par < 0; ++i) {
      Weight up = w;
      for (int j = 0; j < n; ++j) up[j] += rs.cartan()[i][j];
      auto it = index.find(up);
      if (it != index.end()) {
        par = it->second;
        stp = i;
      }
    }
    if (id > 0 && par < 0) throw std::logic_error("weight without parent");
    ws.parent.push_back(par);
    ws.step.push_back(stp);
  }
  return ws;
}

}  // namespace

WeightSystem weight_system(const RootSystem& rs, const Weight& highest) {
  std::map<Weight, int64_t> all;
  for (const auto& [mu, m] : dominant_multiplicities(rs, highest))
    for (const auto& w : weyl_orbit(rs, mu)) all[w] = m;
  return finish_system(rs, highest, std::move(all));
}

WeightSystem adjoint_weight_system(const RootSystem& rs) {
  std::map<Weight, int64_t> all;
  for (const auto& a : rs.positive_roots()) {
    Weight neg(a.size());
    for (size_t i = 0; i < a.size(); ++i) neg[i] = -a[i];
    all[a] = 1;
    all[neg] = 1;
  }
  all[Weight(rs.rank(), 0)] = rs.rank();
  return finish_system(rs, rs.highest_root(), std::move(all));
}

void write_weights_ascii(std::ostream& os, const RootSystem& rs, const WeightSystem& ws) {
  const int D = rs.lattice_denominator();
  os << "type " << rs.name() << "\n";
  os << "highest";
  for (int x : ws.highest) os << ' ' << x;
  os << "\ndenominator " << D << "\n";
  for (size_t i = 0; i < ws.size(); ++i) {
    auto a = rs.to_alpha(ws.weights[i]);
    for (const auto& x : a) {
      mpq_class s = x * D;
      os << s.get_num().get_str() << ' ';
    }
    os << ws.mult[i] << "\n";
  }
}

WeightSystem read_weights_ascii(std::istream& is, const RootSystem& rs) {
  const int n = rs.rank();
  std::string key, type;
  is >> key >> type;
  if (key != "type" || type != rs.name()) throw std::runtime_error("weight file type mismatch");
  Weight hw(n);
  is >> key;
  if (key != "highest") throw std::runtime_error("weight file: missing highest");
  for (auto& x : hw) is >> x;
  int D = 0;
  is >> key >> D;
  if (key != "denominator" || D <= 0) throw std::runtime_error("weight file: bad denominator");
  std::map<Weight, int64_t> all;
  while (true) {
    std::vector<int> a(n);
    int64_t m = 0;
    if (!(is >> a[0])) break;
    for (int i = 1; i < n; ++i) is >> a[i];
    is >> m;
    if (!is) throw std::runtime_error("weight file: truncated row");
    // alpha numerators over D -> Dynkin labels via A
    Weight w(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w[j] += a[i] * rs.cartan()[i][j];
    for (auto& x : w) {
      if (x % D != 0) throw std::runtime_error("weight file: non-integral weight");
      x /= D;
    }
    all[w] = m;
  }
  return finish_system(rs, hw, std::move(all));
}

std::string weight_str(const Weight& w) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  os << ')';
  return os.str();
}

}  // namespace wedge
