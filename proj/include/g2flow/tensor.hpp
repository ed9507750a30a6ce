#pragma once

// Dense multilinear algebra over a fixed 7-dimensional index space.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace g2flow {

inline constexpr int kDim = 7;

enum class ErrorCode {
  RankOverflow,
  VarianceMismatch,
  DegreeOverflow,
  SlotCountMismatch,
  Singular,
  EvenRootOfNegative,
  NotPositive,
  DegenerateB,
  NotInOmega27,
  NonSymmetric,
  ZeroScale,
  PositivityLost,
  UnknownCheck,
  InvalidConfig,
};

inline const char* errorName(ErrorCode c) {
  switch (c) {
    case ErrorCode::RankOverflow: return "RankOverflow";
    case ErrorCode::VarianceMismatch: return "VarianceMismatch";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::SlotCountMismatch: return "SlotCountMismatch";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::EvenRootOfNegative: return "EvenRootOfNegative";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::DegenerateB: return "DegenerateB";
    case ErrorCode::NotInOmega27: return "NotInOmega27";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::ZeroScale: return "ZeroScale";
    case ErrorCode::PositivityLost: return "PositivityLost";
    case ErrorCode::UnknownCheck: return "UnknownCheck";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(errorName(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Value part of a scalar. Jet types add overloads found by ADL.
inline double valueOf(double x) { return x; }

enum class Variance : std::uint8_t { Covariant, Contravariant };

struct Symmetry {
  enum class Kind : std::uint8_t { None, FullySkew, FullySymmetric, PairSkew };
  Kind kind = Kind::None;
  int k = 0;  // PairSkew slots
  int l = 0;

  static Symmetry none() { return {}; }
  static Symmetry skew() { return {Kind::FullySkew, 0, 0}; }
  static Symmetry symmetric() { return {Kind::FullySymmetric, 0, 0}; }
  static Symmetry pairSkew(int k, int l) { return {Kind::PairSkew, k, l}; }
  bool operator==(const Symmetry&) const = default;
};

inline constexpr std::size_t ipow7(int r) {
  std::size_t n = 1;
  for (int i = 0; i < r; ++i) n *= kDim;
  return n;
}

/// Dense tensor of rank 0..4 with extent 7 per slot. Slot 0 is the slowest index.
template <class S>
class BasicTensor {
 public:
  BasicTensor() : rank_(0), data_(1, S(0.0)) { variance_.fill(Variance::Covariant); }

  /// `slots` uses 'd' for a covariant (lower) slot and 'u' for a contravariant one.
  explicit BasicTensor(std::string_view slots, Symmetry sym = {})
      : rank_(static_cast<int>(slots.size())), sym_(sym) {
    if (rank_ > 4) throw Error(ErrorCode::RankOverflow, "rank > 4");
    variance_.fill(Variance::Covariant);
    for (int i = 0; i < rank_; ++i) {
      if (slots[i] == 'u') variance_[i] = Variance::Contravariant;
      else if (slots[i] != 'd') throw std::invalid_argument("slot tag must be 'u' or 'd'");
    }
    data_.assign(ipow7(rank_), S(0.0));
  }

  BasicTensor(int rank, const std::array<Variance, 4>& var, Symmetry sym = {})
      : rank_(rank), variance_(var), sym_(sym) {
    if (rank_ < 0 || rank_ > 4) throw Error(ErrorCode::RankOverflow, "rank > 4");
    data_.assign(ipow7(rank_), S(0.0));
  }

  static BasicTensor scalar(S v) {
    BasicTensor t;
    t.data_[0] = v;
    return t;
  }

  int rank() const { return rank_; }
  Variance variance(int slot) const { return variance_[slot]; }
  const std::array<Variance, 4>& variances() const { return variance_; }
  std::string slots() const {
    std::string s;
    for (int i = 0; i < rank_; ++i) s += variance_[i] == Variance::Covariant ? 'd' : 'u';
    return s;
  }
  Symmetry symmetry() const { return sym_; }
  void setSymmetry(Symmetry s) { sym_ = s; }
  void setVariance(int slot, Variance v) { variance_[slot] = v; }

  std::size_t size() const { return data_.size(); }
  S& operator[](std::size_t i) { return data_[i]; }
  const S& operator[](std::size_t i) const { return data_[i]; }
  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

  template <class... I>
  S& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <class... I>
  const S& operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  /// Element access by an index array of length rank().
  S& at(const std::array<int, 4>& idx) { return data_[offsetOf(idx)]; }
  const S& at(const std::array<int, 4>& idx) const { return data_[offsetOf(idx)]; }

  std::size_t offsetOf(const std::array<int, 4>& idx) const {
    std::size_t off = 0;
    for (int i = 0; i < rank_; ++i) off = off * kDim + static_cast<std::size_t>(idx[i]);
    return off;
  }

  BasicTensor& operator+=(const BasicTensor& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  BasicTensor& operator-=(const BasicTensor& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  BasicTensor& operator*=(double c) {
    for (auto& x : data_) x *= c;
    return *this;
  }
  friend BasicTensor operator+(BasicTensor a, const BasicTensor& b) { return a += b; }
  friend BasicTensor operator-(BasicTensor a, const BasicTensor& b) { return a -= b; }
  friend BasicTensor operator*(BasicTensor a, double c) { return a *= c; }
  friend BasicTensor operator*(double c, BasicTensor a) { return a *= c; }
  friend BasicTensor operator-(BasicTensor a) { return a *= -1.0; }

  /// Componentwise map into another scalar type, keeping tags.
  template <class F>
  auto map(F&& f) const {
    using R = decltype(f(data_[0]));
    BasicTensor<R> out(rank_, variance_, sym_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = f(data_[i]);
    return out;
  }

 private:
  template <class... I>
  std::size_t offset(I... idx) const {
    static_assert(sizeof...(I) <= 4, "rank <= 4");
    std::size_t off = 0;
    ((off = off * kDim + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  int rank_;
  std::array<Variance, 4> variance_{};
  Symmetry sym_{};
  std::vector<S> data_;
};

using MultiTensor = BasicTensor<double>;

template <class S>
BasicTensor<double> valuePart(const BasicTensor<S>& t) {
  return t.map([](const S& x) { return valueOf(x); });
}

inline double maxAbs(const MultiTensor& t) {
  double m = 0.0;
  for (double x : t.data()) m = std::max(m, std::abs(x));
  return m;
}

inline double maxAbsDiff(const MultiTensor& a, const MultiTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Iterate over all multi-indices of a given rank (slot 0 slowest).
template <class F>
void forEachIndex(int rank, F&& f) {
  std::array<int, 4> idx{0, 0, 0, 0};
  const std::size_t n = ipow7(rank);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t r = flat;
    for (int s = rank - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(r % kDim);
      r /= kDim;
    }
    f(idx, flat);
  }
}

// ---------------------------------------------------------------------------
// Permutations of small index sets

/// Sign of a permutation given as an array of distinct integers 0..n-1.
template <class It>
int permutationSign(It first, It last) {
  std::vector<int> p(first, last);
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[p[i]]);
      s = -s;
    }
  }
  return s;
}

struct PermTable {
  int n;
  std::vector<std::vector<int>> perms;  // lexicographic order
  std::vector<int> signs;
};

inline const PermTable& permTable(int n) {
  static const std::array<PermTable, 8> tables = [] {
    std::array<PermTable, 8> t;
    for (int k = 0; k <= 7; ++k) {
      t[k].n = k;
      std::vector<int> p(k);
      std::iota(p.begin(), p.end(), 0);
      do {
        t[k].perms.push_back(p);
        t[k].signs.push_back(permutationSign(p.begin(), p.end()));
      } while (std::next_permutation(p.begin(), p.end()));
    }
    return t;
  }();
  return tables.at(n);
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// ---------------------------------------------------------------------------
// Contraction

struct SlotPair {
  int a;  // slot of the first tensor
  int b;  // slot of the second tensor
};

/// Tensor product of a and b summed over the given slot pairs. Free slots of a
/// come first, then free slots of b. Pairs with equal variance are joined
/// through `metric` (inverse metric for two lower slots, metric for two upper).
template <class S>
BasicTensor<S> contract(const BasicTensor<S>& a, const BasicTensor<S>& b,
                        const std::vector<SlotPair>& pairs,
                        const BasicTensor<S>* metric = nullptr) {
  const int np = static_cast<int>(pairs.size());
  const int outRank = a.rank() + b.rank() - 2 * np;
  if (outRank > 4) throw Error(ErrorCode::RankOverflow, "contraction result rank > 4");
  std::array<int, 4> aRole{-1, -1, -1, -1}, bRole{-1, -1, -1, -1};
  std::vector<bool> viaMetric(np, false);
  for (int p = 0; p < np; ++p) {
    const auto [sa, sb] = pairs[p];
    if (sa < 0 || sa >= a.rank() || sb < 0 || sb >= b.rank() || aRole[sa] != -1 || bRole[sb] != -1)
      throw Error(ErrorCode::SlotCountMismatch, "bad slot pair");
    aRole[sa] = p;
    bRole[sb] = p;
    if (a.variance(sa) == b.variance(sb)) {
      const Variance need = a.variance(sa) == Variance::Covariant ? Variance::Contravariant
                                                                   : Variance::Covariant;
      if (!metric || metric->rank() != 2 || metric->variance(0) != need || metric->variance(1) != need)
        throw Error(ErrorCode::VarianceMismatch, "same-variance pair needs a suitable metric");
      viaMetric[p] = true;
    }
  }
  std::array<Variance, 4> outVar{};
  std::vector<int> aFree, bFree;
  int o = 0;
  for (int s = 0; s < a.rank(); ++s)
    if (aRole[s] < 0) { aFree.push_back(s); outVar[o++] = a.variance(s); }
  for (int s = 0; s < b.rank(); ++s)
    if (bRole[s] < 0) { bFree.push_back(s); outVar[o++] = b.variance(s); }
  BasicTensor<S> out(outRank, outVar);

  // Summation indices: one per pair for a's side, plus one for b's side when a metric is used.
  const int nsum = np + static_cast<int>(std::count(viaMetric.begin(), viaMetric.end(), true));
  std::vector<int> bSumSlot(np, -1);
  {
    int extra = np;
    for (int p = 0; p < np; ++p) bSumSlot[p] = viaMetric[p] ? extra++ : p;
  }
  const std::size_t nsumTotal = [&] {
    std::size_t n = 1;
    for (int i = 0; i < nsum; ++i) n *= kDim;
    return n;
  }();
  std::vector<int> sidx(nsum);
  forEachIndex(outRank, [&](const std::array<int, 4>& oi, std::size_t flat) {
    S acc(0.0);
    std::array<int, 4> ai{}, bi{};
    for (std::size_t i = 0; i < aFree.size(); ++i) ai[aFree[i]] = oi[i];
    for (std::size_t i = 0; i < bFree.size(); ++i) bi[bFree[i]] = oi[aFree.size() + i];
    for (std::size_t sflat = 0; sflat < nsumTotal; ++sflat) {
      std::size_t r = sflat;
      for (int s = nsum - 1; s >= 0; --s) {
        sidx[s] = static_cast<int>(r % kDim);
        r /= kDim;
      }
      S w(1.0);
      for (int p = 0; p < np; ++p) {
        ai[pairs[p].a] = sidx[p];
        bi[pairs[p].b] = sidx[bSumSlot[p]];
        if (viaMetric[p]) w = w * (*metric)(sidx[p], sidx[bSumSlot[p]]);
      }
      acc += w * a.at(ai) * b.at(bi);
    }
    out[flat] = acc;
  });
  return out;
}

/// Full antisymmetrization with 1/k! normalization.
template <class S>
BasicTensor<S> alternate(const BasicTensor<S>& a) {
  const int r = a.rank();
  if (r < 2) return a;
  const auto& tab = permTable(r);
  BasicTensor<S> out(r, a.variances(), Symmetry::skew());
  const double inv = 1.0 / factorial(r);
  forEachIndex(r, [&](const std::array<int, 4>& idx, std::size_t flat) {
    S acc(0.0);
    std::array<int, 4> p{};
    for (std::size_t k = 0; k < tab.perms.size(); ++k) {
      for (int s = 0; s < r; ++s) p[s] = idx[tab.perms[k][s]];
      acc += static_cast<double>(tab.signs[k]) * a.at(p);
    }
    out[flat] = acc * inv;
  });
  return out;
}

/// Full symmetrization with 1/k! normalization.
template <class S>
BasicTensor<S> symmetrize(const BasicTensor<S>& a) {
  const int r = a.rank();
  if (r < 2) return a;
  const auto& tab = permTable(r);
  BasicTensor<S> out(r, a.variances(), Symmetry::symmetric());
  const double inv = 1.0 / factorial(r);
  forEachIndex(r, [&](const std::array<int, 4>& idx, std::size_t flat) {
    S acc(0.0);
    std::array<int, 4> p{};
    for (const auto& perm : tab.perms) {
      for (int s = 0; s < r; ++s) p[s] = idx[perm[s]];
      acc += a.at(p);
    }
    out[flat] = acc * inv;
  });
  return out;
}

/// Largest relative violation of the declared symmetry.
inline double symmetryViolation(const MultiTensor& t) {
  const Symmetry s = t.symmetry();
  if (s.kind == Symmetry::Kind::None || t.rank() < 2) return 0.0;
  const double scale = std::max(1.0, maxAbs(t));
  if (s.kind == Symmetry::Kind::PairSkew) {
    double m = 0.0;
    forEachIndex(t.rank(), [&](const std::array<int, 4>& idx, std::size_t flat) {
      auto sw = idx;
      std::swap(sw[s.k], sw[s.l]);
      m = std::max(m, std::abs(t[flat] + t.at(sw)));
    });
    return m / scale;
  }
  const MultiTensor ref = s.kind == Symmetry::Kind::FullySkew ? alternate(t) : symmetrize(t);
  return maxAbsDiff(t, ref) / scale;
}

// ---------------------------------------------------------------------------
// Exterior forms on sorted index sets (bitmask keyed), degrees 0..7.

namespace detail {
struct FormIndex {
  std::array<std::vector<std::uint8_t>, 8> masks;  // per degree, lexicographic by sorted tuple
  std::array<std::int8_t, 128> pos{};
  FormIndex() {
    for (int k = 0; k <= 7; ++k) {
      std::vector<std::uint8_t> list;
      std::vector<int> sel(k);
      std::iota(sel.begin(), sel.end(), 0);
      if (k == 0) {
        list.push_back(0);
      } else {
        while (true) {
          std::uint8_t m = 0;
          for (int x : sel) m |= static_cast<std::uint8_t>(1u << x);
          list.push_back(m);
          int i = k - 1;
          while (i >= 0 && sel[i] == 7 - k + i) --i;
          if (i < 0) break;
          ++sel[i];
          for (int j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
        }
      }
      for (std::size_t p = 0; p < list.size(); ++p) pos[list[p]] = static_cast<std::int8_t>(p);
      masks[k] = std::move(list);
    }
  }
};
inline const FormIndex& formIndex() {
  static const FormIndex idx;
  return idx;
}
/// Sign of the shuffle placing the bits of a before the bits of b.
inline int shuffleSign(unsigned a, unsigned b) {
  int inv = 0;
  for (unsigned y = 0; y < 7; ++y)
    if (b & (1u << y)) inv += std::popcount(a & ~((2u << y) - 1u));
  return (inv & 1) ? -1 : 1;
}
}  // namespace detail

/// A k-form stored by its components on strictly increasing index tuples.
/// Components agree with those of the fully skew tensor α_{i1...ik}.
template <class S>
class Form {
 public:
  Form() : Form(0) {}
  explicit Form(int degree) : k_(degree) {
    if (degree < 0 || degree > 7) throw Error(ErrorCode::DegreeOverflow, "form degree outside 0..7");
    c_.assign(detail::formIndex().masks[degree].size(), S(0.0));
  }
  int degree() const { return k_; }
  std::size_t size() const { return c_.size(); }
  unsigned maskAt(std::size_t i) const { return detail::formIndex().masks[k_][i]; }
  S& operator[](std::size_t i) { return c_[i]; }
  const S& operator[](std::size_t i) const { return c_[i]; }
  S& byMask(unsigned m) { return c_[detail::formIndex().pos[m]]; }
  const S& byMask(unsigned m) const { return c_[detail::formIndex().pos[m]]; }

  /// Component with arbitrary (possibly unsorted or repeated) indices.
  S component(std::initializer_list<int> idx) const {
    unsigned m = 0;
    std::vector<int> v(idx);
    for (int i : v) {
      if (m & (1u << i)) return S(0.0);
      m |= 1u << i;
    }
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> p(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      p[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v[i]) - sorted.begin());
    return static_cast<double>(permutationSign(p.begin(), p.end())) * byMask(m);
  }

  Form& operator+=(const Form& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Form& operator-=(const Form& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Form& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(Form a, double s) { return a *= s; }
  friend Form operator*(double s, Form a) { return a *= s; }

 private:
  void check(const Form& o) const {
    if (o.k_ != k_) throw Error(ErrorCode::DegreeOverflow, "degree mismatch");
  }
  int k_;
  std::vector<S> c_;
};

using FormD = Form<double>;

template <class S>
Form<S> scaled(Form<S> f, const S& s) {
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = f[i] * s;
  return f;
}

inline double maxAbs(const FormD& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

/// Exterior product.
template <class S>
Form<S> wedge(const Form<S>& a, const Form<S>& b) {
  if (a.degree() + b.degree() > 7) throw Error(ErrorCode::DegreeOverflow, "wedge degree > 7");
  Form<S> out(a.degree() + b.degree());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const unsigned ma = a.maskAt(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const unsigned mb = b.maskAt(j);
      if (ma & mb) continue;
      out.byMask(ma | mb) += static_cast<double>(detail::shuffleSign(ma, mb)) * (a[i] * b[j]);
    }
  }
  return out;
}

/// Interior product v⌟α, components v^m α_{m i1...}.
template <class S, class V>
Form<S> interior(const V& v, const Form<S>& a) {
  if (a.degree() < 1) throw Error(ErrorCode::DegreeOverflow, "interior product of a 0-form");
  Form<S> out(a.degree() - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const unsigned mi = out.maskAt(i);
    S acc(0.0);
    for (int m = 0; m < kDim; ++m) {
      if (mi & (1u << m)) continue;
      const int below = std::popcount(mi & ((1u << m) - 1u));
      const double sgn = (below & 1) ? -1.0 : 1.0;
      acc += sgn * (v[m] * a.byMask(mi | (1u << m)));
    }
    out[i] = acc;
  }
  return out;
}

/// Coordinate 1-form dx^i (or any basis covector).
inline FormD basisForm(int i) {
  FormD f(1);
  f.byMask(1u << i) = 1.0;
  return f;
}

template <class S, class V>
Form<S> oneForm(const V& v) {
  Form<S> f(1);
  for (int i = 0; i < kDim; ++i) f.byMask(1u << i) = v[i];
  return f;
}

/// Fully skew tensor (rank 1..4) to its form.
template <class S>
Form<S> toForm(const BasicTensor<S>& t) {
  Form<S> f(t.rank());
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::array<int, 4> idx{};
    int n = 0;
    for (int b = 0; b < kDim; ++b)
      if (f.maskAt(i) & (1u << b)) idx[n++] = b;
    f[i] = t.at(idx);
  }
  return f;
}

/// Form of degree 0..4 to a fully skew covariant tensor.
template <class S>
BasicTensor<S> toTensor(const Form<S>& f) {
  if (f.degree() > 4) throw Error(ErrorCode::RankOverflow, "form degree > 4 has no rank <= 4 tensor");
  const int k = f.degree();
  BasicTensor<S> t(std::string(k, 'd'), Symmetry::skew());
  if (k == 0) {
    t[0] = f[0];
    return t;
  }
  const auto& tab = permTable(k);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::array<int, 4> sorted{};
    int n = 0;
    for (int b = 0; b < kDim; ++b)
      if (f.maskAt(i) & (1u << b)) sorted[n++] = b;
    std::array<int, 4> idx{};
    for (std::size_t p = 0; p < tab.perms.size(); ++p) {
      for (int s = 0; s < k; ++s) idx[s] = sorted[tab.perms[p][s]];
      t.at(idx) = static_cast<double>(tab.signs[p]) * f[i];
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Signed permutation sums over S_7

/// One slot of a factor: either a fixed index or the image σ(p) of position p.
struct PermSlot {
  bool permuted;
  int value;
};
inline PermSlot fixedSlot(int i) { return {false, i}; }
inline PermSlot permSlot(int p) { return {true, p}; }

struct PermFactor {
  const MultiTensor* tensor;
  std::vector<PermSlot> slots;
};

/// Σ_{σ∈S7} sgn σ Π_f factor_f, with σ enumerated lexicographically.
inline double signedPermSum(const std::vector<PermFactor>& factors) {
  std::array<int, 7> seen{};
  int count = 0;
  for (const auto& f : factors) {
    if (!f.tensor || static_cast<int>(f.slots.size()) != f.tensor->rank())
      throw Error(ErrorCode::SlotCountMismatch, "factor slot list does not match its rank");
    for (const auto& s : f.slots) {
      if (s.value < 0 || s.value >= kDim) throw Error(ErrorCode::SlotCountMismatch, "slot out of range");
      if (s.permuted) {
        if (seen[s.value]++) throw Error(ErrorCode::SlotCountMismatch, "permuted position used twice");
        ++count;
      }
    }
  }
  if (count != 7) throw Error(ErrorCode::SlotCountMismatch, "permuted slots must cover 7 positions");
  const auto& tab = permTable(7);
  double sum = 0.0;
  for (std::size_t k = 0; k < tab.perms.size(); ++k) {
    const auto& sigma = tab.perms[k];
    double prod = static_cast<double>(tab.signs[k]);
    for (const auto& f : factors) {
      std::array<int, 4> idx{};
      for (std::size_t s = 0; s < f.slots.size(); ++s)
        idx[s] = f.slots[s].permuted ? sigma[f.slots[s].value] : f.slots[s].value;
      prod *= f.tensor->at(idx);
      if (prod == 0.0) break;
    }
    sum += prod;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Small dense matrices

template <class S>
using Mat7 = std::array<std::array<S, kDim>, kDim>;

template <class S>
Mat7<S> toMat(const BasicTensor<S>& t) {
  Mat7<S> m{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m[i][j] = t(i, j);
  return m;
}

template <class S>
BasicTensor<S> fromMat(const Mat7<S>& m, std::string_view slots, Symmetry sym = {}) {
  BasicTensor<S> t(slots, sym);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t(i, j) = m[i][j];
  return t;
}

/// Determinant and inverse by Gaussian elimination with partial pivoting on
/// the value part; works for any scalar with field operations.
template <class S>
std::pair<S, Mat7<S>> detAndInverse(const Mat7<S>& in) {
  Mat7<S> a = in;
  Mat7<S> inv{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) inv[i][j] = S(i == j ? 1.0 : 0.0);
  S det(1.0);
  double scale = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) scale = std::max(scale, std::abs(valueOf(in[i][j])));
  for (int c = 0; c < kDim; ++c) {
    int piv = c;
    for (int r = c + 1; r < kDim; ++r)
      if (std::abs(valueOf(a[r][c])) > std::abs(valueOf(a[piv][c]))) piv = r;
    if (std::abs(valueOf(a[piv][c])) <= 1e-14 * scale || scale == 0.0)
      throw Error(ErrorCode::Singular, "matrix is singular");
    if (piv != c) {
      std::swap(a[piv], a[c]);
      std::swap(inv[piv], inv[c]);
      det = det * -1.0;
    }
    const S p = a[c][c];
    det = det * p;
    const S ip = S(1.0) / p;
    for (int j = 0; j < kDim; ++j) {
      a[c][j] = a[c][j] * ip;
      inv[c][j] = inv[c][j] * ip;
    }
    for (int r = 0; r < kDim; ++r) {
      if (r == c) continue;
      const S f = a[r][c];
      for (int j = 0; j < kDim; ++j) {
        a[r][j] = a[r][j] - f * a[c][j];
        inv[r][j] = inv[r][j] - f * inv[c][j];
      }
    }
  }
  return {det, inv};
}

/// Real power of a double; for a rational exponent num/den with odd den the
/// sign of a negative base is preserved as sign(x)^num.
inline double rationalPow(double x, int num, int den) {
  if (den <= 0) throw std::invalid_argument("denominator must be positive");
  if (x >= 0.0) return std::pow(x, static_cast<double>(num) / den);
  if (den % 2 == 0) throw Error(ErrorCode::EvenRootOfNegative, "even root of a negative number");
  const double mag = std::pow(-x, static_cast<double>(num) / den);
  return (num % 2 == 0) ? mag : -mag;
}

struct InvDetPow {
  MultiTensor inverse;
  double det;
  double detPow;
};

/// Inverse, determinant and det^(num/den) of a rank-2 tensor.
inline InvDetPow matInvDetPow(const MultiTensor& m, int num = 1, int den = 1) {
  if (m.rank() != 2) throw Error(ErrorCode::RankOverflow, "matInvDetPow needs rank 2");
  auto [det, inv] = detAndInverse(toMat(m));
  std::string flipped;
  for (char c : m.slots()) flipped += c == 'd' ? 'u' : 'd';
  InvDetPow r{fromMat(inv, flipped, m.symmetry()), det, rationalPow(det, num, den)};
  return r;
}

}  // namespace g2flow
