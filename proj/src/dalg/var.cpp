#include "jetcalc/var.hpp"

#include <limits>
#include <numeric>

#include "jetcalc/errors.hpp"

namespace jetcalc {

namespace {

void checkDirection(std::size_t i) {
  if (i >= kMaxIndependents) throw Error("independent-variable index out of range");
}

void appendOfOrder(std::size_t n, std::size_t first, unsigned remaining, MultiIndex current,
                   std::vector<MultiIndex>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  if (first >= n) return;
  // Larger counts in earlier directions come first.
  for (unsigned c = remaining + 1; c-- > 0;) {
    if (first + 1 == n && c != remaining) continue;
    appendOfOrder(n, first + 1, remaining - c, current.plus(first, c), out);
  }
}

}  // namespace

MultiIndex MultiIndex::unit(std::size_t i) { return MultiIndex{}.plus(i); }

MultiIndex MultiIndex::fromDirections(std::initializer_list<std::size_t> dirs) {
  MultiIndex m;
  for (auto d : dirs) m = m.plus(d);
  return m;
}

MultiIndex MultiIndex::fromCounts(const std::vector<unsigned>& counts) {
  if (counts.size() > kMaxIndependents) throw Error("too many independent variables");
  MultiIndex m;
  for (std::size_t i = 0; i < counts.size(); ++i) m = m.plus(i, counts[i]);
  return m;
}

unsigned MultiIndex::order() const {
  unsigned s = 0;
  for (auto c : counts_) s += c;
  return s;
}

MultiIndex MultiIndex::plus(std::size_t i, unsigned times) const {
  checkDirection(i);
  MultiIndex m = *this;
  unsigned v = m.counts_[i] + times;
  if (v > std::numeric_limits<std::uint8_t>::max()) throw Error("derivative order overflow");
  m.counts_[i] = static_cast<std::uint8_t>(v);
  return m;
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
  MultiIndex m = *this;
  for (std::size_t i = 0; i < kMaxIndependents; ++i) m = m.plus(i, other.counts_[i]);
  return m;
}

MultiIndex MultiIndex::minus(const MultiIndex& other) const {
  MultiIndex m = *this;
  for (std::size_t i = 0; i < kMaxIndependents; ++i) {
    if (other.counts_[i] > counts_[i]) throw Error("multi-index subtraction underflow");
    m.counts_[i] = static_cast<std::uint8_t>(counts_[i] - other.counts_[i]);
  }
  return m;
}

bool MultiIndex::contains(const MultiIndex& other) const {
  for (std::size_t i = 0; i < kMaxIndependents; ++i)
    if (other.counts_[i] > counts_[i]) return false;
  return true;
}

MultiIndex MultiIndex::without(std::size_t i) const {
  checkDirection(i);
  MultiIndex m = *this;
  m.counts_[i] = 0;
  return m;
}

std::vector<std::size_t> MultiIndex::directions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kMaxIndependents; ++i)
    for (unsigned c = 0; c < counts_[i]; ++c) out.push_back(i);
  return out;
}

std::vector<MultiIndex> MultiIndex::subIndices() const {
  std::vector<MultiIndex> out{MultiIndex{}};
  for (std::size_t i = 0; i < kMaxIndependents; ++i) {
    if (counts_[i] == 0) continue;
    std::vector<MultiIndex> next;
    for (const auto& m : out)
      for (unsigned c = 0; c <= counts_[i]; ++c) next.push_back(m.plus(i, c));
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<MultiIndex> MultiIndex::ofOrder(std::size_t n, unsigned order) {
  if (n > kMaxIndependents) throw Error("too many independent variables");
  std::vector<MultiIndex> out;
  if (n == 0) {
    if (order == 0) out.emplace_back();
    return out;
  }
  appendOfOrder(n, 0, order, MultiIndex{}, out);
  return out;
}

std::vector<MultiIndex> MultiIndex::upTo(const std::vector<std::size_t>& dirs, unsigned maxOrder) {
  std::vector<MultiIndex> out;
  for (unsigned r = 0; r <= maxOrder; ++r) {
    for (const auto& local : ofOrder(dirs.size(), r)) {
      MultiIndex m;
      for (std::size_t k = 0; k < dirs.size(); ++k) m = m.plus(dirs[k], local.count(k));
      out.push_back(m);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.order() <=> b.order(); c != 0) return c;
  for (std::size_t i = 0; i < kMaxIndependents; ++i) {
    if (a.counts_[i] != b.counts_[i]) return b.counts_[i] <=> a.counts_[i];
  }
  return std::strong_ordering::equal;
}

std::size_t MultiIndex::hash() const {
  std::size_t h = 0;
  for (auto c : counts_) h = h * 131 + c;
  return h;
}

std::strong_ordering operator<=>(const VarId& a, const VarId& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.index <=> b.index; c != 0) return c;
  if (auto c = a.layer <=> b.layer; c != 0) return c;
  return a.sigma <=> b.sigma;
}

std::size_t VarIdHash::operator()(const VarId& v) const {
  std::size_t h = static_cast<std::size_t>(v.kind);
  h = h * 1000003u + v.index;
  h = h * 1000003u + v.layer;
  return h * 1000003u + v.sigma.hash();
}

}  // namespace jetcalc
