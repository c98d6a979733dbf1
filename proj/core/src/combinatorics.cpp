#include "polytrace/combinatorics.h"

#include <algorithm>
#include <sstream>

#include "polytrace/error.h"

namespace polytrace {

Partition Partition::from_parts(std::span<const unsigned> parts) {
  std::vector<unsigned> sorted(parts.begin(), parts.end());
  std::sort(sorted.begin(), sorted.end());
  Partition out;
  for (unsigned part : sorted) {
    if (part == 0) throw Error("partition parts must be positive");
    out.weight_ += part;
    if (!out.blocks_.empty() && out.blocks_.back().part == part)
      ++out.blocks_.back().multiplicity;
    else
      out.blocks_.push_back({part, 1});
  }
  return out;
}

unsigned Partition::length() const {
  unsigned len = 0;
  for (const auto& b : blocks_) len += b.multiplicity;
  return len;
}

unsigned Partition::multiplicity(unsigned part) const {
  for (const auto& b : blocks_)
    if (b.part == part) return b.multiplicity;
  return 0;
}

std::vector<unsigned> Partition::parts() const {
  std::vector<unsigned> out;
  for (const auto& b : blocks_) out.insert(out.end(), b.multiplicity, b.part);
  return out;
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (k) os << ' ';
    os << blocks_[k].part << '^' << blocks_[k].multiplicity;
  }
  os << ')';
  return os.str();
}

namespace {

// Parts are generated in non-decreasing order, each at least `min_part`,
// which yields lexicographic order of the increasing part lists.
void partitions_rec(unsigned remaining, unsigned min_part, std::vector<unsigned>& prefix,
                    std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back(Partition::from_parts(prefix));
    return;
  }
  for (unsigned part = min_part; part <= remaining; ++part) {
    // A part larger than remaining/2 must be the last one.
    if (part != remaining && 2 * part > remaining) continue;
    prefix.push_back(part);
    partitions_rec(remaining - part, part, prefix, out);
    prefix.pop_back();
  }
}

void matchings_rec(std::vector<unsigned>& free, Matching& current, std::vector<Matching>& out) {
  if (free.empty()) {
    out.push_back(current);
    return;
  }
  const unsigned first = free.front();
  for (std::size_t k = 1; k < free.size(); ++k) {
    const unsigned partner = free[k];
    std::vector<unsigned> rest;
    rest.reserve(free.size() - 2);
    for (std::size_t t = 1; t < free.size(); ++t)
      if (t != k) rest.push_back(free[t]);
    current.emplace_back(first, partner);
    matchings_rec(rest, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(unsigned i) {
  std::vector<Partition> out;
  std::vector<unsigned> prefix;
  partitions_rec(i, 1, prefix, out);
  return out;
}

Integer d_lambda(const Partition& lambda) {
  Integer den = 1;
  for (const auto& b : lambda.blocks()) {
    den *= factorial(b.multiplicity);
    for (unsigned r = 0; r < b.multiplicity; ++r) den *= factorial(b.part);
  }
  return factorial(lambda.weight()) / den;
}

Integer s_lambda(const Partition& lambda) {
  Integer den = 1;
  for (const auto& b : lambda.blocks()) {
    den *= factorial(b.multiplicity);
    for (unsigned r = 0; r < b.multiplicity; ++r) den *= b.part;
  }
  return factorial(lambda.weight()) / den;
}

std::vector<Matching> enumerate_pair_partitions(unsigned m) {
  if (m % 2 != 0) throw Error("no pair partition");
  std::vector<unsigned> free(m);
  for (unsigned k = 0; k < m; ++k) free[k] = k;
  std::vector<Matching> out;
  Matching current;
  matchings_rec(free, current, out);
  return out;
}

}  // namespace polytrace
