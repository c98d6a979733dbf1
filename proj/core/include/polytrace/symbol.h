#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polytrace/scalar.h"

namespace polytrace {

using SymbolId = std::uint32_t;

enum class UmbraKind { singleton, delta, unity, gaussian, falling, custom };

const char* to_string(UmbraKind kind);

/// Handle to a formal variable alpha whose powers evaluate to a fixed moment
/// sequence a_k (a_0 = 1). Handles are cheap to copy; every factory call
/// creates a fresh id, and distinct ids are uncorrelated under evaluation.
/// The process-wide registry behind the handles is append-only and safe to
/// use from several threads.
class Umbra {
 public:
  SymbolId id() const { return id_; }
  UmbraKind kind() const;
  const std::string& name() const;
  /// a_k. Memoized; safe to call concurrently.
  Rational moment(unsigned k) const;
  /// Smallest k with a_j = 0 for every j >= k, when such k exists
  /// (2 for singletons, 3 for deltas, n+1 for falling(n)).
  std::optional<unsigned> vanishing_order() const;

  static Umbra singleton(const std::string& name = "chi");
  static Umbra delta(const std::string& name = "delta");
  static Umbra unity(const std::string& name = "u");
  /// Normal with the given mean and variance: m u + sigma zeta. Taking the
  /// variance keeps the moments rational for rational inputs.
  static Umbra gaussian(const Rational& mean, const Rational& variance,
                        const std::string& name = "zeta");
  /// Moments (n)_k; the auxiliary umbra n.chi, i.e. chi_1 + ... + chi_n.
  static Umbra falling(unsigned n, const std::string& name = "falling");
  /// Arbitrary sequence; `moments(0)` is ignored and taken as 1.
  static Umbra custom(std::function<Rational(unsigned)> moments,
                      std::optional<unsigned> vanishing_order = std::nullopt,
                      const std::string& name = "alpha");

  /// Handle for an id previously issued by a factory.
  static Umbra from_id(SymbolId id);

  friend bool operator==(const Umbra& a, const Umbra& b) { return a.id_ == b.id_; }
  friend auto operator<=>(const Umbra& a, const Umbra& b) { return a.id_ <=> b.id_; }

 private:
  explicit Umbra(SymbolId id) : id_(id) {}
  SymbolId id_;
};

/// `count` fresh singleton umbrae chi_1..chi_count (likewise below).
std::vector<Umbra> make_singleton_family(unsigned count, const std::string& prefix = "chi");
std::vector<Umbra> make_delta_family(unsigned count, const std::string& prefix = "delta");
std::vector<Umbra> make_unity_family(unsigned count, const std::string& prefix = "u");

/// Ordinary commuting indeterminate, interned by display name: two
/// handles with the same name are the same variable.
class Indeterminate {
 public:
  explicit Indeterminate(const std::string& name);
  SymbolId id() const { return id_; }
  const std::string& name() const;

  static Indeterminate from_id(SymbolId id);
  /// name_1 .. name_count.
  static std::vector<Indeterminate> family(const std::string& name, unsigned count);

  friend bool operator==(const Indeterminate& a, const Indeterminate& b) { return a.id_ == b.id_; }
  friend auto operator<=>(const Indeterminate& a, const Indeterminate& b) { return a.id_ <=> b.id_; }

 private:
  struct FromId {};
  Indeterminate(FromId, SymbolId id) : id_(id) {}
  SymbolId id_;
};

/// Display name of an indeterminate id (used by printers).
const std::string& indeterminate_name(SymbolId id);
/// Display name of an umbra id, suffixed with '#id' to keep same-named
/// umbrae apart.
std::string umbra_label(SymbolId id);

}  // namespace polytrace
