#include "polytrace/symbol.h"

#include <deque>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "polytrace/error.h"

namespace polytrace {

const char* to_string(UmbraKind kind) {
  switch (kind) {
    case UmbraKind::singleton: return "singleton";
    case UmbraKind::delta: return "delta";
    case UmbraKind::unity: return "unity";
    case UmbraKind::gaussian: return "gaussian";
    case UmbraKind::falling: return "falling";
    case UmbraKind::custom: return "custom";
  }
  return "unknown";
}

namespace {

struct UmbraRecord {
  UmbraKind kind;
  std::string name;
  std::optional<unsigned> vanishing;
  Rational mean;
  Rational variance;
  unsigned falling_n = 0;
  std::function<Rational(unsigned)> custom;

  mutable std::mutex memo_mutex;
  mutable std::vector<Rational> memo;

  Rational compute(unsigned k) const {
    switch (kind) {
      case UmbraKind::singleton: return k <= 1 ? 1 : 0;
      case UmbraKind::delta: return (k == 0 || k == 2) ? 1 : 0;
      case UmbraKind::unity: return 1;
      case UmbraKind::falling: return Rational(falling_factorial(falling_n, k));
      case UmbraKind::gaussian: {
        // E[(m + s Z)^k] = sum_{t even} C(k,t) m^{k-t} s^t (t-1)!!
        Rational total = 0;
        Rational var_pow = 1;
        Integer double_fact = 1;
        for (unsigned t = 0; t <= k; t += 2) {
          if (t >= 2) {
            var_pow *= variance;
            double_fact *= (t - 1);
          }
          Rational mean_pow = 1;
          for (unsigned e = 0; e < k - t; ++e) mean_pow *= mean;
          total += Rational(binomial(k, t)) * mean_pow * var_pow * Rational(double_fact);
        }
        return total;
      }
      case UmbraKind::custom: return k == 0 ? Rational(1) : custom(k);
    }
    return 0;
  }

  Rational moment(unsigned k) const {
    if (vanishing && k >= *vanishing) return 0;
    if (kind != UmbraKind::gaussian && kind != UmbraKind::custom) return compute(k);
    std::lock_guard lock(memo_mutex);
    while (memo.size() <= k) memo.push_back(compute(static_cast<unsigned>(memo.size())));
    return memo[k];
  }
};

class Registry {
 public:
  static Registry& instance() {
    static Registry r;
    return r;
  }

  SymbolId add_umbra(std::unique_ptr<UmbraRecord> rec) {
    std::unique_lock lock(mutex_);
    umbrae_.push_back(std::move(rec));
    return static_cast<SymbolId>(umbrae_.size() - 1);
  }

  const UmbraRecord& umbra(SymbolId id) const {
    std::shared_lock lock(mutex_);
    if (id >= umbrae_.size()) throw Error("unknown umbra id " + std::to_string(id));
    return *umbrae_[id];
  }

  SymbolId intern(const std::string& name) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
    names_.push_back(name);
    const auto id = static_cast<SymbolId>(names_.size() - 1);
    by_name_.emplace(name, id);
    return id;
  }

  const std::string& name(SymbolId id) const {
    std::shared_lock lock(mutex_);
    if (id >= names_.size()) throw Error("unknown indeterminate id " + std::to_string(id));
    return names_[id];
  }

 private:
  mutable std::shared_mutex mutex_;
  std::deque<std::unique_ptr<UmbraRecord>> umbrae_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, SymbolId> by_name_;
};

std::unique_ptr<UmbraRecord> record(UmbraKind kind, const std::string& name,
                                    std::optional<unsigned> vanishing) {
  auto rec = std::make_unique<UmbraRecord>();
  rec->kind = kind;
  rec->name = name;
  rec->vanishing = vanishing;
  return rec;
}

}  // namespace

UmbraKind Umbra::kind() const { return Registry::instance().umbra(id_).kind; }
const std::string& Umbra::name() const { return Registry::instance().umbra(id_).name; }
Rational Umbra::moment(unsigned k) const { return Registry::instance().umbra(id_).moment(k); }
std::optional<unsigned> Umbra::vanishing_order() const {
  return Registry::instance().umbra(id_).vanishing;
}

Umbra Umbra::singleton(const std::string& name) {
  return Umbra(Registry::instance().add_umbra(record(UmbraKind::singleton, name, 2)));
}

Umbra Umbra::delta(const std::string& name) {
  return Umbra(Registry::instance().add_umbra(record(UmbraKind::delta, name, 3)));
}

Umbra Umbra::unity(const std::string& name) {
  return Umbra(Registry::instance().add_umbra(record(UmbraKind::unity, name, std::nullopt)));
}

Umbra Umbra::gaussian(const Rational& mean, const Rational& variance, const std::string& name) {
  if (sgn(variance) < 0) throw Error("gaussian umbra needs a nonnegative variance");
  auto rec = record(UmbraKind::gaussian, name, std::nullopt);
  rec->mean = mean;
  rec->variance = variance;
  return Umbra(Registry::instance().add_umbra(std::move(rec)));
}

Umbra Umbra::falling(unsigned n, const std::string& name) {
  auto rec = record(UmbraKind::falling, name, n + 1);
  rec->falling_n = n;
  return Umbra(Registry::instance().add_umbra(std::move(rec)));
}

Umbra Umbra::custom(std::function<Rational(unsigned)> moments,
                    std::optional<unsigned> vanishing_order, const std::string& name) {
  if (!moments) throw Error("custom umbra needs a moment function");
  if (vanishing_order && *vanishing_order == 0) throw Error("a_0 = 1 cannot vanish");
  auto rec = record(UmbraKind::custom, name, vanishing_order);
  rec->custom = std::move(moments);
  return Umbra(Registry::instance().add_umbra(std::move(rec)));
}

Umbra Umbra::from_id(SymbolId id) {
  Registry::instance().umbra(id);  // validates
  return Umbra(id);
}

namespace {

template <class Make>
std::vector<Umbra> family(unsigned count, const std::string& prefix, Make make) {
  std::vector<Umbra> out;
  out.reserve(count);
  for (unsigned k = 1; k <= count; ++k) out.push_back(make(prefix + "_" + std::to_string(k)));
  return out;
}

}  // namespace

std::vector<Umbra> make_singleton_family(unsigned count, const std::string& prefix) {
  return family(count, prefix, [](const std::string& n) { return Umbra::singleton(n); });
}

std::vector<Umbra> make_delta_family(unsigned count, const std::string& prefix) {
  return family(count, prefix, [](const std::string& n) { return Umbra::delta(n); });
}

std::vector<Umbra> make_unity_family(unsigned count, const std::string& prefix) {
  return family(count, prefix, [](const std::string& n) { return Umbra::unity(n); });
}

Indeterminate::Indeterminate(const std::string& name) : id_(Registry::instance().intern(name)) {}

const std::string& Indeterminate::name() const { return Registry::instance().name(id_); }

Indeterminate Indeterminate::from_id(SymbolId id) {
  Registry::instance().name(id);  // validates
  return Indeterminate(FromId{}, id);
}

std::vector<Indeterminate> Indeterminate::family(const std::string& name, unsigned count) {
  std::vector<Indeterminate> out;
  out.reserve(count);
  for (unsigned k = 1; k <= count; ++k) out.emplace_back(name + "_" + std::to_string(k));
  return out;
}

const std::string& indeterminate_name(SymbolId id) { return Registry::instance().name(id); }

std::string umbra_label(SymbolId id) {
  return Registry::instance().umbra(id).name + "#" + std::to_string(id);
}

}  // namespace polytrace
