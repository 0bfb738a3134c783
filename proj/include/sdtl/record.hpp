#pragma once

#include <cstddef>
#include <set>
#include <tuple>
#include <type_traits>
#include <utility>

namespace sdtl::record {

// Field-focused access to a state record. A focus is a list of
// pointers-to-member; a single field projects to its value, several fields
// project to a tuple in the order given.

template <auto... Fields>
struct Focus {
  static_assert(sizeof...(Fields) >= 1, "a focus selects at least one field");

  template <class R>
  static auto project(const R& r) {
    if constexpr (sizeof...(Fields) == 1) {
      return ((r.*Fields), ...);
    } else {
      return std::tuple{(r.*Fields)...};
    }
  }

  template <class R, class C>
  static R inject(C&& c, R r) {
    if constexpr (sizeof...(Fields) == 1) {
      ((r.*Fields = std::forward<C>(c)), ...);
    } else {
      assign(r, std::forward<C>(c), std::index_sequence_for<decltype(Fields)...>{});
    }
    return r;
  }

 private:
  template <class R, class C, std::size_t... Is>
  static void assign(R& r, C&& c, std::index_sequence<Is...>) {
    ((r.*Fields = std::get<Is>(std::forward<C>(c))), ...);
  }
};

/// Project the selected fields, let `u` rewrite them, write them back.
template <auto... Fields, class U>
auto focusUpdate(U u) {
  return [u = std::move(u)](auto r) {
    using F = Focus<Fields...>;
    auto updated = u(F::project(r));
    return F::inject(std::move(updated), std::move(r));
  };
}

/// Like focusUpdate, but `u` also yields an auxiliary result:
/// u : fields -> (fields, a), and the lifted function returns (record, a).
template <auto... Fields, class U>
auto focusUpdateReturning(U u) {
  return [u = std::move(u)](auto r) {
    using F = Focus<Fields...>;
    auto [fields, aux] = u(F::project(r));
    auto rec = F::inject(std::move(fields), std::move(r));
    return std::pair{std::move(rec), std::move(aux)};
  };
}

/// Read-only projection: u applied to the selected fields.
template <auto... Fields, class U>
auto focusRead(U u) {
  return [u = std::move(u)](const auto& r) {
    using F = Focus<Fields...>;
    return u(F::project(r));
  };
}

/// Wrap the result of `f` in a one-element set.
template <class Fn>
auto singleton(Fn f) {
  return [f = std::move(f)](const auto& x) {
    using R = std::decay_t<decltype(f(x))>;
    return std::set<R>{f(x)};
  };
}

}  // namespace sdtl::record
