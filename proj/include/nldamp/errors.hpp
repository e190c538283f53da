#pragma once

#include <stdexcept>
#include <string>

namespace nldamp {

struct degenerate_input : std::runtime_error {
  explicit degenerate_input(const std::string& what) : std::runtime_error(what) {}
};

struct quadrature_failure : std::runtime_error {
  explicit quadrature_failure(const std::string& what) : std::runtime_error(what) {}
};

struct needs_denser_sampling : std::runtime_error {
  explicit needs_denser_sampling(const std::string& what) : std::runtime_error(what) {}
};

struct io_failure : std::runtime_error {
  explicit io_failure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nldamp
