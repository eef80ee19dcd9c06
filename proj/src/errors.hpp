#pragma once

#include <stdexcept>
#include <string>

namespace vecgarch {

// Error categories. They map one-to-one onto CLI exit codes:
// configuration = 1, data = 2, numerical = 3.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vecgarch
