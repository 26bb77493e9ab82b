#ifndef SFR_ERROR_HPP
#define SFR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sfr {

// All recoverable failures surface as sfr::Error. The category string is a
// stable machine-readable tag; what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(category + ": " + message),
        category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category,
                              const std::string& message) {
  throw Error(category, message);
}

}  // namespace sfr

#endif  // SFR_ERROR_HPP
