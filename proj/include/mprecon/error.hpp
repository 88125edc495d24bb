#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mprecon {

enum class Errc {
  zero_inverse,
  overflow,
  out_of_domain,
  unsupported_k,
  invalid_party,
  config_mismatch,
  zero_beta,
  too_many_parties,
  ids_poisoned,
  parity_mismatch,
  malformed_tree,
  disconnected_after_retries,
  composite_p,
  io_error,
  malformed_wire,
  invalid_argument,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::zero_inverse: return "ZeroInverse";
    case Errc::overflow: return "Overflow";
    case Errc::out_of_domain: return "OutOfDomain";
    case Errc::unsupported_k: return "UnsupportedK";
    case Errc::invalid_party: return "InvalidParty";
    case Errc::config_mismatch: return "ConfigMismatch";
    case Errc::zero_beta: return "ZeroBeta";
    case Errc::too_many_parties: return "TooManyParties";
    case Errc::ids_poisoned: return "IdsPoisoned";
    case Errc::parity_mismatch: return "ParityMismatch";
    case Errc::malformed_tree: return "MalformedTree";
    case Errc::disconnected_after_retries: return "DisconnectedAfterRetries";
    case Errc::composite_p: return "CompositeP";
    case Errc::io_error: return "IoError";
    case Errc::malformed_wire: return "MalformedWire";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mprecon
