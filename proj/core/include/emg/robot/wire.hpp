#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "emg/robot/command.hpp"

namespace emg::robot {

inline constexpr int kWireVersion = 1;
inline constexpr std::uint16_t kDefaultSimPort = 8855;

struct WireCommand {
  std::uint32_t seq = 0;
  JointCommand command;
  friend bool operator==(const WireCommand&, const WireCommand&) = default;
};

/// {"v":1,"seq":7,"joint":"lift","kind":"vel","value":0.0,"mode":"ad"}
/// Values use the shortest round-trip decimal form, always with a decimal
/// point or exponent. Throws ParameterError on non-finite values or a kind
/// that does not match the joint.
std::string encode_command(const JointCommand& cmd, std::uint32_t seq);

/// Inverse of encode_command. Throws DecodeError on malformed input,
/// unsupported version, or unknown joint/kind/mode tokens.
WireCommand parse_command(std::string_view datagram);

/// Receiver-side sequencing: datagrams whose seq is not newer than the
/// last accepted one are dropped and counted.
class CommandReceiver {
 public:
  /// nullopt for a stale datagram; throws DecodeError for a malformed one.
  std::optional<JointCommand> accept(std::string_view datagram);

  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t accepted() const { return accepted_; }
  std::optional<std::uint32_t> last_seq() const { return last_; }
  void reset();

 private:
  std::optional<std::uint32_t> last_;
  std::uint64_t dropped_ = 0;
  std::uint64_t accepted_ = 0;
};

}  // namespace emg::robot
