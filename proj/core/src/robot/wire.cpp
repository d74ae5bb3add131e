#include "emg/robot/wire.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "emg/error.hpp"

namespace emg::robot {

namespace {

std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string encode_command(const JointCommand& cmd, std::uint32_t seq) {
  if (!std::isfinite(cmd.value)) throw ParameterError("cannot encode a non-finite command value");
  if (cmd.kind != kind_of(cmd.joint)) throw ParameterError("command kind does not match joint");
  std::string out;
  out.reserve(96);
  out += "{\"v\":1,\"seq\":";
  out += std::to_string(seq);
  out += ",\"joint\":\"";
  out += joint_wire_name(cmd.joint);
  out += "\",\"kind\":\"";
  out += kind_wire_name(cmd.kind);
  out += "\",\"value\":";
  out += format_value(cmd.value);
  out += ",\"mode\":\"";
  out += mode_wire_tag(cmd.mode);
  out += "\"}";
  return out;
}

WireCommand parse_command(std::string_view datagram) {
  while (!datagram.empty() && (datagram.back() == '\n' || datagram.back() == '\r')) datagram.remove_suffix(1);
  if (datagram.empty()) throw DecodeError("empty datagram");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(datagram);
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError(std::string("malformed datagram: ") + e.what());
  }
  if (!j.is_object()) throw DecodeError("malformed datagram: not an object");
  auto field = [&](const char* key) -> const nlohmann::json& {
    const auto it = j.find(key);
    if (it == j.end()) throw DecodeError(std::string("malformed datagram: missing \"") + key + "\"");
    return *it;
  };
  const auto& v = field("v");
  if (!v.is_number_integer()) throw DecodeError("malformed datagram: bad version field");
  if (v.get<std::int64_t>() != kWireVersion) throw DecodeError("unsupported version " + v.dump());

  const auto& seq = field("seq");
  if (!seq.is_number_integer() || seq.get<std::int64_t>() < 0 ||
      seq.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max()) {
    throw DecodeError("malformed datagram: bad seq");
  }
  auto token = [&](const char* key) {
    const auto& t = field(key);
    if (!t.is_string()) throw DecodeError(std::string("malformed datagram: \"") + key + "\" is not a string");
    return t.get<std::string>();
  };
  const std::string joint_tok = token("joint");
  const auto joint = joint_from_wire_name(joint_tok);
  if (!joint) throw DecodeError("unknown joint \"" + joint_tok + "\"");
  const std::string kind_tok = token("kind");
  const auto kind = kind_from_wire_name(kind_tok);
  if (!kind) throw DecodeError("unknown kind \"" + kind_tok + "\"");
  if (*kind != kind_of(*joint)) throw DecodeError("kind \"" + kind_tok + "\" does not apply to joint \"" + joint_tok + "\"");
  const std::string mode_tok = token("mode");
  const auto mode = mode_from_wire_tag(mode_tok);
  if (!mode) throw DecodeError("unknown mode \"" + mode_tok + "\"");
  const auto& value = field("value");
  if (!value.is_number()) throw DecodeError("malformed datagram: value is not a number");

  WireCommand out;
  out.seq = static_cast<std::uint32_t>(seq.get<std::int64_t>());
  out.command = JointCommand{*joint, *kind, value.get<double>(), *mode};
  return out;
}

std::optional<JointCommand> CommandReceiver::accept(std::string_view datagram) {
  const WireCommand w = parse_command(datagram);
  if (last_ && w.seq <= *last_) {
    ++dropped_;
    return std::nullopt;
  }
  last_ = w.seq;
  ++accepted_;
  return w.command;
}

void CommandReceiver::reset() {
  last_.reset();
  dropped_ = 0;
  accepted_ = 0;
}

}  // namespace emg::robot
