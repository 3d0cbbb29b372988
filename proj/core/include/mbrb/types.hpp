#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mbrb {

// 1-based process identity.
struct ProcessId {
  int index = 0;

  constexpr ProcessId() = default;
  constexpr explicit ProcessId(int i) : index(i) {}
  constexpr bool valid() const { return index > 0; }
  friend constexpr auto operator<=>(const ProcessId&, const ProcessId&) = default;
};

struct MessageId {
  std::int64_t sn = 0;
  ProcessId origin;

  friend constexpr auto operator<=>(const MessageId&, const MessageId&) = default;
};

using Payload = std::string;

enum class MsgKind : std::uint8_t { Msg, Init, Echo, Ready, Witness, Bundle };

std::string_view to_string(MsgKind k);
MsgKind msg_kind_from_string(std::string_view s);

struct Signature {
  ProcessId signer;
  std::uint64_t digest = 0;

  friend constexpr auto operator<=>(const Signature&, const Signature&) = default;
};

struct ImpMessage {
  MsgKind kind = MsgKind::Msg;
  Payload payload;
  MessageId id;  // for INIT the origin is filled in from the authenticated sender
  std::vector<Signature> sigs;  // BUNDLE only, kept sorted
  ProcessId sender;  // stamped by the network

  friend bool operator==(const ImpMessage&, const ImpMessage&) = default;
};

std::string describe(const ImpMessage& m);

}  // namespace mbrb
