#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace ocrx;
using testing::error_of;

TEST_CASE("idType classifies by tag and owner") {
  const ContextId me{7};
  CHECK(classify(GlobalId{0, 7, ObjectKind::Task}, me) == IdClass::Guid);
  CHECK(classify(LocalId{me, 1}, me) == IdClass::Lid);
  CHECK(classify(LocalId{ContextId{8}, 1}, me) == IdClass::Unknown);
  CHECK(classify(Identifier::null(), me) == IdClass::Unknown);
  CHECK(classify(Identifier::uninitialized(), me) == IdClass::Unknown);
}

TEST_CASE("null and uninitialized are different") {
  CHECK(Identifier::null() != Identifier::uninitialized());
  CHECK(Identifier::null().is_null());
  CHECK(Identifier::uninitialized().is_uninitialized());
}

TEST_CASE("issuer counts per node from 1") {
  GuidIssuer issuer(2);
  CHECK(issuer.next(0, ObjectKind::Task) == GlobalId{0, 1, ObjectKind::Task});
  CHECK(issuer.next(0, ObjectKind::Event).sequence == 2);
  GlobalId first1 = issuer.next(1, ObjectKind::DataBlock);
  CHECK(first1.node == 1);
  CHECK(first1.sequence == 1);
}

TEST_CASE("trace formats") {
  CHECK(format(GlobalId{1, 3, ObjectKind::DataBlock}) == "G1.3:DataBlock");
  CHECK(format(LocalId{ContextId{4}, 2}) == "L4.2");
  CHECK(format(Identifier{GlobalId{0, 9, ObjectKind::Map}}) == "G0.9:Map");
}

TEST_CASE("serialized identifiers round trip, null is all zero") {
  std::array<std::byte, kSerializedIdSize> buf{};
  serialize_id(Identifier::null(), buf);
  for (auto b : buf) CHECK(b == std::byte{0});
  CHECK(deserialize_id(buf).is_null());

  const GlobalId g{3, 0x0102030405060708ull, ObjectKind::File};
  serialize_id(g, buf);
  CHECK(buf[0] == std::byte{0x08});
  CHECK(buf[7] == std::byte{0x01});
  CHECK(buf[8] == std::byte{3});
  CHECK(deserialize_id(buf) == Identifier{g});

  CHECK(error_of([&] { serialize_id(LocalId{ContextId{1}, 1}, buf); }) ==
        ErrorKind::LidOwnershipViolation);
}

TEST_CASE("property: issued pairs never repeat, sequences increase") {
  testing::Gen gen(42);
  for (int round = 0; round < 50; ++round) {
    const std::size_t nodes = 1 + gen.below(5);
    GuidIssuer issuer(nodes);
    std::set<std::pair<NodeIndex, std::uint64_t>> seen;
    std::vector<std::uint64_t> last(nodes, 0);
    for (int i = 0; i < 200; ++i) {
      const auto node = static_cast<NodeIndex>(gen.below(nodes));
      const auto kind = static_cast<ObjectKind>(1 + gen.below(6));
      GlobalId g = issuer.next(node, kind);
      CHECK(g.kind == kind);
      CHECK(g.sequence > last[node]);
      last[node] = g.sequence;
      CHECK(seen.insert({g.node, g.sequence}).second);
    }
  }
}

TEST_CASE("property: classify is pure") {
  testing::Gen gen(3);
  for (int i = 0; i < 300; ++i) {
    const ContextId caller{gen.below(4)};
    Identifier id;
    switch (gen.below(4)) {
      case 0: id = Identifier::null(); break;
      case 1: id = Identifier::uninitialized(); break;
      case 2: id = GlobalId{NodeIndex(gen.below(3)), 1 + gen.below(9), ObjectKind::Event}; break;
      default: id = LocalId{ContextId{gen.below(4)}, 1 + gen.below(9)}; break;
    }
    CHECK(classify(id, caller) == classify(id, caller));
    CHECK(classify(id, caller) == classify(Identifier(id), caller));
  }
}
