#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "bbvm/shapes.hpp"

using namespace bbvm;

TEST_CASE("define_property assigns dense slots from the root") {
  ShapeTable t;
  ShapeId s1 = t.define_property(t.root(), "n", TypeTag::int32());
  auto n = t.lookup(s1, "n");
  REQUIRE(n.has_value());
  CHECK(n->slot == 0);
  CHECK(n->tag == TypeTag::int32());

  // the accumulator shape: n, then two methods with distinct identities
  ShapeId s2 = t.define_property(s1, "add", TypeTag::closure(1));
  ShapeId s3 = t.define_property(s2, "sub", TypeTag::closure(2));
  CHECK(t.at(s3).propCount == 3);
  auto add = t.lookup(s3, "add");
  REQUIRE(add.has_value());
  CHECK(add->slot == 1);
  CHECK(add->tag == TypeTag::closure(1));
  auto sub = t.lookup(s3, "sub");
  REQUIRE(sub.has_value());
  CHECK(sub->slot == 2);
  CHECK(sub->tag == TypeTag::closure(2));
}

TEST_CASE("interning: repeated definitions return the identical shape") {
  ShapeTable t;
  ShapeId a = t.define_property(t.root(), "x", TypeTag::int32());
  ShapeId b = t.define_property(t.root(), "x", TypeTag::int32());
  CHECK(a == b);
  ShapeId c = t.define_property(t.root(), "x", TypeTag::float64());
  CHECK(c != a);  // sibling under a different tag
  CHECK_THROWS_AS(t.define_property(a, "x", TypeTag::int32()), DuplicateProperty);
}

TEST_CASE("update_property_type preserves layout") {
  ShapeTable t;
  ShapeId s = t.define_property(t.root(), "n", TypeTag::int32());
  s = t.define_property(s, "m", TypeTag::string());

  ShapeId s2 = t.update_property_type(s, "n", TypeTag::float64());
  CHECK(s2 != s);
  auto n2 = t.lookup(s2, "n");
  REQUIRE(n2.has_value());
  CHECK(n2->slot == 0);
  CHECK(n2->tag == TypeTag::float64());
  auto m2 = t.lookup(s2, "m");
  REQUIRE(m2.has_value());
  CHECK(m2->slot == 1);
  CHECK(m2->tag == TypeTag::string());

  // identity case: same tag returns the same shape
  CHECK(t.update_property_type(s, "n", TypeTag::int32()) == s);
  CHECK_THROWS_AS(t.update_property_type(s, "zz", TypeTag::int32()), MissingProperty);
}

TEST_CASE("method identity re-type creates a sibling shape") {
  ShapeTable t;
  ShapeId s = t.define_property(t.root(), "add", TypeTag::closure(1));
  ShapeId s2 = t.update_property_type(s, "add", TypeTag::closure(2));
  CHECK(s2 != s);
  CHECK(t.lookup(s2, "add")->tag == TypeTag::closure(2));
  CHECK(t.lookup(s2, "add")->slot == t.lookup(s, "add")->slot);
  // re-typing back reuses the interned original
  CHECK(t.update_property_type(s2, "add", TypeTag::closure(1)) == s);
}

TEST_CASE("lookup misses are values, not errors") {
  ShapeTable t;
  CHECK_FALSE(t.lookup(t.root(), "x").has_value());
}

TEST_CASE("interning across construction orders") {
  ShapeTable t;
  // same structural path built twice, separated by unrelated churn
  ShapeId a1 = t.define_property(t.root(), "p", TypeTag::int32());
  ShapeId a2 = t.define_property(a1, "q", TypeTag::string());
  t.define_property(t.root(), "zz", TypeTag::null());
  ShapeId b1 = t.define_property(t.root(), "p", TypeTag::int32());
  ShapeId b2 = t.define_property(b1, "q", TypeTag::string());
  CHECK(a2 == b2);
  // re-typing then re-typing back reaches the interned original
  ShapeId c = t.update_property_type(a2, "p", TypeTag::float64());
  CHECK(t.update_property_type(c, "p", TypeTag::int32()) == a2);
}

TEST_CASE("randomized shape construction agrees with a naive map oracle") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names = {"a", "b", "c", "d", "e"};
  auto randTag = [&]() {
    switch (rng() % 4) {
      case 0: return TypeTag::int32();
      case 1: return TypeTag::float64();
      case 2: return TypeTag::string();
      default: return TypeTag::closure((FuncId)(rng() % 3));
    }
  };
  for (int round = 0; round < 200; ++round) {
    ShapeTable t;
    ShapeId cur = t.root();
    std::map<std::string, std::pair<uint32_t, TypeTag>> oracle;
    uint32_t nextSlot = 0;
    for (int step = 0; step < 12; ++step) {
      const std::string& name = names[rng() % names.size()];
      TypeTag tag = randTag();
      auto it = oracle.find(name);
      if (it == oracle.end()) {
        cur = t.define_property(cur, name, tag);
        oracle[name] = {nextSlot++, tag};
      } else {
        cur = t.update_property_type(cur, name, tag);
        it->second.second = tag;
      }
      for (const auto& [n, expected] : oracle) {
        auto got = t.lookup(cur, n);
        REQUIRE(got.has_value());
        CHECK(got->slot == expected.first);
        CHECK(got->tag == expected.second);
      }
      CHECK_FALSE(t.lookup(cur, "nope").has_value());
    }
  }
}

TEST_CASE("plan_write covers store, re-type and define") {
  ShapeTable t;
  ShapeId s = t.define_property(t.root(), "n", TypeTag::int32());
  auto same = t.plan_write(s, "n", TypeTag::int32());
  CHECK(same.target == s);
  CHECK_FALSE(same.grows);
  auto retype = t.plan_write(s, "n", TypeTag::float64());
  CHECK(retype.target != s);
  CHECK(retype.slot == 0);
  CHECK_FALSE(retype.grows);
  auto grow = t.plan_write(s, "m", TypeTag::string());
  CHECK(grow.grows);
  CHECK(grow.slot == 1);
}

TEST_CASE("dump is deterministic and names tags") {
  ShapeTable t;
  ShapeId s = t.define_property(t.root(), "n", TypeTag::int32());
  t.define_property(s, "add", TypeTag::closure(1));
  std::string d1 = t.dump();
  std::string d2 = t.dump();
  CHECK(d1 == d2);
  CHECK(d1.find("n: int32") != std::string::npos);
  CHECK(d1.find("add: closure/id1") != std::string::npos);
}
