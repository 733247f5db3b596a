#include <gtest/gtest.h>

#include <sstream>

#include "dnufft/error.hpp"
#include "dnufft/io.hpp"
#include "reference.hpp"

using namespace dnufft;

TEST(Io, ParticlesCsvRoundTrip) {
  auto ps = ref::particles(3, 2.0, 50, 3);
  std::stringstream s;
  write_particles_csv(s, ps);
  EXPECT_EQ(s.str().substr(0, 12), "x,y,z,re,im\n");
  const auto back = read_particles_csv(s, 3, 2.0);
  EXPECT_EQ(back.positions(), ps.positions());
  EXPECT_EQ(back.strengths(), ps.strengths());
}

TEST(Io, ParticlesBinaryRoundTrip) {
  auto ps = ref::particles(2, 1.0, 20, 4);
  std::stringstream s;
  write_particles_binary(s, ps);
  EXPECT_EQ(s.str().size(), 20u * 5u * 8u);
  const auto back = read_particles_binary(s, 2, 1.0);
  EXPECT_EQ(back.positions(), ps.positions());
  EXPECT_EQ(back.strengths(), ps.strengths());
}

TEST(Io, MalformedParticlesAreParseErrors) {
  for (const char* text : {"x,y,z,re,im\n1,2,3\n", "x,y,z,re,im\n1,2,3,a,5\n", "a,b\n"}) {
    std::istringstream in(text);
    try {
      read_particles_csv(in, 3, 10.0);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << text;
    }
  }
  std::istringstream truncated(std::string(17, '\0'));
  EXPECT_THROW(read_particles_binary(truncated, 3, 1.0), Error);
}

TEST(Io, GridDumpRoundTrip) {
  Box box{{0, 4, 0}, {8, 8, 1}};
  OversampledGrid g(2, 4, 1.0, 2, box);
  const auto v = ref::random_values(box.volume(), 2);
  g.set_owned_values(v);
  std::stringstream s;
  write_grid_dump(s, g);
  EXPECT_EQ(s.str().size(), 4u * 8u + v.size() * 16u);
  const auto d = read_grid_dump(s);
  EXPECT_EQ(d.dim, 2);
  EXPECT_EQ(d.modes, 4);
  EXPECT_EQ(d.fine, 8);
  EXPECT_EQ(d.halo, 2);
  EXPECT_EQ(d.values, v);
  std::stringstream cut(s.str().substr(0, s.str().size() - 3));
  EXPECT_THROW(read_grid_dump(cut), Error);
}

TEST(Io, KeyValueSections) {
  std::istringstream in("a = 1\n# note\n[w=5]\n tile = 8, 8, 4 \nteam=2\n\n[other]\nx = y # tail\n");
  const auto kv = parse_key_values(in);
  EXPECT_EQ(kv.at("").at("a"), "1");
  EXPECT_EQ(kv.at("w=5").at("tile"), "8, 8, 4");
  EXPECT_EQ(kv.at("w=5").at("team"), "2");
  EXPECT_EQ(kv.at("other").at("x"), "y");
  std::istringstream bad("novalue\n");
  EXPECT_THROW(parse_key_values(bad), Error);
}

TEST(Io, ScalarParsing) {
  EXPECT_EQ(trim("  a b \t"), "a b");
  EXPECT_EQ(split_list(" 1, 2 ,3"), (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_DOUBLE_EQ(parse_double("1e-4", "eps"), 1e-4);
  EXPECT_EQ(parse_int("-12", "n"), -12);
  EXPECT_THROW(parse_double("1e-4x", "eps"), Error);
  EXPECT_THROW(parse_int("3.5", "n"), Error);
  EXPECT_THROW(parse_int("", "n"), Error);
}
