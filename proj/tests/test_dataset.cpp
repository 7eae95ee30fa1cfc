#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <stdexcept>

#include "apcalc/dataset.hpp"
#include "doctest.h"

using namespace apcalc;

TEST_CASE("feature-only round trip preserves every bit") {
  Dataset d;
  d.n = 3;
  d.features = {0.1, -2.5e-17, 3.0, 1.0 / 3.0, 1e300, -0.0};
  const std::string text = format_dataset_csv(d);
  const Dataset back = parse_dataset_csv(text);
  CHECK(back.n == 3);
  CHECK(!back.has_labels);
  REQUIRE(back.features.size() == d.features.size());
  for (std::size_t i = 0; i < d.features.size(); ++i) CHECK(back.features[i] == d.features[i]);
}

TEST_CASE("labeled round trip") {
  Dataset d;
  d.n = 2;
  d.has_labels = true;
  d.features = {1.0, 2.0, 3.0, 4.0};
  d.labels = {2, 1};
  const Dataset back = parse_dataset_csv(format_dataset_csv(d));
  CHECK(back.has_labels);
  CHECK(back.labels == d.labels);
  CHECK(back.rows() == 2);
  CHECK(back.at(1, 0) == 3.0);
}

TEST_CASE("header is strict") {
  CHECK_THROWS_AS(parse_dataset_csv("a,b\n1,2\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv("f1,f3\n1,2\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv("f1,label,f2\n1,1,2\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv(""), std::runtime_error);
}

TEST_CASE("rows are strict") {
  CHECK_THROWS_AS(parse_dataset_csv("f1,f2\n1\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv("f1\nnan\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv("f1\ninf\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv("f1,label\n1,0\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv("f1,label\n1,1.5\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dataset_csv("f1\n1,2\n"), std::runtime_error);
}

TEST_CASE("crlf and trailing blank lines are tolerated") {
  const Dataset d = parse_dataset_csv("f1,label\r\n0.5,1\r\n\r\n");
  CHECK(d.rows() == 1);
  CHECK(d.labels[0] == 1);
}

TEST_CASE("trace round trip keeps block structure") {
  MediatorTrace t;
  t.dims = {2, 1};
  t.offsets = {0, 2};
  t.total_dims = 3;
  t.values = {1.5, -2.5, 0.25, 4.0, 5.0, -1e-9};
  const MediatorTrace back = parse_trace_csv(format_trace_csv(t));
  CHECK(back.dims == t.dims);
  CHECK(back.offsets == t.offsets);
  CHECK(back.total_dims == 3);
  CHECK(back.values == t.values);
  CHECK(back.at(1, 0, 1) == 5.0);  // row 1, mediator 0, coord 1
}

TEST_CASE("trace parser rejects malformed input") {
  CHECK_THROWS_AS(parse_trace_csv(""), std::runtime_error);
  CHECK_THROWS_AS(parse_trace_csv("y1_1\n1\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_trace_csv("x1_1,x2_1\n1\n"), std::runtime_error);
}
