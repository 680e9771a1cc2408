#include <doctest.h>

#include <json.hpp>

#include <string>

#include "rescascade/rescascade.h"

namespace {

using Json = nlohmann::json;

struct Ctx {
  rc_context* p = rc_context_create();
  ~Ctx() { rc_context_destroy(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  rc_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(rc_version()) == "1.0.0");
  CHECK(std::string(rc_status_name(RC_OK)) == "ok");
  CHECK(std::string(rc_status_name(RC_ERR_NOT_FOUND)) == "not found");
}

TEST_CASE("null context and null arguments") {
  int64_t out = 0;
  const int64_t n[2] = {0, 0};
  CHECK(rc_omega4(nullptr, n, n, n, n, &out) == RC_ERR_INVALID_ARGUMENT);
  Ctx ctx;
  CHECK(rc_omega4(ctx.p, n, nullptr, n, n, &out) == RC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(rc_last_error(ctx.p)) == "null argument");
  CHECK(rc_genset_size(nullptr) == 0);
}

TEST_CASE("omega4 and rectangle defect") {
  Ctx ctx;
  const int64_t a[2] = {0, 0}, b[2] = {1, 1}, c[2] = {2, 0}, d[2] = {1, -1}, e[2] = {3, 0};
  int64_t out = -1;
  REQUIRE(rc_omega4(ctx.p, a, b, c, d, &out) == RC_OK);
  CHECK(out == 0);
  CHECK(std::string(rc_last_error(ctx.p)).empty());
  REQUIRE(rc_rectangle_defect(ctx.p, b, a, e, &out) == RC_OK);
  // n1 - n = (1,1), n3 - n = (3,0): defect -2 * 3.
  CHECK(out == -6);
  const int64_t big[2] = {int64_t{1} << 40, int64_t{1} << 40};
  CHECK(rc_omega4(ctx.p, big, a, big, a, &out) == RC_ERR_OVERFLOW);
  CHECK_FALSE(std::string(rc_last_error(ctx.p)).empty());
}

TEST_CASE("generational set handles") {
  Ctx ctx;
  rc_genset* g = nullptr;
  REQUIRE(rc_genset_seed_p2(ctx.p, &g) == RC_OK);
  CHECK(rc_genset_generation_count(g) == 2);
  CHECK(rc_genset_size(g) == 4);

  char* text = nullptr;
  REQUIRE(rc_genset_to_json(ctx.p, g, &text) == RC_OK);
  const std::string json = take(text);
  rc_genset* copy = nullptr;
  REQUIRE(rc_genset_from_json(ctx.p, json.c_str(), &copy) == RC_OK);
  CHECK(rc_genset_size(copy) == 4);

  int pass = -1;
  char* report = nullptr;
  REQUIRE(rc_genset_verify(ctx.p, copy, 0, nullptr, 0, &pass, &report) == RC_OK);
  CHECK(pass == 1);
  CHECK(Json::parse(take(report)).at("all_pass") == true);

  REQUIRE(rc_genset_verify(ctx.p, g, 4, nullptr, 0, &pass, nullptr) == RC_OK);
  CHECK(pass == 0);
  const int64_t origin[2] = {0, 0};
  REQUIRE(rc_genset_verify(ctx.p, g, RC_CUTOFF_UNBOUNDED, origin, 1, &pass, nullptr) == RC_OK);
  CHECK(pass == 0);
  CHECK(rc_genset_verify(ctx.p, g, -7, nullptr, 0, &pass, nullptr) == RC_ERR_INVALID_ARGUMENT);

  rc_genset_destroy(copy);
  rc_genset_destroy(g);
}

TEST_CASE("malformed JSON and search outcomes") {
  Ctx ctx;
  rc_genset* g = nullptr;
  CHECK(rc_genset_from_json(ctx.p, "{not json", &g) == RC_ERR_INVALID_ARGUMENT);
  CHECK(rc_genset_from_json(ctx.p, "{\"generations\": [[[0,0]],[[0,0]]]}", &g) == RC_ERR_INVALID_ARGUMENT);
  CHECK(rc_genset_build_lambda0(ctx.p, 2, 0, 0, &g) == RC_ERR_NOT_FOUND);
  CHECK(g == nullptr);
  CHECK(rc_genset_build_lambda0(ctx.p, 9, 4, 0, &g) == RC_ERR_INVALID_ARGUMENT);
  REQUIRE(rc_genset_build_lambda0(ctx.p, 2, 4, 0, &g) == RC_OK);
  CHECK(rc_genset_size(g) == 4);
  rc_genset_destroy(g);
}

TEST_CASE("run_experiment") {
  Ctx ctx;
  char* report = nullptr;
  int pass = -1;
  REQUIRE(rc_run_experiment(ctx.p, "verify-set", "{\"set\": \"seed\"}", nullptr, &report, &pass) == RC_OK);
  CHECK(pass == 1);
  CHECK(Json::parse(take(report)).at("kind") == "verify-set");

  CHECK(rc_run_experiment(ctx.p, "verify-set", "{}", "", &report, &pass) == RC_ERR_INVALID_ARGUMENT);
  CHECK(report == nullptr);
  CHECK(rc_run_experiment(ctx.p, "bogus", "{}", "", &report, &pass) == RC_ERR_INVALID_ARGUMENT);

  const char* broken = "{\"placed_set\": {\"generations\": [[[0,0],[2,0]],[[1,1]]]}}";
  REQUIRE(rc_run_experiment(ctx.p, "norm-growth", broken, "", &report, &pass) == RC_ERR_VERIFICATION);
  const auto j = Json::parse(take(report));
  CHECK(j.contains("error"));
  CHECK(j.at("report").at("all_pass") == false);
}
