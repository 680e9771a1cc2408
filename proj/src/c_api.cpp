#include "rescascade/rescascade.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "rescascade/experiments.hpp"

using namespace rescascade;

struct rc_context {
  std::string last_error;
};

struct rc_genset {
  GenerationalSet set;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Frequency freq(const int64_t n[2]) { return {n[0], n[1]}; }

/// Runs body, translating exceptions into status codes and the context's
/// last error.
template <typename F>
rc_status guarded(rc_context* ctx, F&& body) {
  if (!ctx) return RC_ERR_INVALID_ARGUMENT;
  ctx->last_error.clear();
  try {
    return body();
  } catch (const VerificationError& e) {
    ctx->last_error = e.what();
    return RC_ERR_VERIFICATION;
  } catch (const std::overflow_error& e) {
    ctx->last_error = e.what();
    return RC_ERR_OVERFLOW;
  } catch (const std::invalid_argument& e) {
    ctx->last_error = e.what();
    return RC_ERR_INVALID_ARGUMENT;
  } catch (const std::out_of_range& e) {
    ctx->last_error = e.what();
    return RC_ERR_INVALID_ARGUMENT;
  } catch (const Json::exception& e) {
    ctx->last_error = e.what();
    return RC_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return RC_ERR_INTERNAL;
  } catch (...) {
    ctx->last_error = "unknown error";
    return RC_ERR_INTERNAL;
  }
}

rc_status fail(rc_context* ctx, rc_status code, const char* msg) {
  ctx->last_error = msg;
  return code;
}

}  // namespace

extern "C" {

const char* rc_version(void) { return "1.0.0"; }

const char* rc_status_name(rc_status status) {
  switch (status) {
    case RC_OK: return "ok";
    case RC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RC_ERR_VERIFICATION: return "verification failed";
    case RC_ERR_NOT_FOUND: return "not found";
    case RC_ERR_OVERFLOW: return "overflow";
    case RC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rc_context* rc_context_create(void) { return new (std::nothrow) rc_context(); }

void rc_context_destroy(rc_context* ctx) { delete ctx; }

const char* rc_last_error(const rc_context* ctx) { return ctx ? ctx->last_error.c_str() : "null context"; }

rc_status rc_omega4(rc_context* ctx, const int64_t n1[2], const int64_t n2[2], const int64_t n3[2],
                    const int64_t n4[2], int64_t* out) {
  return guarded(ctx, [&] {
    if (!n1 || !n2 || !n3 || !n4 || !out) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    *out = omega4(freq(n1), freq(n2), freq(n3), freq(n4));
    return RC_OK;
  });
}

rc_status rc_rectangle_defect(rc_context* ctx, const int64_t n1[2], const int64_t n2[2], const int64_t n3[2],
                              int64_t* out) {
  return guarded(ctx, [&] {
    if (!n1 || !n2 || !n3 || !out) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    *out = rectangle_defect(freq(n1), freq(n2), freq(n3));
    return RC_OK;
  });
}

rc_status rc_genset_from_json(rc_context* ctx, const char* json, rc_genset** out) {
  return guarded(ctx, [&] {
    if (!json || !out) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    *out = new rc_genset{genset_from_json(Json::parse(json))};
    return RC_OK;
  });
}

rc_status rc_genset_seed_p2(rc_context* ctx, rc_genset** out) {
  return guarded(ctx, [&] {
    if (!out) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    *out = new rc_genset{seed_family_p2()};
    return RC_OK;
  });
}

rc_status rc_genset_build_lambda0(rc_context* ctx, int P, int box, uint64_t max_nodes, rc_genset** out) {
  return guarded(ctx, [&] {
    if (!out) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    Lambda0SearchOptions opts;
    opts.max_nodes = max_nodes;
    auto res = build_lambda0(P, box, opts);
    if (!res.set) {
      return fail(ctx, RC_ERR_NOT_FOUND,
                  res.budget_exhausted ? "node budget exhausted before a set was found" : "no set exists in the box");
    }
    *out = new rc_genset{std::move(*res.set)};
    return RC_OK;
  });
}

rc_status rc_genset_to_json(rc_context* ctx, const rc_genset* set, char** out_json) {
  return guarded(ctx, [&] {
    if (!set || !out_json) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    *out_json = dup_string(to_json(set->set).dump());
    return RC_OK;
  });
}

size_t rc_genset_generation_count(const rc_genset* set) { return set ? set->set.generation_count() : 0; }

size_t rc_genset_size(const rc_genset* set) { return set ? set->set.size() : 0; }

rc_status rc_genset_verify(rc_context* ctx, const rc_genset* set, int64_t cutoff, const int64_t* partner_xy,
                           size_t partner_count, int* all_pass, char** report_json) {
  return guarded(ctx, [&] {
    if (!set || !all_pass) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    if (partner_count > 0 && !partner_xy) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null partner array");
    if (cutoff < 0 && cutoff != RC_CUTOFF_UNBOUNDED) {
      return fail(ctx, RC_ERR_INVALID_ARGUMENT, "cutoff must be nonnegative or RC_CUTOFF_UNBOUNDED");
    }
    const auto cut = cutoff == RC_CUTOFF_UNBOUNDED ? ResonanceCutoff::unbounded() : ResonanceCutoff::bounded(cutoff);
    std::vector<Frequency> partner;
    for (size_t i = 0; i < partner_count; ++i) partner.push_back({partner_xy[2 * i], partner_xy[2 * i + 1]});
    const auto report = partner_xy ? verify_properties(set->set, cut, std::span<const Frequency>(partner))
                                   : verify_properties(set->set, cut);
    *all_pass = report.all_pass() ? 1 : 0;
    if (report_json) *report_json = dup_string(to_json(report).dump());
    return RC_OK;
  });
}

void rc_genset_destroy(rc_genset* set) { delete set; }

rc_status rc_run_experiment(rc_context* ctx, const char* kind, const char* config_json, const char* out_dir,
                            char** report_json, int* verdict_pass) {
  if (report_json) *report_json = nullptr;
  return guarded(ctx, [&] {
    if (!kind || !config_json || !verdict_pass) return fail(ctx, RC_ERR_INVALID_ARGUMENT, "null argument");
    *verdict_pass = 0;
    Json cfg;
    try {
      cfg = Json::parse(config_json);
    } catch (const Json::exception& e) {
      return fail(ctx, RC_ERR_INVALID_ARGUMENT, (std::string("config is not valid JSON: ") + e.what()).c_str());
    }
    try {
      const auto res = run_experiment(kind, cfg, out_dir ? std::filesystem::path(out_dir) : std::filesystem::path());
      *verdict_pass = res.pass ? 1 : 0;
      if (report_json) *report_json = dup_string(res.report.dump(2));
      return RC_OK;
    } catch (const VerificationError& e) {
      if (report_json) *report_json = dup_string(Json{{"error", e.what()}, {"report", e.report()}}.dump(2));
      throw;
    }
  });
}

void rc_string_free(char* s) { std::free(s); }

}  // extern "C"
