#include "circarma/circarma.h"

#include <new>
#include <stdexcept>
#include <string>

#include "circarma/errors.hpp"
#include "circarma/json_io.hpp"

struct circarma_result {
    std::string json_body;
    std::string csv;
    bool has_csv = false;
};

namespace {

thread_local std::string g_last_error;

int run_impl(const char* command, const char* request_json, circarma_result** out) {
    if (out) *out = nullptr;
    if (!command || !request_json || !out) {
        g_last_error = "null argument";
        return CIRCARMA_ERR_INPUT;
    }
    try {
        nlohmann::json request = nlohmann::json::parse(request_json);
        circarma::io::CommandResult res = circarma::io::run_command(command, request);
        auto* handle = new circarma_result;
        handle->json_body = res.body.dump(2) + "\n";
        if (res.csv) {
            handle->csv = *res.csv;
            handle->has_csv = true;
        }
        *out = handle;
        if (res.status != 0) {
            g_last_error = res.body.value("error", res.body.value("diagnostic", "domain failure"));
            return CIRCARMA_ERR_DOMAIN;
        }
        g_last_error.clear();
        return CIRCARMA_OK;
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("invalid JSON: ") + e.what();
        return CIRCARMA_ERR_INPUT;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return CIRCARMA_ERR_INPUT;
    } catch (const circarma::Error& e) {
        g_last_error = e.what();
        return CIRCARMA_ERR_DOMAIN;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CIRCARMA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = std::string("internal error: ") + e.what();
        return CIRCARMA_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* circarma_version(void) { return "0.1.0"; }

int circarma_run(const char* command, const char* request_json, circarma_result** out) {
    return run_impl(command, request_json, out);
}

int circarma_check(const char* request_json, circarma_result** out) {
    return run_impl("check", request_json, out);
}
int circarma_solve(const char* request_json, circarma_result** out) {
    return run_impl("solve", request_json, out);
}
int circarma_cepstral_solve(const char* request_json, circarma_result** out) {
    return run_impl("cepstral-solve", request_json, out);
}
int circarma_block_solve(const char* request_json, circarma_result** out) {
    return run_impl("block-solve", request_json, out);
}
int circarma_extend(const char* request_json, circarma_result** out) {
    return run_impl("extend", request_json, out);
}
int circarma_factor(const char* request_json, circarma_result** out) {
    return run_impl("factor", request_json, out);
}
int circarma_simulate(const char* request_json, circarma_result** out) {
    return run_impl("simulate", request_json, out);
}
int circarma_sweep(const char* request_json, circarma_result** out) {
    return run_impl("sweep", request_json, out);
}

const char* circarma_result_json(const circarma_result* result) {
    return result ? result->json_body.c_str() : nullptr;
}

const char* circarma_result_csv(const circarma_result* result) {
    return result && result->has_csv ? result->csv.c_str() : nullptr;
}

void circarma_result_free(circarma_result* result) { delete result; }

const char* circarma_last_error(void) { return g_last_error.c_str(); }

void circarma_set_dense_cap(long cap) { circarma::set_dense_cap(cap); }

}  // extern "C"
