#ifndef CIRCARMA_JSON_IO_HPP
#define CIRCARMA_JSON_IO_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "circarma/cepstral.hpp"
#include "circarma/cones.hpp"
#include "circarma/grid.hpp"
#include "circarma/multivar.hpp"
#include "circarma/solver.hpp"

namespace circarma::io {

using nlohmann::json;

cplx complex_from_json(const json& j);
json complex_to_json(const cplx& z);

PseudoPolynomial pseudo_from_json(const json& j);
json pseudo_to_json(const PseudoPolynomial& p);

MatrixPseudoPolynomial matrix_pseudo_from_json(const json& j);
json matrix_pseudo_to_json(const MatrixPseudoPolynomial& q);

CovarianceData covariance_from_json(const json& j);
json covariance_to_json(const CovarianceData& c);

/// Result of one service command: a JSON body, an optional CSV payload, and
/// the process status (0 success, 1 domain failure).
struct CommandResult {
    json body;
    std::optional<std::string> csv;
    int status = 0;
};

/// Dispatch a request to one of: check, solve, cepstral-solve, block-solve,
/// extend, factor, simulate, sweep. Parse/contract violations throw
/// std::invalid_argument; numeric domain failures come back as status 1.
CommandResult run_command(const std::string& command, const json& request);

}  // namespace circarma::io

#endif
