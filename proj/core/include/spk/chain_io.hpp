#pragma once

#include "spk/chain.hpp"

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace spk {

/// {"n": int, "kernel": [[...]], "labels": [...]} with shortest round-trip doubles.
nlohmann::json chain_to_json(const MarkovChain& chain);
MarkovChain chain_from_json(const nlohmann::json& j, const ChainOptions& opts = {});

void write_chain_json(std::ostream& os, const MarkovChain& chain);
/// Throws ParseError on malformed text; validation errors keep their own codes.
MarkovChain read_chain_json(std::istream& is, const ChainOptions& opts = {});

/// Rows "src,dst,prob". Integer endpoints are state indices; anything else is a
/// label numbered in order of first appearance. A header row is skipped and
/// repeated pairs accumulate.
MarkovChain read_edge_list_csv(std::istream& is, const ChainOptions& opts = {});

/// Dispatches on the extension: ".csv" reads an edge list, anything else JSON.
/// "-" reads standard input as JSON.
MarkovChain load_chain(const std::string& path, const ChainOptions& opts = {});

}  // namespace spk
